#pragma once

#include <string>
#include <vector>

#include "kinex/counts.hpp"
#include "kinex/pipeline.hpp"
#include "kinex/resfit.hpp"

namespace kinex::io {

/// Fits at one bias point, as produced by fit_all.
struct BiasFits {
    BiasPoint bias;
    std::vector<ResonanceFit> fits;
};

/// DCR curve and onset at one temperature.
struct CountsCurve {
    double temperature = 0.0;
    RateCurve rates;
    double onset = 0.0;        // uA; NaN when the threshold is never reached
    double onset_width = 0.0;  // uA
};

/// Values in CSV cells use 12 significant digits; JSON keeps full precision
/// so that a read-back reproduces every double.
std::string format_number(double v);

// CSV. Each writer emits its header even for empty input.
std::string sweeps_csv(const std::vector<SweepRecord>& sweeps);
std::string fits_csv(const std::vector<BiasFits>& fits);
std::string tracks_csv(const std::vector<BranchTrack>& tracks);
std::string lk_curves_csv(const std::vector<LkCurve>& curves);
std::string depairing_csv(const std::vector<DepairingFit>& fits);
std::string delta_f_csv(const std::vector<std::pair<double, DeltaFSeries>>& series);  // keyed by T
std::string counts_csv(const std::vector<CountsCurve>& curves);
std::string ordering_csv(const std::vector<OrderingReport>& reports);

// JSON writers and their inverses.
std::string to_json(const std::vector<SweepRecord>& v);
std::string to_json(const std::vector<BiasFits>& v);
std::string to_json(const std::vector<BranchTrack>& v);
std::string to_json(const std::vector<LkCurve>& v);
std::string to_json(const std::vector<DepairingFit>& v);
std::string to_json(const std::vector<std::pair<double, DeltaFSeries>>& v);
std::string to_json(const std::vector<CountsCurve>& v);
std::string to_json(const std::vector<OrderingReport>& v);

std::vector<SweepRecord> sweeps_from_json(const std::string& text);
std::vector<BiasFits> fits_from_json(const std::string& text);
std::vector<BranchTrack> tracks_from_json(const std::string& text);
std::vector<LkCurve> lk_curves_from_json(const std::string& text);
std::vector<DepairingFit> depairing_from_json(const std::string& text);
std::vector<std::pair<double, DeltaFSeries>> delta_f_from_json(const std::string& text);
std::vector<CountsCurve> counts_from_json(const std::string& text);
std::vector<OrderingReport> ordering_from_json(const std::string& text);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace kinex::io
