#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "kinex/sweep.hpp"

namespace kinex {

enum class FitMethod { magnitude, phase };
std::string to_string(FitMethod m);

struct ResonanceFit {
    double f0 = 0.0;            // GHz
    double q_total = 0.0;
    double amplitude = 0.0;     // |a| of the resonant term
    double phase_slope = 0.0;   // rad / GHz at f0
    double rms_residual = 0.0;  // normalized by max |S21| in the window
    FitMethod method = FitMethod::magnitude;
    double f0_sigma = 0.0;
    double q_sigma = 0.0;
    int iterations = 0;
};

/// Frequency span around one candidate peak; indices are inclusive.
struct PeakWindow {
    std::size_t i_lo = 0, i_hi = 0, i_peak = 0;
    double f_lo = 0, f_hi = 0, f_peak = 0;
    double fwhm = 0;        // GHz, linewidth estimate
    double prominence = 0;  // relative to peak height
};

/// Local maxima of |S21| whose prominence relative to their height is at
/// least `min_prominence`, each with a window of +-5 linewidths clipped at
/// neighbouring valleys. Peaks must also rise six noise deviations above
/// their base, the noise estimated from second differences of |S21|.
/// Sorted by frequency.
std::vector<PeakWindow> find_peaks(const SweepRecord& sweep, double min_prominence = 0.05);

struct FitOptions {
    double damping_threshold = 0.05;  // magnitude contrast below which the phase method is used
    double rel_tol = 1e-9;
    int max_iterations = 200;
    bool robust = false;              // soft-L1 residual weighting
};

/// Fits S(f) = a / (1 + 2iQ (f - f0)/f0) + b0 + b1 (f - f_c) over the window.
ResonanceFit fit_resonance(const SweepRecord& sweep, const PeakWindow& window,
                           const FitOptions& opts = {});

/// Model evaluation, exposed for synthetic data and tests.
std::complex<double> resonance_model(double f, double f0, double q, std::complex<double> a,
                                     std::complex<double> b0, std::complex<double> b1,
                                     double f_c);

/// Windows found by find_peaks, each fitted. Peaks that fail to fit are skipped
/// and described in `diagnostics` when given.
std::vector<ResonanceFit> fit_all(const SweepRecord& sweep, double min_prominence = 0.05,
                                  const FitOptions& opts = {},
                                  std::vector<std::string>* diagnostics = nullptr);

struct BranchTrack {
    std::string branch_id;
    std::vector<std::pair<BiasPoint, ResonanceFit>> points;
    std::optional<BiasPoint> merged_from;
    std::string merged_into;  // survivor label when this branch was absorbed
};

struct TrackOptions {
    double linewidths = 3.0;       // continuity threshold in linewidths
    double relative_f0 = 0.02;     // or this fraction of f0, whichever is larger
    double merge_linewidths = 1.0;
};

std::vector<BranchTrack> track_branches(
    const std::vector<std::pair<BiasPoint, std::vector<ResonanceFit>>>& fits,
    const TrackOptions& opts = {});

struct DeltaFSeries {
    std::vector<std::pair<BiasPoint, double>> points;  // GHz
    std::vector<std::string> diagnostics;
};

/// f_hi - f_lo at every bias where both branches have a point.
DeltaFSeries delta_f_meas(const std::vector<BranchTrack>& tracks);

}  // namespace kinex
