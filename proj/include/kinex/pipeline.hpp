#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kinex/depairing.hpp"
#include "kinex/resfit.hpp"
#include "kinex/sweep.hpp"

namespace kinex {

/// Normalized kinetic inductance L_k(I, T) / L_k(0, T) from resonance frequencies.
struct LkCurve {
    std::string branch_id;
    double temperature = 0.0;                        // K
    std::vector<std::pair<double, double>> points;   // (uA, ratio)
    double f0_zero_bias = 0.0;                       // GHz
    bool extrapolated = false;                       // zero-bias f0 not measured
};

/// ratio = (f0_zero / f0)^2. Without `f0_zero` the I = 0 sample is used, or
/// f0(0) is extrapolated from a quadratic through the three lowest biases.
LkCurve lk_curve_from_f0(const std::vector<std::pair<double, double>>& f0_series,
                         std::optional<double> f0_zero = std::nullopt, double temperature = 0.0);

/// Anchor for I_dep in quadratic fits, where C and I_dep enter only as C / I_dep^2.
struct IdepReference {
    double value = 0.0;  // uA
    double sigma = 0.0;  // uA; zero pins I_dep to `value`
};

struct DepairingFitOptions {
    double i_norm_max = 0.7;
    double min_coverage = 0.3;
    std::size_t min_points = 5;
    std::optional<IdepReference> idep_reference;
};

struct CurveFit {
    DepairingKind kind = DepairingKind::gl_parametric;
    double c_coeff = 0.0, c_sigma = 0.0;
    double i_dep = 0.0, i_dep_sigma = 0.0;   // uA
    double rms = 0.0;
    std::size_t points_used = 0;
    int iterations = 0;
    std::vector<std::string> warnings;
};

CurveFit fit_depairing(const LkCurve& curve, DepairingKind kind,
                       const DepairingFitOptions& opts = {});

struct IdepPoint {
    double temperature = 0.0;
    double i_dep = 0.0, i_dep_sigma = 0.0;
    double c_coeff = 0.0, c_sigma = 0.0;
    double rms = 0.0;
    std::size_t points_used = 0;
};

struct DepairingFit {
    std::string branch_id;
    double c_coeff = 0.0, c_sigma = 0.0;
    std::vector<IdepPoint> idep_by_t;  // ascending T
    double gamma_ratio = 0.0;          // NaN when C is outside the calibration range
    double fit_rms = 0.0;
    DepairingKind model_kind = DepairingKind::gl_parametric;
};

struct PipelineOptions {
    DepairingKind model = DepairingKind::gl_parametric;
    DepairingFitOptions fit;
    double min_prominence = 0.05;
    FitOptions resfit;
    TrackOptions tracking;
    CalibrationTable calib;
    /// Per-temperature I_dep anchors for quadratic fits; `reference_model`
    /// supplies them through idep_at_temperature when set instead.
    std::map<double, IdepReference> idep_reference_by_t;
    std::optional<DepairingModel> reference_model;
    double reference_sigma = 0.0;
    /// Fit one i_dep0 across temperatures with the (1 - t^2)^(3/2) form.
    bool global_fit = false;
    double global_t_c = 0.0;
};

struct TemperatureSlice {
    double temperature = 0.0;
    double field = 0.0;
    std::vector<std::pair<BiasPoint, std::vector<ResonanceFit>>> fits;
    std::vector<BranchTrack> tracks;
    DeltaFSeries delta_f;
};

struct PipelineResult {
    std::vector<DepairingFit> fits;          // ordered by branch, then T
    std::vector<LkCurve> curves;
    std::vector<TemperatureSlice> slices;    // ascending T
    std::vector<std::string> diagnostics;
};

/// Fit, track and extract over a (current x temperature) grid of sweeps.
PipelineResult idep_vs_temperature(const std::vector<SweepRecord>& sweeps,
                                   const PipelineOptions& opts = {});

/// Resonance fitting and branch tracking only, one slice per (T, B).
std::vector<TemperatureSlice> track_sweeps(const std::vector<SweepRecord>& sweeps,
                                           const PipelineOptions& opts,
                                           std::vector<std::string>* diagnostics = nullptr);

}  // namespace kinex
