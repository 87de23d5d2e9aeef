#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "kinex/depairing.hpp"
#include "kinex/material.hpp"
#include "kinex/sweep.hpp"

namespace kinex {

using cplx = std::complex<double>;

/// One homogeneous stretch of nanowire treated as a distributed line.
struct Segment {
    double length = 280.0;  // um
    MaterialState material;
    DepairingModel depairing;
    double fluence = 0.0;   // ions / nm^2, metadata only
    double l_geo = 0.4;     // pH / um
    double c_shunt = 0.1;   // fF / um
    std::string label;

    /// Squares per micron of wire, 1 / width.
    double squares_per_length() const { return 1000.0 / material.width; }
    void validate() const;
};

struct VortexParams {
    double depinning_freq = 30.0;   // GHz
    double flux_flow_scale = 1.0;   // Ohm nm per tesla
    double b_c2 = 15.0;             // T

    void validate() const;
};

struct TlsParams {
    double tan_delta0 = 0.0;
    double omega_ref = 7.0;  // GHz; sets the photon energy in the thermal saturation factor

    void validate() const;
};

struct DeviceModel {
    std::vector<Segment> segments;
    double coupling_cap = 2.0;  // fF, each port
    double z_ref = 50.0;        // Ohm
    VortexParams vortex;
    TlsParams tls;
    /// Dissipation of the current-depaired fraction 1 - 1/lk (two-fluid picture).
    bool current_loss = true;

    void validate() const;
    /// Smallest segment depairing current at temperature t [uA].
    double depairing_current(double t) const;
};

/// Shipped single-segment device resonating near 7 GHz at 4 K.
DeviceModel default_device();

/// Per-micron line constants at one frequency.
struct LineParameters {
    cplx z_series;          // Ohm / um
    cplx y_shunt;           // S / um
    double inductance = 0;  // pH / um, geometric plus kinetic
    double r_qp = 0;        // Ohm / um, thermal quasiparticles plus depaired fraction
    cplx z_vortex;          // Ohm / um
    double r_tls = 0;       // Ohm / um
};

/// Complex vortex resistivity [Ohm nm] of a pinned vortex lattice in the Gittleman-Rosenblum form.
cplx vortex_resistivity(const VortexParams& v, double b, double omega);

struct LossOptions {
    VortexParams vortex;
    TlsParams tls;
    bool current_loss = true;
};

/// Line constants of `seg`; `sigma` may supply a precomputed conductivity at (omega, T).
/// `index` only labels DomainErrors.
LineParameters line_parameters(const Segment& seg, const BiasPoint& bias, double omega,
                               const LossOptions& loss = {},
                               const ComplexConductivity* sigma = nullptr, int index = -1);

struct Abcd {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

    cplx det() const { return a * d - b * c; }
    Abcd operator*(const Abcd& r) const {
        return {a * r.a + b * r.c, a * r.b + b * r.d, c * r.a + d * r.c, c * r.b + d * r.d};
    }
};

struct SParams {
    cplx s11, s12, s21, s22;
};

/// gamma [1/um], z_char [Ohm], length [um].
Abcd abcd_line(cplx gamma, cplx z_char, double length);
/// c [fF], omega [rad/s].
Abcd abcd_series_capacitor(double c, double omega);
Abcd cascade(const std::vector<Abcd>& matrices);
SParams abcd_to_s(const Abcd& m, double z_ref);

/// Memoizes Mattis-Bardeen conductivities, which do not depend on bias current.
/// For each (material, temperature, band) it stores a Chebyshev interpolant in
/// log omega whose accuracy is checked against direct quadrature before use.
class ConductivityCache {
public:
    ComplexConductivity get(const MaterialState& m, double t, double omega, double omega_lo,
                            double omega_hi);
    std::size_t size() const;

    struct Interpolant;

private:
    using Key = std::tuple<double, double, double, double, double, double, double, double, double>;
    mutable std::mutex mu_;
    std::map<Key, std::shared_ptr<const Interpolant>> table_;
};

struct SimulateOptions {
    /// When null, every frequency point is evaluated by direct quadrature.
    ConductivityCache* cache = nullptr;
    bool full_s = false;  // also store S11, S12, S22
};

SweepRecord simulate_s21(const DeviceModel& dev, const BiasPoint& bias,
                         const std::vector<double>& freqs_ghz, const SimulateOptions& opts = {});

}  // namespace kinex
