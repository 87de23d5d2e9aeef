#include "kinex/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kinex/constants.hpp"
#include "kinex/errors.hpp"
#include "kinex/parallel.hpp"

namespace kinex {

void Segment::validate() const {
    if (!(length > 0.0)) throw ConfigError("segment: length must be > 0");
    if (!(l_geo >= 0.0)) throw ConfigError("segment: l_geo must be >= 0");
    if (!(c_shunt > 0.0)) throw ConfigError("segment: c_shunt must be > 0");
    material.validate();
    depairing.validate();
}

void VortexParams::validate() const {
    if (!(depinning_freq > 0.0) || !(flux_flow_scale > 0.0) || !(b_c2 > 0.0))
        throw ConfigError("vortex: depinning_freq, flux_flow_scale and b_c2 must be > 0");
}

void TlsParams::validate() const {
    if (!(tan_delta0 >= 0.0)) throw ConfigError("tls: tan_delta0 must be >= 0");
    if (!(omega_ref > 0.0)) throw ConfigError("tls: omega_ref must be > 0");
}

void DeviceModel::validate() const {
    if (segments.empty()) throw ConfigError("device: at least one segment required");
    if (!(z_ref > 0.0)) throw ConfigError("device: z_ref must be > 0");
    if (!(coupling_cap > 0.0)) throw ConfigError("device: coupling_cap must be > 0");
    for (const auto& s : segments) s.validate();
    vortex.validate();
    tls.validate();
}

double DeviceModel::depairing_current(double t) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : segments) best = std::min(best, idep_at_temperature(s.depairing, t));
    return best;
}

DeviceModel default_device() {
    DeviceModel dev;
    Segment s;
    s.length = 280.0;
    s.material = MaterialState::make(10.0, 400.0, 10.0, 100.0);
    // 32.47 uA at T = 0 puts I_dep(4 K) at 25 uA.
    s.depairing = {DepairingKind::gl_parametric, 0.3, 25.0 / std::pow(1.0 - 0.16, 1.5), 10.0};
    s.label = "pristine";
    dev.segments = {s};
    return dev;
}

cplx vortex_resistivity(const VortexParams& v, double b, double omega) {
    if (!(omega > 0.0)) throw DomainError("vortex_resistivity: omega must be > 0");
    if (!(b >= 0.0)) throw DomainError("vortex_resistivity: field must be >= 0");
    if (b >= v.b_c2) throw DomainError("vortex_resistivity: field at or above b_c2");
    if (b == 0.0) return {0.0, 0.0};
    const double rho_ff = v.flux_flow_scale * b;
    const double w0 = constants::omega_from_ghz(v.depinning_freq);
    return rho_ff / cplx(1.0, -w0 / omega);
}

LineParameters line_parameters(const Segment& seg, const BiasPoint& bias, double omega,
                               const LossOptions& loss, const ComplexConductivity* sigma,
                               int index) {
    const double t = bias.temperature;
    if (t >= seg.material.t_c || t >= seg.depairing.t_c) {
        std::ostringstream os;
        os << "segment " << index << ": temperature " << t << " K is not below T_c";
        throw DomainError(os.str(), index);
    }
    const double i_dep = idep_at_temperature(seg.depairing, t);
    const double i_norm = bias.current / i_dep;
    if (i_norm >= 1.0) {
        std::ostringstream os;
        os << "segment " << index << ": bias " << bias.current
           << " uA exceeds depairing current " << i_dep << " uA at " << t << " K";
        throw DomainError(os.str(), index);
    }
    const double lk = lk_ratio(seg.depairing, i_norm);
    const ComplexConductivity s = sigma ? *sigma : mb_conductivity(seg.material, omega, t);
    const double sq = seg.squares_per_length();
    const double l_sq = sheet_kinetic_inductance(seg.material, s);

    LineParameters p;
    p.inductance = seg.l_geo + sq * l_sq * lk;
    const double x = omega * p.inductance * 1e-12;
    // Current suppresses the superfluid response, sigma2 -> sigma2 / lk; the
    // depaired fraction 1 - 1/lk joins the normal fluid.
    const double s2 = s.sigma2_norm / lk;
    const double s1 = s.sigma1_norm + (loss.current_loss ? 1.0 - 1.0 / lk : 0.0);
    p.r_qp = sq * seg.material.r_sheet * s1 / (s2 * s2);
    // Ohm nm over the cross-section in nm^2 gives Ohm / nm.
    p.z_vortex = vortex_resistivity(loss.vortex, bias.field, omega) /
                 (seg.material.thickness * seg.material.width) * 1000.0;
    const double thermal =
        t > 0.0
            ? std::tanh(constants::photon_energy(constants::omega_from_ghz(loss.tls.omega_ref)) /
                        (2.0 * constants::k_b * t))
            : 1.0;
    p.r_tls = loss.tls.tan_delta0 * thermal * x;
    p.z_series = cplx(p.r_qp + p.r_tls, x) + p.z_vortex;
    p.y_shunt = cplx(0.0, omega * seg.c_shunt * 1e-15);
    return p;
}

Abcd abcd_line(cplx gamma, cplx z_char, double length) {
    if (!(length >= 0.0)) throw ArgumentError("abcd_line: negative length");
    if (length == 0.0) return {};
    const cplx gl = gamma * length;
    const cplx ch = std::cosh(gl), sh = std::sinh(gl);
    return {ch, z_char * sh, sh / z_char, ch};
}

Abcd abcd_series_capacitor(double c, double omega) {
    if (!(c > 0.0) || !(omega > 0.0))
        throw ArgumentError("abcd_series_capacitor: c and omega must be > 0");
    return {1.0, 1.0 / cplx(0.0, omega * c * 1e-15), 0.0, 1.0};
}

Abcd cascade(const std::vector<Abcd>& matrices) {
    if (matrices.empty()) throw ArgumentError("cascade: empty list");
    Abcd out = matrices.front();
    for (std::size_t k = 1; k < matrices.size(); ++k) out = out * matrices[k];
    return out;
}

SParams abcd_to_s(const Abcd& m, double z_ref) {
    if (!(z_ref > 0.0)) throw ArgumentError("abcd_to_s: z_ref must be > 0");
    const cplx bz = m.b / z_ref, cz = m.c * z_ref;
    const cplx den = m.a + bz + cz + m.d;
    if (!std::isfinite(std::abs(den)) || std::abs(den) == 0.0)
        throw NumericalError("abcd_to_s: singular denominator");
    return {(m.a + bz - cz - m.d) / den, 2.0 * m.det() / den, 2.0 / den,
            (-m.a + bz - cz + m.d) / den};
}

// ---------------------------------------------------------------------------

struct ConductivityCache::Interpolant {
    double u_lo = 0, u_hi = 0;  // log omega bounds
    std::vector<double> nodes, weights, sigma1, omega_sigma2;
    bool direct = false;

    ComplexConductivity eval(const MaterialState& m, double t, double omega) const {
        if (direct) return mb_conductivity(m, omega, t);
        const double x = (2.0 * std::log(omega) - u_lo - u_hi) / (u_hi - u_lo);
        double num1 = 0, num2 = 0, den = 0;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const double dx = x - nodes[k];
            if (dx == 0.0) return {sigma1[k], omega_sigma2[k] / omega, omega, t};
            const double c = weights[k] / dx;
            num1 += c * sigma1[k];
            num2 += c * omega_sigma2[k];
            den += c;
        }
        return {num1 / den, num2 / den / omega, omega, t};
    }
};

namespace {

std::shared_ptr<ConductivityCache::Interpolant> build_interpolant(const MaterialState& m,
                                                                  double t, double lo,
                                                                  double hi) {
    auto ip = std::make_shared<ConductivityCache::Interpolant>();
    ip->u_lo = std::log(lo);
    ip->u_hi = std::log(hi);
    auto omega_at = [&](double x) {
        return std::exp(0.5 * (ip->u_lo + ip->u_hi) + 0.5 * (ip->u_hi - ip->u_lo) * x);
    };
    for (std::size_t n = 12; n <= 96; n *= 2) {
        ip->nodes.resize(n);
        ip->weights.resize(n);
        ip->sigma1.resize(n);
        ip->omega_sigma2.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double th = constants::pi * (2.0 * k + 1.0) / (2.0 * n);
            ip->nodes[k] = std::cos(th);
            ip->weights[k] = (k % 2 ? -1.0 : 1.0) * std::sin(th);
            const double w = omega_at(ip->nodes[k]);
            const auto s = mb_conductivity(m, w, t);
            ip->sigma1[k] = s.sigma1_norm;
            ip->omega_sigma2[k] = s.sigma2_norm * w;
        }
        // Accept once the interpolant agrees with direct quadrature between nodes.
        bool ok = true;
        for (double x : {-0.93, -0.31, 0.47, 0.97}) {
            const double w = omega_at(x);
            const auto exact = mb_conductivity(m, w, t);
            const auto approx = ip->eval(m, t, w);
            const double scale = std::abs(exact.sigma1_norm) + std::abs(exact.sigma2_norm);
            if (std::abs(approx.sigma1_norm - exact.sigma1_norm) > 1e-9 * scale ||
                std::abs(approx.sigma2_norm - exact.sigma2_norm) > 1e-9 * scale) {
                ok = false;
                break;
            }
        }
        if (ok) return ip;
    }
    ip->direct = true;
    return ip;
}

}  // namespace

ComplexConductivity ConductivityCache::get(const MaterialState& m, double t, double omega,
                                           double omega_lo, double omega_hi) {
    if (!(omega_hi > omega_lo) || t >= m.t_c) return mb_conductivity(m, omega, t);
    const Key key{m.t_c, m.delta0, m.gamma_ratio, m.r_sheet, m.thickness, m.width,
                  t, omega_lo, omega_hi};
    std::shared_ptr<const Interpolant> ip;
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = table_.find(key);
        if (it != table_.end()) ip = it->second;
    }
    if (!ip) {
        auto built = build_interpolant(m, t, omega_lo, omega_hi);
        std::lock_guard<std::mutex> lock(mu_);
        ip = table_.emplace(key, std::move(built)).first->second;
    }
    return ip->eval(m, t, omega);
}

std::size_t ConductivityCache::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return table_.size();
}

SweepRecord simulate_s21(const DeviceModel& dev, const BiasPoint& bias,
                         const std::vector<double>& freqs_ghz, const SimulateOptions& opts) {
    dev.validate();
    bias.validate();
    if (freqs_ghz.empty()) throw ArgumentError("simulate_s21: empty frequency grid");
    for (std::size_t k = 0; k < freqs_ghz.size(); ++k)
        if (!(freqs_ghz[k] > 0.0) || (k > 0 && !(freqs_ghz[k] > freqs_ghz[k - 1])))
            throw ArgumentError("simulate_s21: frequencies must be positive and strictly increasing");
    // Domain checks up front so the failing segment is reported once.
    const double w_lo = constants::omega_from_ghz(freqs_ghz.front());
    const double w_hi = constants::omega_from_ghz(freqs_ghz.back());
    const LossOptions loss{dev.vortex, dev.tls, dev.current_loss};
    for (std::size_t s = 0; s < dev.segments.size(); ++s) {
        const ComplexConductivity probe{1.0, 1.0, w_lo, bias.temperature};
        line_parameters(dev.segments[s], bias, w_lo, loss, &probe, static_cast<int>(s));
    }

    const std::size_t n = freqs_ghz.size();
    SweepRecord rec;
    rec.freqs = freqs_ghz;
    rec.s21.resize(n);
    rec.bias = bias;
    rec.meta = SweepSource::simulated;
    std::vector<cplx> s11(n), s12(n), s22(n);

    parallel_for(n, [&](std::size_t k) {
        const double w = constants::omega_from_ghz(freqs_ghz[k]);
        Abcd total = abcd_series_capacitor(dev.coupling_cap, w);
        for (std::size_t s = 0; s < dev.segments.size(); ++s) {
            const Segment& seg = dev.segments[s];
            const ComplexConductivity sigma =
                opts.cache ? opts.cache->get(seg.material, bias.temperature, w, w_lo, w_hi)
                           : mb_conductivity(seg.material, w, bias.temperature);
            const LineParameters p =
                line_parameters(seg, bias, w, loss, &sigma, static_cast<int>(s));
            const cplx gamma = std::sqrt(p.z_series * p.y_shunt);
            const cplx zc = std::sqrt(p.z_series / p.y_shunt);
            total = total * abcd_line(gamma, zc, seg.length);
        }
        total = total * abcd_series_capacitor(dev.coupling_cap, w);
        const SParams sp = abcd_to_s(total, dev.z_ref);
        rec.s21[k] = sp.s21;
        s11[k] = sp.s11;
        s12[k] = sp.s12;
        s22[k] = sp.s22;
    });
    if (opts.full_s) {
        rec.s11 = std::move(s11);
        rec.s12 = std::move(s12);
        rec.s22 = std::move(s22);
    }
    return rec;
}

}  // namespace kinex
