#include "kinex/sweep.hpp"

#include <cmath>

#include "kinex/errors.hpp"

namespace kinex {

void BiasPoint::validate() const {
    if (!(current >= 0.0)) throw DomainError("bias: current must be >= 0");
    if (!(temperature >= 0.0)) throw DomainError("bias: temperature must be >= 0");
    if (!(field >= 0.0)) throw DomainError("bias: field must be >= 0");
}

std::string to_string(SweepSource s) {
    return s == SweepSource::simulated ? "simulated" : "measured";
}

void SweepRecord::validate() const {
    if (freqs.size() != s21.size())
        throw ArgumentError("sweep: freqs and s21 have different lengths");
    for (auto* opt : {&s11, &s12, &s22})
        if (opt->has_value() && (*opt)->size() != freqs.size())
            throw ArgumentError("sweep: optional S-parameter length mismatch");
    for (std::size_t k = 1; k < freqs.size(); ++k)
        if (!(freqs[k] > freqs[k - 1]))
            throw ArgumentError("sweep: frequencies must be strictly ascending");
}

std::vector<double> linear_grid(double start, double stop, int points) {
    if (points < 2 || !(stop > start)) throw ArgumentError("linear_grid: need points >= 2 and stop > start");
    std::vector<double> g(static_cast<std::size_t>(points));
    const double step = (stop - start) / (points - 1);
    for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = start + step * k;
    g.back() = stop;
    return g;
}

}  // namespace kinex
