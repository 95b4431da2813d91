#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pushsim/numeric.hpp"

namespace pushsim {

namespace detail {
template <class Real>
inline void require_unit_interval(Real x, const char* who) {
    if (!(x >= Real(0) && x <= Real(1)))
        throw std::domain_error(std::string(who) + ": argument outside [0,1]");
}
} // namespace detail

/// One-round mean-field map of the informed fraction: x -> 1 - e^{-x}(1-x).
/// Evaluated as x - expm1(-x)*(1-x), which adds two nonnegative quantities
/// for x in [0,1] and is free of cancellation (naive 1-e^{-x}(1-x) loses
/// half the digits near 0, where the map behaves like 2x - 1.5x^2).
template <class Real>
inline Real informed_map(Real x) {
    detail::require_unit_interval(x, "informed_map");
    return x - std::expm1(-x) * (Real(1) - x);
}

/// One-round mean-field map of the uninformed fraction: x -> x e^{x-1}.
/// Satisfies uninformed_map(x) == 1 - informed_map(1-x).
template <class Real>
inline Real uninformed_map(Real x) {
    detail::require_unit_interval(x, "uninformed_map");
    return x * std::exp(x - Real(1));
}

/// Deterministic informed-fraction trajectory values[t] = F^(t)(start).
struct MeanFieldTrajectory {
    double start_fraction = 0.0;
    std::vector<double> values; // values[0] == start_fraction

    std::size_t length() const { return values.size(); }
};

/// Trajectory of the first `iterations` iterates of the informed map.
inline MeanFieldTrajectory iterate_informed(double x, std::uint32_t iterations) {
    detail::require_unit_interval(x, "iterate_informed");
    MeanFieldTrajectory traj;
    traj.start_fraction = x;
    traj.values.reserve(iterations + 1);
    traj.values.push_back(x);
    double v = x;
    for (std::uint32_t t = 0; t < iterations; ++t) {
        v = informed_map(v);
        traj.values.push_back(v);
    }
    return traj;
}

/// Uninformed-map iterates values[j] = G^(j)(start); dual of the above.
struct GIterateSequence {
    double start = 0.0;
    std::vector<double> values;
};

inline GIterateSequence iterate_uninformed(double x, std::uint32_t iterations) {
    detail::require_unit_interval(x, "iterate_uninformed");
    GIterateSequence seq;
    seq.start = x;
    seq.values.reserve(iterations + 1);
    seq.values.push_back(x);
    double v = x;
    for (std::uint32_t j = 0; j < iterations; ++j) {
        v = uninformed_map(v);
        seq.values.push_back(v);
    }
    return seq;
}

/// Analytic bracket for the i-th informed-map iterate:
///   2^i x (1 - 2^i x - 2^{2i} x^2)  <=  F^(i)(x)  <=  2^i x,
/// lower clamped at 0 and upper at 1 (the raw formulas leave [0,1] outside
/// their hypothesis range).
struct IterateBounds {
    double lower = 0.0;
    double upper = 0.0;
};

inline IterateBounds informed_iterate_bounds(double x, std::uint32_t i) {
    detail::require_unit_interval(x, "informed_iterate_bounds");
    const double p = std::ldexp(x, static_cast<int>(i));          // 2^i x
    const double p2 = std::ldexp(x, static_cast<int>(2 * i)) * x; // 2^{2i} x^2
    IterateBounds b;
    b.lower = std::max(0.0, p * (1.0 - p - p2));
    b.upper = std::min(1.0, p);
    return b;
}

/// Exact conditional expectation of the informed count after one round of
/// push on the complete graph: E[|I_{t+1}| given |I_t| = i] for n nodes,
///   n - (n-i)(1 - 1/(n-1))^i.
/// Lies in [informed_map(i/n)*n, informed_map(i/n)*n + 5].
inline double expected_next_informed(std::uint64_t n, std::uint64_t i) {
    if (n < 2) throw std::invalid_argument("expected_next_informed: n < 2");
    if (i < 1 || i > n) throw std::invalid_argument("expected_next_informed: i outside [1,n]");
    const double nn = static_cast<double>(n);
    const double ii = static_cast<double>(i);
    // (1 - 1/(n-1))^i via exp(i*log1p(-1/(n-1))) keeps full precision for
    // large n where repeated multiplication would drift.
    const double logq = std::log1p(-1.0 / (nn - 1.0));
    return nn - (nn - ii) * std::exp(ii * logq);
}

} // namespace pushsim
