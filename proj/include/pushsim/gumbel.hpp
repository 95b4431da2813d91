#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pushsim/numeric.hpp"

namespace pushsim {

/// Continuous Gumbel law with CDF exp(-exp(-x-alpha)). Gum(euler_gamma)
/// has mean zero.
struct ContinuousGumbel {
    double alpha = 0.0;

    double cdf(double x) const;
    /// 1 - cdf(x), accurate in the right tail.
    double survival(double x) const;
    /// ln cdf(x) = -exp(-x-alpha); carries both tails without saturation.
    double log_cdf(double x) const;
    /// Inverse CDF; requires 0 < u < 1.
    double quantile(double u) const;
    /// Inverse of the survival function; requires 0 < s < 1. Recovers
    /// right-tail quantiles that the saturated CDF cannot represent.
    double quantile_from_survival(double s) const;
    /// Inverse of log_cdf; requires l < 0.
    double quantile_from_log_cdf(double l) const;
};

/// Inverse-transform sample: quantile(u) for u in (0,1).
double gumbel_sample(const ContinuousGumbel& dist, double u);

/// Integer-supported law with CDF exp(-exp(-k-alpha)) at integers k.
/// Equal in distribution to ceil(G - alpha) for G continuous standard
/// Gumbel; pmf(k) = exp(-exp(-k-alpha)) - exp(-exp(-k-alpha+1)).
struct DiscreteGumbel {
    double alpha = 0.0;

    double cdf(std::int64_t k) const;
    double survival(std::int64_t k) const; // P[X >= k]
    double pmf(std::int64_t k) const;
};

/// k-th moment of DiscreteGumbel(alpha), 1 <= k <= 8, by two-sided
/// truncated summation with compensated accumulation. The truncation
/// window is grown until explicit tail majorants (double-exponential on
/// the left, exponential with ratio <= e^{-1/2} on the right) fall below
/// tol. Throws std::runtime_error with the achieved bound when tol is
/// below the double-precision floor of the sum.
double discrete_gumbel_moment(double alpha, unsigned k, double tol);

/// Expectation offset surface: E[dGum(-x-y-c)] - x - y for x,y in [0,1).
/// This is the constant-order term of the expected runtime beyond
/// log2 n + ln n along subsequences with {log2 n} -> x, {ln n} -> y.
double expectation_offset(double x, double y, double c_val, double tol);

/// Limiting runtime variance as a function of (x, y): second moment minus
/// squared first moment of dGum(-x-y-c).
double runtime_variance(double x, double y, double c_val, double tol);

/// Predicted law of the runtime at finite n: ceil(G + s) with G standard
/// Gumbel of location euler_gamma and shift s = log2 n + ln n + gamma + c.
struct ShiftedCeilGumbel {
    std::uint64_t n = 0;
    double shift = 0.0;

    double cdf(std::int64_t k) const;      // P[X <= k]
    double survival(std::int64_t k) const; // P[X >= k]
    double pmf(std::int64_t k) const;
    /// Integer window outside which both tails are below `mass`.
    void support(double mass, std::int64_t& lo, std::int64_t& hi) const;
};

/// Builds the predicted law; c_val must be c({log2 n}).
ShiftedCeilGumbel predicted_runtime(std::uint64_t n, double c_val);

enum class SurfaceKind { Expectation, Variance };

struct SurfaceTable {
    SurfaceKind kind = SurfaceKind::Expectation;
    std::uint32_t resolution = 0;
    double tol = 0.0;
    std::vector<double> xs; // cell centres (i+1/2)/resolution
    std::vector<double> ys;
    std::vector<double> z; // row-major, z[i*resolution + j] at (xs[i], ys[j])

    double min_z() const;
    double max_z() const;
};

/// resolution x resolution tabulation over [0,1)^2 at cell centres (x = 0
/// and x = 1 are the same point of the torus, so the grid is offset by a
/// half step). Correction values are evaluated once per row; generation is
/// OpenMP-parallel with bit-identical sequential results.
SurfaceTable tabulate_surface(SurfaceKind kind, std::uint32_t resolution,
                              double tol, Backend backend = Backend::Extended);

} // namespace pushsim
