#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pushsim/gumbel.hpp"
#include "pushsim/simulator.hpp"

namespace pushsim {

/// Fractional parts {log2 n} and {ln n}, computed in extended precision so
/// the subtraction n-floor does not eat the low digits for large n.
double frac_log2(std::uint64_t n);
double frac_ln(std::uint64_t n);

/// sup over integers k of |P_emp[X >= k] - P_pred[X >= k]|, scanned over
/// the union of both supports extended by 10 integers on each side.
double sup_cdf_distance(const EmpiricalDistribution& emp,
                        const ShiftedCeilGumbel& pred);

/// Same metric between two arbitrary integer survival functions on a
/// caller-provided window.
double sup_cdf_distance_window(const std::function<double(std::int64_t)>& surv_a,
                               const std::function<double(std::int64_t)>& surv_b,
                               std::int64_t k_lo, std::int64_t k_hi);

/// Two-sample sup-CDF distance between integer samples.
double two_sample_sup_cdf(const std::vector<std::uint32_t>& a,
                          const std::vector<std::uint32_t>& b);

/// Kolmogorov-Smirnov statistic of a continuous sample against a CDF.
double ks_distance_continuous(std::vector<double> sample,
                              const std::function<double(double)>& cdf);

struct PermutationTestResult {
    double observed = 0.0;
    double threshold_999 = 0.0; // 99.9% quantile of the permutation null
    double p_value = 0.0;
    std::uint32_t permutations = 0;
};

/// Permutation null for the two-sample sup-CDF distance: pool both samples,
/// re-split uniformly `permutations` times (partial Fisher-Yates, exact),
/// and read off the 99.9% quantile. OpenMP-parallel, deterministic in
/// (samples, seed).
PermutationTestResult permutation_sup_cdf_test(const std::vector<std::uint32_t>& a,
                                               const std::vector<std::uint32_t>& b,
                                               std::uint32_t permutations,
                                               std::uint64_t seed);

/// Empirical k-th moment of X - floor(log2 n) - floor(ln n) minus the
/// predicted moment of dGum(-x-y-c); x,y default to the fractional parts
/// of the ensemble's n.
double moment_delta(const EmpiricalDistribution& emp, double x, double y,
                    double c_val, unsigned k, double tol = 1e-10);

/// All n <= n_max whose fractional parts {log2 n}, {ln n} are within tol of
/// (x, y) in circle distance, ascending. Empty result is a valid return.
std::vector<std::uint64_t> find_matching_n(double x, double y, double tol,
                                           std::uint64_t n_max);

/// sum_{i=a}^{b} 1/i with compensated summation.
double harmonic_partial(std::uint64_t a, std::uint64_t b);

struct BracketCheck {
    std::string name;
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool pass = false;
    /// distance to the nearer violated edge (negative when failing)
    double margin = 0.0;
};

struct ComparisonReport {
    std::uint64_t n = 0;
    std::uint64_t trials = 0;
    Sampler sampler = Sampler::Batch;
    std::uint64_t master_seed = 0;
    double x = 0.0; // {log2 n}
    double y = 0.0; // {ln n}
    double c_value = 0.0;
    double shift = 0.0;
    double sup_distance = 0.0;
    double sup_budget = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double mean_se = 0.0;
    double variance_se = 0.0;
    double moment_delta_1 = 0.0;
    double moment_delta_2 = 0.0;
    std::vector<BracketCheck> checks;

    bool passed() const;
};

/// Runs the full simulation-versus-prediction comparison: sup-CDF distance
/// against the predicted law, the expectation bracket through the offset
/// surface, the coarse floor/ceil expectation bracket, and the variance
/// bracket, each widened by 4 standard errors where sampling noise enters.
ComparisonReport compare_ensemble(const EmpiricalDistribution& emp,
                                  Sampler sampler, std::uint64_t master_seed,
                                  double c_val, double sup_budget);

} // namespace pushsim
