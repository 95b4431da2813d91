#include "pushsim/validation.hpp"

#include <algorithm>
#include <cmath>

#include "pushsim/numeric.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pushsim {

double frac_log2(std::uint64_t n) {
    if (n < 1) throw std::invalid_argument("frac_log2: n must be >= 1");
    const long double lg = std::log2(static_cast<long double>(n));
    long double f = lg - std::floor(lg);
    if (f >= 1.0L) f = 0.0L;
    return static_cast<double>(f);
}

double frac_ln(std::uint64_t n) {
    if (n < 1) throw std::invalid_argument("frac_ln: n must be >= 1");
    const long double ln = std::log(static_cast<long double>(n));
    long double f = ln - std::floor(ln);
    if (f >= 1.0L) f = 0.0L;
    return static_cast<double>(f);
}

double sup_cdf_distance_window(const std::function<double(std::int64_t)>& surv_a,
                               const std::function<double(std::int64_t)>& surv_b,
                               std::int64_t k_lo, std::int64_t k_hi) {
    double sup = 0.0;
    for (std::int64_t k = k_lo; k <= k_hi; ++k)
        sup = std::max(sup, std::abs(surv_a(k) - surv_b(k)));
    return sup;
}

double sup_cdf_distance(const EmpiricalDistribution& emp,
                        const ShiftedCeilGumbel& pred) {
    if (emp.trials < 1) throw std::invalid_argument("sup_cdf_distance: empty ensemble");
    std::int64_t plo, phi;
    pred.support(1e-15, plo, phi);
    const std::int64_t k_lo = std::min(emp.min_value(), plo) - 10;
    const std::int64_t k_hi = std::max(emp.max_value(), phi) + 10;
    return sup_cdf_distance_window(
        [&](std::int64_t k) { return emp.survival(k); },
        [&](std::int64_t k) { return pred.survival(k); }, k_lo, k_hi);
}

namespace {

struct IntHistogram {
    std::uint32_t lo = 0;
    std::vector<std::uint64_t> bins;

    static IntHistogram over(const std::vector<std::uint32_t>& a,
                             const std::vector<std::uint32_t>& b) {
        std::uint32_t lo = ~0u, hi = 0;
        for (auto v : a) { lo = std::min(lo, v); hi = std::max(hi, v); }
        for (auto v : b) { lo = std::min(lo, v); hi = std::max(hi, v); }
        IntHistogram h;
        h.lo = lo;
        h.bins.assign(static_cast<std::size_t>(hi - lo + 1), 0);
        return h;
    }
    void count(const std::vector<std::uint32_t>& v) {
        for (auto x : v) ++bins[x - lo];
    }
};

// sup_k |S_a(k) - S_b(k)| from per-bin counts of sample a and the pooled
// counts; suffix sums give the survival functions exactly.
double sup_from_bins(const std::vector<std::uint64_t>& a_bins,
                     const std::vector<std::uint64_t>& pool_bins,
                     double na, double nb) {
    double sup = 0.0;
    std::uint64_t a_tail = 0, pool_tail = 0;
    for (std::size_t i = pool_bins.size(); i-- > 0;) {
        a_tail += a_bins[i];
        pool_tail += pool_bins[i];
        const std::uint64_t b_tail = pool_tail - a_tail;
        sup = std::max(sup, std::abs(static_cast<double>(a_tail) / na -
                                     static_cast<double>(b_tail) / nb));
    }
    return sup;
}

} // namespace

double two_sample_sup_cdf(const std::vector<std::uint32_t>& a,
                          const std::vector<std::uint32_t>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("two_sample_sup_cdf: empty sample");
    IntHistogram pool = IntHistogram::over(a, b);
    pool.count(a);
    pool.count(b);
    IntHistogram ha = pool;
    std::fill(ha.bins.begin(), ha.bins.end(), 0);
    ha.count(a);
    return sup_from_bins(ha.bins, pool.bins, static_cast<double>(a.size()),
                         static_cast<double>(b.size()));
}

double ks_distance_continuous(std::vector<double> sample,
                              const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_distance_continuous: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

PermutationTestResult permutation_sup_cdf_test(const std::vector<std::uint32_t>& a,
                                               const std::vector<std::uint32_t>& b,
                                               std::uint32_t permutations,
                                               std::uint64_t seed) {
    if (permutations < 100)
        throw std::invalid_argument("permutation_sup_cdf_test: need >= 100 permutations");

    PermutationTestResult result;
    result.permutations = permutations;
    result.observed = two_sample_sup_cdf(a, b);

    std::vector<std::uint32_t> pool;
    pool.reserve(a.size() + b.size());
    pool.insert(pool.end(), a.begin(), a.end());
    pool.insert(pool.end(), b.begin(), b.end());

    IntHistogram pooled = IntHistogram::over(a, b);
    pooled.count(a);
    pooled.count(b);

    const std::size_t m = a.size();
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());

    std::vector<double> null_d(permutations);
#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        std::vector<std::uint32_t> work;
        std::vector<std::uint64_t> bins(pooled.bins.size());
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (std::int64_t p = 0; p < static_cast<std::int64_t>(permutations); ++p) {
            Xoshiro256 rng = trial_stream(seed, static_cast<std::uint64_t>(p));
            work = pool;
            // partial Fisher-Yates: the first m entries are a uniform
            // without-replacement draw from the pool
            for (std::size_t i = 0; i < m; ++i) {
                const std::size_t j =
                    i + static_cast<std::size_t>(rng.bounded(work.size() - i));
                std::swap(work[i], work[j]);
            }
            std::fill(bins.begin(), bins.end(), 0);
            for (std::size_t i = 0; i < m; ++i) ++bins[work[i] - pooled.lo];
            null_d[static_cast<std::size_t>(p)] =
                sup_from_bins(bins, pooled.bins, na, nb);
        }
    }

    std::uint64_t ge = 0;
    for (double d : null_d)
        if (d >= result.observed) ++ge;
    result.p_value = static_cast<double>(ge + 1) / (permutations + 1.0);

    std::sort(null_d.begin(), null_d.end());
    const std::size_t idx = std::min<std::size_t>(
        null_d.size() - 1,
        static_cast<std::size_t>(std::floor(0.999 * permutations)));
    result.threshold_999 = null_d[idx];
    return result;
}

double moment_delta(const EmpiricalDistribution& emp, double x, double y,
                    double c_val, unsigned k, double tol) {
    if (emp.trials < 1) throw std::invalid_argument("moment_delta: empty ensemble");
    const std::int64_t offset =
        static_cast<std::int64_t>(std::floor(std::log2(static_cast<long double>(emp.n)))) +
        static_cast<std::int64_t>(std::floor(std::log(static_cast<long double>(emp.n))));
    long double s = 0;
    for (const auto& [v, c] : emp.counts) {
        long double d = static_cast<long double>(v - offset);
        long double p = 1;
        for (unsigned i = 0; i < k; ++i) p *= d;
        s += p * c;
    }
    const double empirical = static_cast<double>(s / emp.trials);
    return empirical - discrete_gumbel_moment(-x - y - c_val, k, tol);
}

std::vector<std::uint64_t> find_matching_n(double x, double y, double tol,
                                           std::uint64_t n_max) {
    if (!(tol > 0.0)) throw std::invalid_argument("find_matching_n: tol must be positive");
    if (n_max < 1) throw std::invalid_argument("find_matching_n: n_max must be >= 1");
    auto circle = [](double a, double b) {
        double d = std::abs(a - b);
        return std::min(d, 1.0 - d);
    };
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        if (circle(frac_log2(n), x) < tol && circle(frac_ln(n), y) < tol)
            out.push_back(n);
    }
    return out;
}

double harmonic_partial(std::uint64_t a, std::uint64_t b) {
    if (a < 1 || a > b) throw std::invalid_argument("harmonic_partial: need 1 <= a <= b");
    CompensatedSum<double> sum;
    for (std::uint64_t i = b; i >= a; --i) {
        sum.add(1.0 / static_cast<double>(i));
        if (i == a) break; // avoid wrap at a == 1
    }
    return sum.value();
}

bool ComparisonReport::passed() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

namespace {

BracketCheck make_check(std::string name, double value, double lo, double hi) {
    BracketCheck c;
    c.name = std::move(name);
    c.value = value;
    c.lo = lo;
    c.hi = hi;
    c.pass = value >= lo && value <= hi;
    c.margin = std::min(value - lo, hi - value);
    return c;
}

} // namespace

ComparisonReport compare_ensemble(const EmpiricalDistribution& emp,
                                  Sampler sampler, std::uint64_t master_seed,
                                  double c_val, double sup_budget) {
    if (emp.trials < 2) throw std::invalid_argument("compare_ensemble: too few trials");

    ComparisonReport r;
    r.n = emp.n;
    r.trials = emp.trials;
    r.sampler = sampler;
    r.master_seed = master_seed;
    r.x = frac_log2(emp.n);
    r.y = frac_ln(emp.n);
    r.c_value = c_val;
    r.sup_budget = sup_budget;

    const ShiftedCeilGumbel pred = predicted_runtime(emp.n, c_val);
    r.shift = pred.shift;
    r.sup_distance = sup_cdf_distance(emp, pred);

    r.mean = emp.mean();
    r.variance = emp.variance();
    const double trials = static_cast<double>(emp.trials);
    r.mean_se = std::sqrt(r.variance / trials);
    const double m4 = emp.central_moment(4);
    r.variance_se = std::sqrt(std::max(0.0, m4 - r.variance * r.variance) / trials);

    r.moment_delta_1 = moment_delta(emp, r.x, r.y, c_val, 1);
    r.moment_delta_2 = moment_delta(emp, r.x, r.y, c_val, 2);

    const long double nl = static_cast<long double>(emp.n);
    const double log2n = static_cast<double>(std::log2(nl));
    const double lnn = static_cast<double>(std::log(nl));

    r.checks.push_back(
        make_check("sup-cdf-distance", r.sup_distance, 0.0, sup_budget));
    // coarse floor/ceil expectation bracket
    r.checks.push_back(make_check("mean-coarse-bracket", r.mean,
                                  std::floor(log2n) + lnn - 1.116,
                                  std::ceil(log2n) + lnn + 2.765));
    // limiting-surface expectation bracket, widened by sampling noise
    r.checks.push_back(make_check("mean-offset-bracket", r.mean - log2n - lnn,
                                  1.18242 - 4.0 * r.mean_se,
                                  1.18263 + 4.0 * r.mean_se));
    r.checks.push_back(make_check("variance-bracket", r.variance,
                                  1.7277 - 4.0 * r.variance_se,
                                  1.7289 + 4.0 * r.variance_se));
    return r;
}

} // namespace pushsim
