#include "pushsim/gumbel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pushsim/correction.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pushsim {

namespace {

// pmf of a unit-spaced double-exponential lattice law at t = exp(-k-alpha):
// e^{-t} - e^{-e t} = -e^{-t} expm1(-(e-1) t), stable in both tails.
inline double lattice_pmf(double t) {
    return -std::exp(-t) * std::expm1(-(M_E - 1.0) * t);
}

inline double pow_int(double x, unsigned k) {
    double r = 1.0;
    for (unsigned i = 0; i < k; ++i) r *= x;
    return r;
}

} // namespace

double ContinuousGumbel::cdf(double x) const {
    return std::exp(-std::exp(-x - alpha));
}

double ContinuousGumbel::survival(double x) const {
    return -std::expm1(-std::exp(-x - alpha));
}

double ContinuousGumbel::log_cdf(double x) const {
    return -std::exp(-x - alpha);
}

double ContinuousGumbel::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("ContinuousGumbel::quantile: u outside (0,1)");
    return -alpha - std::log(-std::log(u));
}

double ContinuousGumbel::quantile_from_log_cdf(double l) const {
    if (!(l < 0.0))
        throw std::domain_error("ContinuousGumbel::quantile_from_log_cdf: l must be < 0");
    return -alpha - std::log(-l);
}

double ContinuousGumbel::quantile_from_survival(double s) const {
    if (!(s > 0.0 && s < 1.0))
        throw std::domain_error("ContinuousGumbel::quantile_from_survival: s outside (0,1)");
    return -alpha - std::log(-std::log1p(-s));
}

double gumbel_sample(const ContinuousGumbel& dist, double u) {
    return dist.quantile(u);
}

double DiscreteGumbel::cdf(std::int64_t k) const {
    return std::exp(-std::exp(-static_cast<double>(k) - alpha));
}

double DiscreteGumbel::survival(std::int64_t k) const {
    return -std::expm1(-std::exp(-static_cast<double>(k - 1) - alpha));
}

double DiscreteGumbel::pmf(std::int64_t k) const {
    return lattice_pmf(std::exp(-static_cast<double>(k) - alpha));
}

double discrete_gumbel_moment(double alpha, unsigned k, double tol) {
    if (k < 1 || k > 8)
        throw std::invalid_argument("discrete_gumbel_moment: k outside [1,8]");
    if (!(tol > 0.0))
        throw std::invalid_argument("discrete_gumbel_moment: tol must be positive");

    const DiscreteGumbel d{alpha};
    const std::int64_t mode = std::llround(-alpha);

    // Left edge: below the mode the pmf is dominated by the CDF
    //   pmf(m) <= exp(-exp(-m-alpha)),
    // and once exp(-L-alpha) >= k+4 successive weighted terms shrink by
    // more than half, so twice the edge weight bounds the omitted tail.
    std::int64_t L = mode - 1;
    while (true) {
        const double t = std::exp(-static_cast<double>(L) - alpha);
        const double w = pow_int(std::max(1.0, std::abs(static_cast<double>(L))), k);
        if (t >= static_cast<double>(k) + 4.0 && 2.0 * w * std::exp(-t) < tol / 4.0)
            break;
        --L;
        if (mode - L > 2000000)
            throw std::runtime_error("discrete_gumbel_moment: left tail will not close");
    }

    // Right edge: pmf(m) <= 1 - cdf(m-1) <= exp(1-m-alpha); for m >= 2k the
    // weighted terms decay with ratio <= e^{-1/2}, giving the factor 2.6.
    std::int64_t U = mode + 1;
    while (true) {
        const double w = pow_int(std::max(1.0, std::abs(static_cast<double>(U))), k);
        const double majorant = w * std::exp(1.0 - static_cast<double>(U) - alpha);
        if (U >= 2 * static_cast<std::int64_t>(k) + 1 && 2.6 * majorant < tol / 4.0)
            break;
        ++U;
        if (U - mode > 2000000)
            throw std::runtime_error("discrete_gumbel_moment: right tail will not close");
    }

    CompensatedSum<double> sum;
    double abs_terms = 0.0;
    for (std::int64_t m = L; m <= U; ++m) {
        const double term = pow_int(static_cast<double>(m), k) * d.pmf(m);
        sum.add(term);
        abs_terms += std::abs(term);
    }

    const double floor_bound = 8.0 * machine_eps<double>() * (abs_terms + 1.0);
    if (floor_bound > tol) {
        std::ostringstream msg;
        msg << "discrete_gumbel_moment: tol=" << tol
            << " below the working-precision floor " << floor_bound;
        throw std::runtime_error(msg.str());
    }
    return sum.value();
}

double expectation_offset(double x, double y, double c_val, double tol) {
    if (!(x >= 0.0 && x < 1.0 && y >= 0.0 && y < 1.0))
        throw std::domain_error("expectation_offset: (x,y) outside [0,1)^2");
    return discrete_gumbel_moment(-x - y - c_val, 1, tol / 4.0) - x - y;
}

double runtime_variance(double x, double y, double c_val, double tol) {
    if (!(x >= 0.0 && x < 1.0 && y >= 0.0 && y < 1.0))
        throw std::domain_error("runtime_variance: (x,y) outside [0,1)^2");
    const double a = -x - y - c_val;
    const double m1 = discrete_gumbel_moment(a, 1, tol / 4.0);
    const double m2 = discrete_gumbel_moment(a, 2, tol / 4.0);
    return m2 - m1 * m1;
}

double ShiftedCeilGumbel::cdf(std::int64_t k) const {
    return std::exp(-std::exp(-(static_cast<double>(k) - shift) - euler_gamma_d));
}

double ShiftedCeilGumbel::survival(std::int64_t k) const {
    return -std::expm1(
        -std::exp(-(static_cast<double>(k - 1) - shift) - euler_gamma_d));
}

double ShiftedCeilGumbel::pmf(std::int64_t k) const {
    return lattice_pmf(std::exp(-(static_cast<double>(k) - shift) - euler_gamma_d));
}

void ShiftedCeilGumbel::support(double mass, std::int64_t& lo, std::int64_t& hi) const {
    const double tail = -std::log(mass); // exp(-(k-s)-g) thresholds
    lo = static_cast<std::int64_t>(std::floor(shift - euler_gamma_d - std::log(tail)));
    hi = static_cast<std::int64_t>(std::ceil(shift - euler_gamma_d + tail + 1.0));
    while (cdf(lo) > mass) --lo;
    while (survival(hi) > mass) ++hi;
}

ShiftedCeilGumbel predicted_runtime(std::uint64_t n, double c_val) {
    if (n < 2) throw std::invalid_argument("predicted_runtime: n < 2");
    const long double nl = static_cast<long double>(n);
    const long double s = std::log2(nl) + std::log(nl) +
                          euler_gamma<long double> +
                          static_cast<long double>(c_val);
    return ShiftedCeilGumbel{n, static_cast<double>(s)};
}

double SurfaceTable::min_z() const {
    double m = z.empty() ? 0.0 : z.front();
    for (double v : z) m = std::min(m, v);
    return m;
}

double SurfaceTable::max_z() const {
    double m = z.empty() ? 0.0 : z.front();
    for (double v : z) m = std::max(m, v);
    return m;
}

SurfaceTable tabulate_surface(SurfaceKind kind, std::uint32_t resolution,
                              double tol, Backend backend) {
    if (resolution < 2)
        throw std::invalid_argument("tabulate_surface: resolution must be >= 2");

    SurfaceTable t;
    t.kind = kind;
    t.resolution = resolution;
    t.tol = tol;
    t.xs.resize(resolution);
    t.ys.resize(resolution);
    for (std::uint32_t i = 0; i < resolution; ++i) {
        t.xs[i] = (static_cast<double>(i) + 0.5) / resolution;
        t.ys[i] = (static_cast<double>(i) + 0.5) / resolution;
    }
    t.z.resize(static_cast<std::size_t>(resolution) * resolution);

    const double c_tol = std::max(tol / 4.0, 1e-12);
    std::string failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(resolution); ++i) {
        try {
            const double x = t.xs[static_cast<std::size_t>(i)];
            const double cx = evaluate_correction(x, c_tol, backend).value;
            for (std::uint32_t j = 0; j < resolution; ++j) {
                const double y = t.ys[j];
                const double v = (kind == SurfaceKind::Expectation)
                                     ? expectation_offset(x, y, cx, tol)
                                     : runtime_variance(x, y, cx, tol);
                t.z[static_cast<std::size_t>(i) * resolution + j] = v;
            }
        } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (failure.empty()) failure = e.what();
        }
    }
    if (!failure.empty()) throw std::runtime_error(failure);
    return t;
}

} // namespace pushsim
