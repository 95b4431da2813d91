#include "pushsim/correction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pushsim {

namespace {

// Eventual bound on successive-term ratios of the inner series once the
// iterates are below 1/2: G(w) <= w e^{-1/2}, and perturbation growth is
// capped by (3/2) e^{-1/2} < 1.
const double kRatioCap = 1.5 * std::exp(-0.5);

template <class Real>
struct InnerSeriesR {
    Real partial_sum;
    Real tail_bound;
    std::uint32_t terms_used;
};

// The series is summed in two phases to keep every quantity in the scale
// where it carries full relative precision. While the informed-fraction
// iterate v = F^(j)(2^{-a-x}) is at most 1/2, the term G^(j)(1-2^{-a-x})
// equals 1 - v and is accumulated as the exact pair (+1, -v). Once v
// crosses 1/2 the complement w = 1 - v is iterated directly through G.
template <class Real>
InnerSeriesR<Real> inner_series_impl(Real x, std::uint32_t a, Real tail_tol,
                                     std::uint32_t term_cap) {
    if (a < 1) throw std::invalid_argument("inner_series: a must be >= 1");
    if (!(x >= Real(0) && x < Real(2)))
        throw std::domain_error("inner_series: x outside [0,2)");
    if (!(tail_tol > Real(0)))
        throw std::invalid_argument("inner_series: tail_tol must be positive");

    const Real u0 = std::exp2(-(Real(a) + x));

    CompensatedSum<Real> sum;
    sum.add(Real(1));
    sum.add(std::log1p(-u0));
    sum.add(-u0);

    Real v = u0;        // informed-fraction iterate, phase 1
    Real w = Real(-1);  // uninformed-fraction iterate, phase 2 once >= 0
    Real prev_term = Real(-1);
    std::uint32_t j = 0;
    Real term = Real(1);
    while (true) {
        ++j;
        if (w < Real(0)) {
            v = v - std::expm1(-v) * (Real(1) - v); // F(v)
            if (v > Real(0.5)) {
                w = Real(1) - v;
                term = w;
                sum.add(w);
            } else {
                term = Real(1) - v;
                sum.add(Real(1));
                sum.add(-v);
            }
        } else {
            w = w * std::exp(w - Real(1)); // G(w)
            term = w;
            sum.add(w);
        }
        if (term < Real(0.5)) {
            Real ratio = Real(kRatioCap);
            if (prev_term > Real(0) && prev_term < Real(0.5))
                ratio = std::max(term / prev_term, Real(kRatioCap));
            const Real tail = term * ratio / (Real(1) - ratio);
            if (tail < tail_tol)
                return {sum.value(), tail, j};
        }
        prev_term = term;
        if (j >= term_cap) {
            std::ostringstream msg;
            msg << "inner_series: no convergence after " << term_cap
                << " terms (last term " << static_cast<double>(term) << ")";
            throw std::runtime_error(msg.str());
        }
    }
}

template <class Real>
CorrectionEvaluation evaluate_impl(double x_orig, Real xr, double tol,
                                   std::uint32_t term_cap) {
    const Real tail_tol = Real(tol) / Real(4);
    const Real inc_tol = Real(tol) / Real(4);

    Real prev_value = Real(0);
    Real prev_inc = Real(-1);
    Real prev_tail = Real(0);
    for (std::uint32_t a = correction_a_min; a <= correction_a_cap; ++a) {
        const auto inner = inner_series_impl<Real>(xr, a, tail_tol, term_cap);
        const Real value = -Real(a) + inner.partial_sum;
        if (a > correction_a_min) {
            const Real inc = std::abs(value - prev_value);
            if (prev_inc >= Real(0) && prev_inc <= inc_tol && inc <= inc_tol) {
                CorrectionEvaluation out;
                out.x = x_orig;
                out.value = static_cast<double>(-xr + value);
                out.a_used = a;
                out.terms_used = inner.terms_used;
                out.error_estimate =
                    static_cast<double>(inner.tail_bound + prev_tail + inc);
                return out;
            }
            prev_inc = inc;
        }
        prev_value = value;
        prev_tail = inner.tail_bound;
    }
    std::ostringstream msg;
    msg << "evaluate_correction: outer increments stagnate above tol=" << tol
        << " at a=" << correction_a_cap << " (last increment "
        << static_cast<double>(prev_inc) << ")";
    throw std::runtime_error(msg.str());
}

CorrectionEvaluation evaluate_dispatch(double x_orig, double xr, double tol,
                                       Backend backend) {
    if (!(tol >= 1e-13))
        throw std::invalid_argument(
            "evaluate_correction: tol below the 1e-13 double-precision floor");
    if (backend == Backend::Extended)
        return evaluate_impl<long double>(x_orig, static_cast<long double>(xr),
                                          tol, 100000);
    return evaluate_impl<double>(x_orig, xr, tol, 100000);
}

} // namespace

InnerSeries inner_series(double x, std::uint32_t a, double tail_tol,
                         Backend backend, std::uint32_t term_cap) {
    if (backend == Backend::Extended) {
        const auto r = inner_series_impl<long double>(
            static_cast<long double>(x), a, static_cast<long double>(tail_tol),
            term_cap);
        return {static_cast<double>(r.partial_sum),
                static_cast<double>(r.tail_bound), r.terms_used};
    }
    const auto r = inner_series_impl<double>(x, a, tail_tol, term_cap);
    return {r.partial_sum, r.tail_bound, r.terms_used};
}

CorrectionEvaluation evaluate_correction(double x, double tol, Backend backend) {
    if (std::isnan(x)) throw std::domain_error("evaluate_correction: x is NaN");
    double frac = x - std::floor(x);
    if (frac >= 1.0) frac = 0.0; // x just below an integer rounds up
    return evaluate_dispatch(x, frac, tol, backend);
}

CorrectionEvaluation evaluate_correction_unreduced(double x, double tol,
                                                   Backend backend) {
    if (!(x >= 0.0 && x < 2.0))
        throw std::domain_error("evaluate_correction_unreduced: x outside [0,2)");
    return evaluate_dispatch(x, x, tol, backend);
}

double CorrectionTable::min_value() const {
    double m = rows.empty() ? 0.0 : rows.front().value;
    for (const auto& r : rows) m = std::min(m, r.value);
    return m;
}

double CorrectionTable::max_value() const {
    double m = rows.empty() ? 0.0 : rows.front().value;
    for (const auto& r : rows) m = std::max(m, r.value);
    return m;
}

CorrectionTable tabulate_correction(double x_max, std::uint32_t resolution,
                                    double tol, Backend backend) {
    if (resolution < 2)
        throw std::invalid_argument("tabulate_correction: resolution must be >= 2");
    if (!(x_max > 0.0))
        throw std::invalid_argument("tabulate_correction: x_max must be positive");
    if (!(tol >= 1e-13))
        throw std::invalid_argument(
            "tabulate_correction: tol below the 1e-13 double-precision floor");

    CorrectionTable table;
    table.resolution = resolution;
    table.x_max = x_max;
    table.tol = tol;
    table.rows.resize(resolution);

    std::string failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(resolution); ++i) {
        const double x =
            x_max * static_cast<double>(i) / static_cast<double>(resolution - 1);
        try {
            const auto ev = evaluate_correction(x, tol, backend);
            table.rows[static_cast<std::size_t>(i)] = {x, ev.value, 0.0};
        } catch (const std::exception& e) {
            std::string annotated =
                "tabulate_correction at x=" + std::to_string(x) + ": " + e.what();
#ifdef _OPENMP
#pragma omp critical
#endif
            if (failure.empty()) failure = annotated;
        }
    }
    if (!failure.empty()) throw std::runtime_error(failure);

    table.c0 = table.rows.front().value;
    for (auto& r : table.rows) r.value_minus_c0 = r.value - table.c0;
    return table;
}

} // namespace pushsim
