#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pushsim/numeric.hpp"

namespace pushsim {

/// The periodic correction function c is the double limit
///   c(x) = -x + lim_a lim_b [ -a + b + ln(G^(b)(1 - 2^{-a-x})) ]
/// over iterates of the uninformed map G. The inner limit telescopes into
/// an absolutely convergent series (the computational backbone here):
///   b + ln(G^(b)(1-2^{-a-x})) = 1 + ln(1-2^{-a-x}) - 2^{-a-x}
///                               + sum_{j=1}^{b-1} G^(j)(1-2^{-a-x}).
/// c has period 1 and oscillates with amplitude ~6e-10 around ~0.10531.

struct InnerSeries {
    double partial_sum = 0.0; // closed-form prefix plus summed iterates
    double tail_bound = 0.0;  // geometric bound on the omitted tail
    std::uint32_t terms_used = 0;
};

/// Inner-limit series at outer truncation `a`, summed until the geometric
/// tail bound drops below tail_tol. Throws std::runtime_error (with the
/// last term magnitude) if `term_cap` terms do not suffice.
InnerSeries inner_series(double x, std::uint32_t a, double tail_tol,
                         Backend backend = Backend::Extended,
                         std::uint32_t term_cap = 100000);

struct CorrectionEvaluation {
    double x = 0.0;     // evaluation point as given by the caller
    double value = 0.0; // c(x)
    std::uint32_t a_used = 0;
    std::uint32_t terms_used = 0; // series length of the final inner sum
    double error_estimate = 0.0;  // inner tails in the stagnation window
                                  // plus the last outer increment
};

inline constexpr std::uint32_t correction_a_min = 20;
inline constexpr std::uint32_t correction_a_cap = 45; // 2^-45 is below any
                                                      // supported tolerance

/// Evaluate c(x) to absolute tolerance `tol` (floor 1e-13). x is reduced to
/// its fractional part first; the outer limit is declared converged when two
/// consecutive increments fall below tol/4. Throws std::invalid_argument on
/// bad tolerance and a tolerance-unachievable std::runtime_error if the
/// increments have not stagnated by a = correction_a_cap.
CorrectionEvaluation evaluate_correction(double x, double tol,
                                         Backend backend = Backend::Extended);

/// Same evaluation without the periodicity reduction, valid for x in [0,2).
/// c(x) and c(x+1) computed this way differ by one outer-index shift, which
/// makes the periodicity of the limit an actual measurement instead of an
/// arithmetic identity.
CorrectionEvaluation evaluate_correction_unreduced(double x, double tol,
                                                   Backend backend = Backend::Extended);

struct CorrectionTableRow {
    double x = 0.0;
    double value = 0.0;
    double value_minus_c0 = 0.0;
};

struct CorrectionTable {
    std::uint32_t resolution = 0;
    double x_max = 0.0;
    double tol = 0.0;
    double c0 = 0.0;
    std::vector<CorrectionTableRow> rows;

    double min_value() const;
    double max_value() const;
    double amplitude() const { return max_value() - min_value(); }
};

/// Uniform tabulation of c over [0, x_max] with `resolution` rows
/// (endpoints included). Grid points are independent; generation is
/// OpenMP-parallel and bit-identical to the sequential order.
CorrectionTable tabulate_correction(double x_max, std::uint32_t resolution,
                                    double tol,
                                    Backend backend = Backend::Extended);

} // namespace pushsim
