#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

namespace pushsim {

// Euler-Mascheroni constant, 40 digits, rounded at compile time.
template <class Real>
inline constexpr Real euler_gamma =
    Real(0.5772156649015328606065120900824024310422L);

inline constexpr double euler_gamma_d = euler_gamma<double>;

/// Neumaier-compensated accumulator. Absolute error of the final sum is
/// O(eps * sum |terms|) independent of the number of terms.
template <class Real>
class CompensatedSum {
public:
    void add(Real v) {
        Real t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    Real value() const { return sum_ + comp_; }

private:
    Real sum_ = 0;
    Real comp_ = 0;
};

// Precision backend for the correction-function evaluation. Extended is
// x87 80-bit (64-bit mantissa) on x86-64 Linux; Double is plain IEEE754.
enum class Backend { Double, Extended };

template <class Real>
inline Real machine_eps() {
    return std::numeric_limits<Real>::epsilon();
}

} // namespace pushsim
