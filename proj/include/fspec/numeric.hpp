#ifndef FSPEC_NUMERIC_HPP
#define FSPEC_NUMERIC_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace fspec {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct SinCos {
    double sin;
    double cos;
};

/// sin(pi x) and cos(pi x) with exact zeros at integers (sin) and half-integers (cos).
/// Odd/even symmetry in x is exact.
SinCos sincospi(double x) noexcept;

inline double sinpi(double x) noexcept { return sincospi(x).sin; }

/// e^{-2 pi i t}
inline std::complex<double> unit_phase(double t) noexcept
{
    const SinCos sc = sincospi(2.0 * t);
    return {sc.cos, -sc.sin};
}

/// sin(pi x) / (pi x), equal to 1 at x = 0.
double sinc_pi(double x) noexcept;

/// Bessel function of the first kind, order zero. Power series up to |x| = 12,
/// Hankel asymptotic expansion beyond; absolute error below 1e-10.
double bessel_j0(double x) noexcept;

/// Log-domain sum of nonnegative terms given by their natural logs.
///
/// Terms are stored as mantissas relative to a running shift and summed with
/// Neumaier compensation. The shift only moves when a term exceeds it by more
/// than e^64, so the mantissa sum stays far from overflow while the number of
/// rescalings stays small. The result depends only on the order of additions.
class LogSum {
public:
    void add_log(double log_term) noexcept;
    void merge(const LogSum& other) noexcept;

    /// Natural log of the accumulated sum, -inf when nothing positive was added.
    double log_value() const noexcept;
    bool empty() const noexcept { return shift_ == kNegInf; }

private:
    void rescale_to(double new_shift) noexcept;
    void add_mantissa(double m) noexcept;

    double shift_ = kNegInf;
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Neumaier-compensated plain summation.
class CompensatedSum {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope * x. Requires at least two
/// distinct x values.
LinearFit least_squares_line(std::span<const double> x, std::span<const double> y);

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// floor(sqrt(n)) for n >= 0, exact.
std::int64_t isqrt_floor(std::int64_t n) noexcept;
/// ceil(sqrt(n)) for n >= 0, exact.
std::int64_t isqrt_ceil(std::int64_t n) noexcept;

/// Round to 12 significant digits (the precision used for every printed number).
double round12(double x);
/// Format with 12 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string format12(double x);
/// Format with 17 significant digits (bit-exact round trip).
std::string format17(double x);

} // namespace fspec

#endif
