#include "fspec/numeric.hpp"

namespace fspec {

namespace {

constexpr double kSeriesLimit = 12.0;

double j0_series(double x) noexcept
{
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= -q / (static_cast<double>(k) * static_cast<double>(k));
        sum += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum)))
            break;
    }
    return sum;
}

// Hankel expansion; stops at the smallest term, which bounds the error.
double j0_asymptotic(double x) noexcept
{
    double p = 1.0;
    double q = 0.0;
    double a = 1.0;      // a_k(0) / x^k
    double last = 1.0;
    for (int k = 1; k < 100; ++k) {
        const double odd = 2.0 * k - 1.0;
        a *= -(odd * odd) / (8.0 * k * x);
        const double mag = std::abs(a);
        if (mag > last || mag < 1e-17)
            break;
        last = mag;
        // P collects (-1)^m a_{2m}, Q collects (-1)^m a_{2m+1}.
        switch (k % 4) {
        case 0: p += a; break;
        case 1: q += a; break;
        case 2: p -= a; break;
        case 3: q -= a; break;
        }
    }
    const double chi = x - 0.25 * kPi;
    return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

} // namespace

double bessel_j0(double x) noexcept
{
    x = std::abs(x);
    if (x <= kSeriesLimit)
        return j0_series(x);
    return j0_asymptotic(x);
}

} // namespace fspec
