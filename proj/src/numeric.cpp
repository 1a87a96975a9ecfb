#include "fspec/numeric.hpp"

#include "fspec/error.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

namespace fspec {

SinCos sincospi(double x) noexcept
{
    if (!std::isfinite(x))
        return {std::nan(""), std::nan("")};

    const bool negative = std::signbit(x);
    double a = std::abs(x);
    // Reduce to [0, 2); exact for doubles since 2*floor(a/2) is representable.
    a -= 2.0 * std::floor(0.5 * a);
    // cos is even and sin is odd about pi: fold [1, 2) onto [0, 1).
    double sign_s = 1.0;
    double sign_c = 1.0;
    if (a >= 1.0) {
        a -= 1.0;
        sign_s = -1.0;
        sign_c = -1.0;
    }
    // Fold (1/2, 1) onto (0, 1/2): sin(pi a) = sin(pi (1-a)), cos(pi a) = -cos(pi (1-a)).
    if (a > 0.5) {
        a = 1.0 - a;
        sign_c = -sign_c;
    }

    double s;
    double c;
    if (a == 0.0) {
        s = 0.0;
        c = 1.0;
    } else if (a == 0.5) {
        s = 1.0;
        c = 0.0;
    } else if (a <= 0.25) {
        s = std::sin(kPi * a);
        c = std::cos(kPi * a);
    } else {
        const double b = 0.5 - a;
        s = std::cos(kPi * b);
        c = std::sin(kPi * b);
    }
    s *= sign_s;
    c *= sign_c;
    if (negative)
        s = -s;
    return {s, c};
}

double sinc_pi(double x) noexcept
{
    if (x == 0.0)
        return 1.0;
    if (std::abs(x) < 1e-5) {
        const double t = kPi * x;
        return 1.0 - t * t / 6.0;
    }
    return sinpi(x) / (kPi * x);
}

// ---------------------------------------------------------------------------

void LogSum::rescale_to(double new_shift) noexcept
{
    if (shift_ != kNegInf) {
        const double f = std::exp(shift_ - new_shift);
        sum_ *= f;
        comp_ *= f;
    }
    shift_ = new_shift;
}

void LogSum::add_mantissa(double m) noexcept
{
    const double t = sum_ + m;
    if (std::abs(sum_) >= std::abs(m))
        comp_ += (sum_ - t) + m;
    else
        comp_ += (m - t) + sum_;
    sum_ = t;
}

void LogSum::add_log(double log_term) noexcept
{
    if (log_term == kNegInf || std::isnan(log_term))
        return;
    if (shift_ == kNegInf || log_term > shift_ + 64.0)
        rescale_to(log_term);
    add_mantissa(std::exp(log_term - shift_));
}

void LogSum::merge(const LogSum& other) noexcept
{
    if (other.shift_ == kNegInf)
        return;
    if (shift_ == kNegInf || other.shift_ > shift_)
        rescale_to(other.shift_);
    const double f = std::exp(other.shift_ - shift_);
    add_mantissa(other.sum_ * f);
    add_mantissa(other.comp_ * f);
}

double LogSum::log_value() const noexcept
{
    if (shift_ == kNegInf)
        return kNegInf;
    const double total = sum_ + comp_;
    if (total <= 0.0)
        return kNegInf;
    return shift_ + std::log(total);
}

// ---------------------------------------------------------------------------

LinearFit least_squares_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw EstimationError("least squares needs at least two points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0)
        throw EstimationError("least squares needs two distinct abscissae");

    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    fit.n = x.size();
    return fit;
}

QuadratureRule gauss_legendre(int n)
{
    if (n < 1)
        throw ContractError("Gauss-Legendre rule needs at least one node");
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        double p0 = 1.0;
        double p1 = 0.0;
        for (int k = 1; k <= n; ++k) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
        }
        dp = n * (x * p0 - p1) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = -x;
        rule.nodes[hi] = x;
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    if (n % 2 == 1)
        rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

std::int64_t isqrt_floor(std::int64_t n) noexcept
{
    if (n <= 0)
        return 0;
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(n)));
    // Division form avoids overflow of (r + 1)^2 near INT64_MAX.
    while (r > 0 && r > n / r)
        --r;
    while (r + 1 <= n / (r + 1))
        ++r;
    return r;
}

std::int64_t isqrt_ceil(std::int64_t n) noexcept
{
    if (n <= 0)
        return 0;
    const std::int64_t r = isqrt_floor(n);
    return r * r == n ? r : r + 1;
}

double round12(double x)
{
    if (x == 0.0)
        return 0.0;
    if (!std::isfinite(x))
        return x;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

std::string format12(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    if (x == 0.0)
        return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string format17(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace fspec
