#include "fspec/quadrature.hpp"

#include "fspec/error.hpp"
#include "fspec/lattice.hpp"
#include "fspec/numeric.hpp"

#include <array>
#include <cmath>
#include <string>

namespace fspec {

namespace {

constexpr int kPanelOrder = 8;

const QuadratureRule& panel_rule()
{
    static const QuadratureRule rule = gauss_legendre(kPanelOrder);
    return rule;
}

double power_of(double m, double a) noexcept
{
    if (a == 0.0)
        return 1.0;
    return m > 0.0 ? std::pow(m, a) : 0.0;
}

// Integrates |mu^|^a over the sphere of radius r (d = 1: the two points +-r).
class SphereAverage {
public:
    SphereAverage(const MeasureSpec& spec, double a, int level)
        : spec_(spec), a_(a), level_(level), d_(spec.dim()), radial_(spec.radial_modulus())
    {
        diameter_ = support_geometry(spec).diameter;
    }

    double operator()(double r, std::uint64_t& nodes) const
    {
        std::array<double, 3> z{};
        const auto d = static_cast<std::size_t>(d_);
        if (d_ == 1) {
            z[0] = r;
            const double plus = power_of(fourier_modulus(spec_, std::span<const double>(z.data(), 1)), a_);
            z[0] = -r;
            const double minus = power_of(fourier_modulus(spec_, std::span<const double>(z.data(), 1)), a_);
            nodes += 2;
            return plus + minus;
        }
        if (radial_) {
            z[0] = r;
            ++nodes;
            const double area = d_ == 2 ? 2.0 * kPi : 4.0 * kPi;
            return area * power_of(fourier_modulus(spec_, std::span<const double>(z.data(), d)), a_);
        }
        const double band = kPi * r * diameter_ * std::max(a_, 2.0);
        if (d_ == 2) {
            const auto n = static_cast<int>((16 + std::ceil(band)) * std::ldexp(1.0, level_));
            CompensatedSum sum;
            for (int k = 0; k < n; ++k) {
                const SinCos sc = sincospi(2.0 * k / n);
                z[0] = r * sc.cos;
                z[1] = r * sc.sin;
                sum.add(power_of(fourier_modulus(spec_, std::span<const double>(z.data(), d)), a_));
            }
            nodes += static_cast<std::uint64_t>(n);
            return sum.value() * 2.0 * kPi / n;
        }
        const auto nt = static_cast<int>((8 + std::ceil(0.5 * band)) * std::ldexp(1.0, level_));
        const int nphi = 2 * nt;
        const QuadratureRule rule = gauss_legendre(nt);
        CompensatedSum sum;
        for (int i = 0; i < nt; ++i) {
            const double t = rule.nodes[static_cast<std::size_t>(i)];
            const double st = std::sqrt(std::max(0.0, 1.0 - t * t));
            CompensatedSum ring;
            for (int k = 0; k < nphi; ++k) {
                const SinCos sc = sincospi(2.0 * k / nphi);
                z[0] = r * st * sc.cos;
                z[1] = r * st * sc.sin;
                z[2] = r * t;
                ring.add(power_of(fourier_modulus(spec_, std::span<const double>(z.data(), d)), a_));
            }
            sum.add(rule.weights[static_cast<std::size_t>(i)] * ring.value() * 2.0 * kPi / nphi);
        }
        nodes += static_cast<std::uint64_t>(nt) * static_cast<std::uint64_t>(nphi);
        return sum.value();
    }

private:
    const MeasureSpec& spec_;
    double a_;
    int level_;
    int d_;
    bool radial_;
    double diameter_ = 0.0;
};

// Composite Gauss-Legendre on [lo, hi] with `panels` equal panels.
template <class F>
double composite(double lo, double hi, std::int64_t panels, F&& f)
{
    const QuadratureRule& rule = panel_rule();
    const double h = (hi - lo) / static_cast<double>(panels);
    CompensatedSum sum;
    for (std::int64_t p = 0; p < panels; ++p) {
        const double mid = lo + (static_cast<double>(p) + 0.5) * h;
        for (int k = 0; k < kPanelOrder; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            sum.add(rule.weights[kk] * f(mid + 0.5 * h * rule.nodes[kk]));
        }
    }
    return 0.5 * h * sum.value();
}

std::string region_label(int j)
{
    return j == kCoreRegion ? std::string("unit ball") : "annulus " + std::to_string(j);
}

} // namespace

RegionIntegral integrate_region(const MeasureSpec& spec, int j, double modulus_power, double radius_power,
                                const QuadratureOptions& options)
{
    const int d = spec.dim();
    if (d > 3)
        throw ContractError("continuous quadrature supports d <= 3 only (lattice sums remain available)");
    if (j < kCoreRegion)
        throw ContractError("invalid region index");
    const double c = radius_power + d;
    if (j == kCoreRegion && !(c > 0.0))
        throw ContractError("integral over the unit ball diverges: radius power + d must be positive");

    const SupportGeometry geom = support_geometry(spec);
    const double h0 = 0.5 / std::max(1.0, geom.diameter);

    RegionIntegral out;
    out.index = j;
    double previous = 0.0;
    for (int level = 0; level <= options.max_refinements; ++level) {
        const SphereAverage avg(spec, modulus_power, level);
        std::uint64_t nodes = 0;
        double value;
        if (j == kCoreRegion) {
            const std::int64_t panels = std::int64_t{4} << level;
            value = composite(0.0, 1.0, panels, [&](double u) {
                if (u <= 0.0)
                    return 0.0;
                return avg(std::pow(u, 1.0 / c), nodes);
            }) / c;
        } else {
            const double r0 = std::ldexp(1.0, j);
            const double r1 = 2.0 * r0;
            const auto base = static_cast<std::int64_t>(std::ceil((r1 - r0) / h0));
            const std::int64_t panels = base << level;
            if (static_cast<std::uint64_t>(panels) * kPanelOrder > options.node_budget)
                throw BudgetError(region_label(j) + " exceeds the quadrature node budget");
            value = composite(r0, r1, panels, [&](double r) { return avg(r, nodes) * std::pow(r, c - 1.0); });
        }
        if (nodes > options.node_budget)
            throw BudgetError(region_label(j) + " exceeds the quadrature node budget");
        out.value = value;
        out.nodes = nodes;
        out.refinements = level;
        if (level > 0) {
            const double scale = std::max(std::abs(value), std::abs(previous));
            if (scale == 0.0 || std::abs(value - previous) <= options.rel_tol * scale) {
                out.converged = true;
                return out;
            }
        }
        previous = value;
    }
    return out;
}

} // namespace fspec
