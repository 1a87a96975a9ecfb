#include "fspec/measure.hpp"

#include "fspec/error.hpp"
#include "fspec/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace fspec {

namespace {

constexpr double kWeightSumTolerance = 1e-9;
constexpr double kSelfSimilarCutoff = 1e-8;

using Scratch = std::array<double, kMaxDim>;

void require(bool ok, const std::string& message)
{
    if (!ok)
        throw ConfigError(message);
}

void require_finite(std::span<const double> v, const std::string& what)
{
    for (double x : v)
        require(std::isfinite(x), what + " must be finite");
}

void check_dim(int d)
{
    require(d >= 1 && d <= kMaxDim, "dimension must be in [1, " + std::to_string(kMaxDim) + "]");
}

void check_mass(double mass)
{
    require(std::isfinite(mass) && mass > 0.0, "mass must be positive and finite");
}

void check_probabilities(const std::vector<double>& w, const std::string& what)
{
    require(!w.empty(), what + " must not be empty");
    double sum = 0.0;
    for (double x : w) {
        require(std::isfinite(x) && x > 0.0, what + " must be positive");
        sum += x;
    }
    require(std::abs(sum - 1.0) <= kWeightSumTolerance, what + " must sum to 1");
}

double dot(std::span<const double> a, std::span<const double> b) noexcept
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> z) noexcept
{
    return std::sqrt(dot(z, z));
}

std::complex<double> self_similar_factor(const SelfSimilarParams& p, double arg) noexcept
{
    std::complex<double> f{0.0, 0.0};
    for (std::size_t j = 0; j < p.digits.size(); ++j)
        f += p.weights[j] * unit_phase(arg * p.digits[j]);
    return f;
}

double max_abs_digit(const SelfSimilarParams& p) noexcept
{
    double m = 0.0;
    for (double t : p.digits)
        m = std::max(m, std::abs(t));
    return m;
}

// Runs f(factor) for every k >= 1 with ratio^k |zeta| max|t| >= cutoff, then once
// for the phase of the truncated tail.
template <class F>
void for_each_self_similar_factor(const SelfSimilarParams& p, double zeta, F&& f)
{
    const double reach = std::abs(zeta) * max_abs_digit(p);
    double rk = p.ratio;
    while (rk * reach >= kSelfSimilarCutoff) {
        f(self_similar_factor(p, zeta * rk));
        rk *= p.ratio;
    }
    // Remaining factors are phases exp(-2 pi i mean_t ratio^k zeta) up to O(cutoff^2).
    double mean = 0.0;
    for (std::size_t j = 0; j < p.digits.size(); ++j)
        mean += p.weights[j] * p.digits[j];
    if (mean != 0.0 && zeta != 0.0)
        f(unit_phase(zeta * mean * rk / (1.0 - p.ratio)));
}

} // namespace

std::string_view to_string(MeasureKind kind) noexcept
{
    switch (kind) {
    case MeasureKind::atomic: return "atomic";
    case MeasureKind::box_lebesgue: return "box_lebesgue";
    case MeasureKind::self_similar_1d: return "self_similar_1d";
    case MeasureKind::sphere_surface: return "sphere_surface";
    case MeasureKind::convolution: return "convolution";
    case MeasureKind::product: return "product";
    case MeasureKind::affine: return "affine";
    }
    return "atomic";
}

std::optional<MeasureKind> measure_kind_from_string(std::string_view name) noexcept
{
    for (auto k : {MeasureKind::atomic, MeasureKind::box_lebesgue, MeasureKind::self_similar_1d,
                   MeasureKind::sphere_surface, MeasureKind::convolution, MeasureKind::product,
                   MeasureKind::affine}) {
        if (to_string(k) == name)
            return k;
    }
    return std::nullopt;
}

double Box::max_side() const noexcept
{
    double m = 0.0;
    for (std::size_t i = 0; i < lower.size(); ++i)
        m = std::max(m, upper[i] - lower[i]);
    return m;
}

double Box::diagonal() const noexcept
{
    double s = 0.0;
    for (std::size_t i = 0; i < lower.size(); ++i)
        s += (upper[i] - lower[i]) * (upper[i] - lower[i]);
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Factories

MeasureSpec MeasureSpec::atomic(int d, std::vector<double> points, std::vector<double> weights, double mass)
{
    check_dim(d);
    check_mass(mass);
    require(!weights.empty(), "atomic measure needs at least one atom");
    require(weights.size() <= kMaxAtoms, "atomic measure exceeds " + std::to_string(kMaxAtoms) + " atoms");
    require(points.size() == weights.size() * static_cast<std::size_t>(d),
            "atomic measure: expected " + std::to_string(d) + " coordinates per atom");
    require_finite(points, "atom locations");
    check_probabilities(weights, "atom weights");

    MeasureSpec m;
    m.dim_ = d;
    m.kind_ = MeasureKind::atomic;
    m.mass_ = mass;
    m.params_ = AtomicParams{std::move(points), std::move(weights)};
    return m;
}

MeasureSpec MeasureSpec::dirac(std::vector<double> location, double mass)
{
    const int d = static_cast<int>(location.size());
    return atomic(d, std::move(location), {1.0}, mass);
}

MeasureSpec MeasureSpec::box_lebesgue(std::vector<double> lower, std::vector<double> upper, double mass)
{
    const int d = static_cast<int>(lower.size());
    check_dim(d);
    check_mass(mass);
    require(upper.size() == lower.size(), "box corners must have equal dimension");
    require_finite(lower, "box corners");
    require_finite(upper, "box corners");
    for (std::size_t i = 0; i < lower.size(); ++i)
        require(lower[i] < upper[i], "box lower corner must be strictly below the upper corner");

    MeasureSpec m;
    m.dim_ = d;
    m.kind_ = MeasureKind::box_lebesgue;
    m.mass_ = mass;
    m.params_ = BoxParams{std::move(lower), std::move(upper)};
    return m;
}

MeasureSpec MeasureSpec::self_similar(double ratio, std::vector<double> digits, std::vector<double> weights,
                                      double mass)
{
    check_mass(mass);
    require(std::isfinite(ratio) && ratio > 0.0 && ratio < 1.0, "contraction ratio must lie in (0, 1)");
    require(!digits.empty(), "self-similar measure needs at least one digit");
    require(digits.size() == weights.size(), "digits and weights must have equal length");
    require_finite(digits, "digits");
    check_probabilities(weights, "digit weights");
    std::vector<double> sorted = digits;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "digits must be distinct");

    MeasureSpec m;
    m.dim_ = 1;
    m.kind_ = MeasureKind::self_similar_1d;
    m.mass_ = mass;
    m.params_ = SelfSimilarParams{ratio, std::move(digits), std::move(weights)};
    return m;
}

MeasureSpec MeasureSpec::cantor()
{
    return self_similar(1.0 / 3.0, {0.0, 2.0}, {0.5, 0.5});
}

MeasureSpec MeasureSpec::sphere_surface(std::vector<double> center, double radius, double mass)
{
    const int d = static_cast<int>(center.size());
    require(d == 2 || d == 3, "sphere surface measures are supported in d = 2 and d = 3 only");
    check_mass(mass);
    require_finite(center, "sphere center");
    require(std::isfinite(radius) && radius > 0.0, "sphere radius must be positive");

    MeasureSpec m;
    m.dim_ = d;
    m.kind_ = MeasureKind::sphere_surface;
    m.mass_ = mass;
    m.params_ = SphereParams{std::move(center), radius};
    return m;
}

MeasureSpec MeasureSpec::convolve(const MeasureSpec& a, const MeasureSpec& b)
{
    return convolve(std::vector<MeasureSpec>{a, b});
}

MeasureSpec MeasureSpec::convolve(std::vector<MeasureSpec> children)
{
    require(!children.empty(), "convolution needs at least one child");
    const int d = children.front().dim();
    double mass = 1.0;
    for (const auto& c : children) {
        require(c.dim() == d, "convolution children must share the ambient dimension");
        mass *= c.mass();
    }
    MeasureSpec m;
    m.dim_ = d;
    m.kind_ = MeasureKind::convolution;
    m.mass_ = mass;
    m.params_ = CombinatorParams{};
    m.children_ = std::move(children);
    return m;
}

MeasureSpec MeasureSpec::product(std::vector<MeasureSpec> children)
{
    require(!children.empty(), "product needs at least one child");
    int d = 0;
    double mass = 1.0;
    for (const auto& c : children) {
        d += c.dim();
        mass *= c.mass();
    }
    check_dim(d);
    MeasureSpec m;
    m.dim_ = d;
    m.kind_ = MeasureKind::product;
    m.mass_ = mass;
    m.params_ = CombinatorParams{};
    m.children_ = std::move(children);
    return m;
}

MeasureSpec MeasureSpec::affine(const MeasureSpec& child, double scale, std::vector<double> shift)
{
    require(std::isfinite(scale) && scale > 0.0, "affine scale must be positive");
    require(static_cast<int>(shift.size()) == child.dim(), "affine shift must match the child dimension");
    require_finite(shift, "affine shift");
    MeasureSpec m;
    m.dim_ = child.dim();
    m.kind_ = MeasureKind::affine;
    m.mass_ = child.mass();
    m.params_ = AffineParams{scale, std::move(shift)};
    m.children_ = {child};
    return m;
}

bool MeasureSpec::radial_modulus() const noexcept
{
    switch (kind_) {
    case MeasureKind::sphere_surface:
        return true;
    case MeasureKind::atomic:
        return dim_ == 1 || std::get<AtomicParams>(params_).weights.size() == 1;
    case MeasureKind::box_lebesgue:
    case MeasureKind::self_similar_1d:
        return dim_ == 1;
    case MeasureKind::convolution:
    case MeasureKind::affine:
        return std::all_of(children_.begin(), children_.end(), [](const auto& c) { return c.radial_modulus(); });
    case MeasureKind::product:
        return dim_ == 1;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Fourier transform

std::complex<double> fourier_transform(const MeasureSpec& spec, std::span<const double> z)
{
    if (static_cast<int>(z.size()) != spec.dim())
        throw ContractError("frequency dimension does not match the measure");

    switch (spec.kind()) {
    case MeasureKind::atomic: {
        const auto& p = spec.params_as<AtomicParams>();
        const std::size_t d = z.size();
        std::complex<double> sum{0.0, 0.0};
        for (std::size_t i = 0; i < p.weights.size(); ++i)
            sum += p.weights[i] * unit_phase(dot(std::span<const double>(p.points).subspan(i * d, d), z));
        return spec.mass() * sum;
    }
    case MeasureKind::box_lebesgue: {
        const auto& p = spec.params_as<BoxParams>();
        std::complex<double> v{spec.mass(), 0.0};
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double width = p.upper[i] - p.lower[i];
            const double center = 0.5 * (p.upper[i] + p.lower[i]);
            v *= unit_phase(center * z[i]) * sinc_pi(width * z[i]);
        }
        return v;
    }
    case MeasureKind::self_similar_1d: {
        const auto& p = spec.params_as<SelfSimilarParams>();
        std::complex<double> v{spec.mass(), 0.0};
        for_each_self_similar_factor(p, z[0], [&](std::complex<double> f) { v *= f; });
        return v;
    }
    case MeasureKind::sphere_surface: {
        const auto& p = spec.params_as<SphereParams>();
        const double r = norm(z);
        const double radial =
            spec.dim() == 2 ? bessel_j0(2.0 * kPi * p.radius * r) : sinc_pi(2.0 * p.radius * r);
        return spec.mass() * radial * unit_phase(dot(p.center, z));
    }
    case MeasureKind::convolution: {
        std::complex<double> v{1.0, 0.0};
        for (const auto& c : spec.children())
            v *= fourier_transform(c, z);
        return v;
    }
    case MeasureKind::product: {
        std::complex<double> v{1.0, 0.0};
        std::size_t offset = 0;
        for (const auto& c : spec.children()) {
            const auto cd = static_cast<std::size_t>(c.dim());
            v *= fourier_transform(c, z.subspan(offset, cd));
            offset += cd;
        }
        return v;
    }
    case MeasureKind::affine: {
        const auto& p = spec.params_as<AffineParams>();
        Scratch scaled{};
        for (std::size_t i = 0; i < z.size(); ++i)
            scaled[i] = p.scale * z[i];
        return unit_phase(dot(p.shift, z)) *
               fourier_transform(spec.children().front(), std::span<const double>(scaled.data(), z.size()));
    }
    }
    throw Error(ErrorKind::internal, "unknown measure kind");
}

double fourier_modulus(const MeasureSpec& spec, std::span<const double> z)
{
    if (static_cast<int>(z.size()) != spec.dim())
        throw ContractError("frequency dimension does not match the measure");

    switch (spec.kind()) {
    case MeasureKind::atomic:
        return std::abs(fourier_transform(spec, z));
    case MeasureKind::box_lebesgue: {
        const auto& p = spec.params_as<BoxParams>();
        double v = spec.mass();
        for (std::size_t i = 0; i < z.size(); ++i)
            v *= std::abs(sinc_pi((p.upper[i] - p.lower[i]) * z[i]));
        return v;
    }
    case MeasureKind::self_similar_1d: {
        const auto& p = spec.params_as<SelfSimilarParams>();
        double v = spec.mass();
        for_each_self_similar_factor(p, z[0], [&](std::complex<double> f) { v *= std::abs(f); });
        return v;
    }
    case MeasureKind::sphere_surface: {
        const auto& p = spec.params_as<SphereParams>();
        const double r = norm(z);
        const double radial =
            spec.dim() == 2 ? bessel_j0(2.0 * kPi * p.radius * r) : sinc_pi(2.0 * p.radius * r);
        return spec.mass() * std::abs(radial);
    }
    case MeasureKind::convolution: {
        double v = 1.0;
        for (const auto& c : spec.children()) {
            v *= fourier_modulus(c, z);
            if (v == 0.0)
                break;
        }
        return v;
    }
    case MeasureKind::product: {
        double v = 1.0;
        std::size_t offset = 0;
        for (const auto& c : spec.children()) {
            const auto cd = static_cast<std::size_t>(c.dim());
            v *= fourier_modulus(c, z.subspan(offset, cd));
            offset += cd;
        }
        return v;
    }
    case MeasureKind::affine: {
        const auto& p = spec.params_as<AffineParams>();
        Scratch scaled{};
        for (std::size_t i = 0; i < z.size(); ++i)
            scaled[i] = p.scale * z[i];
        return fourier_modulus(spec.children().front(), std::span<const double>(scaled.data(), z.size()));
    }
    }
    throw Error(ErrorKind::internal, "unknown measure kind");
}

FourierSample eval_ft(const MeasureSpec& spec, std::span<const double> z)
{
    for (double x : z) {
        if (!std::isfinite(x))
            throw ContractError("frequency must be finite");
    }
    FourierSample s;
    s.frequency.assign(z.begin(), z.end());
    s.value = fourier_transform(spec, z);
    s.modulus = std::abs(s.value);
    return s;
}

// ---------------------------------------------------------------------------
// Geometry

namespace {

struct Extent {
    Box box;
    double diameter = 0.0;
};

Extent extent(const MeasureSpec& spec)
{
    const auto d = static_cast<std::size_t>(spec.dim());
    Extent e;
    switch (spec.kind()) {
    case MeasureKind::atomic: {
        const auto& p = spec.params_as<AtomicParams>();
        const std::size_t n = p.weights.size();
        e.box.lower.assign(p.points.begin(), p.points.begin() + static_cast<std::ptrdiff_t>(d));
        e.box.upper = e.box.lower;
        double diam2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
                e.box.lower[k] = std::min(e.box.lower[k], p.points[i * d + k]);
                e.box.upper[k] = std::max(e.box.upper[k], p.points[i * d + k]);
            }
            for (std::size_t j = i + 1; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    const double t = p.points[i * d + k] - p.points[j * d + k];
                    s += t * t;
                }
                diam2 = std::max(diam2, s);
            }
        }
        e.diameter = std::sqrt(diam2);
        break;
    }
    case MeasureKind::box_lebesgue: {
        const auto& p = spec.params_as<BoxParams>();
        e.box = Box{p.lower, p.upper};
        e.diameter = e.box.diagonal();
        break;
    }
    case MeasureKind::self_similar_1d: {
        const auto& p = spec.params_as<SelfSimilarParams>();
        const auto [tmin, tmax] = std::minmax_element(p.digits.begin(), p.digits.end());
        const double f = p.ratio / (1.0 - p.ratio);
        e.box = Box{{*tmin * f}, {*tmax * f}};
        e.diameter = (*tmax - *tmin) * f;
        break;
    }
    case MeasureKind::sphere_surface: {
        const auto& p = spec.params_as<SphereParams>();
        for (double c : p.center) {
            e.box.lower.push_back(c - p.radius);
            e.box.upper.push_back(c + p.radius);
        }
        e.diameter = 2.0 * p.radius;
        break;
    }
    case MeasureKind::convolution: {
        e.box.lower.assign(d, 0.0);
        e.box.upper.assign(d, 0.0);
        double diam = 0.0;
        for (const auto& c : spec.children()) {
            const Extent ce = extent(c);
            for (std::size_t k = 0; k < d; ++k) {
                e.box.lower[k] += ce.box.lower[k];
                e.box.upper[k] += ce.box.upper[k];
            }
            diam += ce.diameter;
        }
        e.diameter = d == 1 ? diam : std::min(diam, e.box.diagonal());
        break;
    }
    case MeasureKind::product: {
        double diam2 = 0.0;
        for (const auto& c : spec.children()) {
            const Extent ce = extent(c);
            e.box.lower.insert(e.box.lower.end(), ce.box.lower.begin(), ce.box.lower.end());
            e.box.upper.insert(e.box.upper.end(), ce.box.upper.begin(), ce.box.upper.end());
            diam2 += ce.diameter * ce.diameter;
        }
        e.diameter = std::sqrt(diam2);
        break;
    }
    case MeasureKind::affine: {
        const auto& p = spec.params_as<AffineParams>();
        const Extent ce = extent(spec.children().front());
        for (std::size_t k = 0; k < d; ++k) {
            e.box.lower.push_back(p.scale * ce.box.lower[k] + p.shift[k]);
            e.box.upper.push_back(p.scale * ce.box.upper[k] + p.shift[k]);
        }
        e.diameter = p.scale * ce.diameter;
        break;
    }
    }
    return e;
}

} // namespace

SupportGeometry support_geometry(const MeasureSpec& spec)
{
    Extent e = extent(spec);
    SupportGeometry g;
    g.diameter = e.diameter;
    double margin = 0.5;
    double max_norm2 = 0.0;
    for (std::size_t k = 0; k < e.box.lower.size(); ++k) {
        margin = std::min({margin, e.box.lower[k], 1.0 - e.box.upper[k]});
        const double m = std::max(std::abs(e.box.lower[k]), std::abs(e.box.upper[k]));
        max_norm2 += m * m;
    }
    g.max_norm = std::sqrt(max_norm2);
    if (margin > 0.0)
        g.margin = margin;
    g.box = std::move(e.box);
    return g;
}

Normalization normalize_to_margin(const MeasureSpec& spec, double delta_target)
{
    if (!(delta_target > 0.0 && delta_target < 0.5))
        throw ContractError("target margin must lie in (0, 1/2)");
    const SupportGeometry g = support_geometry(spec);
    const double side = g.box.max_side();
    double scale = side > 0.0 ? (1.0 - 2.0 * delta_target) / side : 1.0;
    if (g.diameter > 0.0)
        scale = std::min(scale, (1.0 - 1e-9) / g.diameter);

    std::vector<double> shift;
    for (std::size_t k = 0; k < g.box.lower.size(); ++k)
        shift.push_back(0.5 - scale * 0.5 * (g.box.lower[k] + g.box.upper[k]));
    return Normalization{MeasureSpec::affine(spec, scale, shift), scale, shift};
}

// ---------------------------------------------------------------------------
// Discretization

namespace {

constexpr std::size_t kMaxCloud = std::size_t{1} << 22;

void check_cloud_size(std::size_t n)
{
    if (n > kMaxCloud)
        throw BudgetError("discretization would exceed " + std::to_string(kMaxCloud) + " atoms");
}

} // namespace

AtomCloud discretize(const MeasureSpec& spec, int level)
{
    if (level < 1)
        throw ContractError("discretization level must be positive");
    const auto d = static_cast<std::size_t>(spec.dim());
    AtomCloud out;
    out.dim = spec.dim();

    switch (spec.kind()) {
    case MeasureKind::atomic: {
        const auto& p = spec.params_as<AtomicParams>();
        out.points = p.points;
        for (double w : p.weights)
            out.weights.push_back(spec.mass() * w);
        break;
    }
    case MeasureKind::box_lebesgue: {
        const auto& p = spec.params_as<BoxParams>();
        const QuadratureRule gl = gauss_legendre(level);
        std::size_t total = 1;
        for (std::size_t k = 0; k < d; ++k)
            total *= static_cast<std::size_t>(level);
        check_cloud_size(total);
        std::vector<std::size_t> idx(d, 0);
        for (std::size_t n = 0; n < total; ++n) {
            double w = spec.mass();
            for (std::size_t k = 0; k < d; ++k) {
                const double half = 0.5 * (p.upper[k] - p.lower[k]);
                const double mid = 0.5 * (p.upper[k] + p.lower[k]);
                out.points.push_back(mid + half * gl.nodes[idx[k]]);
                w *= 0.5 * gl.weights[idx[k]];
            }
            out.weights.push_back(w);
            for (std::size_t k = d; k-- > 0;) {
                if (++idx[k] < static_cast<std::size_t>(level))
                    break;
                idx[k] = 0;
            }
        }
        break;
    }
    case MeasureKind::self_similar_1d: {
        const auto& p = spec.params_as<SelfSimilarParams>();
        const std::size_t m = p.digits.size();
        std::size_t total = 1;
        for (int i = 0; i < level; ++i) {
            total *= m;
            check_cloud_size(total);
        }
        double tbar = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            tbar += p.weights[j] * p.digits[j];
        const double mean = p.ratio * tbar / (1.0 - p.ratio);
        const double rn = std::pow(p.ratio, level);
        std::vector<std::size_t> word(static_cast<std::size_t>(level), 0);
        for (std::size_t n = 0; n < total; ++n) {
            double x = 0.0;
            double w = spec.mass();
            double rk = p.ratio;
            for (std::size_t k = 0; k < word.size(); ++k) {
                x += p.digits[word[k]] * rk;
                w *= p.weights[word[k]];
                rk *= p.ratio;
            }
            out.points.push_back(x + rn * mean);
            out.weights.push_back(w);
            for (std::size_t k = word.size(); k-- > 0;) {
                if (++word[k] < m)
                    break;
                word[k] = 0;
            }
        }
        break;
    }
    case MeasureKind::sphere_surface: {
        const auto& p = spec.params_as<SphereParams>();
        if (d == 2) {
            for (int i = 0; i < level; ++i) {
                const SinCos sc = sincospi(2.0 * i / level);
                out.points.push_back(p.center[0] + p.radius * sc.cos);
                out.points.push_back(p.center[1] + p.radius * sc.sin);
                out.weights.push_back(spec.mass() / level);
            }
        } else {
            const QuadratureRule gl = gauss_legendre(level);
            const int nphi = 2 * level;
            for (int i = 0; i < level; ++i) {
                const double ct = gl.nodes[static_cast<std::size_t>(i)];
                const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
                for (int k = 0; k < nphi; ++k) {
                    const SinCos sc = sincospi(2.0 * k / nphi);
                    out.points.push_back(p.center[0] + p.radius * st * sc.cos);
                    out.points.push_back(p.center[1] + p.radius * st * sc.sin);
                    out.points.push_back(p.center[2] + p.radius * ct);
                    out.weights.push_back(spec.mass() * 0.5 * gl.weights[static_cast<std::size_t>(i)] / nphi);
                }
            }
        }
        break;
    }
    case MeasureKind::convolution: {
        out = discretize(spec.children().front(), level);
        for (std::size_t c = 1; c < spec.children().size(); ++c) {
            const AtomCloud other = discretize(spec.children()[c], level);
            check_cloud_size(out.size() * other.size());
            AtomCloud next;
            next.dim = out.dim;
            for (std::size_t i = 0; i < out.size(); ++i) {
                for (std::size_t j = 0; j < other.size(); ++j) {
                    for (std::size_t k = 0; k < d; ++k)
                        next.points.push_back(out.points[i * d + k] + other.points[j * d + k]);
                    next.weights.push_back(out.weights[i] * other.weights[j]);
                }
            }
            out = std::move(next);
        }
        break;
    }
    case MeasureKind::product: {
        out.points.clear();
        out.weights = {1.0};
        std::size_t width = 0;
        for (const auto& c : spec.children()) {
            const AtomCloud part = discretize(c, level);
            const auto cd = static_cast<std::size_t>(part.dim);
            check_cloud_size(out.size() * part.size());
            AtomCloud next;
            for (std::size_t i = 0; i < out.size(); ++i) {
                for (std::size_t j = 0; j < part.size(); ++j) {
                    for (std::size_t k = 0; k < width; ++k)
                        next.points.push_back(out.points[i * width + k]);
                    for (std::size_t k = 0; k < cd; ++k)
                        next.points.push_back(part.points[j * cd + k]);
                    next.weights.push_back(out.weights[i] * part.weights[j]);
                }
            }
            width += cd;
            out.points = std::move(next.points);
            out.weights = std::move(next.weights);
        }
        out.dim = spec.dim();
        break;
    }
    case MeasureKind::affine: {
        const auto& p = spec.params_as<AffineParams>();
        out = discretize(spec.children().front(), level);
        for (std::size_t i = 0; i < out.size(); ++i) {
            for (std::size_t k = 0; k < d; ++k)
                out.points[i * d + k] = p.scale * out.points[i * d + k] + p.shift[k];
        }
        break;
    }
    }
    return out;
}

} // namespace fspec
