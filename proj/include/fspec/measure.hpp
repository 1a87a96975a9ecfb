#ifndef FSPEC_MEASURE_HPP
#define FSPEC_MEASURE_HPP

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace fspec {

/// Largest ambient dimension any measure may live in.
inline constexpr int kMaxDim = 6;
/// Atom count limit for a single atomic measure.
inline constexpr std::size_t kMaxAtoms = 10000;

enum class MeasureKind {
    atomic,
    box_lebesgue,
    self_similar_1d,
    sphere_surface,
    convolution,
    product,
    affine,
};

std::string_view to_string(MeasureKind kind) noexcept;
std::optional<MeasureKind> measure_kind_from_string(std::string_view name) noexcept;

struct AtomicParams {
    std::vector<double> points;   // row-major, one row of d coordinates per atom
    std::vector<double> weights;  // sum to one
};

struct BoxParams {
    std::vector<double> lower;
    std::vector<double> upper;
};

/// Invariant measure of the maps x -> ratio * (x + digit_j) chosen with
/// probabilities weights_j; equivalently the law of sum_{k>=1} t_k ratio^k.
/// With ratio 1/3 and digits {0, 2} this is the middle-third Cantor measure on [0, 1].
struct SelfSimilarParams {
    double ratio = 0.0;
    std::vector<double> digits;
    std::vector<double> weights;
};

/// Normalized surface measure of a sphere (d = 2: circle, d = 3: sphere).
struct SphereParams {
    std::vector<double> center;
    double radius = 0.0;
};

/// Pushforward of the single child through x -> scale * x + shift.
struct AffineParams {
    double scale = 1.0;
    std::vector<double> shift;
};

struct CombinatorParams {};

using MeasureParams =
    std::variant<AtomicParams, BoxParams, SelfSimilarParams, SphereParams, AffineParams, CombinatorParams>;

struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    double max_side() const noexcept;
    double diagonal() const noexcept;
};

/// Declarative, immutable description of a compactly supported finite measure.
/// Construct through the named factories, which validate every invariant and
/// throw ConfigError on violation.
class MeasureSpec {
public:
    static MeasureSpec atomic(int d, std::vector<double> points, std::vector<double> weights, double mass = 1.0);
    static MeasureSpec dirac(std::vector<double> location, double mass = 1.0);
    static MeasureSpec box_lebesgue(std::vector<double> lower, std::vector<double> upper, double mass = 1.0);
    static MeasureSpec self_similar(double ratio, std::vector<double> digits, std::vector<double> weights,
                                    double mass = 1.0);
    /// Middle-third Cantor measure on [0, 1].
    static MeasureSpec cantor();
    static MeasureSpec sphere_surface(std::vector<double> center, double radius, double mass = 1.0);
    static MeasureSpec convolve(const MeasureSpec& a, const MeasureSpec& b);
    static MeasureSpec convolve(std::vector<MeasureSpec> children);
    static MeasureSpec product(std::vector<MeasureSpec> children);
    static MeasureSpec affine(const MeasureSpec& child, double scale, std::vector<double> shift);

    int dim() const noexcept { return dim_; }
    MeasureKind kind() const noexcept { return kind_; }
    double mass() const noexcept { return mass_; }
    const MeasureParams& params() const noexcept { return params_; }
    const std::vector<MeasureSpec>& children() const noexcept { return children_; }

    template <class P>
    const P& params_as() const
    {
        return std::get<P>(params_);
    }

    /// True when |mu^(z)| depends on |z| only.
    bool radial_modulus() const noexcept;

private:
    MeasureSpec() = default;

    int dim_ = 0;
    MeasureKind kind_ = MeasureKind::atomic;
    double mass_ = 1.0;
    MeasureParams params_ = CombinatorParams{};
    std::vector<MeasureSpec> children_;
};

struct FourierSample {
    std::vector<double> frequency;
    std::complex<double> value;
    double modulus = 0.0;
};

/// mu^(z) = integral of e^{-2 pi i z.x} d mu(x). z.size() must equal spec.dim().
std::complex<double> fourier_transform(const MeasureSpec& spec, std::span<const double> z);

/// |mu^(z)|, computed without the phase factors where the closed form allows.
double fourier_modulus(const MeasureSpec& spec, std::span<const double> z);

FourierSample eval_ft(const MeasureSpec& spec, std::span<const double> z);

struct SupportGeometry {
    Box box;
    /// Euclidean diameter of the support; exact for every kind except
    /// convolutions in d >= 2, where it is an upper bound.
    double diameter = 0.0;
    /// Largest delta with support inside [delta, 1-delta]^d, capped at 1/2.
    std::optional<double> margin;
    /// sup |x| over the support.
    double max_norm = 0.0;
};

SupportGeometry support_geometry(const MeasureSpec& spec);

struct Normalization {
    MeasureSpec spec;
    double scale;
    std::vector<double> shift;
};

/// Affine image of spec with support centred in [delta, 1-delta]^d, using the
/// largest scale that fits and stays strictly below 1 / diameter.
Normalization normalize_to_margin(const MeasureSpec& spec, double delta_target);

/// Weighted atoms approximating the measure: self-similar measures at the given
/// recursion level (one atom per cylinder, placed at its barycentre), boxes by
/// a midpoint grid with `level` cells per axis, spheres by `level` equally spaced
/// points (d = 2) or a level x 2 level Gauss-Legendre/trapezoid grid (d = 3).
struct AtomCloud {
    int dim = 0;
    std::vector<double> points;
    std::vector<double> weights;

    std::size_t size() const noexcept { return weights.size(); }
};

AtomCloud discretize(const MeasureSpec& spec, int level);

} // namespace fspec

#endif
