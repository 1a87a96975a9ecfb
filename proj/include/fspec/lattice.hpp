#ifndef FSPEC_LATTICE_HPP
#define FSPEC_LATTICE_HPP

#include "fspec/measure.hpp"
#include "fspec/numeric.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fspec {

inline constexpr std::uint64_t kDefaultPointBudget = 100'000'000;

struct LatticeOptions {
    /// Lattice spacing: points are alpha * n for n in Z^d.
    double alpha = 1.0;
    /// Maximum number of lattice points visited by one call.
    std::uint64_t budget = kDefaultPointBudget;
    /// Worker threads. Results are bit-identical for every value.
    unsigned threads = 1;
};

/// Dyadic shell {z in alpha Z^d : 2^j <= |z| < 2^{j+1}}.
struct ShellSpec {
    int dim = 1;
    double alpha = 1.0;
    int index = 0;
};

/// Shell index used for the punctured unit ball {z : 0 < |z| < 1}.
inline constexpr int kCoreRegion = -1;

/// Integer band lo2 <= |n|^2 < hi2 describing a region in lattice coordinates.
struct NormBand {
    std::int64_t lo2 = 0;
    std::int64_t hi2 = 0;
};

/// Smallest m >= 0 with alpha^2 m >= 4^j. Values within 1e-9 relative of an
/// integer are snapped to it, so |alpha n| = 2^j lands in shell j even when
/// alpha is not a dyadic rational.
std::int64_t shell_threshold(double alpha, int j);

/// Band for shell j >= 0, or for the core region when j == kCoreRegion.
NormBand region_band(double alpha, int j);

/// Number of n in Z^d with lo2 <= |n|^2 < hi2, counted without visiting them.
std::uint64_t band_point_count(int dim, NormBand band);

std::uint64_t shell_point_count(const ShellSpec& shell);

using LatticePoint = std::array<std::int64_t, kMaxDim>;

namespace detail {

template <class F>
void visit_coordinate(int k, int d, std::int64_t lo, std::int64_t hi, std::int64_t first_lo, std::int64_t first_hi,
                      LatticePoint& n, F& visit)
{
    if (hi <= 0)
        return;
    const std::int64_t vmax = isqrt_floor(hi - 1);
    std::int64_t from = -vmax;
    std::int64_t to = vmax;
    if (k == 0) {
        from = std::max(from, first_lo);
        to = std::min(to, first_hi);
    }
    if (k == d - 1) {
        const std::int64_t vmin = lo > 0 ? isqrt_ceil(lo) : 0;
        if (vmin > vmax)
            return;
        if (vmin == 0) {
            for (std::int64_t v = from; v <= to; ++v) {
                n[static_cast<std::size_t>(k)] = v;
                visit(n);
            }
            return;
        }
        for (std::int64_t v = std::max(from, -vmax); v <= std::min(to, -vmin); ++v) {
            n[static_cast<std::size_t>(k)] = v;
            visit(n);
        }
        for (std::int64_t v = std::max(from, vmin); v <= std::min(to, vmax); ++v) {
            n[static_cast<std::size_t>(k)] = v;
            visit(n);
        }
        return;
    }
    for (std::int64_t v = from; v <= to; ++v) {
        n[static_cast<std::size_t>(k)] = v;
        visit_coordinate(k + 1, d, lo - v * v, hi - v * v, first_lo, first_hi, n, visit);
    }
}

} // namespace detail

/// Visits every n with lo2 <= |n|^2 < hi2 and first coordinate in
/// [first_lo, first_hi], in lexicographic order. Memory use is O(d).
template <class F>
void visit_band(int dim, NormBand band, std::int64_t first_lo, std::int64_t first_hi, F&& visit)
{
    LatticePoint n{};
    detail::visit_coordinate(0, dim, band.lo2, band.hi2, first_lo, first_hi, n, visit);
}

/// Streams the integer coordinates n of every point alpha * n of the shell,
/// lexicographically. Throws BudgetError naming the shell if it holds more
/// than `budget` points.
void enumerate_shell(const ShellSpec& shell, const std::function<void(std::span<const std::int64_t>)>& visit,
                     std::uint64_t budget = kDefaultPointBudget);

/// sum over the region of |mu^(z)|^modulus_power |z|^radius_power.
struct PowerSumSpec {
    double modulus_power = 2.0;
    double radius_power = 0.0;
};

/// max over the region of |mu^(z)|^modulus_power |z|^radius_power, with argmax.
struct PowerMaxSpec {
    double modulus_power = 2.0;
    double radius_power = 0.0;
};

struct TallyRequest {
    std::vector<PowerSumSpec> sums;
    std::vector<PowerMaxSpec> maxima;
};

struct RegionTally {
    int index = 0;  // shell index, or kCoreRegion
    std::uint64_t count = 0;
    double max_modulus = 0.0;
    std::vector<LogSum> sums;
    std::vector<double> max_log;                  // natural log of each requested maximum
    std::vector<std::vector<double>> argmax;      // frequency attaining it (empty if none)

    void merge(const RegionTally& later);
};

/// Accumulates the requested statistics over each region in one pass per
/// region. Regions are split into fixed blocks of the first lattice coordinate;
/// blocks are reduced in index order, so the result does not depend on the
/// thread count. The budget covers the total number of points of all regions.
std::vector<RegionTally> tally_regions(const MeasureSpec& spec, std::span<const int> regions,
                                       const TallyRequest& request, const LatticeOptions& options);

/// Aggregates of one dyadic shell at one theta.
struct ShellProfile {
    int j = 0;
    double theta = 1.0;
    /// ln A_j(theta) with A_j = sum |mu^(z)|^{2/theta} |z|^{-d}; -inf when every
    /// coefficient of the shell vanishes.
    double log_a = kNegInf;
    double max_modulus = 0.0;
    std::uint64_t count = 0;

    double log2_a() const noexcept { return log_a / std::log(2.0); }
};

ShellProfile shell_profile(const MeasureSpec& spec, const ShellSpec& shell, double theta,
                           const LatticeOptions& options = {});

/// Profiles for every theta in `thetas` (each in (0, 1]) and every shell
/// j_first..j_last, from a single enumeration. Result is indexed [theta][shell].
std::vector<std::vector<ShellProfile>> shell_profiles(const MeasureSpec& spec, std::span<const double> thetas,
                                                      int j_first, int j_last, const LatticeOptions& options);

} // namespace fspec

#endif
