#ifndef FSPEC_SPECTRUM_HPP
#define FSPEC_SPECTRUM_HPP

#include "fspec/lattice.hpp"
#include "fspec/measure.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fspec {

struct SpectrumOptions {
    double alpha = 1.0;
    int j0 = 4;   // first shell of the regression window
    int j1 = 13;  // last shell, j1 >= j0 + 3
    std::uint64_t budget = kDefaultPointBudget;
    unsigned threads = 1;
};

/// Default regression window [4, J-1] and shell cap J for dimension d.
int default_max_shell(int dim) noexcept;
SpectrumOptions default_spectrum_options(int dim);

struct SpectrumPoint {
    double theta = 0.0;
    /// clamp(-theta * slope, 0) for theta > 0 and clamp(-2 * slope of log2 M_j, 0)
    /// at theta = 0. Empty when every shell vanishes (degenerate sampling) or
    /// when the regression failed.
    std::optional<double> dim;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    int j0 = 0;
    int j1 = 0;
    std::vector<int> excluded_shells;  // shells with A_j = 0 (or M_j = 0), left out of the fit
    /// Largest least-squares slope over any 4 consecutive usable shells of the window.
    double max_window_slope = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> flags;  // "degenerate", "excluded-shells", "estimation-failed"

    bool degenerate() const noexcept;
};

/// Builds a point from per-shell log2 statistics (log2 A_j for theta > 0,
/// log2 M_j at theta = 0), values[i] belonging to shell j0 + i.
/// Throws EstimationError with fewer than 4 usable shells unless all vanish.
SpectrumPoint point_from_log2(double theta, std::span<const double> log2_values, int j0);

/// Shell profiles for every theta of a grid (theta = 0 entries carry M_j and
/// counts only), over shells opts.j0..opts.j1, from one lattice pass.
std::vector<std::vector<ShellProfile>> grid_profiles(const MeasureSpec& spec, std::span<const double> grid,
                                                     const SpectrumOptions& opts);

SpectrumPoint point_from_profiles(double theta, std::span<const ShellProfile> profiles);

SpectrumPoint estimate_dim_theta(const MeasureSpec& spec, double theta, const SpectrumOptions& opts);
SpectrumPoint estimate_dim_fourier(const MeasureSpec& spec, const SpectrumOptions& opts);

struct SpectrumCurve {
    std::vector<SpectrumPoint> points;
    /// Least-squares nondecreasing concave fit to the defined raw estimates;
    /// NaN at points without an estimate.
    std::vector<double> projected;
    /// max |raw - projected|; NaN when fewer than two points have estimates.
    double max_projection_gap = std::numeric_limits<double>::quiet_NaN();
    /// Some grid point has no estimate (degenerate or failed).
    bool partial = false;
};

SpectrumCurve curve_from_profiles(std::span<const double> grid,
                                  const std::vector<std::vector<ShellProfile>>& profiles);

/// The grid must lie in [0, 1], be strictly increasing and contain both endpoints.
SpectrumCurve spectrum_curve(const MeasureSpec& spec, std::span<const double> grid, const SpectrumOptions& opts);

/// 0, 1/8, ..., 1.
std::vector<double> default_theta_grid();

/// Least-squares projection of y (at strictly increasing x) onto nonnegative
/// nondecreasing concave sequences, solved exactly as a nonnegative least-squares
/// problem in the intercept and the slope decrements.
std::vector<double> project_monotone_concave(std::span<const double> x, std::span<const double> y);

enum class Divergence { converges, diverges, near_critical };
std::string_view to_string(Divergence d) noexcept;

struct DivergenceCall {
    Divergence label = Divergence::near_critical;
    double critical = 0.0;  // estimated critical exponent; +inf for degenerate sampling
    double margin = 0.0;    // s - critical
    SpectrumPoint point;
};

/// Compares s with the estimated critical exponent, with a +-band near-critical zone.
DivergenceCall classify_divergence(const MeasureSpec& spec, double s, double theta, const SpectrumOptions& opts,
                                   double band = 0.05);

} // namespace fspec

#endif
