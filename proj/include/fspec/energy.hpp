#ifndef FSPEC_ENERGY_HPP
#define FSPEC_ENERGY_HPP

#include "fspec/lattice.hpp"
#include "fspec/measure.hpp"
#include "fspec/quadrature.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fspec {

enum class EnergyKind {
    discrete_j,    // lattice sum of the (s, theta)-energy
    continuous_j,  // the same integral by quadrature over R^d
    discrete_i,    // lattice form of the Riesz s-energy (theta = 1)
    sup_j0,        // theta = 0: sup of |mu^(z)|^2 |z|^s over the lattice
};

enum class Trend { converging, diverging, flat, undetermined };

std::string_view to_string(EnergyKind kind) noexcept;
std::string_view to_string(Trend trend) noexcept;

/// Trend of a sequence of shell contributions T_j.
///
/// rho = 2^slope, with slope the least-squares slope of log2 T_j over the
/// trailing window. rho below converge_below is converging, above
/// diverge_above diverging; inside the band the sequence is flat when the fit
/// is clean (residual <= flat_residual) and undetermined otherwise. A window of
/// all-zero shells is flat.
struct TrendOptions {
    int window = 10;
    int min_first_shell = 4;
    double converge_below = 0.98;
    double diverge_above = 1.02;
    double flat_residual = 0.25;
};

struct TrendStats {
    Trend trend = Trend::undetermined;
    double ratio = std::numeric_limits<double>::quiet_NaN();
    double slope = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    int first = 0;
    int last = -1;
    /// T_{j+1} / T_j for the last three shell pairs (NaN where undefined).
    std::vector<double> tail_ratios;
};

/// `log2_terms[i]` is log2 T_j for j = first_shell + i (-inf for an empty shell).
TrendStats classify_trend(std::span<const double> log2_terms, int first_shell, const TrendOptions& options = {});

struct EnergyQuery {
    double s = 1.0;
    double theta = 1.0;
    double alpha = 1.0;
    int max_shell = 10;  // truncation |z| < 2^max_shell
    std::uint64_t budget = kDefaultPointBudget;
    unsigned threads = 1;
    QuadratureOptions quadrature{};
    TrendOptions trend{};
};

struct ShellTerm {
    int j = 0;
    double log_t = kNegInf;  // natural log of the shell contribution T_j
    std::uint64_t count = 0;
    double max_modulus = 0.0;
    bool converged = true;  // quadrature only
};

struct EnergyEstimate {
    EnergyKind kind = EnergyKind::discrete_j;
    double s = 0.0;
    double theta = 1.0;
    double alpha = 1.0;
    int max_shell = 0;

    /// |mu^(0)|^{2/theta} (mass^2 for the s-energy); zero for the integral and sup forms.
    double zero_term = 0.0;
    /// Natural log of the contribution of 0 < |z| < 1, -inf when that region is empty.
    double log_core = kNegInf;
    std::vector<ShellTerm> shells;

    /// Natural log of the inner sum (before the outer power theta).
    double log_inner = kNegInf;
    /// Reported value: inner sum to the power theta; the inner sum itself for the
    /// s-energy; the maximum for the sup form.
    double value = 0.0;

    TrendStats trend;
    bool hypothesis_violated = false;
    bool quadrature_converged = true;
    std::vector<double> argmax;  // sup form only
    std::vector<std::string> flags;

    /// Natural logs of the inner partial sums after each shell (nondecreasing).
    std::vector<double> partial_log_sums() const;
};

/// Lattice sum |mu^(0)|^{2/theta} + sum over 0 < |z| < 2^J, z in alpha Z^d, of
/// |mu^(z)|^{2/theta} |z|^{s/theta - d}, reported to the power theta.
/// Requires theta in (0, 1] and s > 0. When the support leaves every cube
/// [delta, 1-delta]^d (alpha = 1) or alpha >= 1 / diameter, the estimate is
/// labelled hypothesis-violated.
EnergyEstimate discrete_energy(const MeasureSpec& spec, const EnergyQuery& query);

/// Integral of |mu^(z)|^{2/theta} |z|^{s/theta - d} over |z| < 2^J, to the power theta.
EnergyEstimate continuous_energy(const MeasureSpec& spec, const EnergyQuery& query);

/// |mu^(0)|^2 + sum |mu^(z)|^2 |z|^{s-d}; requires 0 < s < d. Identical to
/// discrete_energy at theta = 1.
EnergyEstimate discrete_s_energy(const MeasureSpec& spec, double s, double alpha, int max_shell,
                                 const LatticeOptions& lattice = {});

/// max over 0 < |z| < 2^J in alpha Z^d of |mu^(z)|^2 |z|^s, with its argmax.
EnergyEstimate sup_energy(const MeasureSpec& spec, double s, double alpha, int max_shell,
                          const LatticeOptions& lattice = {});

struct SpatialEnergy {
    double value = 0.0;
    /// Pairs i != j at distance zero, left out of the sum.
    std::uint64_t excluded_pairs = 0;
};

/// sum_{i != j} p_i p_j |x_i - x_j|^{-s} over a finite atom cloud (at most 1e5 atoms).
SpatialEnergy spatial_s_energy_oracle(const AtomCloud& cloud, double s);

/// Cumulative l^p and L^p norms of mu^ over the balls |z| < 2^J, J = 0..max_shell.
struct NormProfile {
    double p = 2.0;
    std::vector<double> lattice;    // (sum over alpha Z^d) ^ (1/p), including z = 0
    std::vector<double> continuum;  // (integral over R^d) ^ (1/p); empty unless requested
    bool continuum_converged = true;
};

NormProfile lp_norm_profile(const MeasureSpec& spec, double p, int max_shell, bool with_continuum,
                            const LatticeOptions& lattice = {}, const QuadratureOptions& quadrature = {});

} // namespace fspec

#endif
