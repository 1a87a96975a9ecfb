#include "fspec/energy.hpp"

#include "fspec/error.hpp"

#include <algorithm>
#include <cmath>

namespace fspec {

std::string_view to_string(EnergyKind kind) noexcept
{
    switch (kind) {
    case EnergyKind::discrete_j: return "discrete_J";
    case EnergyKind::continuous_j: return "continuous_J";
    case EnergyKind::discrete_i: return "discrete_I";
    case EnergyKind::sup_j0: return "sup_J0";
    }
    return "discrete_J";
}

std::string_view to_string(Trend trend) noexcept
{
    switch (trend) {
    case Trend::converging: return "converging";
    case Trend::diverging: return "diverging";
    case Trend::flat: return "flat";
    case Trend::undetermined: return "undetermined";
    }
    return "undetermined";
}

TrendStats classify_trend(std::span<const double> log2_terms, int first_shell, const TrendOptions& options)
{
    TrendStats st;
    const int n = static_cast<int>(log2_terms.size());
    if (n == 0)
        return st;
    const int last = first_shell + n - 1;
    int first = std::max(first_shell, last - options.window + 1);
    first = std::max(first, std::min(options.min_first_shell, last - 2));
    first = std::max(first, first_shell);
    st.first = first;
    st.last = last;

    for (int i = std::max(0, n - 4); i + 1 < n; ++i) {
        const double a = log2_terms[static_cast<std::size_t>(i)];
        const double b = log2_terms[static_cast<std::size_t>(i + 1)];
        if (a == kNegInf && b == kNegInf)
            st.tail_ratios.push_back(std::numeric_limits<double>::quiet_NaN());
        else
            st.tail_ratios.push_back(std::exp2(b - a));
    }

    std::vector<double> xs;
    std::vector<double> ys;
    for (int j = first; j <= last; ++j) {
        const double y = log2_terms[static_cast<std::size_t>(j - first_shell)];
        if (std::isfinite(y)) {
            xs.push_back(j);
            ys.push_back(y);
        }
    }
    if (xs.empty()) {
        st.trend = Trend::flat;
        return st;
    }
    if (xs.size() < 3)
        return st;
    const LinearFit fit = least_squares_line(xs, ys);
    st.slope = fit.slope;
    st.residual = fit.residual_rms;
    st.ratio = std::exp2(fit.slope);
    if (st.ratio < options.converge_below)
        st.trend = Trend::converging;
    else if (st.ratio > options.diverge_above)
        st.trend = Trend::diverging;
    else if (fit.residual_rms <= options.flat_residual)
        st.trend = Trend::flat;
    return st;
}

std::vector<double> EnergyEstimate::partial_log_sums() const
{
    LogSum acc;
    if (zero_term > 0.0)
        acc.add_log(std::log(zero_term));
    acc.add_log(log_core);
    std::vector<double> out;
    for (const ShellTerm& t : shells) {
        acc.add_log(t.log_t);
        out.push_back(acc.log_value());
    }
    return out;
}

namespace {

bool hypothesis_fails(const MeasureSpec& spec, double alpha)
{
    const SupportGeometry g = support_geometry(spec);
    if (alpha == 1.0)
        return !g.margin.has_value();
    return alpha * g.diameter >= 1.0;
}

void check_common(const MeasureSpec& spec, double alpha, int max_shell)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw ContractError("lattice scale alpha must be positive");
    if (max_shell < 1)
        throw ContractError("max shell J must be at least 1");
    (void)spec;
}

std::vector<int> energy_regions(double alpha, int max_shell)
{
    std::vector<int> regions;
    const NormBand core = region_band(alpha, kCoreRegion);
    if (core.hi2 > core.lo2)
        regions.push_back(kCoreRegion);
    for (int j = 0; j < max_shell; ++j)
        regions.push_back(j);
    return regions;
}

void finish_trend(EnergyEstimate& e, const TrendOptions& options)
{
    std::vector<double> l2;
    for (const ShellTerm& t : e.shells)
        l2.push_back(t.log_t / std::log(2.0));
    e.trend = classify_trend(l2, 0, options);
    if (e.hypothesis_violated)
        e.flags.emplace_back("hypothesis-violated");
}

EnergyEstimate lattice_power_energy(const MeasureSpec& spec, EnergyKind kind, const EnergyQuery& q)
{
    check_common(spec, q.alpha, q.max_shell);
    const int d = spec.dim();
    const double a = 2.0 / q.theta;
    const double b = q.s / q.theta - d;

    EnergyEstimate e;
    e.kind = kind;
    e.s = q.s;
    e.theta = q.theta;
    e.alpha = q.alpha;
    e.max_shell = q.max_shell;
    e.zero_term = std::pow(spec.mass(), a);
    e.hypothesis_violated = hypothesis_fails(spec, q.alpha);

    TallyRequest req;
    req.sums.push_back({a, b});
    const std::vector<int> regions = energy_regions(q.alpha, q.max_shell);
    const auto tallies = tally_regions(spec, regions, req, {q.alpha, q.budget, q.threads});

    LogSum inner;
    inner.add_log(a * std::log(spec.mass()));
    for (const RegionTally& t : tallies) {
        const double lt = t.sums[0].log_value();
        inner.add_log(lt);
        if (t.index == kCoreRegion) {
            e.log_core = lt;
            continue;
        }
        e.shells.push_back({t.index, lt, t.count, t.max_modulus, true});
    }
    e.log_inner = inner.log_value();
    e.value = std::exp(q.theta * e.log_inner);
    finish_trend(e, q.trend);
    return e;
}

} // namespace

EnergyEstimate discrete_energy(const MeasureSpec& spec, const EnergyQuery& query)
{
    if (query.theta == 0.0)
        throw ContractError("theta = 0 has no integral form: use the sup energy or the spectrum estimator");
    if (!(query.theta > 0.0 && query.theta <= 1.0))
        throw ContractError("theta must lie in (0, 1]");
    if (!(query.s > 0.0) || !std::isfinite(query.s))
        throw ContractError("the discrete energy needs s > 0");
    return lattice_power_energy(spec, EnergyKind::discrete_j, query);
}

EnergyEstimate discrete_s_energy(const MeasureSpec& spec, double s, double alpha, int max_shell,
                                 const LatticeOptions& lattice)
{
    if (!(s > 0.0 && s < spec.dim()))
        throw ContractError("the s-energy needs 0 < s < d");
    EnergyQuery q;
    q.s = s;
    q.theta = 1.0;
    q.alpha = alpha;
    q.max_shell = max_shell;
    q.budget = lattice.budget;
    q.threads = lattice.threads;
    return lattice_power_energy(spec, EnergyKind::discrete_i, q);
}

EnergyEstimate continuous_energy(const MeasureSpec& spec, const EnergyQuery& q)
{
    if (q.theta == 0.0)
        throw ContractError("theta = 0 has no integral form: use the sup energy or the spectrum estimator");
    if (!(q.theta > 0.0 && q.theta <= 1.0))
        throw ContractError("theta must lie in (0, 1]");
    if (!(q.s > 0.0) || !std::isfinite(q.s))
        throw ContractError("the continuous energy needs s > 0");
    if (q.max_shell < 1)
        throw ContractError("max shell J must be at least 1");
    const int d = spec.dim();
    const double a = 2.0 / q.theta;
    const double b = q.s / q.theta - d;

    EnergyEstimate e;
    e.kind = EnergyKind::continuous_j;
    e.s = q.s;
    e.theta = q.theta;
    e.alpha = q.alpha;
    e.max_shell = q.max_shell;

    LogSum inner;
    const RegionIntegral core = integrate_region(spec, kCoreRegion, a, b, q.quadrature);
    e.log_core = core.value > 0.0 ? std::log(core.value) : kNegInf;
    e.quadrature_converged = core.converged;
    inner.add_log(e.log_core);
    for (int j = 0; j < q.max_shell; ++j) {
        const RegionIntegral r = integrate_region(spec, j, a, b, q.quadrature);
        const double lt = r.value > 0.0 ? std::log(r.value) : kNegInf;
        e.shells.push_back({j, lt, r.nodes, 0.0, r.converged});
        e.quadrature_converged = e.quadrature_converged && r.converged;
        inner.add_log(lt);
    }
    e.log_inner = inner.log_value();
    e.value = std::exp(q.theta * e.log_inner);
    finish_trend(e, q.trend);
    if (!e.quadrature_converged) {
        e.trend.trend = Trend::undetermined;
        e.flags.emplace_back("quadrature-unconverged");
    }
    return e;
}

EnergyEstimate sup_energy(const MeasureSpec& spec, double s, double alpha, int max_shell,
                          const LatticeOptions& lattice)
{
    if (!(s >= 0.0) || !std::isfinite(s))
        throw ContractError("the sup energy needs s >= 0");
    check_common(spec, alpha, max_shell);
    EnergyEstimate e;
    e.kind = EnergyKind::sup_j0;
    e.s = s;
    e.theta = 0.0;
    e.alpha = alpha;
    e.max_shell = max_shell;
    e.hypothesis_violated = hypothesis_fails(spec, alpha);

    TallyRequest req;
    req.maxima.push_back({2.0, s});
    const std::vector<int> regions = energy_regions(alpha, max_shell);
    const auto tallies = tally_regions(spec, regions, req, {alpha, lattice.budget, lattice.threads});

    double best = kNegInf;
    for (const RegionTally& t : tallies) {
        const double lm = t.max_log[0];
        if (lm > best) {
            best = lm;
            e.argmax = t.argmax[0];
        }
        if (t.index == kCoreRegion) {
            e.log_core = lm;
            continue;
        }
        e.shells.push_back({t.index, lm, t.count, t.max_modulus, true});
    }
    e.log_inner = best;
    e.value = std::exp(best);
    finish_trend(e, {});
    return e;
}

SpatialEnergy spatial_s_energy_oracle(const AtomCloud& cloud, double s)
{
    if (cloud.size() > 100000)
        throw ContractError("spatial oracle is limited to 1e5 atoms");
    const auto d = static_cast<std::size_t>(cloud.dim);
    const std::size_t n = cloud.size();
    SpatialEnergy out;
    CompensatedSum total;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double r2 = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double diff = cloud.points[i * d + k] - cloud.points[j * d + k];
                r2 += diff * diff;
            }
            if (r2 == 0.0) {
                out.excluded_pairs += 2;
                continue;
            }
            row += cloud.weights[j] * std::pow(r2, -0.5 * s);
        }
        total.add(2.0 * cloud.weights[i] * row);
    }
    out.value = total.value();
    return out;
}

NormProfile lp_norm_profile(const MeasureSpec& spec, double p, int max_shell, bool with_continuum,
                            const LatticeOptions& lattice, const QuadratureOptions& quadrature)
{
    if (!(p > 0.0) || !std::isfinite(p))
        throw ContractError("norm exponent p must be positive");
    if (max_shell < 0)
        throw ContractError("max shell must be nonnegative");
    NormProfile out;
    out.p = p;

    TallyRequest req;
    req.sums.push_back({p, 0.0});
    const std::vector<int> regions = energy_regions(lattice.alpha, max_shell);
    const auto tallies = tally_regions(spec, regions, req, lattice);
    LogSum acc;
    acc.add_log(p * std::log(spec.mass()));
    std::size_t k = 0;
    if (!tallies.empty() && tallies.front().index == kCoreRegion)
        acc.add_log(tallies[k++].sums[0].log_value());
    out.lattice.push_back(std::exp(acc.log_value() / p));
    for (; k < tallies.size(); ++k) {
        acc.add_log(tallies[k].sums[0].log_value());
        out.lattice.push_back(std::exp(acc.log_value() / p));
    }

    if (with_continuum) {
        CompensatedSum sum;
        const RegionIntegral core = integrate_region(spec, kCoreRegion, p, 0.0, quadrature);
        out.continuum_converged = core.converged;
        sum.add(core.value);
        out.continuum.push_back(std::pow(sum.value(), 1.0 / p));
        for (int j = 0; j < max_shell; ++j) {
            const RegionIntegral r = integrate_region(spec, j, p, 0.0, quadrature);
            out.continuum_converged = out.continuum_converged && r.converged;
            sum.add(r.value);
            out.continuum.push_back(std::pow(sum.value(), 1.0 / p));
        }
    }
    return out;
}

} // namespace fspec
