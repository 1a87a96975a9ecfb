#include "fspec/verify.hpp"

#include "fspec/energy.hpp"
#include "fspec/error.hpp"
#include "fspec/zoo.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace fspec {

std::string_view to_string(CheckStatus s) noexcept
{
    switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped: return "skipped";
    case CheckStatus::excluded: return "excluded";
    }
    return "skipped";
}

std::size_t VerificationReport::count(CheckStatus s) const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [s](const CheckRecord& c) { return c.status == s; }));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x)
{
    return format12(x);
}

std::string fmt_opt(const std::optional<double>& x)
{
    return x ? format12(*x) : std::string("undefined");
}

CheckRecord make_record(const std::string& suite, const ZooMember& m, const std::string& key)
{
    CheckRecord r;
    r.id = suite + "/" + m.name + (key.empty() ? "" : "/" + key);
    r.measure = m.name;
    r.fingerprint = fingerprint(m.spec);
    return r;
}

// Spectrum curves are shared between suites of one run.
class Context {
public:
    explicit Context(const VerifyOptions& opts) : opts_(opts) {}

    const VerifyOptions& opts() const { return opts_; }

    int max_shell(int dim) const { return opts_.max_shell.value_or(default_max_shell(dim)); }

    SpectrumOptions spectrum_options(const MeasureSpec& spec, double alpha) const
    {
        SpectrumOptions o;
        o.alpha = alpha;
        o.j0 = 4;
        o.j1 = max_shell(spec.dim()) - 1;
        o.budget = opts_.budget;
        o.threads = opts_.threads;
        return o;
    }

    const SpectrumCurve& curve(const ZooMember& m, double alpha)
    {
        const std::string key = m.name + "@" + format17(alpha);
        auto it = curves_.find(key);
        if (it == curves_.end())
            it = curves_.emplace(key, spectrum_curve(m.spec, opts_.theta_grid, spectrum_options(m.spec, alpha))).first;
        return it->second;
    }

    SpectrumPoint point(const ZooMember& m, double alpha, double theta)
    {
        const auto& grid = opts_.theta_grid;
        const auto pos = std::find(grid.begin(), grid.end(), theta);
        if (pos != grid.end())
            return curve(m, alpha).points[static_cast<std::size_t>(pos - grid.begin())];
        const double g[] = {theta};
        try {
            return point_from_profiles(theta, grid_profiles(m.spec, g, spectrum_options(m.spec, alpha)).front());
        } catch (const EstimationError&) {
            SpectrumPoint pt;
            pt.theta = theta;
            pt.flags.emplace_back("estimation-failed");
            return pt;
        }
    }

private:
    VerifyOptions opts_;
    std::map<std::string, SpectrumCurve> curves_;
};

std::string point_note(const SpectrumPoint& p)
{
    std::string out;
    for (const auto& f : p.flags)
        out += (out.empty() ? "" : "|") + f;
    return out;
}

// ---------------------------------------------------------------------------

VerificationReport coeff_suite(Context& ctx, const std::vector<ZooMember>& zoo)
{
    const VerifyOptions& o = ctx.opts();
    VerificationReport rep{"coeff", {}};
    for (const ZooMember& m : zoo) {
        const SupportGeometry g = support_geometry(m.spec);
        const bool excluded = !g.margin || *g.margin < o.min_margin;
        for (const auto& [s, theta] : o.energy_pairs) {
            const auto t0 = Clock::now();
            CheckRecord r = make_record(rep.suite, m, "s=" + fmt(s) + "/theta=" + fmt(theta));
            r.quantity = "ratio_drift";
            r.comparison = "<";
            r.threshold = o.drift_limit;
            r.params = {{"s", fmt(s)},
                        {"theta", fmt(theta)},
                        {"alpha", "1"},
                        {"J_low", std::to_string(o.drift_shell_low)},
                        {"J_high", std::to_string(o.drift_shell_high)}};
            if (m.spec.dim() > 3) {
                r.status = CheckStatus::skipped;
                r.note = "continuous quadrature needs d <= 3";
                rep.checks.push_back(std::move(r));
                continue;
            }
            EnergyQuery q;
            q.s = s;
            q.theta = theta;
            q.max_shell = o.drift_shell_high;
            q.budget = o.budget;
            q.threads = o.threads;
            const EnergyEstimate disc = discrete_energy(m.spec, q);
            const EnergyEstimate cont = continuous_energy(m.spec, q);
            const auto pd = disc.partial_log_sums();
            const auto pc = cont.partial_log_sums();
            const auto lo = static_cast<std::size_t>(o.drift_shell_low - 1);
            const auto hi = static_cast<std::size_t>(o.drift_shell_high - 1);
            const double r_lo = std::exp(pc[lo] - pd[lo]);
            const double r_hi = std::exp(pc[hi] - pd[hi]);
            r.measured = std::abs(r_hi / r_lo - 1.0);
            r.params.emplace_back("ratio_low", fmt(r_lo));
            r.params.emplace_back("ratio_high", fmt(r_hi));
            r.params.emplace_back("trend_discrete", std::string(to_string(disc.trend.trend)));
            r.params.emplace_back("trend_continuous", std::string(to_string(cont.trend.trend)));
            const bool conflict = (disc.trend.trend == Trend::converging && cont.trend.trend == Trend::diverging) ||
                                  (disc.trend.trend == Trend::diverging && cont.trend.trend == Trend::converging);
            if (excluded) {
                r.status = CheckStatus::excluded;
                r.note = "hypothesis-violated: support margin below " + fmt(o.min_margin);
            } else if (conflict) {
                r.status = CheckStatus::fail;
                r.note = "discrete and continuous trends disagree";
            } else {
                r.status = r.measured < o.drift_limit ? CheckStatus::pass : CheckStatus::fail;
                if (disc.trend.trend == Trend::diverging && cont.trend.trend == Trend::diverging)
                    r.note = "both sides diverge; trends agree";
            }
            if (!cont.quadrature_converged)
                r.note += std::string(r.note.empty() ? "" : "; ") + "quadrature-unconverged";
            r.runtime_seconds = seconds_since(t0);
            rep.checks.push_back(std::move(r));
        }
    }
    return rep;
}

VerificationReport lp_suite(Context& ctx, const std::vector<ZooMember>& zoo)
{
    const VerifyOptions& o = ctx.opts();
    VerificationReport rep{"lp-equivalence", {}};
    for (const ZooMember& m : zoo) {
        const SupportGeometry g = support_geometry(m.spec);
        const bool excluded = !g.margin || *g.margin < o.lp_margin;
        for (double p : o.lp_exponents) {
            const auto t0 = Clock::now();
            CheckRecord r = make_record(rep.suite, m, "p=" + fmt(p));
            r.quantity = "ratio_band";
            r.comparison = "<=";
            r.threshold = o.ratio_band;
            r.params = {{"p", fmt(p)},
                        {"J_first", std::to_string(o.lp_shell_first)},
                        {"J_last", std::to_string(o.lp_shell_last)}};
            if (m.spec.dim() > 2) {
                r.status = CheckStatus::skipped;
                r.note = "quadrature cost limits this check to d <= 2";
                rep.checks.push_back(std::move(r));
                continue;
            }
            const NormProfile prof =
                lp_norm_profile(m.spec, p, o.lp_shell_last, true, {1.0, o.budget, o.threads}, {});
            double lo = std::numeric_limits<double>::infinity();
            double hi = 0.0;
            std::string traj;
            for (int j = o.lp_shell_first; j <= o.lp_shell_last; ++j) {
                const auto k = static_cast<std::size_t>(j);
                const double ratio = prof.lattice[k] / prof.continuum[k];
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
                traj += (traj.empty() ? "" : " ") + fmt(ratio);
            }
            r.measured = hi / lo;
            r.params.emplace_back("ratios", traj);
            if (excluded) {
                r.status = CheckStatus::excluded;
                r.note = "hypothesis-violated: support margin below " + fmt(o.lp_margin);
            } else {
                r.status = r.measured <= o.ratio_band ? CheckStatus::pass : CheckStatus::fail;
            }
            if (!prof.continuum_converged)
                r.note += std::string(r.note.empty() ? "" : "; ") + "quadrature-unconverged";
            r.runtime_seconds = seconds_since(t0);
            rep.checks.push_back(std::move(r));
        }
    }
    return rep;
}

VerificationReport upper_bound_suite(Context& ctx, const std::vector<ZooMember>& zoo)
{
    const VerifyOptions& o = ctx.opts();
    VerificationReport rep{"upper-bound", {}};
    for (const ZooMember& m : zoo) {
        const auto t0 = Clock::now();
        const double alpha = natural_alpha(m.spec);
        const SpectrumCurve& curve = ctx.curve(m, alpha);
        const double setup = seconds_since(t0);
        const auto zero = std::find(o.theta_grid.begin(), o.theta_grid.end(), 0.0);
        const std::optional<double> dim_f = curve.points[static_cast<std::size_t>(zero - o.theta_grid.begin())].dim;
        const int d = m.spec.dim();
        for (std::size_t t = 0; t < o.theta_grid.size(); ++t) {
            const double theta = o.theta_grid[t];
            CheckRecord r = make_record(rep.suite, m, "theta=" + fmt(theta));
            r.quantity = "slack";
            r.comparison = "<=";
            r.threshold = o.bound_slack;
            const SpectrumPoint& pt = curve.points[t];
            r.params = {{"theta", fmt(theta)},     {"alpha", fmt(alpha)},          {"d", std::to_string(d)},
                        {"dim_theta", fmt_opt(pt.dim)}, {"dim_fourier", fmt_opt(dim_f)}, {"j0", std::to_string(pt.j0)},
                        {"j1", std::to_string(pt.j1)}};
            if (!pt.dim || !dim_f) {
                r.status = CheckStatus::skipped;
                r.note = "no estimate: " + point_note(pt);
            } else {
                r.measured = *pt.dim - *dim_f - d * theta;
                r.status = r.measured <= o.bound_slack ? CheckStatus::pass : CheckStatus::fail;
            }
            r.runtime_seconds = t == 0 ? setup : 0.0;
            rep.checks.push_back(std::move(r));
        }
    }
    return rep;
}

VerificationReport corollary_suite(Context& ctx, const std::vector<ZooMember>& zoo)
{
    const VerifyOptions& o = ctx.opts();
    VerificationReport rep{"lp-corollary", {}};
    for (const ZooMember& m : zoo) {
        const auto t0 = Clock::now();
        const double alpha = natural_alpha(m.spec);
        const SpectrumOptions so = ctx.spectrum_options(m.spec, alpha);
        const SpectrumCurve& curve = ctx.curve(m, alpha);
        const int d = m.spec.dim();

        TallyRequest req;
        std::vector<std::pair<std::size_t, double>> combos;
        for (std::size_t t = 0; t < o.theta_grid.size(); ++t) {
            if (o.theta_grid[t] == 0.0)
                continue;
            for (double p : o.corollary_exponents) {
                combos.emplace_back(t, p);
                req.sums.push_back({2.0 * p / o.theta_grid[t], 0.0});
            }
        }
        std::vector<int> regions;
        for (int j = so.j0; j <= so.j1; ++j)
            regions.push_back(j);
        const auto tallies = tally_regions(m.spec, regions, req, {alpha, o.budget, o.threads});
        const double setup = seconds_since(t0);

        TrendOptions membership;
        membership.window = so.j1 - so.j0 + 1;
        membership.min_first_shell = so.j0;
        for (std::size_t c = 0; c < combos.size(); ++c) {
            const auto [t, p] = combos[c];
            const double theta = o.theta_grid[t];
            std::vector<double> l2;
            for (const RegionTally& tally : tallies)
                l2.push_back(tally.sums[c].log_value() / std::log(2.0));
            const TrendStats decay = classify_trend(l2, so.j0, membership);
            const SpectrumPoint& pt = curve.points[t];
            const double bound = d * theta / p;

            CheckRecord r = make_record(rep.suite, m, "theta=" + fmt(theta) + "/p=" + fmt(p));
            r.quantity = "dim_theta";
            r.comparison = ">=";
            r.threshold = bound - o.bound_slack;
            r.params = {{"theta", fmt(theta)},
                        {"p", fmt(p)},
                        {"alpha", fmt(alpha)},
                        {"bound", fmt(bound)},
                        {"decay_ratio", fmt(decay.ratio)},
                        {"decay_trend", std::string(to_string(decay.trend))}};
            r.measured = pt.dim.value_or(std::numeric_limits<double>::quiet_NaN());
            if (decay.trend != Trend::converging) {
                r.status = CheckStatus::skipped;
                r.note = "coefficients not certified in l^{2p/theta}";
            } else if (!pt.dim) {
                r.status = CheckStatus::skipped;
                r.note = "no estimate: " + point_note(pt);
            } else {
                r.status = r.measured >= r.threshold ? CheckStatus::pass : CheckStatus::fail;
            }
            r.runtime_seconds = c == 0 ? setup : 0.0;
            rep.checks.push_back(std::move(r));
        }
    }
    return rep;
}

VerificationReport rescaling_suite(Context& ctx, const std::vector<ZooMember>& zoo)
{
    const VerifyOptions& o = ctx.opts();
    VerificationReport rep{"rescaling", {}};
    for (const ZooMember& m : zoo) {
        const double diameter = support_geometry(m.spec).diameter;
        const double c = diameter > 0.0 ? std::min(1.0, 0.5 / diameter) : 1.0;
        const double a1 = o.alpha_pair.first * c;
        const double a2 = o.alpha_pair.second * c;
        for (double theta : o.rescale_thetas) {
            const auto t0 = Clock::now();
            const SpectrumPoint p1 = ctx.point(m, a1, theta);
            const SpectrumPoint p2 = ctx.point(m, a2, theta);
            CheckRecord r = make_record(rep.suite, m, "theta=" + fmt(theta));
            r.quantity = "dim_difference";
            r.comparison = "<=";
            r.threshold = o.dim_tolerance;
            r.params = {{"theta", fmt(theta)},       {"alpha_1", fmt(a1)},        {"alpha_2", fmt(a2)},
                        {"dim_alpha_1", fmt_opt(p1.dim)}, {"dim_alpha_2", fmt_opt(p2.dim)}};
            if (p1.dim && p2.dim) {
                r.measured = std::abs(*p1.dim - *p2.dim);
                r.status = r.measured <= o.dim_tolerance ? CheckStatus::pass : CheckStatus::fail;
            } else if (p1.degenerate() && p2.degenerate()) {
                r.status = CheckStatus::pass;
                r.note = "degenerate at both scales";
            } else {
                r.status = CheckStatus::fail;
                r.note = "estimate missing at one scale: " + point_note(p1.dim ? p2 : p1);
            }
            r.runtime_seconds = seconds_since(t0);
            rep.checks.push_back(std::move(r));
        }
        if (diameter >= 1.0) {
            // alpha = 1 is outside 0 < alpha < 1/R: show what the integer lattice sees.
            const auto t0 = Clock::now();
            const SpectrumPoint p0 = ctx.point(m, 1.0, 1.0);
            const SpectrumPoint p1 = ctx.point(m, a1, 1.0);
            CheckRecord r = make_record(rep.suite, m, "inadmissible-alpha");
            r.quantity = "dim_difference";
            r.comparison = "<=";
            r.threshold = o.dim_tolerance;
            r.params = {{"theta", "1"},
                        {"alpha_1", "1"},
                        {"alpha_2", fmt(a1)},
                        {"dim_alpha_1", fmt_opt(p0.dim)},
                        {"dim_alpha_2", fmt_opt(p1.dim)}};
            if (p0.dim && p1.dim)
                r.measured = std::abs(*p0.dim - *p1.dim);
            r.status = CheckStatus::excluded;
            r.note = "alpha = 1 is not admissible since alpha R >= 1" +
                     std::string(p0.degenerate() ? "; degenerate on Z" : "");
            r.runtime_seconds = seconds_since(t0);
            rep.checks.push_back(std::move(r));
        }
    }
    return rep;
}

VerificationReport shape_suite(Context& ctx, const std::vector<ZooMember>& zoo)
{
    const VerifyOptions& o = ctx.opts();
    VerificationReport rep{"shape", {}};
    for (const ZooMember& m : zoo) {
        const auto t0 = Clock::now();
        const double alpha = natural_alpha(m.spec);
        const SpectrumCurve& curve = ctx.curve(m, alpha);
        CheckRecord r = make_record(rep.suite, m, "");
        r.quantity = "max_projection_gap";
        r.comparison = "<=";
        r.threshold = o.gap_limit;
        std::string raw;
        std::string proj;
        for (std::size_t t = 0; t < curve.points.size(); ++t) {
            raw += (raw.empty() ? "" : " ") + fmt_opt(curve.points[t].dim);
            proj += (proj.empty() ? "" : " ") + fmt(curve.projected[t]);
        }
        r.params = {{"alpha", fmt(alpha)}, {"raw", raw}, {"projected", proj}};
        r.measured = curve.max_projection_gap;
        if (std::isnan(curve.max_projection_gap)) {
            r.status = CheckStatus::skipped;
            r.note = "fewer than two grid points have estimates";
        } else {
            r.status = r.measured <= o.gap_limit ? CheckStatus::pass : CheckStatus::fail;
            if (curve.partial)
                r.note = "partial curve";
        }
        r.runtime_seconds = seconds_since(t0);
        rep.checks.push_back(std::move(r));
    }
    return rep;
}

VerificationReport convolution_suite(Context& ctx, const std::vector<ZooMember>& zoo)
{
    const VerifyOptions& o = ctx.opts();
    VerificationReport rep{"convolution-law", {}};
    constexpr int kPoints = 100;
    constexpr double kTheta = 0.5;
    for (std::size_t idx = 0; idx < zoo.size(); ++idx) {
        const ZooMember& m = zoo[idx];
        if (m.spec.kind() != MeasureKind::convolution)
            continue;
        const auto t0 = Clock::now();
        const int d = m.spec.dim();
        const auto du = static_cast<std::size_t>(d);
        const double alpha = natural_alpha(m.spec);
        const std::int64_t reach = std::int64_t{1} << (ctx.max_shell(d) - 1);
        std::mt19937_64 rng(o.seed + idx);

        double max_err = 0.0;
        LogSum direct;
        LogSum from_children;
        std::vector<double> z(du);
        for (int k = 0; k < kPoints; ++k) {
            bool zero = true;
            for (std::size_t c = 0; c < du; ++c) {
                const auto n = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(2 * reach + 1)) - reach;
                z[c] = alpha * static_cast<double>(n);
                zero = zero && n == 0;
            }
            const double conv = fourier_modulus(m.spec, z);
            double prod = 1.0;
            for (const auto& child : m.spec.children())
                prod *= fourier_modulus(child, z);
            max_err = std::max(max_err, std::abs(conv - prod));
            if (zero)
                continue;
            double r2 = 0.0;
            for (double v : z)
                r2 += v * v;
            const double lr = -0.5 * d * std::log(r2);
            direct.add_log(conv > 0.0 ? (2.0 / kTheta) * std::log(conv) + lr : kNegInf);
            from_children.add_log(prod > 0.0 ? (2.0 / kTheta) * std::log(prod) + lr : kNegInf);
        }
        const double runtime = seconds_since(t0);

        CheckRecord r = make_record(rep.suite, m, "pointwise");
        r.quantity = "max_abs_error";
        r.comparison = "<=";
        r.threshold = 1e-12 * m.spec.mass();
        r.params = {{"points", std::to_string(kPoints)}, {"alpha", fmt(alpha)}, {"seed", std::to_string(o.seed + idx)}};
        r.measured = max_err;
        r.status = max_err <= r.threshold ? CheckStatus::pass : CheckStatus::fail;
        r.runtime_seconds = runtime;
        rep.checks.push_back(std::move(r));

        CheckRecord s = make_record(rep.suite, m, "power-sum");
        s.quantity = "relative_difference";
        s.comparison = "<=";
        s.threshold = 1e-12;
        s.params = {{"points", std::to_string(kPoints)}, {"theta", fmt(kTheta)}, {"seed", std::to_string(o.seed + idx)}};
        const double a = direct.log_value();
        const double b = from_children.log_value();
        s.measured = (a == kNegInf && b == kNegInf) ? 0.0 : std::abs(std::expm1(b - a));
        s.status = s.measured <= s.threshold ? CheckStatus::pass : CheckStatus::fail;
        rep.checks.push_back(std::move(s));
    }
    if (rep.checks.empty()) {
        CheckRecord r;
        r.id = rep.suite + "/none";
        r.quantity = "max_abs_error";
        r.comparison = "<=";
        r.status = CheckStatus::skipped;
        r.note = "no convolution members in the zoo";
        rep.checks.push_back(std::move(r));
    }
    return rep;
}

DeltaDemoRow demo_row(const std::string& label, const MeasureSpec& spec, double alpha, const VerifyOptions& o)
{
    DeltaDemoRow row;
    row.label = label;
    row.alpha = alpha;
    row.margin = support_geometry(spec).margin;
    for (int n = 1; n <= 100; ++n) {
        for (int sign : {-1, 1}) {
            const double z = alpha * sign * n;
            row.max_coefficient = std::max(row.max_coefficient, fourier_modulus(spec, std::span<const double>(&z, 1)));
        }
    }
    row.thetas = {0.25, 0.5, 0.75, 1.0};
    SpectrumOptions so;
    so.alpha = alpha;
    so.j1 = o.max_shell.value_or(default_max_shell(1)) - 1;
    so.budget = o.budget;
    so.threads = o.threads;
    const auto profiles = grid_profiles(spec, row.thetas, so);
    bool all_degenerate = true;
    for (std::size_t t = 0; t < row.thetas.size(); ++t) {
        SpectrumPoint pt;
        try {
            pt = point_from_profiles(row.thetas[t], profiles[t]);
        } catch (const EstimationError&) {
            pt.flags.emplace_back("estimation-failed");
        }
        all_degenerate = all_degenerate && pt.degenerate();
        row.dims.push_back(pt.dim);
    }
    row.flag = all_degenerate ? "degenerate" : "ok";
    return row;
}

} // namespace

VerificationReport check_coeff_theorem(const std::vector<ZooMember>& zoo, const VerifyOptions& opts)
{
    Context ctx(opts);
    return coeff_suite(ctx, zoo);
}

VerificationReport check_lp_equivalence(const std::vector<ZooMember>& zoo, const VerifyOptions& opts)
{
    Context ctx(opts);
    return lp_suite(ctx, zoo);
}

VerificationReport check_upper_bound(const std::vector<ZooMember>& zoo, const VerifyOptions& opts)
{
    Context ctx(opts);
    return upper_bound_suite(ctx, zoo);
}

VerificationReport check_lp_corollary(const std::vector<ZooMember>& zoo, const VerifyOptions& opts)
{
    Context ctx(opts);
    return corollary_suite(ctx, zoo);
}

VerificationReport check_rescaling(const std::vector<ZooMember>& zoo, const VerifyOptions& opts)
{
    Context ctx(opts);
    return rescaling_suite(ctx, zoo);
}

VerificationReport check_shape(const std::vector<ZooMember>& zoo, const VerifyOptions& opts)
{
    Context ctx(opts);
    return shape_suite(ctx, zoo);
}

VerificationReport check_convolution_law(const std::vector<ZooMember>& zoo, const VerifyOptions& opts)
{
    Context ctx(opts);
    return convolution_suite(ctx, zoo);
}

DeltaDemo demo_delta_necessity(const VerifyOptions& opts, std::optional<double> alt_alpha)
{
    const MeasureSpec unit = MeasureSpec::box_lebesgue({0.0}, {1.0});
    const Normalization norm = normalize_to_margin(unit, 0.25);
    DeltaDemo demo;
    demo.rows.push_back(demo_row("unit_interval_on_Z", unit, 1.0, opts));
    demo.rows.push_back(demo_row("normalized_to_quarter_margin", norm.spec, 1.0, opts));
    if (alt_alpha)
        demo.rows.push_back(demo_row("unit_interval_on_alpha_Z", unit, *alt_alpha, opts));

    demo.report.suite = "delta-necessity";
    for (std::size_t i = 0; i < demo.rows.size(); ++i) {
        const DeltaDemoRow& row = demo.rows[i];
        const MeasureSpec& spec = i == 1 ? norm.spec : unit;
        CheckRecord r;
        r.id = "delta-necessity/" + row.label;
        r.measure = row.label;
        r.fingerprint = fingerprint(spec);
        r.params = {{"alpha", fmt(row.alpha)}, {"margin", fmt_opt(row.margin)}, {"max_coefficient", fmt(row.max_coefficient)}};
        for (std::size_t t = 0; t < row.thetas.size(); ++t)
            r.params.emplace_back("dim_theta_" + fmt(row.thetas[t]), fmt_opt(row.dims[t]));
        r.params.emplace_back("flag", row.flag);
        if (i == 0) {
            r.quantity = "max_coefficient";
            r.comparison = "<=";
            r.threshold = 1e-12;
            r.measured = row.max_coefficient;
            r.status = row.flag == "degenerate" && row.max_coefficient <= 1e-12 ? CheckStatus::pass : CheckStatus::fail;
            r.note = "every nonzero integer coefficient vanishes";
        } else {
            r.quantity = "max_abs_dim_minus_2";
            r.comparison = "<=";
            r.threshold = 0.15;
            double worst = 0.0;
            bool all = true;
            for (const auto& dim : row.dims) {
                if (!dim)
                    all = false;
                else
                    worst = std::max(worst, std::abs(*dim - 2.0));
            }
            r.measured = all ? worst : std::numeric_limits<double>::quiet_NaN();
            r.status = all && worst <= 0.15 ? CheckStatus::pass : CheckStatus::fail;
        }
        demo.report.checks.push_back(std::move(r));
    }
    return demo;
}

std::vector<std::string> suite_names()
{
    return {"coeff", "lp-equivalence", "upper-bound", "lp-corollary", "rescaling", "shape", "convolution-law", "all"};
}

std::vector<VerificationReport> run_suite(std::string_view name, const std::vector<ZooMember>& zoo,
                                          const VerifyOptions& opts)
{
    using Suite = VerificationReport (*)(Context&, const std::vector<ZooMember>&);
    const std::vector<std::pair<std::string_view, Suite>> suites = {
        {"coeff", coeff_suite},        {"lp-equivalence", lp_suite}, {"upper-bound", upper_bound_suite},
        {"lp-corollary", corollary_suite}, {"rescaling", rescaling_suite}, {"shape", shape_suite},
        {"convolution-law", convolution_suite},
    };
    Context ctx(opts);
    std::vector<VerificationReport> out;
    for (const auto& [n, fn] : suites) {
        if (name == "all" || name == n)
            out.push_back(fn(ctx, zoo));
    }
    if (out.empty()) {
        std::string known;
        for (const auto& s : suite_names())
            known += (known.empty() ? "" : ", ") + s;
        throw ContractError("unknown suite '" + std::string(name) + "' (available: " + known + ")");
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::ordered_json json_number(double x)
{
    if (std::isfinite(x))
        return round12(x);
    return format12(x);
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string report_to_json(const VerificationReport& report)
{
    using oj = nlohmann::ordered_json;
    oj doc = oj::object();
    doc["suite"] = report.suite;
    doc["summary"] = {{"total", report.checks.size()},
                      {"pass", report.count(CheckStatus::pass)},
                      {"fail", report.count(CheckStatus::fail)},
                      {"skipped", report.count(CheckStatus::skipped)},
                      {"excluded", report.count(CheckStatus::excluded)}};
    oj checks = oj::array();
    for (const CheckRecord& c : report.checks) {
        oj params = oj::object();
        for (const auto& [k, v] : c.params)
            params[k] = v;
        checks.push_back({{"id", c.id},
                          {"measure", c.measure},
                          {"fingerprint", c.fingerprint},
                          {"params", params},
                          {"quantity", c.quantity},
                          {"measured", json_number(c.measured)},
                          {"comparison", c.comparison},
                          {"threshold", json_number(c.threshold)},
                          {"status", std::string(to_string(c.status))},
                          {"note", c.note}});
    }
    doc["checks"] = checks;
    return doc.dump(2) + "\n";
}

std::string report_to_csv(const VerificationReport& report)
{
    std::ostringstream out;
    out << "suite,id,measure,fingerprint,quantity,measured,comparison,threshold,status,params,note\n";
    for (const CheckRecord& c : report.checks) {
        std::string params;
        for (const auto& [k, v] : c.params)
            params += (params.empty() ? "" : ";") + k + "=" + v;
        out << csv_field(report.suite) << ',' << csv_field(c.id) << ',' << csv_field(c.measure) << ','
            << c.fingerprint << ',' << c.quantity << ',' << format12(c.measured) << ',' << c.comparison << ','
            << format12(c.threshold) << ',' << to_string(c.status) << ',' << csv_field(params) << ','
            << csv_field(c.note) << '\n';
    }
    return out.str();
}

std::string delta_demo_to_csv(const DeltaDemo& demo)
{
    std::ostringstream out;
    out << "label,alpha,margin,max_coefficient";
    if (!demo.rows.empty())
        for (double t : demo.rows.front().thetas)
            out << ",dim_theta_" << format12(t);
    out << ",flag\n";
    for (const DeltaDemoRow& row : demo.rows) {
        out << row.label << ',' << format12(row.alpha) << ',' << (row.margin ? format12(*row.margin) : "none") << ','
            << format12(row.max_coefficient);
        for (const auto& dim : row.dims)
            out << ',' << (dim ? format12(*dim) : "undefined");
        out << ',' << row.flag << '\n';
    }
    return out.str();
}

} // namespace fspec
