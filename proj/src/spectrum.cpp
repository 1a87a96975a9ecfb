#include "fspec/spectrum.hpp"

#include "fspec/error.hpp"

#include <algorithm>
#include <cmath>

namespace fspec {

int default_max_shell(int dim) noexcept
{
    switch (dim) {
    case 1: return 14;
    case 2: return 10;
    default: return 7;
    }
}

SpectrumOptions default_spectrum_options(int dim)
{
    SpectrumOptions o;
    o.j1 = default_max_shell(dim) - 1;
    return o;
}

std::vector<double> default_theta_grid()
{
    std::vector<double> g;
    for (int k = 0; k <= 8; ++k)
        g.push_back(k / 8.0);
    return g;
}

bool SpectrumPoint::degenerate() const noexcept
{
    return std::find(flags.begin(), flags.end(), "degenerate") != flags.end();
}

SpectrumPoint point_from_log2(double theta, std::span<const double> log2_values, int j0)
{
    SpectrumPoint pt;
    pt.theta = theta;
    pt.j0 = j0;
    pt.j1 = j0 + static_cast<int>(log2_values.size()) - 1;

    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < log2_values.size(); ++i) {
        const int j = j0 + static_cast<int>(i);
        if (std::isfinite(log2_values[i])) {
            xs.push_back(j);
            ys.push_back(log2_values[i]);
        } else {
            pt.excluded_shells.push_back(j);
        }
    }
    if (xs.empty()) {
        pt.flags.emplace_back("degenerate");
        return pt;
    }
    if (!pt.excluded_shells.empty())
        pt.flags.emplace_back("excluded-shells");
    if (xs.size() < 4)
        throw EstimationError("only " + std::to_string(xs.size()) + " non-degenerate shells in window [" +
                              std::to_string(pt.j0) + ", " + std::to_string(pt.j1) + "]; at least 4 are needed");

    const LinearFit fit = least_squares_line(xs, ys);
    pt.slope = fit.slope;
    pt.intercept = fit.intercept;
    pt.residual = fit.residual_rms;
    const double factor = theta > 0.0 ? theta : 2.0;
    pt.dim = std::max(0.0, -factor * fit.slope);

    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 4 <= xs.size(); ++i) {
        const LinearFit w = least_squares_line(std::span(xs).subspan(i, 4), std::span(ys).subspan(i, 4));
        best = std::max(best, w.slope);
    }
    pt.max_window_slope = best;
    return pt;
}

std::vector<std::vector<ShellProfile>> grid_profiles(const MeasureSpec& spec, std::span<const double> grid,
                                                     const SpectrumOptions& opts)
{
    if (opts.j0 < 0 || opts.j1 < opts.j0 + 3)
        throw ContractError("the shell window needs j1 >= j0 + 3 and j0 >= 0");
    TallyRequest req;
    std::vector<int> sum_index;
    for (double theta : grid) {
        if (!(theta >= 0.0 && theta <= 1.0))
            throw ContractError("theta grid values must lie in [0, 1]");
        if (theta > 0.0) {
            sum_index.push_back(static_cast<int>(req.sums.size()));
            req.sums.push_back({2.0 / theta, -static_cast<double>(spec.dim())});
        } else {
            sum_index.push_back(-1);
        }
    }
    std::vector<int> regions;
    for (int j = opts.j0; j <= opts.j1; ++j)
        regions.push_back(j);
    const auto tallies = tally_regions(spec, regions, req, {opts.alpha, opts.budget, opts.threads});

    std::vector<std::vector<ShellProfile>> out(grid.size());
    for (std::size_t t = 0; t < grid.size(); ++t) {
        for (const RegionTally& tally : tallies) {
            ShellProfile p;
            p.j = tally.index;
            p.theta = grid[t];
            p.max_modulus = tally.max_modulus;
            p.count = tally.count;
            if (sum_index[t] >= 0)
                p.log_a = tally.sums[static_cast<std::size_t>(sum_index[t])].log_value();
            out[t].push_back(p);
        }
    }
    return out;
}

SpectrumPoint point_from_profiles(double theta, std::span<const ShellProfile> profiles)
{
    if (profiles.empty())
        throw ContractError("no shell profiles");
    std::vector<double> l2;
    for (const ShellProfile& p : profiles) {
        if (theta > 0.0)
            l2.push_back(p.log2_a());
        else
            l2.push_back(p.max_modulus > 0.0 ? std::log2(p.max_modulus) : kNegInf);
    }
    return point_from_log2(theta, l2, profiles.front().j);
}

SpectrumPoint estimate_dim_theta(const MeasureSpec& spec, double theta, const SpectrumOptions& opts)
{
    if (!(theta > 0.0 && theta <= 1.0))
        throw ContractError("theta must lie in (0, 1]; use estimate_dim_fourier for theta = 0");
    const double grid[] = {theta};
    return point_from_profiles(theta, grid_profiles(spec, grid, opts).front());
}

SpectrumPoint estimate_dim_fourier(const MeasureSpec& spec, const SpectrumOptions& opts)
{
    const double grid[] = {0.0};
    return point_from_profiles(0.0, grid_profiles(spec, grid, opts).front());
}

namespace {

// Lawson-Hanson nonnegative least squares, min |A c - b| subject to c >= 0.
// A is given by columns; sizes here are tiny (one column per grid interval).
std::vector<double> nnls(const std::vector<std::vector<double>>& cols, std::span<const double> b)
{
    const std::size_t n = cols.size();
    const std::size_t m = b.size();
    std::vector<double> x(n, 0.0);
    std::vector<bool> passive(n, false);
    const double tol = 1e-12;

    auto gradient = [&] {
        std::vector<double> r(b.begin(), b.end());
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < m; ++i)
                r[i] -= cols[k][i] * x[k];
        std::vector<double> w(n, 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < m; ++i)
                w[k] += cols[k][i] * r[i];
        return w;
    };
    // Unconstrained least squares on the passive columns via the normal equations.
    auto solve_passive = [&] {
        std::vector<std::size_t> idx;
        for (std::size_t k = 0; k < n; ++k)
            if (passive[k])
                idx.push_back(k);
        const std::size_t p = idx.size();
        std::vector<std::vector<double>> g(p, std::vector<double>(p + 1, 0.0));
        for (std::size_t r = 0; r < p; ++r) {
            for (std::size_t c = 0; c < p; ++c)
                for (std::size_t i = 0; i < m; ++i)
                    g[r][c] += cols[idx[r]][i] * cols[idx[c]][i];
            for (std::size_t i = 0; i < m; ++i)
                g[r][p] += cols[idx[r]][i] * b[i];
        }
        for (std::size_t c = 0; c < p; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < p; ++r)
                if (std::abs(g[r][c]) > std::abs(g[piv][c]))
                    piv = r;
            std::swap(g[c], g[piv]);
            for (std::size_t r = 0; r < p; ++r) {
                if (r == c || g[c][c] == 0.0)
                    continue;
                const double f = g[r][c] / g[c][c];
                for (std::size_t k = c; k <= p; ++k)
                    g[r][k] -= f * g[c][k];
            }
        }
        std::vector<double> z(n, 0.0);
        for (std::size_t r = 0; r < p; ++r)
            z[idx[r]] = g[r][r] != 0.0 ? g[r][p] / g[r][r] : 0.0;
        return z;
    };

    for (std::size_t outer = 0; outer < 3 * n + 3; ++outer) {
        const std::vector<double> w = gradient();
        std::size_t t = n;
        double best = tol;
        for (std::size_t k = 0; k < n; ++k) {
            if (!passive[k] && w[k] > best) {
                best = w[k];
                t = k;
            }
        }
        if (t == n)
            break;
        passive[t] = true;
        for (std::size_t inner = 0; inner < 3 * n + 3; ++inner) {
            std::vector<double> z = solve_passive();
            bool feasible = true;
            double step = 1.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (passive[k] && z[k] <= 0.0) {
                    feasible = false;
                    step = std::min(step, x[k] / (x[k] - z[k]));
                }
            }
            if (feasible) {
                x = std::move(z);
                break;
            }
            for (std::size_t k = 0; k < n; ++k) {
                x[k] += step * (z[k] - x[k]);
                if (passive[k] && x[k] <= tol) {
                    passive[k] = false;
                    x[k] = 0.0;
                }
            }
        }
    }
    return x;
}

} // namespace

std::vector<double> project_monotone_concave(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw ContractError("projection needs matching abscissae and values");
    const std::size_t m = y.size();
    if (m <= 1)
        return {y.begin(), y.end()};
    for (std::size_t i = 1; i < m; ++i)
        if (!(x[i] > x[i - 1]))
            throw ContractError("projection abscissae must be strictly increasing");

    // f_i = a + sum_k c_k (x_{min(i, k+1)} - x_0) with a, c_k >= 0 spans exactly the
    // nonnegative nondecreasing concave sequences (the slope on interval m is sum_{k>=m} c_k).
    std::vector<std::vector<double>> cols(m, std::vector<double>(m, 1.0));
    for (std::size_t k = 0; k + 1 < m; ++k)
        for (std::size_t i = 0; i < m; ++i)
            cols[k + 1][i] = x[std::min(i, k + 1)] - x[0];
    const std::vector<double> coef = nnls(cols, y);

    std::vector<double> f(m, 0.0);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t i = 0; i < m; ++i)
            f[i] += coef[k] * cols[k][i];
    // Points already on the cone come back with solver roundoff; return them exactly.
    for (std::size_t i = 0; i < m; ++i)
        if (std::abs(f[i] - y[i]) <= 1e-12 * (1.0 + std::abs(y[i])))
            f[i] = y[i];
    return f;
}

SpectrumCurve curve_from_profiles(std::span<const double> grid,
                                  const std::vector<std::vector<ShellProfile>>& profiles)
{
    SpectrumCurve curve;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<std::size_t> where;
    for (std::size_t t = 0; t < grid.size(); ++t) {
        SpectrumPoint pt;
        try {
            pt = point_from_profiles(grid[t], profiles[t]);
        } catch (const EstimationError&) {
            pt.theta = grid[t];
            pt.j0 = profiles[t].front().j;
            pt.j1 = profiles[t].back().j;
            pt.flags.emplace_back("estimation-failed");
        }
        if (pt.dim) {
            xs.push_back(grid[t]);
            ys.push_back(*pt.dim);
            where.push_back(t);
        } else {
            curve.partial = true;
        }
        curve.points.push_back(std::move(pt));
    }
    curve.projected.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    if (xs.size() >= 2) {
        const std::vector<double> f = project_monotone_concave(xs, ys);
        double gap = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            curve.projected[where[i]] = f[i];
            gap = std::max(gap, std::abs(f[i] - ys[i]));
        }
        curve.max_projection_gap = gap;
    } else if (xs.size() == 1) {
        curve.projected[where[0]] = ys[0];
    }
    return curve;
}

SpectrumCurve spectrum_curve(const MeasureSpec& spec, std::span<const double> grid, const SpectrumOptions& opts)
{
    if (grid.empty() || grid.front() != 0.0 || grid.back() != 1.0)
        throw ContractError("theta grid must include both endpoints 0 and 1");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ContractError("theta grid must be strictly increasing");
    return curve_from_profiles(grid, grid_profiles(spec, grid, opts));
}

std::string_view to_string(Divergence d) noexcept
{
    switch (d) {
    case Divergence::converges: return "converges";
    case Divergence::diverges: return "diverges";
    case Divergence::near_critical: return "near-critical";
    }
    return "near-critical";
}

DivergenceCall classify_divergence(const MeasureSpec& spec, double s, double theta, const SpectrumOptions& opts,
                                   double band)
{
    DivergenceCall call;
    call.point = theta > 0.0 ? estimate_dim_theta(spec, theta, opts) : estimate_dim_fourier(spec, opts);
    if (call.point.degenerate()) {
        call.critical = std::numeric_limits<double>::infinity();
        call.margin = -std::numeric_limits<double>::infinity();
        call.label = Divergence::converges;
        return call;
    }
    call.critical = *call.point.dim;
    call.margin = s - call.critical;
    if (std::abs(call.margin) <= band)
        call.label = Divergence::near_critical;
    else
        call.label = call.margin < 0.0 ? Divergence::converges : Divergence::diverges;
    return call;
}

} // namespace fspec
