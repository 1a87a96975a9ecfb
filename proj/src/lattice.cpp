#include "fspec/lattice.hpp"

#include "fspec/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

namespace fspec {

namespace {

constexpr std::int64_t kMaxThreshold = std::int64_t{1} << 61;

std::int64_t block_width(int dim) noexcept
{
    switch (dim) {
    case 1: return 4096;
    case 2: return 16;
    default: return 1;
    }
}

std::string region_name(int j)
{
    return j == kCoreRegion ? std::string("core (0 < |z| < 1)") : "shell " + std::to_string(j);
}

// Count of v in Z with lo <= v^2 < hi.
std::uint64_t count_last(std::int64_t lo, std::int64_t hi) noexcept
{
    if (hi <= 0)
        return 0;
    const std::int64_t vmax = isqrt_floor(hi - 1);
    const std::int64_t vmin = lo > 0 ? isqrt_ceil(lo) : 0;
    if (vmin > vmax)
        return 0;
    if (vmin == 0)
        return static_cast<std::uint64_t>(2 * vmax + 1);
    return static_cast<std::uint64_t>(2 * (vmax - vmin + 1));
}

std::uint64_t count_rec(int k, int d, std::int64_t lo, std::int64_t hi) noexcept
{
    if (k == d - 1)
        return count_last(lo, hi);
    if (hi <= 0)
        return 0;
    const std::int64_t vmax = isqrt_floor(hi - 1);
    std::uint64_t total = 0;
    for (std::int64_t v = -vmax; v <= vmax; ++v)
        total += count_rec(k + 1, d, lo - v * v, hi - v * v);
    return total;
}

struct Task {
    std::size_t region;
    std::int64_t first_lo;
    std::int64_t first_hi;
};

RegionTally empty_tally(int index, const TallyRequest& request)
{
    RegionTally t;
    t.index = index;
    t.sums.resize(request.sums.size());
    t.max_log.assign(request.maxima.size(), kNegInf);
    t.argmax.resize(request.maxima.size());
    return t;
}

class TallyKernel {
public:
    TallyKernel(const MeasureSpec& spec, const TallyRequest& request, double alpha)
        : spec_(spec), request_(request), alpha_(alpha), dim_(spec.dim())
    {
    }

    void run(const Task& task, NormBand band, RegionTally& out) const
    {
        std::array<double, kMaxDim> z{};
        const auto d = static_cast<std::size_t>(dim_);
        visit_band(dim_, band, task.first_lo, task.first_hi, [&](const LatticePoint& n) {
            std::int64_t norm2 = 0;
            for (std::size_t k = 0; k < d; ++k) {
                z[k] = alpha_ * static_cast<double>(n[k]);
                norm2 += n[k] * n[k];
            }
            const double modulus = fourier_modulus(spec_, std::span<const double>(z.data(), d));
            ++out.count;
            out.max_modulus = std::max(out.max_modulus, modulus);
            const double log_r = std::log(alpha_ * std::sqrt(static_cast<double>(norm2)));
            const double log_m = modulus > 0.0 ? std::log(modulus) : kNegInf;
            for (std::size_t k = 0; k < request_.sums.size(); ++k)
                out.sums[k].add_log(term(request_.sums[k].modulus_power, request_.sums[k].radius_power, log_m, log_r));
            for (std::size_t k = 0; k < request_.maxima.size(); ++k) {
                const double t = term(request_.maxima[k].modulus_power, request_.maxima[k].radius_power, log_m, log_r);
                if (t > out.max_log[k]) {
                    out.max_log[k] = t;
                    out.argmax[k].assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(d));
                }
            }
        });
    }

private:
    static double term(double a, double b, double log_m, double log_r) noexcept
    {
        const double lm = a == 0.0 ? 0.0 : a * log_m;
        return lm + b * log_r;
    }

    const MeasureSpec& spec_;
    const TallyRequest& request_;
    double alpha_;
    int dim_;
};

} // namespace

std::int64_t shell_threshold(double alpha, int j)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw ContractError("lattice scale alpha must be positive");
    if (j < 0)
        throw ContractError("shell index must be nonnegative");
    const long double x = std::ldexp(1.0L, 2 * j) / (static_cast<long double>(alpha) * alpha);
    if (x >= static_cast<long double>(kMaxThreshold))
        throw ContractError("shell " + std::to_string(j) + " is beyond the supported lattice range");
    const long double nearest = std::nearbyint(x);
    if (std::abs(x - nearest) <= 1e-9L * std::max(1.0L, x))
        return static_cast<std::int64_t>(nearest);
    return static_cast<std::int64_t>(std::ceil(x));
}

NormBand region_band(double alpha, int j)
{
    if (j == kCoreRegion)
        return {1, shell_threshold(alpha, 0)};
    return {shell_threshold(alpha, j), shell_threshold(alpha, j + 1)};
}

std::uint64_t band_point_count(int dim, NormBand band)
{
    if (dim < 1 || dim > kMaxDim)
        throw ContractError("lattice dimension out of range");
    return count_rec(0, dim, band.lo2, band.hi2);
}

std::uint64_t shell_point_count(const ShellSpec& shell)
{
    return band_point_count(shell.dim, region_band(shell.alpha, shell.index));
}

void enumerate_shell(const ShellSpec& shell, const std::function<void(std::span<const std::int64_t>)>& visit,
                     std::uint64_t budget)
{
    const NormBand band = region_band(shell.alpha, shell.index);
    if (band_point_count(shell.dim, band) > budget)
        throw BudgetError(region_name(shell.index) + " exceeds the point budget of " + std::to_string(budget));
    const auto d = static_cast<std::size_t>(shell.dim);
    visit_band(shell.dim, band, std::numeric_limits<std::int64_t>::min(), std::numeric_limits<std::int64_t>::max(),
               [&](const LatticePoint& n) { visit(std::span<const std::int64_t>(n.data(), d)); });
}

void RegionTally::merge(const RegionTally& later)
{
    count += later.count;
    max_modulus = std::max(max_modulus, later.max_modulus);
    for (std::size_t k = 0; k < sums.size(); ++k)
        sums[k].merge(later.sums[k]);
    for (std::size_t k = 0; k < max_log.size(); ++k) {
        if (later.max_log[k] > max_log[k]) {
            max_log[k] = later.max_log[k];
            argmax[k] = later.argmax[k];
        }
    }
}

std::vector<RegionTally> tally_regions(const MeasureSpec& spec, std::span<const int> regions,
                                       const TallyRequest& request, const LatticeOptions& options)
{
    const int d = spec.dim();
    std::vector<NormBand> bands;
    std::uint64_t total = 0;
    for (int j : regions) {
        bands.push_back(region_band(options.alpha, j));
        total += band_point_count(d, bands.back());
        if (total > options.budget)
            throw BudgetError(region_name(j) + " exceeds the point budget of " + std::to_string(options.budget) +
                              " (cumulative " + std::to_string(total) + " points)");
    }

    std::vector<Task> tasks;
    std::vector<std::size_t> first_task(regions.size() + 1, 0);
    const std::int64_t width = block_width(d);
    for (std::size_t r = 0; r < bands.size(); ++r) {
        first_task[r] = tasks.size();
        if (bands[r].hi2 <= bands[r].lo2 || bands[r].hi2 <= 0)
            continue;
        const std::int64_t reach = isqrt_floor(bands[r].hi2 - 1);
        for (std::int64_t lo = -reach; lo <= reach; lo += width)
            tasks.push_back({r, lo, std::min(reach, lo + width - 1)});
    }
    first_task[regions.size()] = tasks.size();

    std::vector<RegionTally> partial;
    partial.reserve(tasks.size());
    for (const Task& t : tasks)
        partial.push_back(empty_tally(regions[t.region], request));

    const TallyKernel kernel(spec, request, options.alpha);
    const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(tasks.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i)
            kernel.run(tasks[i], bands[tasks[i].region], partial[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        std::exception_ptr failure;
        std::atomic<bool> failed{false};
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= tasks.size() || failed.load())
                        return;
                    try {
                        kernel.run(tasks[i], bands[tasks[i].region], partial[i]);
                    } catch (...) {
                        if (!failed.exchange(true))
                            failure = std::current_exception();
                        return;
                    }
                }
            });
        }
        pool.clear();
        if (failure)
            std::rethrow_exception(failure);
    }

    std::vector<RegionTally> out;
    for (std::size_t r = 0; r < regions.size(); ++r) {
        RegionTally acc = empty_tally(regions[r], request);
        for (std::size_t i = first_task[r]; i < first_task[r + 1]; ++i)
            acc.merge(partial[i]);
        out.push_back(std::move(acc));
    }
    return out;
}

ShellProfile shell_profile(const MeasureSpec& spec, const ShellSpec& shell, double theta,
                           const LatticeOptions& options)
{
    if (shell.dim != spec.dim())
        throw ContractError("shell dimension does not match the measure");
    LatticeOptions opts = options;
    opts.alpha = shell.alpha;
    const double th[] = {theta};
    return shell_profiles(spec, th, shell.index, shell.index, opts).front().front();
}

std::vector<std::vector<ShellProfile>> shell_profiles(const MeasureSpec& spec, std::span<const double> thetas,
                                                      int j_first, int j_last, const LatticeOptions& options)
{
    if (j_first < 0 || j_last < j_first)
        throw ContractError("invalid shell range");
    TallyRequest request;
    for (double theta : thetas) {
        if (!(theta > 0.0 && theta <= 1.0))
            throw ContractError("theta must lie in (0, 1] for shell profiles");
        request.sums.push_back({2.0 / theta, -static_cast<double>(spec.dim())});
    }
    std::vector<int> regions;
    for (int j = j_first; j <= j_last; ++j)
        regions.push_back(j);
    const auto tallies = tally_regions(spec, regions, request, options);

    std::vector<std::vector<ShellProfile>> out(thetas.size());
    for (std::size_t t = 0; t < thetas.size(); ++t) {
        for (const auto& tally : tallies) {
            ShellProfile p;
            p.j = tally.index;
            p.theta = thetas[t];
            p.log_a = tally.sums[t].log_value();
            p.max_modulus = tally.max_modulus;
            p.count = tally.count;
            out[t].push_back(p);
        }
    }
    return out;
}

} // namespace fspec
