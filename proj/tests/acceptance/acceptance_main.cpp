// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include "fspec/cli.hpp"
#include "fspec/energy.hpp"
#include "fspec/measure.hpp"
#include "fspec/spectrum.hpp"
#include "fspec/verify.hpp"
#include "fspec/zoo.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace fspec;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what)
    {
        if (!cond) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string f4(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

SpectrumOptions window(int j0, int j1, double alpha)
{
    SpectrumOptions o;
    o.alpha = alpha;
    o.j0 = j0;
    o.j1 = j1;
    return o;
}

std::string report_counts(const VerificationReport& r)
{
    return r.suite + " pass=" + std::to_string(r.count(CheckStatus::pass)) +
           " fail=" + std::to_string(r.count(CheckStatus::fail)) +
           " skipped=" + std::to_string(r.count(CheckStatus::skipped)) +
           " excluded=" + std::to_string(r.count(CheckStatus::excluded));
}

double max_measured(const VerificationReport& r, CheckStatus only = CheckStatus::pass)
{
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& c : r.checks)
        if (c.status == only || c.status == CheckStatus::fail)
            m = std::max(m, c.measured);
    return m;
}

// 1. Unit interval: blind on Z, dimension two after rescaling or normalizing.
Outcome criterion_1()
{
    Outcome o;
    const MeasureSpec unit = MeasureSpec::box_lebesgue({0.0}, {1.0});
    double worst = 0.0;
    for (int n = 1; n <= 100; ++n)
        for (double z : {double(n), -double(n)}) {
            const double zz[1] = {z};
            worst = std::max(worst, fourier_modulus(unit, zz));
        }
    o.require(worst <= 1e-12, "max |mu^(n)| <= 1e-12");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", worst);
    o.note(std::string("max|mu^(n)|=") + buf);

    const std::vector<double> grid = default_theta_grid();
    const SpectrumCurve on_z = spectrum_curve(unit, grid, window(4, 13, 1.0));
    bool all_degenerate = true;
    for (const auto& p : on_z.points)
        all_degenerate = all_degenerate && p.degenerate() && !p.dim;
    o.require(all_degenerate, "undefined (degenerate sampling) on Z");

    const MeasureSpec normalized = normalize_to_margin(unit, 0.25).spec;
    for (auto [label, spec, alpha] : {std::tuple{"alpha=1/3", unit, 1.0 / 3.0}, {"[1/4,3/4]", normalized, 1.0}}) {
        const SpectrumCurve c = spectrum_curve(spec, grid, window(4, 13, alpha));
        double dev = 0.0;
        for (const auto& p : c.points) {
            if (p.theta == 0.0 || p.theta == 0.125 || p.theta == 0.375 || p.theta == 0.625 || p.theta == 0.875)
                continue;
            if (!p.dim) {
                dev = std::numeric_limits<double>::infinity();
                continue;
            }
            dev = std::max(dev, std::abs(*p.dim - 2.0));
        }
        o.require(dev <= 0.15, std::string(label) + " |dim - 2| <= 0.15");
        o.note(std::string(label) + " max|dim-2|=" + f4(dev));
    }
    return o;
}

// 2. Unit atom: dimension zero, energy divergent.
Outcome criterion_2()
{
    Outcome o;
    const MeasureSpec atom = MeasureSpec::dirac({0.5});
    const SpectrumCurve c = spectrum_curve(atom, default_theta_grid(), window(4, 13, 1.0));
    double dev = 0.0;
    for (const auto& p : c.points)
        dev = std::max(dev, p.dim ? std::abs(*p.dim) : std::numeric_limits<double>::infinity());
    o.require(dev <= 0.05, "|dim| <= 0.05 on the grid");
    o.note("max|dim|=" + f4(dev));
    for (double s : {0.25, 0.5, 1.0}) {
        EnergyQuery q;
        q.s = s;
        q.theta = 1.0;
        q.max_shell = 14;
        const EnergyEstimate e = discrete_energy(atom, q);
        o.require(e.trend.trend == Trend::diverging, "diverging at s=" + f4(s));
        o.note("s=" + f4(s) + " " + std::string(to_string(e.trend.trend)));
    }
    return o;
}

// Level increments of the spatial energy: ratio < 1 bounded, > 1 blowing up.
double spatial_increment_ratio(double s)
{
    const MeasureSpec c = MeasureSpec::cantor();
    std::vector<double> e;
    for (int level = 8; level <= 12; ++level)
        e.push_back(spatial_s_energy_oracle(discretize(c, level), s).value);
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 1; i < e.size(); ++i) {
        xs.push_back(static_cast<double>(i));
        ys.push_back(std::log2(e[i] - e[i - 1]));
    }
    return std::exp2(least_squares_line(xs, ys).slope);
}

// 3. Cantor measure.
Outcome criterion_3()
{
    Outcome o;
    const MeasureSpec c = MeasureSpec::cantor();
    const SpectrumOptions w = window(4, 15, 0.5);
    const SpectrumPoint one = estimate_dim_theta(c, 1.0, w);
    const SpectrumPoint zero = estimate_dim_fourier(c, w);
    const double target = std::log(2.0) / std::log(3.0);
    o.require(one.dim && std::abs(*one.dim - target) <= 0.05, "theta=1 within 0.05 of log2/log3");
    o.require(zero.dim && *zero.dim <= 0.05, "theta=0 <= 0.05");
    o.note("dim(1)=" + f4(one.dim.value_or(NAN)) + " dim(0)=" + f4(zero.dim.value_or(NAN)));

    const Trend t05 = discrete_s_energy(c, 0.5, 0.5, 14).trend.trend;
    const Trend t07 = discrete_s_energy(c, 0.7, 0.5, 14).trend.trend;
    const double r05 = spatial_increment_ratio(0.5);
    const double r07 = spatial_increment_ratio(0.7);
    o.require(t05 == Trend::converging && t07 == Trend::diverging, "lattice trend flip 0.5 -> 0.7");
    o.require(r05 < 1.0 && r07 > 1.0, "spatial oracle flip 0.5 -> 0.7");
    o.note("lattice " + std::string(to_string(t05)) + "/" + std::string(to_string(t07)) + " spatial ratios " +
           f4(r05) + "/" + f4(r07));
    return o;
}

// 4. Circle in the unit square.
Outcome criterion_4()
{
    Outcome o;
    const MeasureSpec circle = MeasureSpec::sphere_surface({0.5, 0.5}, 0.25);
    const std::vector<double> grid{0.0, 0.5, 1.0};
    SpectrumOptions w = window(4, 9, 1.0);
    w.budget = 100'000'000;
    const SpectrumCurve c = spectrum_curve(circle, grid, w);
    for (const auto& p : c.points) {
        o.require(p.dim && std::abs(*p.dim - 1.0) <= 0.1, "theta=" + f4(p.theta) + " |dim - 1| <= 0.1");
        o.note("dim(" + f4(p.theta) + ")=" + f4(p.dim.value_or(NAN)));
    }
    return o;
}

// 5. Continuous / discrete ratio stable between J = 10 and J = 12.
Outcome criterion_5()
{
    Outcome o;
    const std::vector<std::pair<std::string, MeasureSpec>> members{
        {"lebesgue_quarter", MeasureSpec::box_lebesgue({0.25}, {0.75})},
        {"cantor_normalized", MeasureSpec::affine(MeasureSpec::cantor(), 0.5, {0.25})}};
    for (const auto& [name, spec] : members)
        for (auto [s, theta] : {std::pair{1.0, 1.0}, {0.5, 0.5}}) {
            double ratio[2];
            int k = 0;
            for (int J : {10, 12}) {
                EnergyQuery q;
                q.s = s;
                q.theta = theta;
                q.max_shell = J;
                const EnergyEstimate cont = continuous_energy(spec, q);
                const EnergyEstimate disc = discrete_energy(spec, q);
                o.require(cont.quadrature_converged, name + " quadrature converged");
                ratio[k++] = cont.value / disc.value;
            }
            const double drift = std::abs(ratio[1] / ratio[0] - 1.0);
            o.require(drift < 0.2, name + " drift < 0.2");
            o.note(name + "(" + f4(s) + "," + f4(theta) + ") drift=" + f4(drift));
        }
    return o;
}

Outcome suite_criterion(const VerificationReport& r, std::size_t min_pass, const std::string& measured)
{
    Outcome o;
    o.require(r.ok(), "zero failures");
    o.require(r.count(CheckStatus::pass) >= min_pass, "at least " + std::to_string(min_pass) + " passing checks");
    o.note(report_counts(r));
    if (!measured.empty() && !r.checks.empty())
        o.note(measured + "=" + f4(max_measured(r)));
    return o;
}

// 6. Lattice / continuum norm ratio band for members with margin 1/4.
Outcome criterion_6()
{
    const VerificationReport r = check_lp_equivalence(default_zoo(), {});
    Outcome o = suite_criterion(r, 10, "max band");
    o.require(r.count(CheckStatus::excluded) == 0, "every zoo member has margin 1/4");
    return o;
}

// 7. Upper bound over the zoo and the full grid.
Outcome criterion_7()
{
    const VerifyOptions opts;
    const VerificationReport r = check_upper_bound(default_zoo(), opts);
    Outcome o = suite_criterion(r, 5 * opts.theta_grid.size(), "max slack");
    o.require(r.checks.size() == 5 * opts.theta_grid.size(), "5 x 9 checks");
    return o;
}

// 8. Lower bound for members whose coefficients pass the decay test.
Outcome criterion_8()
{
    return suite_criterion(check_lp_corollary(default_zoo(), {}), 1, "");
}

// 9. Agreement between two admissible lattice scales.
Outcome criterion_9()
{
    return suite_criterion(check_rescaling(default_zoo(), {}), 15, "max |diff|");
}

// 10. Monotone concave projection gap.
Outcome criterion_10()
{
    return suite_criterion(check_shape(default_zoo(), {}), 5, "max gap");
}

std::vector<std::pair<std::string, std::string>> dir_files(const fs::path& dir)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name == "manifest.json")
            continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        out.emplace_back(name, ss.str());
    }
    std::sort(out.begin(), out.end());
    return out;
}

// 11. Every CLI command with --threads 1 and --threads 8 gives identical files.
Outcome criterion_11()
{
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "fspec_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string data = FSPEC_DATA_DIR;
    {
        std::ofstream pts(root / "points.txt");
        for (int n = -20; n <= 20; ++n)
            pts << n * 0.75 << '\n';
    }
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
        {"eval", {"eval", "--measure", data + "/cantor.json", "--points", (root / "points.txt").string()}},
        {"energy", {"energy", "--measure", data + "/circle.json", "--s", "0.8", "--theta", "0.5", "--max-shell", "9"}},
        {"energy-continuous",
         {"energy", "--measure", data + "/lebesgue_quarter.json", "--s", "1", "--continuous", "--max-shell", "10"}},
        {"energy-sup", {"energy", "--measure", data + "/cantor.json", "--s", "0.2", "--form", "sup", "--alpha", "0.5"}},
        {"energy-s", {"energy", "--measure", data + "/cantor.json", "--s", "0.5", "--form", "s-energy", "--alpha",
                      "0.5", "--max-shell", "14"}},
        {"spectrum", {"spectrum", "--measure", data + "/circle.json"}},
        {"spectrum-cantor", {"spectrum", "--measure", data + "/cantor_normalized.json", "--max-shell", "16"}},
        {"verify", {"verify", "--suite", "all"}},
        {"demo", {"demo", "delta-necessity", "--alpha", "0.3333333333333333"}},
    };
    for (const auto& [name, args] : commands) {
        std::vector<std::vector<std::pair<std::string, std::string>>> files;
        std::vector<std::string> stdouts;
        for (const char* threads : {"1", "8"}) {
            const fs::path out = root / (name + "_t" + threads);
            std::vector<std::string> full{"fspec"};
            full.insert(full.end(), args.begin(), args.end());
            full.insert(full.end(), {"--threads", threads, "--out", out.string()});
            std::ostringstream so;
            std::ostringstream se;
            const int code = run_cli(full, so, se);
            o.require(code == 0, name + " exit 0 (" + se.str() + ")");
            files.push_back(dir_files(out));
            stdouts.push_back(so.str());
        }
        o.require(!files[0].empty(), name + " wrote files");
        o.require(files[0] == files[1] && stdouts[0] == stdouts[1], name + " byte-identical");
    }
    o.note(std::to_string(commands.size()) + " commands compared");
    fs::remove_all(root);
    return o;
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* title;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "delta-necessity exhibit", 60, criterion_1},
        {2, "atomic measure", 60, criterion_2},
        {3, "Cantor measure", 120, criterion_3},
        {4, "circle surface measure", 300, criterion_4},
        {5, "continuous/discrete stability", 0, criterion_5},
        {6, "lattice/continuum norm equivalence", 0, criterion_6},
        {7, "upper bound dim + d theta", 0, criterion_7},
        {8, "lower bound d theta / p", 0, criterion_8},
        {9, "rescaling agreement", 0, criterion_9},
        {10, "monotone concave shape", 0, criterion_10},
        {11, "thread-count determinism", 0, criterion_11},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.note(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_seconds > 0.0)
            o.require(secs < c.limit_seconds, "runtime < " + f4(c.limit_seconds) + " s");
        failures += o.ok ? 0 : 1;
        std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << ", " << f4(secs)
                  << " s): " << o.detail << std::endl;
    }
    std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
