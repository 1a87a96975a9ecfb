#include "fspec/cli.hpp"

#include "fspec/cache.hpp"
#include "fspec/config.hpp"
#include "fspec/energy.hpp"
#include "fspec/error.hpp"
#include "fspec/spectrum.hpp"
#include "fspec/verify.hpp"
#include "fspec/zoo.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

namespace fspec {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

ojson num(double x)
{
    if (std::isfinite(x))
        return round12(x);
    return format12(x);
}

ojson num_array(const std::vector<double>& v)
{
    ojson a = ojson::array();
    for (double x : v)
        a.push_back(num(x));
    return a;
}

struct CommonArgs {
    std::string measure;
    std::string out;
    std::optional<double> alpha;
    std::optional<int> max_shell;
    std::uint64_t budget = kDefaultPointBudget;
    unsigned threads = 1;
    std::string cache;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_measure)
{
    auto* m = cmd->add_option("--measure", a.measure, "Measure config file (JSON)");
    if (needs_measure)
        m->required();
    cmd->add_option("--out", a.out, "Output directory (default: print the main table to stdout)");
    cmd->add_option("--alpha", a.alpha, "Lattice scale: frequencies alpha * Z^d")->check(CLI::PositiveNumber);
    cmd->add_option("--max-shell", a.max_shell, "Truncation |z| < 2^J")->check(CLI::Range(1, 40));
    cmd->add_option("--budget", a.budget, "Lattice point budget")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", a.threads, "Worker threads (results do not depend on it)")->check(CLI::Range(1, 1024));
    cmd->add_option("--cache", a.cache, "Shell aggregate cache directory");
}

// Collects output files; writes to --out DIR or, for the primary output, to stdout.
class Outputs {
public:
    Outputs(const std::string& dir, std::ostream& out) : out_(out)
    {
        if (!dir.empty()) {
            dir_ = fs::path(dir);
            std::error_code ec;
            fs::create_directories(*dir_, ec);
            if (ec)
                throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
        }
    }

    void write(const std::string& name, const std::string& content, bool primary)
    {
        if (!dir_) {
            if (primary)
                out_ << content;
            return;
        }
        const fs::path p = *dir_ / name;
        std::ofstream f(p, std::ios::binary);
        if (!f)
            throw ConfigError("cannot write '" + p.string() + "'");
        f << content;
        files_.push_back(name);
    }

    bool to_dir() const { return dir_.has_value(); }
    const std::vector<std::string>& files() const { return files_; }

private:
    std::ostream& out_;
    std::optional<fs::path> dir_;
    std::vector<std::string> files_;
};

struct Manifest {
    std::string command_line;
    std::string fingerprint;
    ojson parameters = ojson::object();
    ojson extra = ojson::object();
};

void write_manifest(Outputs& outputs, const Manifest& m, double wall)
{
    if (!outputs.to_dir())
        return;
    ojson doc = ojson::object();
    doc["tool_version"] = kToolVersion;
    doc["command_line"] = m.command_line;
    doc["fingerprint"] = m.fingerprint;
    doc["parameters"] = m.parameters;
    doc["outputs"] = outputs.files();
    for (const auto& [k, v] : m.extra.items())
        doc[k] = v;
    doc["wall_time_seconds"] = wall;
    outputs.write("manifest.json", doc.dump(2) + "\n", false);
}

std::vector<double> parse_list(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (tok.empty() || end == tok.c_str() || *end != '\0' || !std::isfinite(v))
            throw ContractError("malformed " + what + " value '" + tok + "'");
        out.push_back(v);
    }
    if (out.empty())
        throw ContractError(what + " must not be empty");
    return out;
}

std::pair<int, int> parse_shells(const std::string& text)
{
    const auto pos = text.find("..");
    if (pos == std::string::npos)
        throw ContractError("--shells expects j0..j1");
    try {
        std::size_t a = 0, b = 0;
        const int j0 = std::stoi(text.substr(0, pos), &a);
        const int j1 = std::stoi(text.substr(pos + 2), &b);
        if (a != pos || b != text.size() - pos - 2)
            throw std::invalid_argument(text);
        return {j0, j1};
    } catch (const std::logic_error&) {
        throw ContractError("--shells expects j0..j1, got '" + text + "'");
    }
}

std::vector<std::vector<double>> read_points(const fs::path& path, int d)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open points file '" + path.string() + "'");
    std::vector<std::vector<double>> rows;
    std::vector<std::string> problems;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        for (char& c : line)
            if (c == ',' || c == '\t' || c == '\r')
                c = ' ';
        std::istringstream ss(line);
        std::vector<double> row;
        std::string tok;
        bool bad = false;
        while (ss >> tok) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0' || !std::isfinite(v)) {
                bad = true;
                problems.push_back(path.string() + ":" + std::to_string(lineno) + ": not a finite number '" + tok + "'");
                break;
            }
            row.push_back(v);
        }
        if (bad || row.empty())
            continue;
        if (static_cast<int>(row.size()) != d) {
            problems.push_back(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(d) +
                               " values, got " + std::to_string(row.size()));
            continue;
        }
        rows.push_back(std::move(row));
    }
    if (!problems.empty()) {
        std::string msg = "malformed points file";
        for (const auto& p : problems)
            msg += "\n  " + p;
        throw ConfigError(msg);
    }
    return rows;
}

// ---------------------------------------------------------------------------

int cmd_eval(const CommonArgs& a, const std::string& points_file, Outputs& outputs, Manifest& manifest)
{
    const MeasureSpec spec = load_measure(a.measure);
    manifest.fingerprint = fingerprint(spec);
    manifest.parameters["points"] = points_file;
    const auto rows = read_points(points_file, spec.dim());
    std::ostringstream csv;
    for (int k = 1; k <= spec.dim(); ++k)
        csv << "z_" << k << ',';
    csv << "re,im,modulus\n";
    for (const auto& z : rows) {
        const FourierSample s = eval_ft(spec, z);
        for (double v : z)
            csv << format12(v) << ',';
        csv << format12(s.value.real()) << ',' << format12(s.value.imag()) << ',' << format12(s.modulus) << '\n';
    }
    outputs.write("samples.csv", csv.str(), true);
    return 0;
}

ojson trend_json(const TrendStats& t)
{
    return {{"label", std::string(to_string(t.trend))},
            {"ratio", num(t.ratio)},
            {"slope", num(t.slope)},
            {"residual", num(t.residual)},
            {"window", {t.first, t.last}},
            {"tail_ratios", num_array(t.tail_ratios)}};
}

ojson energy_json(const EnergyEstimate& e, const std::string& fp, std::uint64_t budget)
{
    ojson shells = ojson::array();
    const auto partial = e.partial_log_sums();
    for (std::size_t i = 0; i < e.shells.size(); ++i) {
        const ShellTerm& t = e.shells[i];
        shells.push_back({{"j", t.j},
                          {"log_t", num(t.log_t)},
                          {"count", t.count},
                          {"max_modulus", num(t.max_modulus)},
                          {"partial_log_inner", num(partial[i])}});
    }
    ojson j = ojson::object();
    j["fingerprint"] = fp;
    j["kind"] = std::string(to_string(e.kind));
    j["s"] = num(e.s);
    j["theta"] = num(e.theta);
    j["alpha"] = num(e.alpha);
    j["J"] = e.max_shell;
    j["budget"] = budget;
    j["value"] = num(e.value);
    j["value_log"] = num(e.kind == EnergyKind::sup_j0 ? e.log_inner : e.theta * e.log_inner);
    j["log_inner"] = num(e.log_inner);
    j["zero_term"] = num(e.zero_term);
    j["log_core"] = num(e.log_core);
    j["trend"] = trend_json(e.trend);
    j["hypothesis_violated"] = e.hypothesis_violated;
    j["flags"] = e.flags;
    if (e.kind == EnergyKind::continuous_j)
        j["quadrature_converged"] = e.quadrature_converged;
    if (e.kind == EnergyKind::sup_j0)
        j["argmax"] = num_array(e.argmax);
    j["shells"] = shells;
    return j;
}

std::string shells_csv(const EnergyEstimate& e)
{
    std::ostringstream csv;
    csv << "j,count,log_t,max_modulus,partial_log_inner\n";
    const auto partial = e.partial_log_sums();
    for (std::size_t i = 0; i < e.shells.size(); ++i) {
        const ShellTerm& t = e.shells[i];
        csv << t.j << ',' << t.count << ',' << format12(t.log_t) << ',' << format12(t.max_modulus) << ','
            << format12(partial[i]) << '\n';
    }
    return csv.str();
}

int cmd_energy(const CommonArgs& a, double s, double theta, const std::string& form, bool continuous,
               Outputs& outputs, Manifest& manifest)
{
    const MeasureSpec spec = load_measure(a.measure);
    const std::string fp = fingerprint(spec);
    manifest.fingerprint = fp;
    EnergyQuery q;
    q.s = s;
    q.theta = theta;
    q.alpha = a.alpha.value_or(1.0);
    q.max_shell = a.max_shell.value_or(10);
    q.budget = a.budget;
    q.threads = a.threads;
    manifest.parameters["form"] = form;
    manifest.parameters["s"] = num(s);
    manifest.parameters["theta"] = num(theta);
    manifest.parameters["alpha"] = num(q.alpha);
    manifest.parameters["J"] = q.max_shell;
    manifest.parameters["budget"] = q.budget;
    manifest.parameters["threads"] = q.threads;
    manifest.parameters["continuous"] = continuous;

    EnergyEstimate e;
    if (form == "theta") {
        if (theta == 0.0)
            throw ContractError("theta = 0 is the sup form: run `fspec spectrum` for its dimension, or "
                                "`fspec energy --form sup`");
        e = discrete_energy(spec, q);
    } else if (form == "s-energy") {
        e = discrete_s_energy(spec, s, q.alpha, q.max_shell, {q.alpha, q.budget, q.threads});
    } else {
        e = sup_energy(spec, s, q.alpha, q.max_shell, {q.alpha, q.budget, q.threads});
    }
    ojson record = energy_json(e, fp, q.budget);
    if (continuous) {
        if (form != "theta")
            throw ContractError("--continuous applies to the (s, theta)-energy form only");
        const EnergyEstimate c = continuous_energy(spec, q);
        record["continuous"] = energy_json(c, fp, q.budget);
        record["continuous_over_discrete_log"] = num(c.log_inner - e.log_inner);
        outputs.write("energy_continuous_shells.csv", shells_csv(c), false);
    }
    outputs.write("energy.json", record.dump(2) + "\n", true);
    outputs.write("energy_shells.csv", shells_csv(e), false);
    return 0;
}

int cmd_spectrum(const CommonArgs& a, const std::string& grid_text, const std::string& shells, Outputs& outputs,
                 Manifest& manifest)
{
    const MeasureSpec spec = load_measure(a.measure);
    const std::string fp = fingerprint(spec);
    manifest.fingerprint = fp;
    const std::vector<double> grid = grid_text.empty() ? default_theta_grid() : parse_list(grid_text, "theta grid");
    if (grid.front() != 0.0 || grid.back() != 1.0)
        throw ContractError("theta grid must include both endpoints 0 and 1");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ContractError("theta grid must be strictly increasing");
    SpectrumOptions so = default_spectrum_options(spec.dim());
    if (a.max_shell)
        so.j1 = *a.max_shell - 1;
    if (!shells.empty())
        std::tie(so.j0, so.j1) = parse_shells(shells);
    so.alpha = a.alpha.value_or(1.0);
    so.budget = a.budget;
    so.threads = a.threads;
    if (so.j0 < 0 || so.j1 < so.j0 + 3)
        throw ContractError("the shell window needs j1 >= j0 + 3 and j0 >= 0");

    std::vector<std::vector<ShellProfile>> profiles;
    bool cached = false;
    if (!a.cache.empty()) {
        ShellCache cache(a.cache);
        std::vector<std::vector<ShellProfile>> hit(grid.size());
        bool complete = true;
        for (std::size_t t = 0; t < grid.size() && complete; ++t) {
            for (int j = so.j0; j <= so.j1; ++j) {
                const auto p = cache.find(fp, so.alpha, grid[t], j);
                if (!p) {
                    complete = false;
                    break;
                }
                hit[t].push_back(*p);
            }
        }
        if (complete) {
            profiles = std::move(hit);
            cached = true;
        } else {
            profiles = grid_profiles(spec, grid, so);
            for (const auto& row : profiles)
                for (const auto& p : row)
                    if (!cache.find(fp, so.alpha, p.theta, p.j))
                        cache.append(fp, so.alpha, p);
        }
    } else {
        profiles = grid_profiles(spec, grid, so);
    }
    const SpectrumCurve curve = curve_from_profiles(grid, profiles);

    std::ostringstream csv;
    csv << "# fingerprint=" << fp << '\n';
    csv << "# alpha=" << format12(so.alpha) << '\n';
    csv << "# budget=" << so.budget << '\n';
    csv << "# shells=" << so.j0 << ".." << so.j1 << '\n';
    csv << "# max_projection_gap=" << format12(curve.max_projection_gap) << '\n';
    csv << "theta,dim_raw,dim_projected,slope,residual,j0,j1,flags\n";
    ojson points = ojson::array();
    for (std::size_t t = 0; t < curve.points.size(); ++t) {
        const SpectrumPoint& p = curve.points[t];
        std::string flags;
        for (const auto& f : p.flags)
            flags += (flags.empty() ? "" : "|") + f;
        csv << format12(p.theta) << ',' << (p.dim ? format12(*p.dim) : "undefined") << ','
            << format12(curve.projected[t]) << ',' << format12(p.slope) << ',' << format12(p.residual) << ','
            << p.j0 << ',' << p.j1 << ',' << flags << '\n';
        points.push_back({{"theta", num(p.theta)},
                          {"dim_raw", p.dim ? num(*p.dim) : ojson("undefined")},
                          {"dim_projected", num(curve.projected[t])},
                          {"slope", num(p.slope)},
                          {"intercept", num(p.intercept)},
                          {"residual", num(p.residual)},
                          {"j0", p.j0},
                          {"j1", p.j1},
                          {"excluded_shells", p.excluded_shells},
                          {"max_window_slope", num(p.max_window_slope)},
                          {"flags", p.flags}});
    }
    ojson detail = ojson::object();
    detail["fingerprint"] = fp;
    detail["alpha"] = num(so.alpha);
    detail["budget"] = so.budget;
    detail["shells"] = {so.j0, so.j1};
    detail["max_projection_gap"] = num(curve.max_projection_gap);
    detail["partial"] = curve.partial;
    detail["points"] = points;

    manifest.parameters["alpha"] = num(so.alpha);
    manifest.parameters["theta_grid"] = num_array(grid);
    manifest.parameters["window"] = {so.j0, so.j1};
    manifest.parameters["budget"] = so.budget;
    manifest.parameters["threads"] = so.threads;
    manifest.extra["cache_hit"] = cached;

    outputs.write("spectrum.csv", csv.str(), true);
    outputs.write("spectrum.json", detail.dump(2) + "\n", false);
    return 0;
}

VerifyOptions verify_options(const CommonArgs& a)
{
    VerifyOptions o;
    o.budget = a.budget;
    o.threads = a.threads;
    o.max_shell = a.max_shell;
    return o;
}

int cmd_verify(const CommonArgs& a, const std::string& suite, const std::string& zoo_path, Outputs& outputs,
               Manifest& manifest, std::ostream& out)
{
    const std::vector<ZooMember> zoo = zoo_path.empty() ? default_zoo() : load_zoo(zoo_path);
    const VerifyOptions o = verify_options(a);
    const auto reports = run_suite(suite, zoo, o);
    ojson members = ojson::object();
    for (const auto& m : zoo)
        members[m.name] = fingerprint(m.spec);
    manifest.fingerprint = members.dump();
    manifest.parameters["suite"] = suite;
    manifest.parameters["zoo"] = zoo_path.empty() ? std::string("default") : zoo_path;
    manifest.parameters["budget"] = o.budget;
    manifest.parameters["threads"] = o.threads;
    manifest.parameters["theta_grid"] = num_array(o.theta_grid);
    ojson timings = ojson::object();
    bool failed = false;
    std::ostringstream summary;
    for (const auto& r : reports) {
        outputs.write("report_" + r.suite + ".json", report_to_json(r), false);
        outputs.write("report_" + r.suite + ".csv", report_to_csv(r), false);
        summary << r.suite << ": pass=" << r.count(CheckStatus::pass) << " fail=" << r.count(CheckStatus::fail)
                << " skipped=" << r.count(CheckStatus::skipped) << " excluded=" << r.count(CheckStatus::excluded)
                << '\n';
        for (const auto& c : r.checks)
            timings[c.id] = c.runtime_seconds;
        failed = failed || !r.ok();
    }
    manifest.extra["check_runtime_seconds"] = timings;
    out << summary.str();
    return failed ? 1 : 0;
}

int cmd_demo(const CommonArgs& a, const std::string& name, Outputs& outputs, Manifest& manifest)
{
    if (name != "delta-necessity")
        throw ContractError("unknown demo '" + name + "' (available: delta-necessity)");
    VerifyOptions o = verify_options(a);
    const DeltaDemo demo = demo_delta_necessity(o, a.alpha);
    manifest.fingerprint = fingerprint(MeasureSpec::box_lebesgue({0.0}, {1.0}));
    manifest.parameters["demo"] = name;
    manifest.parameters["alpha"] = a.alpha ? num(*a.alpha) : ojson(nullptr);
    manifest.parameters["budget"] = o.budget;
    manifest.parameters["threads"] = o.threads;
    outputs.write("demo_" + name + ".csv", delta_demo_to_csv(demo), true);
    outputs.write("demo_" + name + ".json", report_to_json(demo.report), false);
    return demo.report.ok() ? 0 : 1;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"fspec: Fourier spectrum and (s, theta)-energies of measures from closed-form transforms"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    CommonArgs common;
    std::string points_file;
    double s = 0.0;
    double theta = 1.0;
    std::string form = "theta";
    bool continuous = false;
    std::string grid;
    std::string shells;
    std::string suite = "all";
    std::string zoo;
    std::string demo_name;

    auto* eval = app.add_subcommand("eval", "Evaluate the Fourier transform at given frequencies");
    add_common(eval, common, true);
    eval->add_option("--points", points_file, "Frequencies, one point per line (comma or space separated)")
        ->required();

    auto* energy = app.add_subcommand("energy", "Truncated lattice energy with trend diagnostics");
    add_common(energy, common, true);
    energy->add_option("--s", s, "Exponent s")->required();
    energy->add_option("--theta", theta, "theta in (0, 1]")->check(CLI::Range(0.0, 1.0));
    energy->add_option("--form", form, "theta | s-energy | sup")
        ->check(CLI::IsMember({"theta", "s-energy", "sup"}));
    energy->add_flag("--continuous", continuous, "Also integrate over R^d by quadrature");

    auto* spectrum = app.add_subcommand("spectrum", "Estimate the Fourier spectrum over a theta grid");
    add_common(spectrum, common, true);
    spectrum->add_option("--theta-grid", grid, "Comma separated, must contain 0 and 1 (default 0,1/8,...,1)");
    spectrum->add_option("--shells", shells, "Regression window j0..j1 (default 4..J-1)");

    auto* verify = app.add_subcommand("verify", "Run verification suites over a measure zoo");
    add_common(verify, common, false);
    verify->add_option("--suite", suite, "Suite name or all");
    verify->add_option("--zoo", zoo, "Zoo file (default: built-in zoo)");
    verify->add_option("--report", common.out, "Report directory (same as --out)");

    auto* demo = app.add_subcommand("demo", "Scripted exhibits");
    add_common(demo, common, false);
    demo->add_option("name", demo_name, "Demo name (delta-necessity)")->required();

    std::string cmdline;
    for (int i = 0; i < argc; ++i)
        cmdline += (i ? " " : "") + std::string(argv[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
        Outputs outputs(common.out, out);
        Manifest manifest;
        manifest.command_line = cmdline;
        int code = 0;
        if (*eval)
            code = cmd_eval(common, points_file, outputs, manifest);
        else if (*energy)
            code = cmd_energy(common, s, theta, form, continuous, outputs, manifest);
        else if (*spectrum)
            code = cmd_spectrum(common, grid, shells, outputs, manifest);
        else if (*verify)
            code = cmd_verify(common, suite, zoo, outputs, manifest, out);
        else if (*demo)
            code = cmd_demo(common, demo_name, outputs, manifest);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_manifest(outputs, manifest, wall);
        return code;
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error (internal): " << e.what() << '\n';
        return exit_code(ErrorKind::internal);
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace fspec
