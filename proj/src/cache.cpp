#include "fspec/cache.hpp"

#include "fspec/error.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace fspec {

namespace {

double parse_double(const std::string& s, bool& ok)
{
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    ok = end != s.c_str() && *end == '\0';
    return v;
}

} // namespace

ShellCache::ShellCache(std::filesystem::path dir) : file_(std::move(dir) / kFileName)
{
    std::error_code ec;
    std::filesystem::create_directories(file_.parent_path(), ec);
    if (ec)
        throw ConfigError("cannot create cache directory '" + file_.parent_path().string() + "': " + ec.message());
    std::ifstream in(file_);
    if (!in)
        return;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> f;
        std::istringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, '\t'))
            f.push_back(tok);
        bool ok = f.size() == 7;
        ShellProfile p;
        if (ok) {
            bool a = false, b = false, c = false, d = false;
            p.theta = parse_double(f[2], a);
            p.j = static_cast<int>(parse_double(f[3], b));
            p.log_a = parse_double(f[4], c);
            p.max_modulus = parse_double(f[5], d);
            char* end = nullptr;
            p.count = std::strtoull(f[6].c_str(), &end, 10);
            ok = a && b && c && d && end && *end == '\0';
        }
        if (!ok)
            throw ConfigError(file_.string() + ":" + std::to_string(lineno) + ": malformed cache record");
        index_[{f[0], f[1], f[2], p.j}] = p;
    }
}

std::optional<ShellProfile> ShellCache::find(const std::string& fingerprint, double alpha, double theta, int j) const
{
    const auto it = index_.find({fingerprint, format17(alpha), format17(theta), j});
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

void ShellCache::append(const std::string& fingerprint, double alpha, const ShellProfile& p)
{
    const bool fresh = !std::filesystem::exists(file_);
    std::ofstream out(file_, std::ios::app);
    if (!out)
        throw ConfigError("cannot write cache file '" + file_.string() + "'");
    if (fresh)
        out << "# fingerprint\talpha\ttheta\tj\tlogA_j\tM_j\tcount\n";
    out << fingerprint << '\t' << format17(alpha) << '\t' << format17(p.theta) << '\t' << p.j << '\t'
        << format17(p.log_a) << '\t' << format17(p.max_modulus) << '\t' << p.count << '\n';
    index_[{fingerprint, format17(alpha), format17(p.theta), p.j}] = p;
}

} // namespace fspec
