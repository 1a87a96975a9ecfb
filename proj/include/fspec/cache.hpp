#ifndef FSPEC_CACHE_HPP
#define FSPEC_CACHE_HPP

#include "fspec/lattice.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>

namespace fspec {

/// Append-only store of shell aggregates, one tab-separated record per line:
///   fingerprint  alpha  theta  j  logA_j  M_j  count
/// alpha, theta, logA_j (natural log) and M_j use 17 significant digits, so a
/// cached profile is bit-identical to a recomputed one.
class ShellCache {
public:
    explicit ShellCache(std::filesystem::path dir);

    std::optional<ShellProfile> find(const std::string& fingerprint, double alpha, double theta, int j) const;
    /// Appends the record to the file and to the in-memory index.
    void append(const std::string& fingerprint, double alpha, const ShellProfile& profile);

    const std::filesystem::path& file() const noexcept { return file_; }

    static constexpr const char* kFileName = "shell_cache.tsv";

private:
    using Key = std::tuple<std::string, std::string, std::string, int>;
    std::filesystem::path file_;
    std::map<Key, ShellProfile> index_;
};

} // namespace fspec

#endif
