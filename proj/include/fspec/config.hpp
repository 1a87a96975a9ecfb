#ifndef FSPEC_CONFIG_HPP
#define FSPEC_CONFIG_HPP

#include "fspec/measure.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fspec {

inline constexpr int kSchemaVersion = 1;

/// Parses a measure document (JSON, see docs/formats.md). Throws ConfigError
/// with the path of the offending field.
MeasureSpec parse_measure(std::string_view text);
MeasureSpec load_measure(const std::filesystem::path& path);

/// Canonical form: compact JSON with sorted keys, every number written as a
/// double, derived masses filled in. Parsing it gives back an equal spec.
std::string canonical_measure(const MeasureSpec& spec);
/// Indented version of the canonical form, for files meant to be read.
std::string pretty_measure(const MeasureSpec& spec);

/// 16 hex digits of the FNV-1a 64-bit hash of the canonical form. Stable under
/// key reordering and number spelling in the source document.
std::string fingerprint(const MeasureSpec& spec);

struct ZooMember {
    std::string name;
    std::vector<std::string> tags;
    MeasureSpec spec;

    bool has_tag(std::string_view tag) const;
};

std::vector<ZooMember> parse_zoo(std::string_view text);
std::vector<ZooMember> load_zoo(const std::filesystem::path& path);
std::string zoo_to_text(const std::vector<ZooMember>& zoo);

std::string read_text_file(const std::filesystem::path& path);

} // namespace fspec

#endif
