#include "fspec/cache.hpp"
#include "fspec/config.hpp"
#include "fspec/error.hpp"
#include "fspec/zoo.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace fspec;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text)
{
    try {
        parse_measure(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("fspec_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("fingerprint is stable under key order and whitespace")
{
    const std::string a = R"({"schema_version": 1, "d": 1, "kind": "box_lebesgue",
                              "params": {"lower": [0.25], "upper": [0.75]}})";
    const std::string b = R"({"params":{"upper":[0.75],"lower":[0.25]},"kind":"box_lebesgue","d":1,"schema_version":1})";
    CHECK(fingerprint(parse_measure(a)) == fingerprint(parse_measure(b)));
    CHECK(fingerprint(parse_measure(a)).size() == 16);
    // Explicit default mass and numerically equal spellings are the same measure.
    const std::string c = R"({"schema_version": 1, "d": 1, "kind": "box_lebesgue", "mass": 1,
                              "params": {"lower": [2.5e-1], "upper": [0.750]}})";
    CHECK(fingerprint(parse_measure(a)) == fingerprint(parse_measure(c)));
    const std::string other = R"({"schema_version": 1, "d": 1, "kind": "box_lebesgue",
                                  "params": {"lower": [0.25], "upper": [0.8]}})";
    CHECK(fingerprint(parse_measure(a)) != fingerprint(parse_measure(other)));
}

TEST_CASE("canonical form round-trips")
{
    for (const ZooMember& m : default_zoo()) {
        const std::string canon = canonical_measure(m.spec);
        const MeasureSpec back = parse_measure(canon);
        CHECK(canonical_measure(back) == canon);
        CHECK(fingerprint(back) == fingerprint(m.spec));
        CHECK(fingerprint(parse_measure(pretty_measure(m.spec))) == fingerprint(m.spec));
    }
}

TEST_CASE("configuration errors name the offending field")
{
    CHECK(error_of(R"({"d": 1, "kind": "atomic", "params": {}})").find("schema_version") != std::string::npos);
    CHECK(error_of(R"({"schema_version": 2, "d": 1, "kind": "atomic"})").find("schema version") !=
          std::string::npos);
    CHECK(error_of(R"({"schema_version": 1, "d": 1, "kind": "blob"})").find("unknown kind") != std::string::npos);
    CHECK(error_of(R"({"schema_version": 1, "d": 1, "kind": "box_lebesgue", "colour": 3,
                       "params": {"lower": [0], "upper": [1]}})")
              .find("unknown field 'colour'") != std::string::npos);
    CHECK(error_of(R"({"schema_version": 1, "d": 1, "kind": "box_lebesgue",
                       "params": {"lower": [0], "upper": ["x"]}})")
              .find("params.upper[0]") != std::string::npos);
    CHECK(error_of(R"({"schema_version": 1, "d": 1, "kind": "atomic",
                       "params": {"points": [[0.5]], "weights": [0.3]}})")
              .find("sum to 1") != std::string::npos);
    CHECK(error_of(R"({"schema_version": 1, "d": 1, "kind": "affine", "params": {"scale": 0.5, "shift": [0.1]},
                       "children": [{"d": 1, "kind": "atomic", "wat": 1,
                                     "params": {"points": [[0.5]], "weights": [1]}}]})")
              .find("children[0]") != std::string::npos);
    CHECK_FALSE(error_of("{ not json").empty());
}

TEST_CASE("example configs in data parse")
{
    const fs::path dir = FSPEC_DATA_DIR;
    for (const char* name : {"dirac_half.json", "lebesgue_unit.json", "lebesgue_quarter.json", "cantor.json",
                             "cantor_normalized.json", "circle.json"})
        CHECK_NOTHROW(load_measure(dir / name));
    CHECK_THROWS_AS(load_measure(dir / "does_not_exist.json"), ConfigError);
}

TEST_CASE("shipped zoo file equals the built-in zoo")
{
    const auto file = load_zoo(fs::path(FSPEC_DATA_DIR) / "default_zoo.json");
    const auto built = default_zoo();
    REQUIRE(file.size() == 5);
    REQUIRE(built.size() == 5);
    for (std::size_t i = 0; i < built.size(); ++i) {
        CHECK(file[i].name == built[i].name);
        CHECK(file[i].tags == built[i].tags);
        CHECK(fingerprint(file[i].spec) == fingerprint(built[i].spec));
    }
    CHECK(parse_zoo(zoo_to_text(built)).size() == 5);
}

TEST_CASE("natural lattice scale")
{
    CHECK(natural_alpha(MeasureSpec::box_lebesgue({0.25}, {0.75})) == 1.0);
    CHECK(natural_alpha(MeasureSpec::dirac({0.0})) == 1.0);
    CHECK_THAT(natural_alpha(MeasureSpec::cantor()), Catch::Matchers::WithinAbs(0.5, 1e-15));
    CHECK(natural_alpha(MeasureSpec::box_lebesgue({0.0}, {4.0})) == 0.125);
}

TEST_CASE("shell cache round-trips profiles exactly")
{
    const fs::path dir = scratch_dir("cache");
    ShellProfile p;
    p.j = 7;
    p.theta = 0.375;
    p.log_a = -12.345678901234567;
    p.max_modulus = 0.1 + 0.2;
    p.count = 256;
    ShellProfile zero;
    zero.j = 8;
    zero.theta = 0.375;
    {
        ShellCache c(dir);
        CHECK_FALSE(c.find("abc", 0.5, 0.375, 7).has_value());
        c.append("abc", 0.5, p);
        c.append("abc", 0.5, zero);
    }
    ShellCache again(dir);
    const auto hit = again.find("abc", 0.5, 0.375, 7);
    REQUIRE(hit.has_value());
    CHECK(hit->log_a == p.log_a);
    CHECK(hit->max_modulus == p.max_modulus);
    CHECK(hit->count == 256);
    const auto z = again.find("abc", 0.5, 0.375, 8);
    REQUIRE(z.has_value());
    CHECK(z->log_a == -std::numeric_limits<double>::infinity());
    CHECK_FALSE(again.find("abc", 0.25, 0.375, 7).has_value());
    CHECK_FALSE(again.find("abd", 0.5, 0.375, 7).has_value());

    std::ofstream(again.file(), std::ios::app) << "garbage line\n";
    try {
        ShellCache broken(dir);
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find(":4:") != std::string::npos);
    }
    fs::remove_all(dir);
}
