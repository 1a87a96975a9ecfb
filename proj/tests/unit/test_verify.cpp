#include "fspec/config.hpp"
#include "fspec/error.hpp"
#include "fspec/verify.hpp"
#include "fspec/zoo.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>

using namespace fspec;

namespace {

std::vector<ZooMember> one_d_zoo()
{
    auto zoo = default_zoo();
    zoo.erase(std::remove_if(zoo.begin(), zoo.end(), [](const ZooMember& m) { return m.spec.dim() != 1; }),
              zoo.end());
    return zoo;
}

std::vector<ZooMember> unit_interval_zoo()
{
    return {{"unit_interval", {"counterexample"}, MeasureSpec::box_lebesgue({0.0}, {1.0})}};
}

const CheckRecord* find(const VerificationReport& r, const std::string& prefix)
{
    for (const auto& c : r.checks)
        if (c.id.rfind(prefix, 0) == 0)
            return &c;
    return nullptr;
}

} // namespace

TEST_CASE("default zoo has the five documented members")
{
    const auto zoo = default_zoo();
    REQUIRE(zoo.size() == 5);
    CHECK(zoo[0].name == "dirac");
    CHECK(zoo[3].spec.dim() == 2);
    CHECK(zoo[3].has_tag("salem"));
    CHECK_FALSE(zoo[0].has_tag("salem"));
}

TEST_CASE("shape suite passes on the default zoo")
{
    const VerificationReport r = check_shape(default_zoo(), {});
    CHECK(r.checks.size() == 5);
    CHECK(r.ok());
    CHECK(r.count(CheckStatus::pass) == 5);
}

TEST_CASE("convolution law holds pointwise and in shell sums")
{
    const VerificationReport r = check_convolution_law(default_zoo(), {});
    CHECK(r.ok());
    CHECK(r.count(CheckStatus::pass) >= 2);
}

TEST_CASE("upper bound and corollary on the one-dimensional members")
{
    const VerifyOptions o;
    const VerificationReport ub = check_upper_bound(one_d_zoo(), o);
    CHECK(ub.checks.size() == 4 * o.theta_grid.size());
    CHECK(ub.ok());
    const VerificationReport cor = check_lp_corollary(one_d_zoo(), o);
    CHECK(cor.ok());
    // The unit atom is in no l^q: every corollary check for it is vacuous.
    for (const auto& c : cor.checks)
        if (c.measure == "dirac")
            CHECK(c.status == CheckStatus::skipped);
}

TEST_CASE("coefficient theorem: the counterexample is excluded, not failed")
{
    const VerificationReport r = check_coeff_theorem(unit_interval_zoo(), {});
    REQUIRE_FALSE(r.checks.empty());
    for (const auto& c : r.checks) {
        CHECK(c.status == CheckStatus::excluded);
        CHECK(c.note.find("hypothesis") != std::string::npos);
    }
    const VerificationReport lp = check_lp_equivalence(unit_interval_zoo(), {});
    for (const auto& c : lp.checks)
        CHECK(c.status == CheckStatus::excluded);
}

TEST_CASE("coefficient theorem and norm equivalence on a margin-supported box")
{
    const std::vector<ZooMember> zoo{default_zoo()[1]};
    const VerificationReport r = check_coeff_theorem(zoo, {});
    CHECK(r.ok());
    CHECK(r.count(CheckStatus::pass) == 2);
    const CheckRecord* c = find(r, "coeff/lebesgue_quarter/s=1");
    REQUIRE(c != nullptr);
    CHECK(c->measured < 0.2);
    const VerificationReport lp = check_lp_equivalence(zoo, {});
    CHECK(lp.ok());
    CHECK(lp.count(CheckStatus::pass) == 2);
}

TEST_CASE("rescaling agreement on the counterexample uses admissible scales")
{
    const VerificationReport r = check_rescaling(unit_interval_zoo(), {});
    CHECK(r.ok());
    CHECK(r.count(CheckStatus::pass) == 3);
}

TEST_CASE("suites are addressable by name and reject unknown names")
{
    const auto names = suite_names();
    CHECK(names.back() == "all");
    CHECK(names.size() == 8);
    CHECK_THROWS_AS(run_suite("nope", default_zoo(), {}), ContractError);
    const auto reps = run_suite("shape", default_zoo(), {});
    REQUIRE(reps.size() == 1);
    CHECK(reps[0].suite == "shape");
}

TEST_CASE("reports serialize deterministically without runtimes")
{
    const VerificationReport a = check_shape(default_zoo(), {});
    const VerificationReport b = check_shape(default_zoo(), {});
    CHECK(report_to_json(a) == report_to_json(b));
    CHECK(report_to_csv(a) == report_to_csv(b));
    CHECK(report_to_json(a).find("runtime") == std::string::npos);
    CHECK(report_to_csv(a).rfind("suite,id,measure,fingerprint,quantity,measured,comparison,threshold,status,params,note",
                                 0) == 0);
}

TEST_CASE("delta necessity exhibit")
{
    const DeltaDemo d = demo_delta_necessity({});
    REQUIRE(d.rows.size() == 2);
    CHECK(d.rows[0].flag == "degenerate");
    CHECK(d.rows[0].max_coefficient <= 1e-12);
    CHECK_FALSE(d.rows[0].margin.has_value());
    CHECK(d.rows[1].flag == "ok");
    for (const auto& dim : d.rows[1].dims) {
        REQUIRE(dim.has_value());
        CHECK(std::abs(*dim - 2.0) <= 0.15);
    }
    CHECK(d.report.ok());

    const DeltaDemo third = demo_delta_necessity({}, 1.0 / 3.0);
    REQUIRE(third.rows.size() == 3);
    CHECK(third.rows[2].flag == "ok");
    for (const auto& dim : third.rows[2].dims)
        CHECK(std::abs(*dim - 2.0) <= 0.15);
    CHECK(delta_demo_to_csv(d) == delta_demo_to_csv(demo_delta_necessity({})));
}
