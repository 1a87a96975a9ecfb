#include "fspec/energy.hpp"
#include "fspec/error.hpp"
#include "fspec/measure.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace fspec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Plain loop over 0 < |n| < 2^J in d = 1, plus the zero term.
double lattice_energy_oracle(const MeasureSpec& m, double s, double theta, double alpha, int J)
{
    double inner = std::pow(m.mass(), 2.0 / theta);
    const auto top = static_cast<long>(std::ldexp(1.0, J) / alpha);
    for (long n = -top - 1; n <= top + 1; ++n) {
        const double z = alpha * static_cast<double>(n);
        if (n == 0 || std::abs(z) >= std::ldexp(1.0, J))
            continue;
        const double zz[1] = {z};
        const double mod = fourier_modulus(m, zz);
        inner += std::pow(mod, 2.0 / theta) * std::pow(std::abs(z), s / theta - 1.0);
    }
    return std::pow(inner, theta);
}

EnergyQuery query(double s, double theta, double alpha = 1.0, int J = 10)
{
    EnergyQuery q;
    q.s = s;
    q.theta = theta;
    q.alpha = alpha;
    q.max_shell = J;
    return q;
}

bool has_flag(const EnergyEstimate& e, const std::string& f)
{
    return std::find(e.flags.begin(), e.flags.end(), f) != e.flags.end();
}

} // namespace

TEST_CASE("trend classifier on geometric sequences")
{
    std::vector<double> up;
    std::vector<double> down;
    std::vector<double> flat;
    for (int j = 0; j < 12; ++j) {
        up.push_back(0.5 * j);
        down.push_back(-0.5 * j);
        flat.push_back(3.0);
    }
    CHECK(classify_trend(up, 0).trend == Trend::diverging);
    CHECK(classify_trend(down, 0).trend == Trend::converging);
    CHECK(classify_trend(flat, 0).trend == Trend::flat);
    const TrendStats st = classify_trend(down, 0);
    CHECK_THAT(st.ratio, WithinAbs(std::exp2(-0.5), 1e-12));
    CHECK(st.first == 4);
    CHECK(st.last == 11);
    REQUIRE(st.tail_ratios.size() == 3);
    CHECK_THAT(st.tail_ratios.back(), WithinAbs(std::exp2(-0.5), 1e-12));
    const std::vector<double> zeros(8, -std::numeric_limits<double>::infinity());
    CHECK(classify_trend(zeros, 0).trend == Trend::flat);
    // Oscillation with zero fitted drift and large scatter is undetermined.
    std::vector<double> noisy{5.0, 1.0, 3.0, -2.0, 2.0, -2.0, 3.0, 1.0, -2.0, 2.0, -2.0, 3.0};
    std::vector<double> xs;
    std::vector<double> window(noisy.begin() + 4, noisy.end());
    for (int j = 4; j < 12; ++j)
        xs.push_back(j);
    const double drift = least_squares_line(xs, window).slope;
    for (int j = 0; j < 12; ++j)
        noisy[static_cast<std::size_t>(j)] -= drift * j;
    CHECK(classify_trend(noisy, 0).trend == Trend::undetermined);
}

TEST_CASE("unit atom: partial sum of n^(-1/2) diverges")
{
    const MeasureSpec m = MeasureSpec::dirac({0.5});
    const EnergyEstimate e = discrete_energy(m, query(0.5, 1.0));
    double direct = 1.0;
    for (int n = 1; n <= 1023; ++n)
        direct += 2.0 / std::sqrt(static_cast<double>(n));
    CHECK_THAT(e.value, WithinRel(direct, 1e-13));
    CHECK_THAT(e.value, WithinAbs(126.1, 0.1));
    CHECK(e.zero_term == 1.0);
    CHECK(e.trend.trend == Trend::diverging);
    CHECK_FALSE(e.hypothesis_violated);
    CHECK(e.shells.size() == 10);
}

TEST_CASE("Lebesgue on the unit interval sees only the zero term")
{
    const MeasureSpec m = MeasureSpec::box_lebesgue({0.0}, {1.0});
    for (auto [s, theta] : {std::pair{1.0, 1.0}, {0.5, 0.5}, {2.0, 0.25}}) {
        const EnergyEstimate e = discrete_energy(m, query(s, theta));
        CHECK(e.value == 1.0);
        CHECK(e.trend.trend == Trend::flat);
        CHECK(e.hypothesis_violated);
        CHECK(has_flag(e, "hypothesis-violated"));
    }
}

TEST_CASE("Lebesgue on [1/4, 3/4] converges at s = 1")
{
    const MeasureSpec m = MeasureSpec::box_lebesgue({0.25}, {0.75});
    const EnergyEstimate e = discrete_energy(m, query(1.0, 1.0));
    CHECK_THAT(e.value, WithinRel(lattice_energy_oracle(m, 1.0, 1.0, 1.0, 10), 1e-12));
    CHECK(e.trend.trend == Trend::converging);
    CHECK(std::isfinite(e.value));
    CHECK_FALSE(e.hypothesis_violated);
    // Even frequencies vanish; on odd z, |mu^(z)| = 2 / (pi |z|).
    const double z[1] = {3.0};
    CHECK_THAT(fourier_modulus(m, z), WithinRel(2.0 / (3.0 * M_PI), 1e-14));
}

TEST_CASE("energies at other theta and alpha match direct summation")
{
    const MeasureSpec cantor = MeasureSpec::cantor();
    const MeasureSpec quarter = MeasureSpec::box_lebesgue({0.25}, {0.75}, 2.0);
    for (const MeasureSpec* m : {&cantor, &quarter})
        for (auto [s, theta, alpha] : {std::tuple{0.5, 0.5, 1.0}, {0.3, 0.25, 0.5}, {1.5, 0.75, 1.0 / 3.0}}) {
            INFO("s=" << s << " theta=" << theta << " alpha=" << alpha);
            const EnergyEstimate e = discrete_energy(*m, query(s, theta, alpha, 9));
            CHECK_THAT(e.value, WithinRel(lattice_energy_oracle(*m, s, theta, alpha, 9), 1e-11));
        }
}

TEST_CASE("the core region 0 < |z| < 1 is included when alpha < 1")
{
    const MeasureSpec m = MeasureSpec::box_lebesgue({0.25}, {0.75});
    const EnergyEstimate e = discrete_energy(m, query(1.0, 1.0, 0.25, 6));
    double core = 0.0;
    for (int n = 1; n <= 3; ++n) {
        const double z[1] = {0.25 * n};
        const double v = fourier_modulus(m, z);
        core += 2.0 * v * v;
    }
    CHECK_THAT(std::exp(e.log_core), WithinRel(core, 1e-13));
    CHECK(discrete_energy(m, query(1.0, 1.0, 1.0, 6)).log_core == -std::numeric_limits<double>::infinity());
}

TEST_CASE("discrete s-energy coincides bit for bit with the theta = 1 energy")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    const std::vector<MeasureSpec> specs{MeasureSpec::cantor(), MeasureSpec::box_lebesgue({0.2}, {0.7}),
                                         MeasureSpec::atomic(1, {0.3, 0.6}, {0.5, 0.5}),
                                         MeasureSpec::affine(MeasureSpec::cantor(), 0.5, {0.25})};
    for (int i = 0; i < 10; ++i) {
        const MeasureSpec& m = specs[static_cast<std::size_t>(i) % specs.size()];
        const double s = u(rng);
        const EnergyEstimate a = discrete_s_energy(m, s, 1.0, 9);
        const EnergyEstimate b = discrete_energy(m, query(s, 1.0, 1.0, 9));
        CHECK(a.value == b.value);
        CHECK(a.log_inner == b.log_inner);
        CHECK(a.kind == EnergyKind::discrete_i);
    }
    CHECK_THROWS_AS(discrete_s_energy(specs[0], 1.0, 1.0, 9), ContractError);
}

TEST_CASE("Cantor s-energy flips between s = 0.5 and s = 0.7")
{
    const MeasureSpec c = MeasureSpec::cantor();
    CHECK(discrete_s_energy(c, 0.5, 0.5, 14).trend.trend == Trend::converging);
    CHECK(discrete_s_energy(c, 0.7, 0.5, 14).trend.trend == Trend::diverging);
    CHECK(discrete_s_energy(MeasureSpec::dirac({0.5}), 0.5, 1.0, 10).trend.trend == Trend::diverging);
}

TEST_CASE("theta = 0 is refused by the integral forms")
{
    const MeasureSpec m = MeasureSpec::dirac({0.5});
    CHECK_THROWS_AS(discrete_energy(m, query(1.0, 0.0)), ContractError);
    CHECK_THROWS_AS(continuous_energy(m, query(1.0, 0.0)), ContractError);
    CHECK_THROWS_AS(discrete_energy(m, query(1.0, 1.5)), ContractError);
}

TEST_CASE("sup energy")
{
    const MeasureSpec atom = MeasureSpec::dirac({0.5});
    const EnergyEstimate e = sup_energy(atom, 1.0, 1.0, 10);
    CHECK_THAT(e.value, WithinRel(1023.0, 1e-13));
    REQUIRE(e.argmax.size() == 1);
    CHECK(std::abs(e.argmax[0]) == 1023.0);

    const EnergyEstimate leb = sup_energy(MeasureSpec::box_lebesgue({0.0}, {1.0}), 1.5, 1.0, 8);
    CHECK(leb.value == 0.0);
    CHECK(leb.hypothesis_violated);

    const MeasureSpec c = MeasureSpec::cantor();
    const EnergyEstimate s0 = sup_energy(c, 0.0, 0.5, 8);
    CHECK(s0.value <= c.mass() * c.mass());
    double best = 0.0;
    for (int n = 1; n < 512; ++n) {
        const double z[1] = {0.5 * n};
        best = std::max(best, std::pow(fourier_modulus(c, z), 2.0));
    }
    CHECK_THAT(s0.value, WithinRel(best, 1e-13));
}

TEST_CASE("continuous energy of the unit atom is the closed-form integral")
{
    const MeasureSpec m = MeasureSpec::dirac({0.5});
    const EnergyEstimate c = continuous_energy(m, query(0.5, 1.0));
    // 2 int_0^{1024} r^{-1/2} dr = 128.
    CHECK_THAT(c.value, WithinRel(128.0, 2e-3));
    const EnergyEstimate d = discrete_energy(m, query(0.5, 1.0));
    CHECK(c.value / d.value <= 4.0);
    CHECK(d.value / c.value <= 4.0);
    CHECK(c.trend.trend == d.trend.trend);
    CHECK(c.quadrature_converged);
}

TEST_CASE("continuous energy of Lebesgue on the unit interval flips at s = 2")
{
    const MeasureSpec m = MeasureSpec::box_lebesgue({0.0}, {1.0});
    const EnergyEstimate low = continuous_energy(m, query(1.0, 1.0));
    CHECK(std::isfinite(low.value));
    CHECK(low.trend.trend == Trend::converging);
    const EnergyEstimate high = continuous_energy(m, query(2.5, 1.0));
    CHECK(high.trend.trend == Trend::diverging);
}

TEST_CASE("continuous energy near s = 0: shells continuous, core ~ 2 mass^2 / s")
{
    // Over |z| >= 1 the integrand is continuous in s; on the unit ball |z|^(s-1)
    // integrates to 2/s, so the full integral blows up as s -> 0.
    const MeasureSpec m = MeasureSpec::box_lebesgue({0.25}, {0.75});
    const EnergyEstimate a = continuous_energy(m, query(0.01, 1.0, 1.0, 8));
    const EnergyEstimate b = continuous_energy(m, query(0.02, 1.0, 1.0, 8));
    auto shells = [](const EnergyEstimate& e) {
        double t = 0.0;
        for (const ShellTerm& st : e.shells)
            t += std::exp(st.log_t);
        return t;
    };
    CHECK_THAT(shells(a), WithinRel(shells(b), 0.05));
    CHECK_THAT(0.01 * std::exp(a.log_core), WithinRel(2.0, 0.05));
    CHECK_THAT(0.02 * std::exp(b.log_core), WithinRel(2.0, 0.05));
}

TEST_CASE("continuous and discrete energies agree under the margin hypothesis")
{
    // Parseval on the unit torus: for support inside an open unit interval the
    // lattice sum of |mu^|^2 equals the integral over R.
    const MeasureSpec m = MeasureSpec::box_lebesgue({0.25}, {0.75});
    const EnergyEstimate c = continuous_energy(m, query(1.0, 1.0, 1.0, 10));
    const EnergyEstimate d = discrete_energy(m, query(1.0, 1.0, 1.0, 10));
    CHECK_THAT(c.value, WithinRel(d.value, 1e-3));
}

TEST_CASE("spatial s-energy oracle by hand")
{
    AtomCloud two{1, {0.0, 1.0}, {0.5, 0.5}};
    CHECK_THAT(spatial_s_energy_oracle(two, 1.0).value, WithinAbs(0.5, 1e-15));
    const AtomCloud c1 = discretize(MeasureSpec::cantor(), 1);
    CHECK_THAT(spatial_s_energy_oracle(c1, 1.0).value, WithinAbs(0.75, 1e-14));
    AtomCloud dup{1, {0.2, 0.2}, {0.5, 0.5}};
    CHECK(spatial_s_energy_oracle(dup, 1.0).excluded_pairs == 2);
}

TEST_CASE("spatial energy of Cantor approximations: bounded below dimension, growing above")
{
    const MeasureSpec c = MeasureSpec::cantor();
    std::vector<double> e05;
    std::vector<double> e07;
    for (int level = 8; level <= 12; ++level) {
        const AtomCloud cloud = discretize(c, level);
        e05.push_back(spatial_s_energy_oracle(cloud, 0.5).value);
        e07.push_back(spatial_s_energy_oracle(cloud, 0.7).value);
    }
    // Level increments shrink geometrically below log 2 / log 3 and grow above it.
    const double r05 = (e05[4] - e05[3]) / (e05[3] - e05[2]);
    const double r07 = (e07[4] - e07[3]) / (e07[3] - e07[2]);
    CHECK_THAT(r05, WithinAbs(std::pow(3.0, 0.5) / 2.0, 0.02));
    CHECK_THAT(r07, WithinAbs(std::pow(3.0, 0.7) / 2.0, 0.02));
    CHECK(r05 < 1.0);
    CHECK(r07 > 1.0);
}

TEST_CASE("lattice and continuum L2 norms of a margin-supported box agree")
{
    // Density 2 on [1/4, 3/4]: both squared norms tend to 4 * 1/2 = 2.
    const MeasureSpec m = MeasureSpec::box_lebesgue({0.25}, {0.75});
    const NormProfile p = lp_norm_profile(m, 2.0, 10, true);
    REQUIRE(p.lattice.size() == 11);
    REQUIRE(p.continuum.size() == 11);
    CHECK_THAT(p.lattice.back(), WithinRel(std::sqrt(2.0), 1e-3));
    CHECK_THAT(p.continuum.back(), WithinRel(std::sqrt(2.0), 1e-3));
    CHECK(p.lattice.front() == 1.0);  // only z = 0 inside |z| < 1
    CHECK(p.continuum_converged);
}
