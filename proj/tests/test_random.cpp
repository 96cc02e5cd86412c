#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <tuple>

#include "rpz/random.hpp"

using namespace rpz;
using Catch::Matchers::WithinAbs;

TEST_CASE("distribution registry and hypothesis flags", "[random]")
{
    for (const auto& n : {"complex_gaussian", "rademacher", "uniform_disk"}) {
        const auto d = make_distribution(n);
        CHECK(d.mean_zero);
        CHECK(d.finite_variance);
        CHECK(d.finite_log_plus);
        CHECK(d.within_hypotheses());
        CHECK(d.name() == n);
    }
    const auto p = make_distribution("pareto", 1.0);
    CHECK_FALSE(p.finite_variance);
    CHECK_FALSE(p.mean_zero);
    CHECK(p.finite_log_plus);
    CHECK(make_distribution("sym_pareto", 1.5).mean_zero);
    CHECK_FALSE(make_distribution("sym_pareto", 1.0).mean_zero);
    CHECK(make_distribution("pareto", 3.0).finite_variance);
    CHECK_FALSE(make_distribution("inverse_factorial").within_hypotheses());
    CHECK_THROWS_AS(make_distribution("cauchy"), domain_error);
    CHECK_THROWS_AS(make_distribution("pareto", 0.0), domain_error);
    CHECK(distribution_names().size() == 6);
}

TEST_CASE("sample support and moments", "[random]")
{
    SECTION("rademacher is +-1")
    {
        const auto s = sample(make_distribution("rademacher"), 3, 1);
        REQUIRE(s.values.size() == 4);
        for (cplx a : s.values) CHECK((a == cplx(1.0) || a == cplx(-1.0)));
    }

    SECTION("complex gaussian has mean 0 and unit second moment")
    {
        const auto s = sample(make_distribution("complex_gaussian"), 10000, 7);
        cplx mean = 0.0;
        double m2 = 0.0;
        for (cplx a : s.values) {
            mean += a;
            m2 += std::norm(a);
        }
        const double n = static_cast<double>(s.values.size());
        CHECK(std::abs(mean / n) < 0.05);
        CHECK(m2 / n >= 0.9);
        CHECK(m2 / n <= 1.1);
    }

    SECTION("uniform disk stays in |a| <= sqrt 2 with unit second moment")
    {
        const auto s = sample(make_distribution("uniform_disk"), 10000, 7);
        double m2 = 0.0;
        for (cplx a : s.values) {
            CHECK(std::abs(a) <= std::sqrt(2.0));
            m2 += std::norm(a);
        }
        CHECK_THAT(m2 / static_cast<double>(s.values.size()), WithinAbs(1.0, 0.05));
    }

    SECTION("pareto has a finite log+ mean")
    {
        // E log|a| = 1/alpha for a Pareto(alpha) law on [1, inf)
        const auto s = sample(make_distribution("pareto", 1.0), 10000, 7);
        double lp = 0.0;
        for (cplx a : s.values) {
            CHECK(std::abs(a) >= 1.0);
            lp += std::max(0.0, std::log(std::abs(a)));
        }
        lp /= static_cast<double>(s.values.size());
        CHECK(std::isfinite(lp));
        CHECK(lp < 10.0);
        CHECK_THAT(lp, WithinAbs(1.0, 0.05));
    }

    SECTION("inverse factorial profile")
    {
        const auto s = sample(make_distribution("inverse_factorial"), 10, 0);
        CHECK_THAT(s.values[0].real(), WithinAbs(1.0, 0.0));
        CHECK_THAT(s.values[5].real(), WithinAbs(1.0 / 120.0, 1e-17));
    }
}

TEST_CASE("samples are reproducible and trial streams are distinct", "[random]")
{
    const auto g = make_distribution("complex_gaussian");
    CHECK(sample(g, 50, 99, 3).values == sample(g, 50, 99, 3).values);
    CHECK(sample(g, 50, 99, 3).values != sample(g, 50, 99, 4).values);
    CHECK(sample(g, 50, 99, 3).values != sample(g, 50, 100, 3).values);

    // a shorter draw is a prefix of a longer one
    const auto a = sample(g, 10, 5), b = sample(g, 40, 5);
    CHECK(std::equal(a.values.begin(), a.values.end(), b.values.begin()));

    std::set<std::tuple<double, double, double, double>> heads;
    for (std::uint64_t t = 0; t < 1000; ++t) {
        const auto s = sample(g, 3, 2024, t);
        heads.emplace(s.values[0].real(), s.values[1].real(), s.values[2].imag(), s.values[3].imag());
    }
    CHECK(heads.size() == 1000);

    const CounterStream cs(17);
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const double u = cs.uniform(i);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("assemble", "[random]")
{
    const auto disk = ConformalDomain::disk();
    const auto berg = build_orthonormal(disk, basis_family::bergman, 6);

    CoefficientSample s;
    s.values = {1.0, 0.0, 0.0};
    const auto c = assemble(s, berg);
    CHECK(*c.degree() == 0);
    CHECK_THAT(c[0].real(), WithinAbs(std::sqrt(1.0 / std::numbers::pi), 1e-12));

    s.values = {0.0, 1.0};
    CHECK(assemble(s, build_faber(ConformalDomain::ellipse(1.0, 0.25), 3)) == Poly{0.0, 1.0});

    for (std::size_t n = 0; n <= 6; ++n) {
        s.values.assign(n + 1, 0.0);
        s.values[n] = 1.0;
        CHECK(assemble(s, berg) == berg.polys()[n]);
    }

    s.values.assign(8, 1.0);
    CHECK_THROWS_AS(assemble(s, berg), domain_error);
}

TEST_CASE("assemble is linear", "[random]")
{
    const auto t = build_orthonormal(ConformalDomain::perturbed_circle(0.15, 2), basis_family::szego, 20);
    const auto g = make_distribution("complex_gaussian");
    const auto a = sample(g, 20, 1), b = sample(g, 20, 2);
    const cplx al(0.3, -1.2), be(2.0, 0.5);
    CoefficientSample mix;
    for (std::size_t k = 0; k <= 20; ++k) mix.values.push_back(al * a.values[k] + be * b.values[k]);
    const auto lhs = assemble(mix, t);
    const auto pa = assemble(a, t), pb = assemble(b, t);
    for (std::size_t k = 0; k <= 20; ++k) CHECK(std::abs(lhs[k] - (al * pa[k] + be * pb[k])) <= 1e-12 * std::max(1.0, std::abs(lhs[k])));

    // Faber-coefficient form agrees with the monomial form
    const auto fe = assemble_expansion(a, t);
    for (cplx z : {cplx(0.2, 0.1), cplx(-0.5, 0.4), cplx(1.3, 0.0)}) CHECK(std::abs(fe(z) - pa(z)) <= 1e-10 * std::max(1.0, std::abs(pa(z))));
}

TEST_CASE("coefficient statistics", "[random]")
{
    SECTION("rademacher sequences are identically 1")
    {
        const auto st = coeff_statistics(sample(make_distribution("rademacher"), 100, 4));
        for (std::size_t m = 1; m <= 100; ++m) {
            CHECK(st.nth_root[m] == 1.0);
            CHECK(st.running_max[m] == 1.0);
            CHECK(st.window_max[m] == 1.0);
        }
    }

    SECTION("gaussian running max converges to 1")
    {
        const auto st = coeff_statistics(sample(make_distribution("complex_gaussian"), 2000, 3));
        CHECK(st.running_max_summary.last_quartile_min >= 0.99);
        CHECK(st.running_max_summary.last_quartile_max <= 1.01);
    }

    SECTION("pareto limsup estimate")
    {
        const auto st = coeff_statistics(sample(make_distribution("pareto", 1.0), 2000, 3));
        CHECK(st.nth_root_summary.last_quartile_max >= 0.98);
        CHECK(st.nth_root_summary.last_quartile_max <= 1.05);
    }

    SECTION("window maximum against a brute-force oracle")
    {
        const auto s = sample(make_distribution("complex_gaussian"), 300, 8);
        const double b = 2.5;
        const auto st = coeff_statistics(s, b);
        for (std::size_t m = 1; m <= 300; ++m) {
            double w = 0.0;
            for (std::size_t k = 0; k <= m; ++k)
                if (static_cast<double>(k) > static_cast<double>(m) - b * std::log(static_cast<double>(m))) w = std::max(w, std::abs(s.values[k]));
            if (m == 1) w = std::abs(s.values[1]); // empty window at m = 1 falls back to a_m
            CHECK_THAT(st.window_max[m], WithinAbs(std::pow(w, 1.0 / static_cast<double>(m)), 1e-15));
        }
    }

    SECTION("errors")
    {
        CoefficientSample z;
        z.values.assign(20, 0.0);
        CHECK_THROWS_AS(coeff_statistics(z), domain_error);
        z.values.assign(5, 1.0);
        CHECK_THROWS_AS(coeff_statistics(z), domain_error);
    }
}
