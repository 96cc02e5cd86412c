#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "rpz/bases.hpp"

using namespace rpz;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double pi = std::numbers::pi;

// F_n on the ellipse a = 1: w^n + b^n w^{-n} with z = w + b/w
cplx ellipse_faber(double b, std::size_t n, cplx w)
{
    if (n == 0) return 1.0;
    const int k = static_cast<int>(n);
    return std::pow(w, k) + std::pow(b, k) * std::pow(w, -k);
}

} // namespace

TEST_CASE("Faber polynomials", "[bases][faber]")
{
    SECTION("disk: F_n = z^n")
    {
        const auto t = build_faber(ConformalDomain::disk(), 3);
        for (std::size_t n = 0; n <= 3; ++n) CHECK(t.polys()[n] == Poly::monomial(n));
    }

    SECTION("ellipse(1, 0.25): F_1 = z, F_2 = z^2 - 0.5")
    {
        const auto t = build_faber(ConformalDomain::ellipse(1.0, 0.25), 2);
        CHECK(t.polys()[1] == Poly{0.0, 1.0});
        CHECK(std::abs(t.polys()[2][0] + 0.5) < 1e-15);
        CHECK(std::abs(t.polys()[2][1]) < 1e-15);
        CHECK(std::abs(t.polys()[2][2] - 1.0) < 1e-15);
    }

    SECTION("recurrence matches the ellipse closed form")
    {
        for (double b : {0.25, -0.4, 0.7}) {
            const auto d = ConformalDomain::ellipse(1.0, b);
            const FaberRecurrence rec(d);
            for (double rho : {1.0, 1.5}) {
                const cplx w = std::polar(rho, 0.77);
                const auto F = rec.values<0>(d.psi(w), 40);
                for (std::size_t n = 0; n <= 40; ++n) {
                    const cplx want = ellipse_faber(b, n, w);
                    CHECK(std::abs(F[n][0] - want) <= 1e-10 * std::max(1.0, std::abs(want)));
                }
            }
        }
    }

    SECTION("leading coefficient is capacity^-n")
    {
        const auto t = build_faber(ConformalDomain::ellipse(2.0, 0.5), 12);
        for (std::size_t n = 0; n <= 12; ++n) CHECK_THAT(t.polys()[n].leading().real(), WithinAbs(std::pow(2.0, -static_cast<double>(n)), 1e-15));
    }

    SECTION("series-reversion oracle agrees")
    {
        for (const auto& d : {ConformalDomain::disk(), ConformalDomain::ellipse(1.0, 0.25), ConformalDomain::perturbed_circle(0.15, 2)})
            CHECK(faber_oracle_gap(FaberRecurrence(d).monomials(40), faber_by_reversion(d, 40)) <= 1e-9);
    }
}

TEST_CASE("orthonormal bases on the disk", "[bases]")
{
    const auto disk = ConformalDomain::disk();
    const auto berg = build_orthonormal(disk, basis_family::bergman, 2);
    for (std::size_t n = 0; n <= 2; ++n) {
        const auto& p = berg.polys()[n];
        REQUIRE(*p.degree() == n);
        CHECK_THAT(p.leading().real(), WithinAbs(std::sqrt((n + 1.0) / pi), 1e-12));
        CHECK(std::abs(p.leading().imag()) < 1e-14);
    }
    const auto sz = build_orthonormal(disk, basis_family::szego, 1);
    CHECK_THAT(sz.polys()[0][0].real(), WithinAbs(1.0 / std::sqrt(2 * pi), 1e-12));
    CHECK_THAT(sz.polys()[1][1].real(), WithinAbs(1.0 / std::sqrt(2 * pi), 1e-12));
    CHECK(std::abs(sz.polys()[1][0]) < 1e-14);
}

TEST_CASE("orthonormality on nontrivial domains", "[bases]")
{
    for (const auto& d : {ConformalDomain::ellipse(1.0, 0.25), ConformalDomain::perturbed_circle(0.15, 2)})
        for (auto f : {basis_family::bergman, basis_family::szego}) {
            const auto t = build_orthonormal(d, f, 10);
            CHECK(t.meta().gram_residual < 1e-8);
            for (std::size_t n = 0; n < t.size(); ++n) {
                CHECK(t.polys()[n].leading().real() > 0.0);
                CHECK(std::abs(t.polys()[n].leading().imag()) <= 1e-12 * t.polys()[n].leading().real());
            }
        }
}

TEST_CASE("Bergman asymptotics on the disk are exact", "[bases][asymptotics]")
{
    const auto t = build_orthonormal(ConformalDomain::disk(), basis_family::bergman, 40);
    const auto rep = check_bergman_asymptotics(t, 2.0, {10, 20, 30, 40});
    for (const auto& r : rep.rows) CHECK(r.max_dev < 1e-12);

    const auto band = level_curve_bounds(t, 2.0, {5, 10, 20, 40});
    for (const auto& r : band.rows) {
        const double want = std::sqrt((r.n + 1.0) / (r.n * pi));
        CHECK_THAT(r.min_ratio, WithinAbs(want, 1e-10));
        CHECK_THAT(r.max_ratio, WithinAbs(want, 1e-10));
    }

    const auto der = derivative_level_bounds(t, 2.0, {5, 10, 20, 40});
    for (const auto& r : der.rows) CHECK_THAT(r.max_ratio, WithinAbs(std::sqrt((r.n + 1.0) / r.n) / std::sqrt(pi), 1e-10));

    const auto nth = nth_root_asymptotic(t, 2.0, {40});
    CHECK_THAT(nth.values.back().second, WithinAbs(std::pow(std::sqrt(41.0 / pi), 1.0 / 40.0) * 2.0, 1e-12));
}

TEST_CASE("Faber derivative band is flagged family-specific", "[bases]")
{
    const auto t = build_faber(ConformalDomain::disk(), 20);
    const auto der = derivative_level_bounds(t, 2.0, {5, 10, 20});
    CHECK(der.normalization.find("family-specific") != std::string::npos);
    for (const auto& r : der.rows) CHECK_THAT(r.max_ratio, WithinAbs(1.0, 1e-12));
}

TEST_CASE("nth-root asymptotics converge to |Phi|", "[bases][asymptotics]")
{
    const auto el = ConformalDomain::ellipse(1.0, 0.25);
    const auto t = build_faber(el, 60);
    const auto rep = nth_root_asymptotic(t, 2.125, {15, 30, 60});
    CHECK_THAT(rep.target, WithinAbs(2.0, 1e-12));
    // F_n(2.125) = 2^n + 8^-n, so the sequence is 2 to rounding from n = 15 on
    CHECK(std::abs(rep.values.back().second - 2.0) <= 4e-16);
    for (auto f : {basis_family::bergman, basis_family::szego}) {
        const auto r = nth_root_asymptotic(build_orthonormal(el, f, 60), 2.125, {15, 30, 60});
        CHECK(std::abs(r.values.back().second - 2.0) < std::abs(r.values.front().second - 2.0));
    }
    CHECK_THROWS_AS(nth_root_asymptotic(t, 0.1, {10}), domain_error);
}

TEST_CASE("kernel partial sums on the disk", "[bases][kernel]")
{
    const auto disk = ConformalDomain::disk();
    const double t2 = 0.25; // |z|^2 at |z| = 0.5
    const auto kb = kernel_partial_sums(build_orthonormal(disk, basis_family::bergman, 60), 0.5);
    const auto ks = kernel_partial_sums(build_orthonormal(disk, basis_family::szego, 60), cplx(0.0, 0.5));
    CHECK_THAT(kb.back(), WithinAbs(1.0 / (pi * (1 - t2) * (1 - t2)), 1e-6));
    CHECK_THAT(ks.back(), WithinAbs(1.0 / (2 * pi * (1 - t2)), 1e-6));
    for (std::size_t n = 1; n < kb.size(); ++n) CHECK(kb[n] >= kb[n - 1]);
}

TEST_CASE("basis tables export as CSV", "[bases]")
{
    std::ostringstream os;
    write_table_csv(os, build_faber(ConformalDomain::disk(), 1));
    CHECK(os.str() == "n,re0,im0,re1,im1\n0,1,0\n1,0,0,1,0\n");
}

TEST_CASE("extended-precision Bergman deviations match the ellipse closed form", "[bases][asymptotics]")
{
    // B_n(Psi(w)) / (sqrt((n+1)/pi) w^n Phi') - 1 = (1 - (b/w^2)^(n+1)) / sqrt(1 - b^(2n+2)) - 1 on ellipse(1, b)
    const double b = 0.25;
    const auto d = ConformalDomain::ellipse(1.0, b);
    const std::vector<std::size_t> ns{10, 20, 30, 40};
    for (double rho : {2.0, 0.8}) {
        const auto rep = check_bergman_asymptotics_extended<100>(d, rho, ns);
        REQUIRE(rep.rows.size() == ns.size());
        for (const auto& row : rep.rows) {
            const double np1 = static_cast<double>(row.n + 1);
            const double norm = std::expm1(-0.5 * std::log1p(-std::pow(b, 2.0 * np1))); // 1/sqrt(1 - e) - 1
            double oracle = 0.0;
            for (int j = 0; j < 512; ++j) {
                const cplx w = std::polar(rho, 2.0 * std::numbers::pi * j / 512.0);
                const cplx x = std::pow(b / (w * w), np1);
                oracle = std::max(oracle, std::abs(-x + (1.0 - x) * norm));
            }
            CHECK_THAT(row.max_dev, WithinRel(oracle, 1e-6));
        }
        CHECK(rep.regime == "geometric");
        CHECK_THAT(rep.geometric_slope, WithinAbs(std::log(b / (rho * rho)), 1e-3));
    }
}
