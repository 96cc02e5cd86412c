#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "rpz/boundary.hpp"

using namespace rpz;
using Catch::Matchers::WithinAbs;

namespace {
const double pi = std::numbers::pi;
}

TEST_CASE("Faber tail", "[boundary]")
{
    SECTION("disk: E_n vanishes")
    {
        const auto disk = ConformalDomain::disk();
        for (std::size_t n : {1, 5, 20}) CHECK(std::abs(faber_tail(disk, n, std::polar(0.8, 1.0)).value) < 1e-14);
    }

    SECTION("ellipse: E_n = -b^n w^-n")
    {
        for (double b : {0.25, -0.4}) {
            const auto el = ConformalDomain::ellipse(1.0, b);
            for (double rho : {0.7, 0.9, 1.0, 1.7})
                for (std::size_t n = 0; n <= 30; ++n) {
                    const cplx w = std::polar(rho, 0.3 + 0.1 * static_cast<double>(n));
                    const auto t = faber_tail(el, n, el.psi(w));
                    const cplx want = n == 0 ? cplx(0.0) : -std::pow(b, static_cast<int>(n)) * std::pow(w, -static_cast<int>(n));
                    // outside L the difference Phi^n - F_n cancels |w|^n in floating point
                    const double scale = std::max(1.0, std::pow(rho, static_cast<double>(n)));
                    CHECK(std::abs(t.value - want) <= 1e-10 * scale);
                    if (rho <= 1.0) CHECK(std::abs(t.value) <= t.bound);
                }
        }
        const auto el = ConformalDomain::ellipse(1.0, 0.25);
        CHECK_THAT(std::abs(faber_tail(el, 4, el.psi(1.0)).value), WithinAbs(0.00390625, 1e-14));
    }

    SECTION("geometric decay inside the domain")
    {
        const auto el = ConformalDomain::ellipse(1.0, 0.25);
        auto slope = [&](std::size_t n0, std::size_t n1) {
            std::vector<double> n, l;
            for (std::size_t k = n0; k <= n1; ++k) {
                n.push_back(static_cast<double>(k));
                l.push_back(std::log(std::abs(faber_tail(el, k, el.psi(std::polar(0.9, 0.4))).value)));
            }
            return stats::fit_line(n, l).slope;
        };
        CHECK(slope(10, 30) <= std::log(el.r_inner() + 0.05));
        // |E_n| = (0.25/0.9)^n exactly; past n ~ 20 it nears rounding level
        CHECK_THAT(slope(10, 20), WithinAbs(std::log(0.25 / 0.9), 1e-3));
    }

    CHECK_THROWS_AS(faber_tail(ConformalDomain::ellipse(1.0, 0.25), 3, 0.0), domain_error);
}

TEST_CASE("Carleman split", "[boundary]")
{
    SECTION("disk: the remainder vanishes")
    {
        const auto disk = ConformalDomain::disk();
        const auto t = build_orthonormal(disk, basis_family::bergman, 60);
        const auto s = sample(make_distribution("complex_gaussian"), 60, 5);
        const cplx z(0.3, 0.5);
        const auto c = carleman_split(t, s, z, 60);
        CHECK(std::abs(c.remainder) < 1e-10);
        cplx main = 0.0;
        for (std::size_t n = 0; n <= 60; ++n) main += s.values[n] * std::sqrt((n + 1.0) / pi) * std::pow(z, static_cast<int>(n));
        CHECK(std::abs(c.main - main) < 1e-10);
    }

    SECTION("ellipse: remainder is Cauchy and the identity holds")
    {
        const auto el = ConformalDomain::ellipse(1.0, 0.25);
        const auto t = build_orthonormal(el, basis_family::bergman, 200);
        const auto s = sample(make_distribution("complex_gaussian"), 200, 5);
        for (double rho : {0.9, 1.3}) {
            const auto c = carleman_split(t, s, el.psi(std::polar(rho, 1.1)), 200);
            CHECK(std::abs(c.main + c.remainder - c.direct) <= 1e-10 * std::max(1.0, std::abs(c.direct)));
            if (rho < 1.0) CHECK(c.cauchy_gap < 1e-6);
        }
    }

    CHECK_THROWS_AS(carleman_split(build_faber(ConformalDomain::disk(), 5), sample(make_distribution("rademacher"), 5, 1), 0.1, 5), domain_error);
}

TEST_CASE("Taylor radius", "[boundary]")
{
    const auto disk = ConformalDomain::disk();

    SECTION("geometric series")
    {
        std::vector<cplx> c(301, 1.0);
        const auto e = taylor_radius(Poly(c), 0.0, disk);
        CHECK(e.radius_est >= 0.95);
        CHECK(e.radius_est <= 1.05);
        CHECK_THAT(e.dist_to_L, WithinAbs(1.0, 1e-10));
        CHECK_FALSE(e.no_singularity);
    }

    SECTION("random power series at an interior center")
    {
        const auto s = sample(make_distribution("complex_gaussian"), 600, 2);
        const auto e = taylor_radius(Poly(s.values), 0.4, disk);
        CHECK(e.radius_est / e.dist_to_L >= 0.85);
        CHECK(e.radius_est / e.dist_to_L <= 1.15);
    }

    SECTION("entire function hits the ceiling")
    {
        const auto e = taylor_radius(Poly::monomial(2), 0.0, disk);
        CHECK(e.no_singularity);
        CHECK(e.radius_est > 1.2 * e.dist_to_L);
    }

    SECTION("rational functions with a known singularity")
    {
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (const auto& d : {ConformalDomain::disk(), ConformalDomain::ellipse(1.0, 0.25)}) {
            int tried = 0;
            while (tried < 10) {
                const cplx z0 = d.psi(std::polar(0.6 + 0.35 * u(rng), 2 * pi * u(rng)));
                if (!d.contains(z0)) continue;
                const cplx s = d.psi(std::polar(1.0 + 0.2 * u(rng), 2 * pi * u(rng)));
                const double dist = d.dist_to_boundary(z0);
                const double want = std::abs(z0 - s);
                if (want > 1.2 * dist) continue; // beyond the resolvable ceiling
                ++tried;
                const auto e = taylor_radius([&](cplx z) { return 1.0 / (z - s); }, z0, d);
                CHECK(std::abs(e.radius_est / want - 1.0) <= 0.1);
            }
        }
    }

    CHECK_THROWS_AS(taylor_radius(Poly::monomial(2), 1.5, disk), domain_error);
    CHECK_THROWS_AS(taylor_radius(Poly::monomial(2), 0.0, disk, RadiusOptions{.circle_fraction = 1.0}), domain_error);
}

TEST_CASE("natural-boundary evidence", "[boundary][slow]")
{
    SECTION("disk, Bergman, Gaussian")
    {
        const auto t = build_orthonormal(ConformalDomain::disk(), basis_family::bergman, 600);
        const auto ev = boundary_evidence(t, make_distribution("complex_gaussian"), 2);
        CHECK(ev.rows.size() == 20);
        CHECK(ev.fraction_in_band >= 0.8);
        CHECK(ev.verdict() == "consistent with natural boundary");

        EvidenceOptions half;
        half.N = 300;
        CHECK(boundary_evidence(t, make_distribution("complex_gaussian"), 2, half).fraction_in_band <= ev.fraction_in_band);

        const auto ctl = boundary_evidence(t, make_distribution("inverse_factorial"), 2);
        CHECK(ctl.fraction_in_band < 0.2);
        CHECK(ctl.verdict() == "inconsistent with natural boundary");
    }

    SECTION("ellipse, Faber, rademacher")
    {
        const auto el = ConformalDomain::ellipse(1.0, 0.25);
        const auto t = build_faber(el, 600);
        const auto ev = boundary_evidence(t, make_distribution("rademacher"), 2);
        CHECK(ev.fraction_in_band >= 0.8);
        for (const auto& r : ev.rows) {
            CHECK(r.dist >= 0.1 * el.inradius().second - 1e-12);
            CHECK(r.dist <= 0.6 * el.inradius().second + 1e-12);
        }
        std::ostringstream os;
        write_evidence_csv(os, ev);
        CHECK(os.str().rfind("center_re,center_im,dist,radius_est,ratio,in_band,no_singularity\n", 0) == 0);
    }

    SECTION("centers are seeded")
    {
        const auto d = ConformalDomain::perturbed_circle(0.15, 2);
        CHECK(evidence_centers(d, 5, 9, 0.1, 0.6) == evidence_centers(d, 5, 9, 0.1, 0.6));
        CHECK(evidence_centers(d, 5, 9, 0.1, 0.6) != evidence_centers(d, 5, 10, 0.1, 0.6));
    }
}
