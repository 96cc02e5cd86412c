#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <vector>

#include "rpz/random.hpp"
#include "rpz/series.hpp"

using namespace rpz;
using Catch::Matchers::WithinAbs;

namespace {

// reference convolution over an exponent map
std::map<int, cplx> brute_product(const LaurentSlice& a, const LaurentSlice& b)
{
    std::map<int, cplx> out;
    for (int i = a.lo(); i <= a.hi(); ++i)
        for (int j = b.lo(); j <= b.hi(); ++j) out[i + j] += a.coeff(i) * b.coeff(j);
    return out;
}

std::vector<cplx> seeded_coeffs(std::size_t n, std::uint64_t seed)
{
    return sample(make_distribution("complex_gaussian"), n - 1, seed).values;
}

} // namespace

TEST_CASE("Horner evaluation", "[series]")
{
    CHECK(std::abs(Poly{1.0, 0.0, 1.0}(cplx(0, 1))) == 0.0);
    CHECK(Poly{}(5.0) == cplx(0.0));
    CHECK(Poly{0.0, 1.0}(cplx(2, 3)) == cplx(2, 3));

    SECTION("non-finite argument is rejected")
    {
        CHECK_THROWS_AS(Poly{1.0}(cplx(std::numeric_limits<double>::infinity(), 0)), domain_error);
        CHECK_THROWS_AS(Poly{1.0}(cplx(std::nan(""), 0)), domain_error);
    }

    SECTION("overflow is reported")
    {
        Poly p = Poly::monomial(400);
        CHECK_THROWS_AS(p(cplx(1e3, 0)), numerical_error);
    }
}

TEST_CASE("zero polynomial has no degree", "[series]")
{
    CHECK_FALSE(Poly{}.degree().has_value());
    CHECK_FALSE(Poly{0.0, 0.0}.degree().has_value());
    CHECK(Poly{0.0, 0.0}.coeffs().empty());
    CHECK(*Poly{1.0, 2.0, 0.0}.degree() == 1);
}

TEST_CASE("derivative", "[series]")
{
    CHECK(derivative(Poly{1.0, 1.0, 1.0}) == Poly{1.0, 2.0});
    CHECK(derivative(Poly{7.0}).is_zero());
    CHECK(derivative(Poly{0.0, 0.0, 0.0, 1.0}) == Poly{0.0, 0.0, 3.0});

    SECTION("antiderivative of the derivative drops only the constant")
    {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            auto c = seeded_coeffs(9, seed);
            const Poly p(c);
            c[0] = 0.0;
            const Poly back = antiderivative(derivative(p));
            REQUIRE(back.size() == c.size());
            for (std::size_t k = 0; k < c.size(); ++k) CHECK(std::abs(back[k] - c[k]) <= 1e-15 * std::abs(c[k]));
        }
    }
}

TEST_CASE("product evaluates as the product of values", "[series][property]")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Poly p(seeded_coeffs(1 + seed % 9, seed));
        const Poly q(seeded_coeffs(1 + (seed * 7) % 9, seed + 100));
        const Poly pq = p * q;
        CHECK(*pq.degree() == *p.degree() + *q.degree());
        for (int j = 0; j < 20; ++j) {
            const cplx z = std::polar(0.3 + 0.1 * j, 0.7 * j);
            const cplx want = p(z) * q(z);
            CHECK(std::abs(pq(z) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
        }
    }
}

TEST_CASE("laurent_multiply", "[series]")
{
    const auto ws = [](int lo, std::vector<cplx> c) { return LaurentSlice::exact(lo, std::move(c)); };

    SECTION("difference of squares")
    {
        const auto p = laurent_multiply(ws(-1, {1.0, 0.0, 1.0}), ws(-1, {-1.0, 0.0, 1.0}), -2, 2);
        CHECK(p.coeff(2) == cplx(1.0));
        CHECK(p.coeff(-2) == cplx(-1.0));
        CHECK(p.coeff(0) == cplx(0.0));
        CHECK(p.coeff(1) == cplx(0.0));
    }

    SECTION("unit is the identity on the window")
    {
        const auto a = ws(-3, {1.0, 2.0, 3.0, 4.0, 5.0});
        const auto p = laurent_multiply(a, ws(0, {1.0}), -2, 0);
        for (int e = -2; e <= 0; ++e) CHECK(p.coeff(e) == a.coeff(e));
    }

    SECTION("ellipse map squared")
    {
        const auto a = ws(-1, {0.25, 0.0, 1.0});
        const auto p = laurent_multiply(a, a, -2, 2);
        CHECK_THAT(p.coeff(2).real(), WithinAbs(1.0, 1e-15));
        CHECK_THAT(p.coeff(0).real(), WithinAbs(0.5, 1e-15));
        CHECK_THAT(p.coeff(-2).real(), WithinAbs(0.0625, 1e-15));
    }

    SECTION("matches brute-force convolution")
    {
        for (std::uint64_t seed = 1; seed <= 25; ++seed) {
            const int alo = -static_cast<int>(seed % 4), blo = -static_cast<int>((seed / 4) % 3);
            const auto a = ws(alo, seeded_coeffs(1 + seed % 4, seed));
            const auto b = ws(blo, seeded_coeffs(1 + seed % 3, seed + 50));
            const auto ref = brute_product(a, b);
            const auto p = laurent_multiply(a, b, -6, 6);
            for (int e = -6; e <= 6; ++e) {
                const auto it = ref.find(e);
                const cplx want = it == ref.end() ? cplx(0.0) : it->second;
                CHECK(std::abs(p.coeff(e) - want) <= 1e-14);
            }
        }
    }

    SECTION("commutative and associative on the window")
    {
        const auto a = ws(-2, seeded_coeffs(4, 3));
        const auto b = ws(-1, seeded_coeffs(3, 4));
        const auto c = ws(0, seeded_coeffs(3, 5));
        const auto ab = laurent_multiply(a, b, -6, 6);
        const auto ba = laurent_multiply(b, a, -6, 6);
        const auto l = laurent_multiply(ab, c, -3, 3);
        const auto r = laurent_multiply(a, laurent_multiply(b, c, -6, 6), -3, 3);
        for (int e = -3; e <= 3; ++e) {
            CHECK(std::abs(ab.coeff(e) - ba.coeff(e)) <= 1e-14);
            CHECK(std::abs(l.coeff(e) - r.coeff(e)) <= 1e-13);
        }
    }

    SECTION("refuses to fabricate unknown coefficients")
    {
        // a is known only down to w^-2, so w^-2 of a*b would need a_{-3} b_1
        const LaurentSlice a(-2, {1.0, 1.0, 1.0}, true, false);
        const auto b = ws(-1, {1.0, 0.0, 1.0});
        CHECK_NOTHROW(laurent_multiply(a, b, -1, 3));
        CHECK_THROWS_WITH(laurent_multiply(a, b, -2, 3), Catch::Matchers::ContainsSubstring("first operand"));
        CHECK_THROWS_WITH(laurent_multiply(b, a, -2, 3), Catch::Matchers::ContainsSubstring("second operand"));
    }
}
