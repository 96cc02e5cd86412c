#ifndef RPZ_SERIES_HPP
#define RPZ_SERIES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rpz/error.hpp"

namespace rpz {

using cplx = std::complex<double>;

namespace detail {

template <class T>
bool finite(const std::complex<T>& z)
{
    using std::isfinite;
    return isfinite(z.real()) && isfinite(z.imag());
}

template <class T>
bool is_zero(const std::complex<T>& z)
{
    return z.real() == 0 && z.imag() == 0;
}

} // namespace detail

/// Dense univariate polynomial over std::complex<T>; coefficient k multiplies z^k.
///
/// The zero polynomial is the empty coefficient sequence and has no degree.
/// Construction trims exact trailing zeros so the top stored coefficient is
/// always nonzero.
template <class T>
class basic_poly {
public:
    using value_type = std::complex<T>;

    basic_poly() = default;
    explicit basic_poly(std::vector<value_type> coeffs) : coeffs_(std::move(coeffs)) { trim(); }
    basic_poly(std::initializer_list<value_type> l) : coeffs_(l) { trim(); }

    static basic_poly monomial(std::size_t k, value_type c = value_type(1))
    {
        std::vector<value_type> v(k + 1, value_type(0));
        v[k] = c;
        return basic_poly(std::move(v));
    }

    [[nodiscard]] bool is_zero() const noexcept { return coeffs_.empty(); }

    /// Highest index with a nonzero coefficient; empty for the zero polynomial.
    [[nodiscard]] std::optional<std::size_t> degree() const noexcept
    {
        if (coeffs_.empty()) return std::nullopt;
        return coeffs_.size() - 1;
    }

    [[nodiscard]] const std::vector<value_type>& coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] std::size_t size() const noexcept { return coeffs_.size(); }

    /// Coefficient of z^k, zero beyond the stored range.
    [[nodiscard]] value_type operator[](std::size_t k) const
    {
        return k < coeffs_.size() ? coeffs_[k] : value_type(0);
    }

    [[nodiscard]] value_type leading() const
    {
        if (coeffs_.empty()) throw domain_error("leading coefficient of the zero polynomial");
        return coeffs_.back();
    }

    /// Horner evaluation. Throws numerical_error when a finite argument
    /// produces a non-finite value (overflow).
    [[nodiscard]] value_type operator()(const value_type& z) const
    {
        if (!detail::finite(z)) throw domain_error("poly_eval: non-finite argument");
        value_type acc(0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
        if (!detail::finite(acc)) throw numerical_error("poly_eval: overflow at |z| = " + std::to_string(static_cast<double>(std::abs(z))));
        return acc;
    }

    /// Value and first derivative in one Horner pass.
    [[nodiscard]] std::pair<value_type, value_type> eval_with_derivative(const value_type& z) const
    {
        value_type p(0), dp(0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            dp = dp * z + p;
            p = p * z + *it;
        }
        return {p, dp};
    }

    friend basic_poly operator+(const basic_poly& a, const basic_poly& b)
    {
        std::vector<value_type> out(std::max(a.size(), b.size()), value_type(0));
        for (std::size_t k = 0; k < a.size(); ++k) out[k] += a.coeffs_[k];
        for (std::size_t k = 0; k < b.size(); ++k) out[k] += b.coeffs_[k];
        return basic_poly(std::move(out));
    }

    friend basic_poly operator-(const basic_poly& a, const basic_poly& b) { return a + b * value_type(-1); }

    friend basic_poly operator*(const basic_poly& p, const value_type& s)
    {
        std::vector<value_type> out(p.coeffs_);
        for (auto& c : out) c *= s;
        return basic_poly(std::move(out));
    }
    friend basic_poly operator*(const value_type& s, const basic_poly& p) { return p * s; }

    friend basic_poly operator*(const basic_poly& a, const basic_poly& b)
    {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<value_type> out(a.size() + b.size() - 1, value_type(0));
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return basic_poly(std::move(out));
    }

    friend bool operator==(const basic_poly&, const basic_poly&) = default;

private:
    void trim()
    {
        while (!coeffs_.empty() && detail::is_zero(coeffs_.back())) coeffs_.pop_back();
    }

    std::vector<value_type> coeffs_;
};

using Poly = basic_poly<double>;

template <class T>
basic_poly<T> derivative(const basic_poly<T>& p)
{
    if (p.size() <= 1) return {};
    std::vector<std::complex<T>> out(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) out[k - 1] = p.coeffs()[k] * T(k);
    return basic_poly<T>(std::move(out));
}

/// Formal antiderivative with zero constant term.
template <class T>
basic_poly<T> antiderivative(const basic_poly<T>& p)
{
    if (p.is_zero()) return {};
    std::vector<std::complex<T>> out(p.size() + 1, std::complex<T>(0));
    for (std::size_t k = 0; k < p.size(); ++k) out[k + 1] = p.coeffs()[k] / T(k + 1);
    return basic_poly<T>(std::move(out));
}

/// Finite window lo..hi of a Laurent series sum c_k w^k.
///
/// Coefficients outside the window are either exactly zero or unknown; the
/// flags record which, and arithmetic refuses to produce coefficients that
/// depend on unknown ones.
template <class T>
class basic_laurent {
public:
    using value_type = std::complex<T>;

    basic_laurent() = default;
    basic_laurent(int lo, std::vector<value_type> coeffs, bool unknown_below = false, bool unknown_above = false)
        : lo_(lo), coeffs_(std::move(coeffs)), unknown_below_(unknown_below), unknown_above_(unknown_above)
    {
    }

    /// Finite (exact) Laurent polynomial.
    static basic_laurent exact(int lo, std::vector<value_type> coeffs) { return basic_laurent(lo, std::move(coeffs)); }

    [[nodiscard]] int lo() const noexcept { return lo_; }
    [[nodiscard]] int hi() const noexcept { return lo_ + static_cast<int>(coeffs_.size()) - 1; }
    [[nodiscard]] bool empty() const noexcept { return coeffs_.empty(); }
    [[nodiscard]] bool unknown_below() const noexcept { return unknown_below_; }
    [[nodiscard]] bool unknown_above() const noexcept { return unknown_above_; }
    [[nodiscard]] const std::vector<value_type>& coeffs() const noexcept { return coeffs_; }

    /// Coefficient of w^e. Throws when e falls where the value is unknown.
    [[nodiscard]] value_type coeff(int e) const
    {
        if (e < lo_) {
            if (unknown_below_) throw domain_error("laurent coefficient w^" + std::to_string(e) + " is below the truncation order " + std::to_string(lo_));
            return value_type(0);
        }
        if (e > hi()) {
            if (unknown_above_) throw domain_error("laurent coefficient w^" + std::to_string(e) + " is above the truncation order " + std::to_string(hi()));
            return value_type(0);
        }
        return coeffs_[static_cast<std::size_t>(e - lo_)];
    }

    /// Evaluate the stored window at w (ignores unknown tails).
    [[nodiscard]] value_type operator()(const value_type& w) const
    {
        value_type acc(0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * w + *it;
        return acc * pow_int(w, lo_);
    }

    /// Restrict to [keep_lo, keep_hi]; dropped ranges become unknown.
    [[nodiscard]] basic_laurent window(int keep_lo, int keep_hi) const
    {
        if (keep_lo > keep_hi) throw domain_error("laurent window: keep_lo > keep_hi");
        std::vector<value_type> out(static_cast<std::size_t>(keep_hi - keep_lo + 1));
        for (int e = keep_lo; e <= keep_hi; ++e) out[static_cast<std::size_t>(e - keep_lo)] = coeff(e);
        const bool below = unknown_below_ || (!empty() && keep_lo > lo_);
        const bool above = unknown_above_ || (!empty() && keep_hi < hi());
        return basic_laurent(keep_lo, std::move(out), below, above);
    }

    static value_type pow_int(value_type w, int e)
    {
        if (e < 0) {
            w = value_type(1) / w;
            e = -e;
        }
        value_type r(1);
        while (e) {
            if (e & 1) r *= w;
            w *= w;
            e >>= 1;
        }
        return r;
    }

private:
    int lo_ = 0;
    std::vector<value_type> coeffs_;
    bool unknown_below_ = false;
    bool unknown_above_ = false;
};

using LaurentSlice = basic_laurent<double>;

/// Convolution of two Laurent windows restricted to exponents [keep_lo, keep_hi].
///
/// Throws domain_error naming the input whose truncation prevents certifying
/// the requested window.
template <class T>
basic_laurent<T> laurent_multiply(const basic_laurent<T>& a, const basic_laurent<T>& b, int keep_lo, int keep_hi)
{
    using C = std::complex<T>;
    if (keep_lo > keep_hi) throw domain_error("laurent_multiply: keep_lo > keep_hi");
    if (a.empty() || b.empty()) {
        if (a.unknown_below() || a.unknown_above() || b.unknown_below() || b.unknown_above())
            throw domain_error("laurent_multiply: empty truncated operand");
        return basic_laurent<T>(keep_lo, std::vector<C>(static_cast<std::size_t>(keep_hi - keep_lo + 1), C(0)));
    }
    if (a.unknown_below() && keep_lo < a.lo() + b.hi())
        throw domain_error("laurent_multiply: first operand is truncated below w^" + std::to_string(a.lo()) +
                           " and cannot certify w^" + std::to_string(keep_lo));
    if (b.unknown_below() && keep_lo < b.lo() + a.hi())
        throw domain_error("laurent_multiply: second operand is truncated below w^" + std::to_string(b.lo()) +
                           " and cannot certify w^" + std::to_string(keep_lo));
    if (a.unknown_above() && keep_hi > a.hi() + b.lo())
        throw domain_error("laurent_multiply: first operand is truncated above w^" + std::to_string(a.hi()) +
                           " and cannot certify w^" + std::to_string(keep_hi));
    if (b.unknown_above() && keep_hi > b.hi() + a.lo())
        throw domain_error("laurent_multiply: second operand is truncated above w^" + std::to_string(b.hi()) +
                           " and cannot certify w^" + std::to_string(keep_hi));

    std::vector<C> out(static_cast<std::size_t>(keep_hi - keep_lo + 1), C(0));
    const auto& ac = a.coeffs();
    const auto& bc = b.coeffs();
    for (std::size_t i = 0; i < ac.size(); ++i) {
        const int ei = a.lo() + static_cast<int>(i);
        // exponents ej with keep_lo <= ei + ej <= keep_hi
        const int j_lo = std::max(0, keep_lo - ei - b.lo());
        const int j_hi = std::min(static_cast<int>(bc.size()) - 1, keep_hi - ei - b.lo());
        for (int j = j_lo; j <= j_hi; ++j) out[static_cast<std::size_t>(ei + b.lo() + j - keep_lo)] += ac[i] * bc[static_cast<std::size_t>(j)];
    }
    const bool below = a.unknown_below() || b.unknown_below() || keep_lo > a.lo() + b.lo();
    const bool above = a.unknown_above() || b.unknown_above() || keep_hi < a.hi() + b.hi();
    return basic_laurent<T>(keep_lo, std::move(out), below, above);
}

template <class T>
basic_laurent<T> operator+(const basic_laurent<T>& a, const basic_laurent<T>& b)
{
    // certified range is the intersection of what both operands know
    int lo = std::min(a.lo(), b.lo());
    int hi = std::max(a.hi(), b.hi());
    if (a.unknown_below()) lo = std::max(lo, a.lo());
    if (b.unknown_below()) lo = std::max(lo, b.lo());
    if (a.unknown_above()) hi = std::min(hi, a.hi());
    if (b.unknown_above()) hi = std::min(hi, b.hi());
    if (lo > hi) throw domain_error("laurent add: operands share no certified window");
    std::vector<std::complex<T>> out(static_cast<std::size_t>(hi - lo + 1));
    for (int e = lo; e <= hi; ++e) out[static_cast<std::size_t>(e - lo)] = a.coeff(e) + b.coeff(e);
    return basic_laurent<T>(lo, std::move(out), a.unknown_below() || b.unknown_below(), a.unknown_above() || b.unknown_above());
}

template <class T>
basic_laurent<T> operator*(const basic_laurent<T>& a, const std::complex<T>& s)
{
    auto c = a.coeffs();
    for (auto& x : c) x *= s;
    return basic_laurent<T>(a.lo(), std::move(c), a.unknown_below(), a.unknown_above());
}

/// Reciprocal of a series whose top coefficient (at a.hi()) is nonzero and
/// exact above; expands in decreasing powers down to keep_lo.
template <class T>
basic_laurent<T> laurent_reciprocal(const basic_laurent<T>& a, int keep_lo)
{
    using C = std::complex<T>;
    if (a.empty() || a.unknown_above()) throw domain_error("laurent_reciprocal: needs an exact leading term");
    const int h = a.hi();
    const C lead = a.coeff(h);
    if (detail::is_zero(lead)) throw domain_error("laurent_reciprocal: zero leading coefficient");
    const int top = -h;
    if (keep_lo > top) throw domain_error("laurent_reciprocal: keep_lo above the leading exponent");
    if (a.unknown_below() && keep_lo < a.lo() - 2 * h)
        throw domain_error("laurent_reciprocal: operand truncated below w^" + std::to_string(a.lo()) +
                           " cannot certify w^" + std::to_string(keep_lo));
    const int len = top - keep_lo + 1;
    std::vector<C> v(static_cast<std::size_t>(len));
    // v stored from the top: v[d] is the coefficient of w^{top-d}
    v[0] = C(1) / lead;
    for (int d = 1; d < len; ++d) {
        C s(0);
        for (int j = 1; j <= d; ++j) s += a.coeff(h - j) * v[static_cast<std::size_t>(d - j)];
        v[static_cast<std::size_t>(d)] = -s / lead;
    }
    std::reverse(v.begin(), v.end());
    return basic_laurent<T>(keep_lo, std::move(v), true, false);
}

} // namespace rpz

#endif // RPZ_SERIES_HPP
