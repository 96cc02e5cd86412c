#ifndef RPZ_FABER_HPP
#define RPZ_FABER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "rpz/domain.hpp"
#include "rpz/error.hpp"
#include "rpz/fft.hpp"
#include "rpz/series.hpp"

namespace rpz {

/// Faber recurrence of a finite-Laurent exterior map.
///
/// Equating powers of w in Psi'(w) / (Psi(w) - z) = sum_n F_n(z) w^{-n-1} gives
///
///     b_1 F_j = (z - b_0) F_{j-1} - sum_{k=1}^{min(j-1,m)} b_{-k} F_{j-1-k} - (j-1) b_{-(j-1)},
///
/// the last term present only for 1 <= j-1 <= m.
class FaberRecurrence {
public:
    FaberRecurrence() = default;
    explicit FaberRecurrence(const ConformalDomain& d)
        : inv_b1_(1.0 / d.capacity()), b0_(d.psi_coeff(0)), capacity_(d.capacity())
    {
        for (int k = 1; k <= d.tail_order(); ++k) tail_.push_back(d.psi_coeff(-k));
    }

    [[nodiscard]] int tail_order() const noexcept { return static_cast<int>(tail_.size()); }
    [[nodiscard]] double capacity() const noexcept { return capacity_; }
    [[nodiscard]] cplx b0() const noexcept { return b0_; }

    /// sum_j alpha_j F_j^{(r)}(z) for r = 0..D.
    template <int D>
    [[nodiscard]] std::array<cplx, D + 1> sum(cplx z, std::span<const cplx> alpha) const
    {
        static_assert(D >= 0 && D <= 2);
        std::array<cplx, D + 1> acc{};
        if (alpha.empty()) return acc;
        const std::size_t m = tail_.size();
        const std::size_t ring = m + 1;
        std::array<std::array<cplx, D + 1>, 8> local{};
        std::vector<std::array<cplx, D + 1>> heap;
        std::array<cplx, D + 1>* hist = local.data();
        if (ring > local.size()) {
            heap.resize(ring);
            hist = heap.data();
        }
        hist[0] = {};
        hist[0][0] = 1.0;
        acc[0] = alpha[0];
        const cplx zs = z - b0_;
        for (std::size_t j = 1; j < alpha.size(); ++j) {
            const auto& prev = hist[(j - 1) % ring];
            std::array<cplx, D + 1> v;
            v[0] = zs * prev[0];
            if constexpr (D >= 1) v[1] = prev[0] + zs * prev[1];
            if constexpr (D >= 2) v[2] = 2.0 * prev[1] + zs * prev[2];
            const std::size_t kmax = std::min(j - 1, m);
            for (std::size_t k = 1; k <= kmax; ++k) {
                const auto& f = hist[(j - 1 - k) % ring];
                for (int r = 0; r <= D; ++r) v[static_cast<std::size_t>(r)] -= tail_[k - 1] * f[static_cast<std::size_t>(r)];
            }
            if (j >= 2 && j - 1 <= m) v[0] -= static_cast<double>(j - 1) * tail_[j - 2];
            for (auto& x : v) x *= inv_b1_;
            hist[j % ring] = v;
            for (int r = 0; r <= D; ++r) acc[static_cast<std::size_t>(r)] += alpha[j] * v[static_cast<std::size_t>(r)];
        }
        return acc;
    }

    /// Values F_0(z) .. F_n(z) (and optionally derivatives) at one point.
    template <int D = 0>
    [[nodiscard]] std::vector<std::array<cplx, D + 1>> values(cplx z, std::size_t n) const
    {
        std::vector<std::array<cplx, D + 1>> out(n + 1);
        const std::size_t m = tail_.size();
        out[0] = {};
        out[0][0] = 1.0;
        const cplx zs = z - b0_;
        for (std::size_t j = 1; j <= n; ++j) {
            const auto& prev = out[j - 1];
            std::array<cplx, D + 1> v;
            v[0] = zs * prev[0];
            if constexpr (D >= 1) v[1] = prev[0] + zs * prev[1];
            if constexpr (D >= 2) v[2] = 2.0 * prev[1] + zs * prev[2];
            for (std::size_t k = 1; k <= std::min(j - 1, m); ++k)
                for (int r = 0; r <= D; ++r) v[static_cast<std::size_t>(r)] -= tail_[k - 1] * out[j - 1 - k][static_cast<std::size_t>(r)];
            if (j >= 2 && j - 1 <= m) v[0] -= static_cast<double>(j - 1) * tail_[j - 2];
            for (auto& x : v) x *= inv_b1_;
            out[j] = v;
        }
        return out;
    }

    /// Monomial coefficients of F_0..F_n.
    [[nodiscard]] std::vector<Poly> monomials(std::size_t n) const
    {
        std::vector<std::vector<cplx>> f(n + 1);
        f[0] = {1.0};
        const std::size_t m = tail_.size();
        for (std::size_t j = 1; j <= n; ++j) {
            std::vector<cplx> v(j + 1, 0.0);
            const auto& p = f[j - 1];
            for (std::size_t i = 0; i < p.size(); ++i) {
                v[i + 1] += p[i];
                v[i] -= b0_ * p[i];
            }
            for (std::size_t k = 1; k <= std::min(j - 1, m); ++k) {
                const auto& q = f[j - 1 - k];
                for (std::size_t i = 0; i < q.size(); ++i) v[i] -= tail_[k - 1] * q[i];
            }
            if (j >= 2 && j - 1 <= m) v[0] -= static_cast<double>(j - 1) * tail_[j - 2];
            for (auto& x : v) x *= inv_b1_;
            f[j] = std::move(v);
        }
        std::vector<Poly> out;
        out.reserve(n + 1);
        for (auto& v : f) out.emplace_back(std::move(v));
        return out;
    }

private:
    double inv_b1_ = 1.0;
    cplx b0_{};
    double capacity_ = 1.0;
    std::vector<cplx> tail_;
};

/// Polynomial held by its coefficients in the Faber basis of a domain,
/// P = sum_j alpha_j F_j, optionally differentiated `order` times.
///
/// Evaluation runs the Faber recurrence, whose dominant solution near and
/// outside the boundary is Phi^n; this stays accurate at degrees where the
/// monomial form of P has lost all digits.
class FaberExpansion {
public:
    FaberExpansion() = default;
    FaberExpansion(FaberRecurrence rec, std::vector<cplx> alpha, int order = 0)
        : rec_(std::move(rec)), alpha_(std::move(alpha)), order_(order)
    {
        while (!alpha_.empty() && detail::is_zero(alpha_.back())) alpha_.pop_back();
        if (order_ < 0 || order_ > 1) throw domain_error("FaberExpansion: derivative order must be 0 or 1");
    }

    [[nodiscard]] const std::vector<cplx>& alpha() const noexcept { return alpha_; }
    [[nodiscard]] const FaberRecurrence& recurrence() const noexcept { return rec_; }
    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] bool is_zero() const noexcept { return static_cast<int>(alpha_.size()) <= order_; }

    [[nodiscard]] std::size_t degree() const
    {
        if (is_zero()) throw domain_error("degree of the zero polynomial");
        return alpha_.size() - 1 - static_cast<std::size_t>(order_);
    }

    [[nodiscard]] FaberExpansion derivative() const { return FaberExpansion(rec_, alpha_, order_ + 1); }

    [[nodiscard]] cplx operator()(cplx z) const { return eval_with_derivative(z).first; }

    /// (P^{(order)}(z), P^{(order+1)}(z)).
    [[nodiscard]] std::pair<cplx, cplx> eval_with_derivative(cplx z) const
    {
        if (!detail::finite(z)) throw domain_error("FaberExpansion: non-finite argument");
        if (order_ == 0) {
            const auto s = rec_.sum<1>(z, alpha_);
            return {s[0], s[1]};
        }
        const auto s = rec_.sum<2>(z, alpha_);
        return {s[1], s[2]};
    }

    /// log of the leading monomial coefficient (complex log; avoids
    /// overflow of cap^{-n}).
    [[nodiscard]] cplx log_leading() const
    {
        const std::size_t n = alpha_.size() - 1;
        cplx l = std::log(alpha_[n]) - static_cast<double>(n) * std::log(rec_.capacity());
        if (order_ == 1) l += std::log(static_cast<double>(n));
        return l;
    }

    /// p_{deg-1} / p_deg of the monomial form, i.e. minus the sum of the roots.
    [[nodiscard]] cplx subleading_ratio() const
    {
        const std::size_t n = alpha_.size() - 1;
        cplx r = -static_cast<double>(n) * rec_.b0();
        if (n >= 1) r += alpha_[n - 1] / alpha_[n] * rec_.capacity();
        if (order_ == 1) r *= static_cast<double>(n - 1) / static_cast<double>(n);
        return r;
    }

    /// Monomial representation; accurate only while the monomial form is well conditioned.
    [[nodiscard]] Poly to_poly() const
    {
        if (alpha_.empty()) return {};
        const auto f = rec_.monomials(alpha_.size() - 1);
        std::vector<cplx> c(alpha_.size(), 0.0);
        for (std::size_t j = 0; j < alpha_.size(); ++j)
            for (std::size_t i = 0; i < f[j].size(); ++i) c[i] += alpha_[j] * f[j].coeffs()[i];
        Poly p(std::move(c));
        return order_ == 0 ? p : rpz::derivative(p);
    }

private:
    FaberRecurrence rec_;
    std::vector<cplx> alpha_;
    int order_ = 0;
};

/// Quadrature size for extracting Faber coefficients of a degree-n polynomial:
/// P(Psi(w)) is a Laurent polynomial with powers in [-m n, n].
inline std::size_t faber_transform_size(const ConformalDomain& d, std::size_t n)
{
    std::size_t need = static_cast<std::size_t>(d.tail_order() + 1) * (n + 1) + 1;
    std::size_t M = 64;
    while (M < need) M *= 2;
    return M;
}

/// Faber coefficients alpha_0..alpha_n from boundary samples P(Psi(e^{2 pi i j/M})).
///
/// The nonnegative powers of w in P(Psi(w)) are exactly the Faber
/// coefficients, since F_k(Psi(w)) = w^k + (negative powers).
inline std::vector<cplx> faber_coefficients_from_samples(std::vector<cplx> samples, std::size_t n)
{
    const std::size_t M = samples.size();
    if (M <= n) throw domain_error("faber_coefficients_from_samples: too few samples");
    auto X = detail::dft(std::move(samples));
    std::vector<cplx> alpha(n + 1);
    for (std::size_t k = 0; k <= n; ++k) alpha[k] = X[k] / static_cast<double>(M);
    return alpha;
}

/// Faber coefficients of a monomial-form polynomial.
inline std::vector<cplx> faber_coefficients(const ConformalDomain& d, const Poly& p)
{
    if (p.is_zero()) return {};
    const std::size_t n = *p.degree();
    const std::size_t M = faber_transform_size(d, n);
    auto pts = d.boundary(M);
    for (auto& z : pts) z = p(z);
    return faber_coefficients_from_samples(std::move(pts), n);
}

/// Laurent expansion of Phi at infinity, Phi(z) = z/cap + c_0 + sum c_k z^{-k},
/// by fixed-point reversion of Psi; certified on exponents [-K, 1].
inline LaurentSlice phi_expansion(const ConformalDomain& d, int K)
{
    if (K < 0) throw domain_error("phi_expansion: K >= 0 required");
    const int m = d.tail_order();
    const cplx b1 = d.psi_coeff(1), b0 = d.psi_coeff(0);
    const int lo = -K;
    const std::size_t len = static_cast<std::size_t>(2 - lo);
    std::vector<cplx> w0(len, 0.0);
    w0.back() = 1.0 / b1;
    LaurentSlice w(lo, w0, true, false);
    // each sweep fixes at least two more trailing exponents
    for (int it = 0; it < K / 2 + 3; ++it) {
        std::vector<cplx> next(len, 0.0);
        next[len - 1] = 1.0;  // z
        next[len - 2] = -b0;  // constant
        if (m > 0) {
            const LaurentSlice inv = laurent_reciprocal(w, lo);
            LaurentSlice power = inv;
            for (int k = 1; k <= m; ++k) {
                if (k > 1) power = laurent_multiply(power, inv, lo, -k);
                for (int e = std::max(lo, power.lo()); e <= power.hi(); ++e)
                    next[static_cast<std::size_t>(e - lo)] -= d.psi_coeff(-k) * power.coeff(e);
            }
        }
        for (auto& c : next) c /= b1;
        w = LaurentSlice(lo, std::move(next), true, false);
    }
    return w;
}

/// Independent Faber oracle: F_n = polynomial part of Phi^n at infinity.
inline std::vector<Poly> faber_by_reversion(const ConformalDomain& d, std::size_t N)
{
    const int K = static_cast<int>(N) + 1;
    const LaurentSlice phi = phi_expansion(d, K);
    std::vector<Poly> out;
    out.reserve(N + 1);
    out.emplace_back(std::vector<cplx>{1.0});
    LaurentSlice power = phi;
    for (std::size_t n = 1; n <= N; ++n) {
        if (n > 1) {
            const int keep_lo = std::max(power.lo() + phi.hi(), phi.lo() + power.hi());
            power = laurent_multiply(power, phi, keep_lo, static_cast<int>(n));
        }
        std::vector<cplx> c(n + 1);
        for (std::size_t k = 0; k <= n; ++k) c[k] = power.coeff(static_cast<int>(k));
        out.emplace_back(std::move(c));
    }
    return out;
}

} // namespace rpz

#endif // RPZ_FABER_HPP
