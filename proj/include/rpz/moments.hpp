#ifndef RPZ_MOMENTS_HPP
#define RPZ_MOMENTS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "rpz/domain.hpp"
#include "rpz/error.hpp"
#include "rpz/series.hpp"

namespace rpz {

/// Which inner product a polynomial family is orthonormal in.
enum class inner_product {
    area,      // int_G p conj(q) dA   (Bergman)
    arclength, // int_L p conj(q) |dz| (Szego, unweighted)
};

/// Extended-precision real with a configurable decimal mantissa width.
template <unsigned Digits10>
using extended_real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Digits10>, boost::multiprecision::et_off>;

/// Default extended mode: ~32 decimal digits.
using quad_real = extended_real<32>;

/// Dense square complex matrix, row-major.
template <class Real>
struct cmatrix {
    std::size_t n = 0;
    std::vector<std::complex<Real>> a;

    explicit cmatrix(std::size_t n_ = 0) : n(n_), a(n_ * n_, std::complex<Real>(0)) {}
    std::complex<Real>& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    const std::complex<Real>& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

namespace detail {

template <class Real>
Real pi_v()
{
    return boost::math::constants::pi<Real>();
}

template <class Real>
std::complex<Real> to_real(cplx z)
{
    return {Real(z.real()), Real(z.imag())};
}

/// Boundary data at the M equispaced nodes w_j = exp(2 pi i (j + shift) / M).
template <class Real>
struct boundary_nodes {
    std::vector<std::complex<Real>> w, z, dpsi;

    boundary_nodes(const ConformalDomain& d, std::size_t M, double shift = 0.0) : w(M), z(M), dpsi(M)
    {
        const Real two_pi = 2 * pi_v<Real>();
        const auto& psi = d.psi_series();
        for (std::size_t j = 0; j < M; ++j) {
            using std::cos;
            using std::sin;
            const Real t = two_pi * (Real(static_cast<double>(j)) + Real(shift)) / Real(static_cast<double>(M));
            w[j] = std::complex<Real>(cos(t), sin(t));
            std::complex<Real> s(0), ds(0);
            for (int k = psi.lo(); k <= psi.hi(); ++k) {
                const auto c = to_real<Real>(psi.coeff(k));
                if (c == std::complex<Real>(0)) continue;
                s += c * ipow(w[j], k);
                if (k != 0) ds += Real(k) * c * ipow(w[j], k - 1);
            }
            z[j] = s;
            dpsi[j] = ds;
        }
    }

    static std::complex<Real> ipow(std::complex<Real> w, int e)
    {
        if (e < 0) {
            w = std::complex<Real>(1) / w;
            e = -e;
        }
        std::complex<Real> r(1);
        while (e) {
            if (e & 1) r *= w;
            w *= w;
            e >>= 1;
        }
        return r;
    }
};

template <class Real>
Real cabs(const std::complex<Real>& z)
{
    using std::sqrt;
    return sqrt(z.real() * z.real() + z.imag() * z.imag());
}

template <class Real>
double default_moment_tolerance()
{
    if constexpr (std::is_same_v<Real, double>) return 1e-11;
    else return 1e3 * static_cast<double>(std::numeric_limits<Real>::epsilon());
}

/// Moment table <z^m, z^n> for 0 <= m, n <= N at one quadrature size.
template <class Real>
cmatrix<Real> moment_table(const ConformalDomain& d, inner_product ip, std::size_t N, std::size_t M)
{
    boundary_nodes<Real> nodes(d, M);
    const std::size_t K = N + 2;
    // left[j][m] = z_j^m ; right[j][n] = integrand factor for conj(z^n)
    std::vector<std::complex<Real>> zp(M * K), zc(M * K);
    for (std::size_t j = 0; j < M; ++j) {
        std::complex<Real> p(1);
        const auto zj = nodes.z[j];
        const auto cz = std::conj(zj);
        std::complex<Real> q(1);
        for (std::size_t k = 0; k < K; ++k) {
            zp[j * K + k] = p;
            zc[j * K + k] = q;
            p *= zj;
            q *= cz;
        }
    }
    cmatrix<Real> G(N + 1);
    const Real pi = pi_v<Real>();
    const Real Mr = Real(static_cast<double>(M));
    std::vector<std::complex<Real>> weight(M);
    for (std::size_t j = 0; j < M; ++j) {
        if (ip == inner_product::area) weight[j] = nodes.dpsi[j] * nodes.w[j] * (pi / Mr);
        else weight[j] = std::complex<Real>(cabs(nodes.dpsi[j]) * (2 * pi / Mr));
    }
    for (std::size_t m = 0; m <= N; ++m) {
        for (std::size_t n = 0; n <= m; ++n) {
            std::complex<Real> s(0);
            const std::size_t nn = ip == inner_product::area ? n + 1 : n;
            for (std::size_t j = 0; j < M; ++j) s += zp[j * K + m] * zc[j * K + nn] * weight[j];
            if (ip == inner_product::area) s /= Real(static_cast<double>(n + 1));
            G(m, n) = s;
        }
    }
    // the exact table is hermitian; enforce it on the upper triangle
    for (std::size_t m = 0; m <= N; ++m)
        for (std::size_t n = m + 1; n <= N; ++n) G(m, n) = std::conj(G(n, m));
    return G;
}

} // namespace detail

/// Moment matrix <z^m, z^n>, accepted once doubling M moves no entry by more
/// than tol * max|entry|. Throws numerical_error if that fails by M = 2^16.
template <class Real = double>
cmatrix<Real> moment_matrix(const ConformalDomain& d, inner_product ip, std::size_t N, std::size_t M = 4096, double tol = -1.0)
{
    if (M < 256 || (M & (M - 1)) != 0) throw domain_error("moment quadrature size must be a power of two >= 256");
    if (tol < 0) tol = detail::default_moment_tolerance<Real>();
    auto cur = detail::moment_table<Real>(d, ip, N, M);
    while (true) {
        const std::size_t M2 = 2 * M;
        auto next = detail::moment_table<Real>(d, ip, N, M2);
        Real scale(0), diff(0);
        for (std::size_t i = 0; i < cur.a.size(); ++i) {
            scale = std::max(scale, detail::cabs(next.a[i]));
            diff = std::max(diff, detail::cabs(next.a[i] - cur.a[i]));
        }
        if (diff <= Real(tol) * scale) return next;
        if (M2 >= (std::size_t{1} << 16))
            throw numerical_error("moment quadrature did not converge under doubling up to M = 65536");
        M = M2;
        cur = std::move(next);
    }
}

/// Single area moment int_G z^m conj(z)^n dA = (1/(2i(n+1))) oint_L z^m conj(z)^{n+1} dz.
inline cplx area_moment(const ConformalDomain& d, std::size_t m, std::size_t n, std::size_t M = 4096)
{
    const auto G = moment_matrix<double>(d, inner_product::area, std::max(m, n), M);
    return G(m, n);
}

/// Single arclength moment oint_L z^m conj(z)^n |dz|.
inline cplx arc_moment(const ConformalDomain& d, std::size_t m, std::size_t n, std::size_t M = 4096)
{
    const auto G = moment_matrix<double>(d, inner_product::arclength, std::max(m, n), M);
    return G(m, n);
}

/// In-place lower Cholesky factor G = L L^H. Throws on a non-positive pivot.
template <class Real>
cmatrix<Real> cholesky(cmatrix<Real> G)
{
    const std::size_t n = G.n;
    for (std::size_t j = 0; j < n; ++j) {
        Real d = G(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(G(j, k));
        if (!(d > Real(0)))
            throw numerical_error("Cholesky breakdown at pivot " + std::to_string(j) +
                                  ": moment matrix lost positivity; use extended precision or a smaller N");
        using std::sqrt;
        const Real ljj = sqrt(d);
        G(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            std::complex<Real> s = G(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= G(i, k) * std::conj(G(j, k));
            G(i, j) = s / ljj;
        }
        for (std::size_t i = 0; i < j; ++i) G(i, j) = 0;
    }
    return G;
}

/// Inverse of a lower-triangular matrix; row k holds the coefficients of the
/// k-th orthonormal function in the generating basis.
template <class Real>
cmatrix<Real> lower_inverse(const cmatrix<Real>& L)
{
    const std::size_t n = L.n;
    cmatrix<Real> X(n);
    for (std::size_t i = 0; i < n; ++i) {
        X(i, i) = std::complex<Real>(1) / L(i, i);
        for (std::size_t j = 0; j < i; ++j) {
            std::complex<Real> s(0);
            for (std::size_t k = j; k < i; ++k) s += L(i, k) * X(k, j);
            X(i, j) = -s / L(i, i);
        }
    }
    return X;
}

/// Monomial coefficient rows of the orthonormal polynomials p_0..p_N.
template <class Real = double>
std::vector<std::vector<std::complex<Real>>> orthonormal_monomial_rows(const ConformalDomain& d, inner_product ip, std::size_t N, std::size_t M = 4096)
{
    const auto L = cholesky(moment_matrix<Real>(d, ip, N, M));
    const auto C = lower_inverse(L);
    std::vector<std::vector<std::complex<Real>>> rows(N + 1);
    for (std::size_t k = 0; k <= N; ++k) rows[k].assign(C.a.begin() + static_cast<std::ptrdiff_t>(k * C.n), C.a.begin() + static_cast<std::ptrdiff_t>(k * C.n + k + 1));
    return rows;
}

/// max_{j,k} |<p_j, p_k> - delta_jk| by direct quadrature of the polynomials
/// on a shifted node set (no moments reused).
template <class Real = double>
double gram_residual(const ConformalDomain& d, inner_product ip, const std::vector<std::vector<std::complex<Real>>>& rows, std::size_t M)
{
    using C = std::complex<Real>;
    const std::size_t n = rows.size();
    detail::boundary_nodes<Real> nodes(d, M, 0.5);
    std::vector<C> P(n * M), Q(n * M);
    std::vector<C> pw(n + 2);
    for (std::size_t j = 0; j < M; ++j) {
        pw[0] = C(1);
        for (std::size_t k = 1; k < n + 2; ++k) pw[k] = pw[k - 1] * nodes.z[j];
        for (std::size_t r = 0; r < n; ++r) {
            C p(0), q(0);
            for (std::size_t k = 0; k < rows[r].size(); ++k) {
                p += rows[r][k] * pw[k];
                q += rows[r][k] * pw[k + 1] / Real(static_cast<double>(k + 1));
            }
            P[r * M + j] = p;
            Q[r * M + j] = ip == inner_product::area ? q : p;
        }
    }
    const Real pi = detail::pi_v<Real>();
    const Real Mr = Real(static_cast<double>(M));
    std::vector<C> weight(M);
    for (std::size_t j = 0; j < M; ++j) {
        if (ip == inner_product::area) weight[j] = nodes.dpsi[j] * nodes.w[j] * (pi / Mr);
        else weight[j] = C(detail::cabs(nodes.dpsi[j]) * (2 * pi / Mr));
    }
    Real worst(0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b <= a; ++b) {
            C s(0);
            for (std::size_t j = 0; j < M; ++j) s += P[a * M + j] * std::conj(Q[b * M + j]) * weight[j];
            if (a == b) s -= C(1);
            worst = std::max(worst, detail::cabs(s));
        }
    return static_cast<double>(worst);
}

} // namespace rpz

#endif // RPZ_MOMENTS_HPP
