#ifndef RPZ_BASES_HPP
#define RPZ_BASES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rpz/domain.hpp"
#include "rpz/error.hpp"
#include "rpz/faber.hpp"
#include "rpz/moments.hpp"
#include "rpz/series.hpp"
#include "rpz/stats.hpp"

namespace rpz {

enum class basis_family { faber, bergman, szego };

inline std::string to_string(basis_family f)
{
    switch (f) {
    case basis_family::faber: return "faber";
    case basis_family::bergman: return "bergman";
    case basis_family::szego: return "szego";
    }
    return "?";
}

inline basis_family parse_family(const std::string& s)
{
    if (s == "faber") return basis_family::faber;
    if (s == "bergman") return basis_family::bergman;
    if (s == "szego") return basis_family::szego;
    throw domain_error("unknown basis family '" + s + "'");
}

enum class precision_mode { double_precision, extended };

/// How Bergman/Szego polynomials are orthonormalized.
enum class build_method {
    automatic,  // faber_gram in double, moments in extended precision
    moments,    // Cholesky of the monomial moment matrix
    faber_gram, // Cholesky of the Gram matrix of a Faber-derived basis
};

struct BuildOptions {
    build_method method = build_method::automatic;
    precision_mode precision = precision_mode::double_precision;
    std::size_t quadrature_nodes = 0; // 0 picks the method default
};

struct BuildMeta {
    std::size_t quadrature_nodes = 0;
    std::string precision = "double";
    std::string method;
    double gram_residual = 0.0; // max |<B_j,B_k> - delta_jk|, or Faber oracle gap
};

/// B_0..B_N of one family on one domain.
///
/// Each element is held twice: in monomial form (`polys`) and by its Faber
/// coefficients (`faber`). Evaluation goes through the Faber recurrence,
/// which stays accurate at degrees where the monomial form does not.
class BasisTable {
public:
    BasisTable(basis_family family, ConformalDomain domain, std::vector<Poly> polys, std::vector<std::vector<cplx>> faber, BuildMeta meta)
        : family_(family), domain_(std::move(domain)), rec_(domain_), polys_(std::move(polys)), faber_(std::move(faber)), meta_(std::move(meta))
    {
    }

    [[nodiscard]] basis_family family() const noexcept { return family_; }
    [[nodiscard]] const ConformalDomain& domain() const noexcept { return domain_; }
    [[nodiscard]] const FaberRecurrence& recurrence() const noexcept { return rec_; }
    [[nodiscard]] const std::vector<Poly>& polys() const noexcept { return polys_; }
    [[nodiscard]] const std::vector<std::vector<cplx>>& faber_rows() const noexcept { return faber_; }
    [[nodiscard]] const BuildMeta& meta() const noexcept { return meta_; }
    [[nodiscard]] std::size_t size() const noexcept { return faber_.size(); }
    [[nodiscard]] std::size_t max_degree() const noexcept { return faber_.size() - 1; }

    [[nodiscard]] FaberExpansion element(std::size_t n) const { return FaberExpansion(rec_, faber_.at(n)); }

    [[nodiscard]] cplx eval(std::size_t n, cplx z) const { return rec_.sum<0>(z, faber_.at(n))[0]; }
    [[nodiscard]] cplx eval_prime(std::size_t n, cplx z) const { return rec_.sum<1>(z, faber_.at(n))[1]; }

    /// Basis-coefficient vector a -> Faber coefficients of sum a_k B_k.
    [[nodiscard]] FaberExpansion combine(std::span<const cplx> a) const
    {
        if (a.size() > faber_.size()) throw domain_error("sample longer than basis table (" + std::to_string(a.size()) + " > " + std::to_string(faber_.size()) + ")");
        std::vector<cplx> alpha(a.size(), 0.0);
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (detail::is_zero(a[k])) continue;
            const auto& row = faber_[k];
            for (std::size_t j = 0; j < row.size(); ++j) alpha[j] += a[k] * row[j];
        }
        return FaberExpansion(rec_, std::move(alpha));
    }

private:
    basis_family family_;
    ConformalDomain domain_;
    FaberRecurrence rec_;
    std::vector<Poly> polys_;
    std::vector<std::vector<cplx>> faber_;
    BuildMeta meta_;
};

/// Faber oracle degree cap: beyond it the monomial coefficients of F_n are
/// too large for an absolute per-coefficient comparison to mean anything.
inline constexpr std::size_t faber_oracle_limit = 60;

/// Max per-coefficient gap between the recurrence and the reversion oracle,
/// scaled by max(1, largest coefficient) of each F_n.
inline double faber_oracle_gap(const std::vector<Poly>& recurrence, const std::vector<Poly>& oracle)
{
    double worst = 0.0;
    for (std::size_t n = 0; n < std::min(recurrence.size(), oracle.size()); ++n) {
        double scale = 1.0, gap = 0.0;
        const std::size_t len = std::max(recurrence[n].size(), oracle[n].size());
        for (std::size_t k = 0; k < len; ++k) {
            scale = std::max(scale, std::abs(recurrence[n][k]));
            gap = std::max(gap, std::abs(recurrence[n][k] - oracle[n][k]));
        }
        worst = std::max(worst, gap / scale);
    }
    return worst;
}

/// Faber polynomials F_0..F_N by the generating-function recurrence,
/// cross-checked against series reversion of Psi.
inline BasisTable build_faber(const ConformalDomain& d, std::size_t N)
{
    const FaberRecurrence rec(d);
    auto polys = rec.monomials(N);
    const std::size_t check_to = std::min(N, faber_oracle_limit);
    const auto oracle = faber_by_reversion(d, check_to);
    const double gap = faber_oracle_gap(polys, oracle);
    if (!(gap <= 1e-9)) throw numerical_error("Faber recurrence disagrees with the reversion oracle (gap " + std::to_string(gap) + ")");
    std::vector<std::vector<cplx>> rows(N + 1);
    for (std::size_t n = 0; n <= N; ++n) {
        rows[n].assign(n + 1, 0.0);
        rows[n][n] = 1.0;
    }
    BuildMeta meta{0, "double", "recurrence", gap};
    return BasisTable(basis_family::faber, d, std::move(polys), std::move(rows), std::move(meta));
}

namespace detail {

inline std::size_t next_pow2(std::size_t n)
{
    std::size_t M = 256;
    while (M < n) M *= 2;
    return M;
}

/// Inverse DFT x_j = sum_k X_k exp(2 pi i j k / M) (no 1/M factor).
inline std::vector<cplx> idft(std::vector<cplx> X)
{
    for (auto& x : X) x = std::conj(x);
    auto y = dft(std::move(X));
    for (auto& x : y) x = std::conj(x);
    return y;
}

/// Gram residual of a Faber-coefficient table by direct quadrature on an
/// M-point grid. For the area product the antiderivative Q of each element
/// is integrated spectrally along the boundary (dQ/dtheta = p(z) z'(theta)),
/// so no moment, monomial form or Faber antiderivative is reused.
inline double faber_table_residual(const ConformalDomain& d, inner_product ip, const std::vector<std::vector<cplx>>& rows, std::size_t M)
{
    const std::size_t n = rows.size();
    const FaberRecurrence rec(d);
    boundary_nodes<double> nodes(d, M);
    std::vector<cplx> P(n * M), Q;
    for (std::size_t j = 0; j < M; ++j) {
        const auto F = rec.values<0>(nodes.z[j], n);
        for (std::size_t r = 0; r < n; ++r) {
            cplx p = 0.0;
            for (std::size_t k = 0; k < rows[r].size(); ++k) p += rows[r][k] * F[k][0];
            P[r * M + j] = p;
        }
    }
    std::vector<cplx> wgt(M);
    const double Md = static_cast<double>(M);
    for (std::size_t j = 0; j < M; ++j)
        wgt[j] = ip == inner_product::area ? nodes.dpsi[j] * nodes.w[j] * (std::numbers::pi / Md)
                                           : cplx(std::abs(nodes.dpsi[j]) * 2.0 * std::numbers::pi / Md);
    if (ip == inner_product::arclength) {
        Q = P;
    } else {
        Q.resize(n * M);
        std::vector<cplx> g(M);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t j = 0; j < M; ++j) g[j] = P[r * M + j] * nodes.dpsi[j] * cplx(0, 1) * nodes.w[j];
            auto G = dft(g);
            G[0] = 0.0;
            for (std::size_t k = 1; k < M; ++k) {
                const double kk = k <= M / 2 ? static_cast<double>(k) : static_cast<double>(k) - Md;
                G[k] /= cplx(0, kk) * Md;
            }
            const auto q = idft(std::move(G));
            for (std::size_t j = 0; j < M; ++j) Q[r * M + j] = q[j];
        }
    }
    double worst = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b <= a; ++b) {
            cplx s = 0.0;
            for (std::size_t j = 0; j < M; ++j) s += P[a * M + j] * std::conj(Q[b * M + j]) * wgt[j];
            if (a == b) s -= 1.0;
            worst = std::max(worst, std::abs(s));
        }
    return worst;
}

} // namespace detail

namespace detail {

template <class Real>
std::vector<Poly> rows_to_polys(const std::vector<std::vector<std::complex<Real>>>& rows)
{
    std::vector<Poly> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        std::vector<cplx> c(r.size());
        for (std::size_t k = 0; k < r.size(); ++k) c[k] = cplx(static_cast<double>(r[k].real()), static_cast<double>(r[k].imag()));
        out.emplace_back(std::move(c));
    }
    return out;
}

template <class Real>
BasisTable build_by_moments(const ConformalDomain& d, basis_family family, std::size_t N, std::size_t M, const char* precision)
{
    const inner_product ip = family == basis_family::bergman ? inner_product::area : inner_product::arclength;
    const auto rows = orthonormal_monomial_rows<Real>(d, ip, N, M);
    const double residual = gram_residual<Real>(d, ip, rows, M);
    auto polys = rows_to_polys(rows);
    std::vector<std::vector<cplx>> faber;
    faber.reserve(polys.size());
    for (const auto& p : polys) faber.push_back(faber_coefficients(d, p));
    return BasisTable(family, d, std::move(polys), std::move(faber), BuildMeta{M, precision, "moments", residual});
}

/// Orthonormalization in a generating basis whose Gram matrix is well
/// conditioned: F_k for the arclength product, F'_{k+1}/(k+1) for the area
/// product (whose antiderivative F_{k+1}/(k+1) gives the Green's-theorem form).
inline BasisTable build_by_faber_gram(const ConformalDomain& d, basis_family family, std::size_t N, std::size_t M)
{
    const bool area = family == basis_family::bergman;
    const FaberRecurrence rec(d);
    boundary_nodes<double> nodes(d, M);
    const std::size_t n = N + 1;
    std::vector<cplx> g(n * M), h(n * M);
    for (std::size_t j = 0; j < M; ++j) {
        const auto F = rec.values<1>(nodes.z[j], N + 1);
        for (std::size_t k = 0; k < n; ++k) {
            if (area) {
                const double s = 1.0 / static_cast<double>(k + 1);
                g[k * M + j] = F[k + 1][1] * s;
                h[k * M + j] = F[k + 1][0] * s;
            } else {
                g[k * M + j] = F[k][0];
                h[k * M + j] = F[k][0];
            }
        }
    }
    const double Md = static_cast<double>(M);
    std::vector<cplx> wgt(M);
    for (std::size_t j = 0; j < M; ++j)
        wgt[j] = area ? nodes.dpsi[j] * nodes.w[j] * (std::numbers::pi / Md) : cplx(std::abs(nodes.dpsi[j]) * 2.0 * std::numbers::pi / Md);
    cmatrix<double> G(n);
    std::vector<cplx> hw(M);
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t j = 0; j < M; ++j) hw[j] = std::conj(h[b * M + j]) * wgt[j];
        for (std::size_t a = b; a < n; ++a) {
            cplx s = 0.0;
            const cplx* ga = &g[a * M];
            for (std::size_t j = 0; j < M; ++j) s += ga[j] * hw[j];
            G(a, b) = s;
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        G(a, a) = G(a, a).real();
        for (std::size_t b = a + 1; b < n; ++b) G(a, b) = std::conj(G(b, a));
    }
    const auto C = lower_inverse(cholesky(std::move(G)));

    // Faber coefficients of the generators
    std::vector<std::vector<cplx>> gen(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (area) {
            gen[k] = faber_coefficients_from_samples(std::vector<cplx>(g.begin() + static_cast<std::ptrdiff_t>(k * M), g.begin() + static_cast<std::ptrdiff_t>((k + 1) * M)), k);
        } else {
            gen[k].assign(k + 1, 0.0);
            gen[k][k] = 1.0;
        }
    }
    std::vector<std::vector<cplx>> rows(n);
    for (std::size_t k = 0; k < n; ++k) {
        rows[k].assign(k + 1, 0.0);
        for (std::size_t j = 0; j <= k; ++j) {
            const cplx c = C(k, j);
            for (std::size_t i = 0; i < gen[j].size(); ++i) rows[k][i] += c * gen[j][i];
        }
    }
    const double residual = faber_table_residual(d, area ? inner_product::area : inner_product::arclength, rows, 2 * M);
    std::vector<Poly> polys;
    polys.reserve(n);
    for (const auto& r : rows) polys.push_back(FaberExpansion(rec, r).to_poly());
    return BasisTable(family, d, std::move(polys), std::move(rows), BuildMeta{M, "double", "faber_gram", residual});
}

} // namespace detail

/// Bergman (area) or Szego (arclength) orthonormal polynomials B_0..B_N with
/// real positive leading coefficients.
inline BasisTable build_orthonormal(const ConformalDomain& d, basis_family family, std::size_t N, BuildOptions opt = {})
{
    if (family == basis_family::faber) throw domain_error("build_orthonormal: Faber polynomials are not orthonormal; use build_faber");
    build_method method = opt.method;
    if (method == build_method::automatic)
        method = opt.precision == precision_mode::extended ? build_method::moments : build_method::faber_gram;
    if (method == build_method::moments) {
        if (opt.precision == precision_mode::extended) {
            const std::size_t M = opt.quadrature_nodes ? opt.quadrature_nodes : 1024;
            return detail::build_by_moments<quad_real>(d, family, N, M, "extended");
        }
        const std::size_t M = opt.quadrature_nodes ? opt.quadrature_nodes : 4096;
        return detail::build_by_moments<double>(d, family, N, M, "double");
    }
    const std::size_t need = 2 * static_cast<std::size_t>(d.tail_order() + 1) * (N + 2) + 128;
    const std::size_t M = opt.quadrature_nodes ? opt.quadrature_nodes : detail::next_pow2(need);
    return detail::build_by_faber_gram(d, family, N, M);
}

/// Dispatch on family.
inline BasisTable build_basis(const ConformalDomain& d, basis_family family, std::size_t N, BuildOptions opt = {})
{
    return family == basis_family::faber ? build_faber(d, N) : build_orthonormal(d, family, N, opt);
}

// ---------------------------------------------------------------------------
// Asymptotic diagnostics

struct DeviationRow {
    std::size_t n = 0;
    double max_dev = 0.0;
    bool overflow = false;
};

struct AsymptoticReport {
    double rho = 0.0;
    std::vector<DeviationRow> rows;
    double power_slope = 0.0;     // d log(dev) / d log(n)
    double geometric_slope = 0.0; // d log(dev) / dn
    std::string regime;           // "algebraic", "geometric" or "exact"
};

namespace detail {

inline void fit_deviation_slopes(AsymptoticReport& rep)
{
    std::vector<double> ln, nn, ld;
    for (const auto& r : rep.rows)
        if (!r.overflow && r.max_dev > 0.0) {
            ln.push_back(std::log(static_cast<double>(r.n)));
            nn.push_back(static_cast<double>(r.n));
            ld.push_back(std::log(r.max_dev));
        }
    if (ld.size() >= 2) {
        rep.power_slope = stats::fit_line(ln, ld).slope;
        rep.geometric_slope = stats::fit_line(nn, ld).slope;
        // an algebraic law has a constant log-log slope; a geometric one keeps steepening
        rep.regime = rep.geometric_slope < std::log(0.95) && rep.power_slope < -3.0 ? "geometric" : "algebraic";
    } else {
        rep.regime = "exact";
    }
}

} // namespace detail

/// max over a 512-point theta grid of
///   | B_n(Psi(rho e^{it})) / (sqrt((n+1)/pi) (rho e^{it})^n Phi'(Psi(rho e^{it}))) - 1 |.
inline AsymptoticReport check_bergman_asymptotics(const BasisTable& table, double rho, const std::vector<std::size_t>& n_range)
{
    if (table.family() != basis_family::bergman) throw domain_error("check_bergman_asymptotics needs a Bergman table");
    const auto& d = table.domain();
    if (!(rho > d.r_inner()) || rho == 1.0) throw domain_error("check_bergman_asymptotics: rho must exceed r_inner and differ from 1");
    AsymptoticReport rep;
    rep.rho = rho;
    constexpr int grid = 512;
    for (std::size_t n : n_range) {
        if (n > table.max_degree()) throw domain_error("check_bergman_asymptotics: n beyond table");
        DeviationRow row{n, 0.0, false};
        for (int j = 0; j < grid; ++j) {
            const cplx w = std::polar(rho, 2.0 * std::numbers::pi * j / grid);
            const cplx z = d.psi(w);
            const cplx model = std::sqrt((n + 1.0) / std::numbers::pi) * std::pow(w, static_cast<double>(n)) / d.psi_prime(w);
            const cplx b = table.eval(n, z);
            const double dev = std::abs(b / model - 1.0);
            if (!std::isfinite(dev)) {
                row.overflow = true;
                continue;
            }
            row.max_dev = std::max(row.max_dev, dev);
        }
        rep.rows.push_back(row);
    }
    detail::fit_deviation_slopes(rep);
    return rep;
}

/// The same check with B_n (from the moment matrix), Psi and Psi' carried in
/// Digits10 decimal digits. Resolves deviations far below double rounding;
/// on ellipse(1, b) at rho = 2 they fall like (b/rho^2)^n.
template <unsigned Digits10 = 100>
AsymptoticReport check_bergman_asymptotics_extended(const ConformalDomain& d, double rho, const std::vector<std::size_t>& n_range, std::size_t M = 1024)
{
    using Real = extended_real<Digits10>;
    using C = std::complex<Real>;
    if (!(rho > d.r_inner()) || rho == 1.0) throw domain_error("check_bergman_asymptotics: rho must exceed r_inner and differ from 1");
    if (n_range.empty()) throw domain_error("check_bergman_asymptotics: empty n range");
    const std::size_t N = *std::max_element(n_range.begin(), n_range.end());
    const auto rows = orthonormal_monomial_rows<Real>(d, inner_product::area, N, M);
    const auto& psi = d.psi_series();
    const Real pi = detail::pi_v<Real>();

    AsymptoticReport rep;
    rep.rho = rho;
    for (std::size_t n : n_range) rep.rows.push_back(DeviationRow{n, 0.0, false});
    constexpr int grid = 512;
    for (int j = 0; j < grid; ++j) {
        const Real t = 2 * pi * Real(j) / Real(grid);
        const C w(Real(rho) * cos(t), Real(rho) * sin(t));
        C z(0), dz(0);
        for (int k = psi.lo(); k <= psi.hi(); ++k) {
            const C c = detail::to_real<Real>(psi.coeff(k));
            if (c == C(0)) continue;
            z += c * detail::boundary_nodes<Real>::ipow(w, k);
            if (k != 0) dz += Real(k) * c * detail::boundary_nodes<Real>::ipow(w, k - 1);
        }
        for (auto& row : rep.rows) {
            const auto& a = rows[row.n];
            C b(0);
            for (std::size_t k = a.size(); k-- > 0;) b = b * z + a[k];
            const C model = sqrt(Real(static_cast<double>(row.n + 1)) / pi) * detail::boundary_nodes<Real>::ipow(w, static_cast<int>(row.n)) / dz;
            row.max_dev = std::max(row.max_dev, static_cast<double>(detail::cabs(C(b / model - C(1)))));
        }
    }
    detail::fit_deviation_slopes(rep);
    return rep;
}

struct BandRow {
    std::size_t n = 0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
};

struct BandReport {
    std::vector<BandRow> rows;
    double band_ratio = 0.0; // max_n max_ratio / min_n min_ratio
    std::string normalization;
};

namespace detail {

template <class Value, class Norm>
BandReport level_band(const BasisTable& table, double rho, const std::vector<std::size_t>& n_range, Value value, Norm norm, std::string label)
{
    const auto& d = table.domain();
    BandReport rep;
    rep.normalization = std::move(label);
    constexpr int grid = 512;
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (std::size_t n : n_range) {
        BandRow row{n, std::numeric_limits<double>::infinity(), 0.0};
        const double s = norm(n);
        for (int j = 0; j < grid; ++j) {
            const cplx z = d.psi(std::polar(rho, 2.0 * std::numbers::pi * j / grid));
            const double r = std::abs(value(n, z)) / s;
            row.min_ratio = std::min(row.min_ratio, r);
            row.max_ratio = std::max(row.max_ratio, r);
        }
        hi = std::max(hi, row.max_ratio);
        lo = std::min(lo, row.min_ratio);
        rep.rows.push_back(row);
    }
    rep.band_ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    return rep;
}

} // namespace detail

/// |B_n| on L_rho normalized by sqrt(n) rho^n (Bergman) or rho^n (Faber, Szego).
inline BandReport level_curve_bounds(const BasisTable& table, double rho, const std::vector<std::size_t>& n_range)
{
    if (!(rho > 1.0)) throw domain_error("level_curve_bounds: rho > 1 required");
    const bool sq = table.family() == basis_family::bergman;
    return detail::level_band(
        table, rho, n_range, [&](std::size_t n, cplx z) { return table.eval(n, z); },
        [&](std::size_t n) { return (sq ? std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1))) : 1.0) * std::pow(rho, static_cast<double>(n)); },
        sq ? "sqrt(n) rho^n" : "rho^n");
}

/// |B_n'| on L_rho normalized by n^{3/2} rho^{n-1} (Bergman) or n rho^{n-1}
/// (Faber, Szego, where the sqrt(n) factor is absent).
inline BandReport derivative_level_bounds(const BasisTable& table, double rho, const std::vector<std::size_t>& n_range)
{
    if (!(rho > 1.0)) throw domain_error("derivative_level_bounds: rho > 1 required");
    const bool sq = table.family() == basis_family::bergman;
    for (std::size_t n : n_range)
        if (n == 0) throw domain_error("derivative_level_bounds: n >= 1 required");
    return detail::level_band(
        table, rho, n_range, [&](std::size_t n, cplx z) { return table.eval_prime(n, z); },
        [&](std::size_t n) {
            const double nd = static_cast<double>(n);
            return (sq ? nd * std::sqrt(nd) : nd) * std::pow(rho, nd - 1.0);
        },
        sq ? "n^1.5 rho^(n-1)" : "n rho^(n-1) (family-specific)");
}

struct NthRootReport {
    std::vector<std::pair<std::size_t, double>> values; // (n, |B_n(z)|^{1/n})
    double target = 0.0;                                // |Phi(z)|
    double final_deviation = 0.0;
};

inline NthRootReport nth_root_asymptotic(const BasisTable& table, cplx z, const std::vector<std::size_t>& n_range)
{
    const auto& d = table.domain();
    const auto w = d.try_phi(z);
    if (!w || !(std::abs(*w) > 1.0)) throw domain_error("nth_root_asymptotic: z must lie in the exterior of the domain");
    NthRootReport rep;
    rep.target = std::abs(*w);
    for (std::size_t n : n_range) {
        if (n == 0) continue;
        rep.values.emplace_back(n, std::pow(std::abs(table.eval(n, z)), 1.0 / static_cast<double>(n)));
    }
    if (!rep.values.empty()) rep.final_deviation = std::abs(rep.values.back().second - rep.target);
    return rep;
}

/// Partial sums sum_{n<=k} |B_n(z)|^2 for k = 0..N.
inline std::vector<double> kernel_partial_sums(const BasisTable& table, cplx z)
{
    std::vector<double> out;
    out.reserve(table.size());
    double s = 0.0;
    const auto F = table.recurrence().values<0>(z, table.max_degree());
    for (std::size_t n = 0; n < table.size(); ++n) {
        cplx v = 0.0;
        const auto& row = table.faber_rows()[n];
        for (std::size_t j = 0; j < row.size(); ++j) v += row[j] * F[j][0];
        s += std::norm(v);
        out.push_back(s);
    }
    return out;
}

/// CSV export: n, then re/im pairs of the monomial coefficients.
inline void write_table_csv(std::ostream& os, const BasisTable& table)
{
    char buf[64];
    os << "n";
    for (std::size_t k = 0; k < table.size(); ++k) os << ",re" << k << ",im" << k;
    os << "\n";
    for (std::size_t n = 0; n < table.size(); ++n) {
        os << n;
        const auto& p = table.polys()[n];
        for (std::size_t k = 0; k <= n; ++k) {
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g", p[k].real(), p[k].imag());
            os << buf;
        }
        os << "\n";
    }
}

} // namespace rpz

#endif // RPZ_BASES_HPP
