#ifndef RPZ_POTENTIAL_HPP
#define RPZ_POTENTIAL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpz/bases.hpp"
#include "rpz/domain.hpp"
#include "rpz/error.hpp"
#include "rpz/faber.hpp"
#include "rpz/fft.hpp"
#include "rpz/roots.hpp"
#include "rpz/series.hpp"

namespace rpz {

/// g(z, infinity) = log |Phi(z)|, also inside the continuation annulus.
inline double green_value(const ConformalDomain& d, cplx z)
{
    const auto w = d.try_phi(z);
    if (!w) throw domain_error("green_value: z lies inside the inner annulus (no continuation of Phi)");
    return std::log(std::abs(*w));
}

/// arg Phi(z) in [0, 2 pi), or nullopt when Phi cannot be continued to z.
inline std::optional<double> equilibrium_angle(const ConformalDomain& d, cplx z)
{
    const auto w = d.try_phi(z);
    if (!w || !(std::abs(*w) > d.r_inner() + 1e-6)) return std::nullopt;
    double t = std::arg(*w);
    if (t < 0.0) t += 2.0 * std::numbers::pi;
    if (t >= 2.0 * std::numbers::pi) t = 0.0;
    return t;
}

/// Kolmogorov-Smirnov distance of an angle sample from the uniform law,
/// minimized over all rotations of the origin.
///
/// With the origin c between sorted points u_{k-1} and u_k, the one-sided
/// distances are D+ = A - k/n + c and D- = B + k/n - c, with
/// A = max (j+1)/n - u_j and B = max u_j - j/n; each gap is minimized in
/// closed form.
inline double ks_uniformity(std::span<const double> angles)
{
    if (angles.empty()) throw domain_error("ks_uniformity: empty sample");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> u(angles.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        double x = std::fmod(angles[i], two_pi) / two_pi;
        if (x < 0.0) x += 1.0;
        u[i] = x;
    }
    std::sort(u.begin(), u.end());
    const std::size_t n = u.size();
    const double nd = static_cast<double>(n);
    double A = -1.0, B = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
        A = std::max(A, static_cast<double>(j + 1) / nd - u[j]);
        B = std::max(B, u[j] - static_cast<double>(j) / nd);
    }
    double best = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double lo = k == 0 ? u[n - 1] - 1.0 : u[k - 1];
        const double hi = u[k];
        const double kn = static_cast<double>(k) / nd;
        const double c = std::clamp(kn + 0.5 * (B - A), lo, hi);
        best = std::min(best, std::max(A - kn + c, B + kn - c));
    }
    return best;
}

namespace detail {

inline std::size_t target_degree(const Poly& p)
{
    const auto d = p.degree();
    return d ? static_cast<std::size_t>(*d) : 0;
}
inline std::size_t target_degree(const FaberExpansion& p) { return p.is_zero() ? 0 : p.degree(); }

inline cplx target_value(const Poly& p, cplx z) { return p(z); }
inline cplx target_value(const FaberExpansion& p, cplx z) { return p(z); }

inline Poly target_derivative(const Poly& p) { return derivative(p); }
inline FaberExpansion target_derivative(const FaberExpansion& p) { return p.derivative(); }

} // namespace detail

/// Values of a polynomial on the boundary grids Psi(e^{2 pi i j / M}) for any
/// M: sampled once on enough nodes to resolve the trigonometric polynomial
/// p(Psi(e^{it})), then zero-padded.
class BoundaryGrid {
public:
    template <class Target>
    BoundaryGrid(const Target& p, const ConformalDomain& d)
    {
        deg_ = detail::target_degree(p);
        lo_ = static_cast<std::size_t>(d.tail_order()) * deg_;
        M0_ = detail::next_pow2(lo_ + deg_ + 1);
        std::vector<cplx> x(M0_);
        for (std::size_t j = 0; j < M0_; ++j)
            x[j] = detail::target_value(p, d.psi_unchecked(std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(M0_))));
        spectrum_ = detail::dft(std::move(x));
        for (auto& c : spectrum_) c /= static_cast<double>(M0_);
    }

    /// |p| at the M grid nodes.
    [[nodiscard]] std::vector<double> abs_values(std::size_t M) const
    {
        std::vector<cplx> Y(M, 0.0);
        const auto put = [&](long f) {
            const auto src = static_cast<std::size_t>((f % static_cast<long>(M0_) + static_cast<long>(M0_)) % static_cast<long>(M0_));
            const auto dst = static_cast<std::size_t>((f % static_cast<long>(M) + static_cast<long>(M)) % static_cast<long>(M));
            Y[dst] += spectrum_[src];
        };
        for (long f = -static_cast<long>(lo_); f <= static_cast<long>(deg_); ++f) put(f);
        const auto y = detail::idft(std::move(Y));
        std::vector<double> out(M);
        for (std::size_t j = 0; j < M; ++j) out[j] = std::abs(y[j]);
        return out;
    }

    [[nodiscard]] double sup(std::size_t M) const
    {
        const auto v = abs_values(M);
        return *std::max_element(v.begin(), v.end());
    }

private:
    std::size_t deg_ = 0, lo_ = 0, M0_ = 0;
    std::vector<cplx> spectrum_;
};

namespace detail {

/// Doubles M from M_start until stat(M) moves by < rel_tol relative.
template <class Stat>
double densify(Stat&& stat, std::size_t M_start, double rel_tol, const char* what)
{
    double prev = stat(M_start);
    for (std::size_t M = 2 * M_start; M <= (std::size_t{1} << 22); M *= 2) {
        const double cur = stat(M);
        if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
        prev = cur;
    }
    throw numerical_error(std::string(what) + ": boundary grid did not settle by M = 2^22");
}

} // namespace detail

struct DiscrepancyProbes {
    double rho_K = 0.7;
    double R = 2.0;
    std::size_t probe_points = 64;
    std::size_t boundary_points = 1024;
    double grid_tol = 1e-6;
};

struct DiscrepancyReport {
    std::size_t n = 0;
    std::optional<double> ks_angle; // empty when no atom has an angle
    double interior_mass = 0.0;
    double excluded_mass = 0.0;
    double assigned_mass = 0.0;
    double lognorm_dev = 0.0;
    double lognorm_gap_max = 0.0; // max over the probes of (1/n) log|P| - g
    double sup_norm_E_root = 0.0;
};

/// Atom partition used by the discrepancy statistics.
struct AngleSplit {
    std::vector<double> angles; // assigned atoms outside the rho_K curve
    std::size_t interior = 0, excluded = 0;
};

inline AngleSplit split_atoms(const CountingMeasure& cm, const ConformalDomain& d, double rho_K)
{
    if (!(rho_K > d.r_inner() && rho_K < 1.0))
        throw domain_error("rho_K: r_inner < rho_K < 1 required (r_inner = " + std::to_string(d.r_inner()) + ")");
    const auto poly = d.level_curve(rho_K, 4096);
    AngleSplit s;
    for (cplx a : cm.atoms) {
        if (ConformalDomain::winding_number(poly, a) != 0) {
            ++s.interior;
            continue;
        }
        if (const auto t = equilibrium_angle(d, a)) s.angles.push_back(*t);
        else ++s.excluded;
    }
    return s;
}

/// Discrepancy statistics of the zeros of P against the equilibrium measure.
template <class Target>
DiscrepancyReport discrepancy(const ZeroSet& zs, const ConformalDomain& d, const Target& P, const DiscrepancyProbes& pr = {})
{
    const auto cm = counting_measure(zs);
    const double n = static_cast<double>(cm.atoms.size());
    DiscrepancyReport r;
    r.n = cm.atoms.size();
    const auto split = split_atoms(cm, d, pr.rho_K);
    r.interior_mass = static_cast<double>(split.interior) / n;
    r.excluded_mass = static_cast<double>(split.excluded) / n;
    r.assigned_mass = static_cast<double>(split.angles.size()) / n;
    if (!split.angles.empty()) r.ks_angle = ks_uniformity(split.angles);

    const double logR = std::log(pr.R);
    r.lognorm_gap_max = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pr.probe_points; ++j) {
        const cplx z = d.psi_unchecked(std::polar(pr.R, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(pr.probe_points)));
        const double v = std::abs(detail::target_value(P, z));
        const double gap = v > 0.0 ? std::log(v) / n - logR : -std::numeric_limits<double>::infinity();
        r.lognorm_dev = std::max(r.lognorm_dev, std::abs(gap));
        r.lognorm_gap_max = std::max(r.lognorm_gap_max, gap);
    }

    const BoundaryGrid grid(P, d);
    r.sup_norm_E_root = detail::densify([&](std::size_t M) { return std::pow(grid.sup(M), 1.0 / n); }, pr.boundary_points, pr.grid_tol, "sup_norm_E_root");
    return r;
}

/// ||P'||_E / ||P||_E from boundary-grid sup norms (start 2048 nodes).
template <class Target>
double markov_bernstein_ratio(const Target& P, const ConformalDomain& d, double grid_tol = 1e-6)
{
    if (detail::target_degree(P) == 0) return 0.0;
    const auto dP = detail::target_derivative(P);
    const BoundaryGrid g0(P, d), g1(dP, d);
    return detail::densify([&](std::size_t M) { return g1.sup(M) / g0.sup(M); }, 2048, grid_tol, "markov_bernstein_ratio");
}

struct RecoveryOptions {
    double R = 2.0;
    std::size_t M = 8192;
    double tol = 1e-10;
    bool check_zeros = true;
};

/// Top coefficient a_n of P = sum_{k<=n} a_k B_k from
/// a_n = (1 / 2 pi i) oint_{L_R} P(z) dz / (z B_n(z)).
template <class Target>
cplx recover_coefficient(const Target& P, const BasisTable& table, std::size_t n, const RecoveryOptions& opt = {})
{
    const auto& d = table.domain();
    if (n > table.max_degree()) throw domain_error("recover_coefficient: n exceeds the basis table");
    if (!(opt.R > 1.0)) throw domain_error("recover_coefficient: R > 1 required");
    if (!d.inside_level(0.0, opt.R)) throw domain_error("recover_coefficient: 0 must lie inside L_R");
    if (opt.check_zeros && n >= 1) {
        const auto zs = find_roots(table.element(n), d);
        for (cplx r : zs.roots)
            if (!d.inside_level(r, opt.R))
                throw domain_error("recover_coefficient: a zero of B_" + std::to_string(n) + " lies on or outside L_R");
    }
    const auto quad = [&](std::size_t M) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            const cplx w = std::polar(opt.R, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(M));
            const cplx z = d.psi_unchecked(w);
            s += detail::target_value(P, z) * d.psi_prime_unchecked(w) * w / (z * table.eval(n, z));
        }
        return s / static_cast<double>(M);
    };
    cplx prev = quad(opt.M);
    for (std::size_t M = 2 * opt.M; M <= (std::size_t{1} << 20); M *= 2) {
        const cplx cur = quad(M);
        if (std::abs(cur - prev) <= opt.tol * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    throw numerical_error("recover_coefficient: quadrature did not settle under M-doubling");
}

/// All of a_0..a_n by repeated top-coefficient recovery, P <- P - a_k B_k.
inline std::vector<cplx> peel_coefficients(FaberExpansion P, const BasisTable& table, std::size_t n, const RecoveryOptions& opt = {})
{
    std::vector<cplx> a(n + 1, 0.0);
    std::vector<cplx> alpha = P.alpha();
    alpha.resize(std::max(alpha.size(), n + 1), 0.0);
    for (std::size_t k = n + 1; k-- > 0;) {
        const FaberExpansion cur(table.recurrence(), alpha);
        a[k] = recover_coefficient(cur, table, k, opt);
        const auto& row = table.faber_rows()[k];
        for (std::size_t j = 0; j < row.size(); ++j) alpha[j] -= a[k] * row[j];
        alpha.resize(k);
    }
    return a;
}

inline std::vector<cplx> peel_coefficients(Poly P, const BasisTable& table, std::size_t n, const RecoveryOptions& opt = {})
{
    std::vector<cplx> a(n + 1, 0.0);
    for (std::size_t k = n + 1; k-- > 0;) {
        a[k] = recover_coefficient(P, table, k, opt);
        P = P - a[k] * table.polys()[k];
    }
    return a;
}

} // namespace rpz

#endif // RPZ_POTENTIAL_HPP
