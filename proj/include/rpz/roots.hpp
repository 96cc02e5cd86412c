#ifndef RPZ_ROOTS_HPP
#define RPZ_ROOTS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "rpz/domain.hpp"
#include "rpz/error.hpp"
#include "rpz/faber.hpp"
#include "rpz/random.hpp"
#include "rpz/series.hpp"

namespace rpz {

struct VietaGap {
    double sum = 0.0;     // |sum r + p_{n-1}/p_n| / max(1, sum |r|)
    double product = 0.0; // |prod r / ((-1)^n p_0/p_n) - 1|, via logs
};

/// Computed zeros of one polynomial.
struct ZeroSet {
    std::vector<cplx> roots;
    std::vector<double> residuals; // |p(r)| / |p'(r)|
    VietaGap vieta;
    int iterations = 0;
    bool converged = false;

    [[nodiscard]] std::size_t size() const noexcept { return roots.size(); }
    [[nodiscard]] double worst_residual() const
    {
        double w = 0.0;
        for (double r : residuals) w = std::max(w, r);
        return w;
    }
};

/// Root finding failed; the partial iterate is kept.
class root_error : public numerical_error {
public:
    root_error(const std::string& what, ZeroSet partial) : numerical_error(what), partial_(std::move(partial)) {}
    [[nodiscard]] const ZeroSet& partial() const noexcept { return partial_; }

private:
    ZeroSet partial_;
};

struct RootOptions {
    int max_sweeps = 500;
    std::uint64_t jitter_seed = 0x5EEDULL;
    double jitter = 0.3; // fraction of the angular spacing
    double vieta_tol = 1e-6;
    double level = 1.1; // start curve Psi(level e^{it}) for Faber targets
};

namespace detail {

inline double vieta_tol_ok(const VietaGap& g, double tol) { return g.sum <= tol && g.product <= tol; }

inline cplx wrap_log(cplx l)
{
    constexpr double pi = std::numbers::pi;
    double im = std::remainder(l.imag(), 2.0 * pi);
    if (im <= -pi) im += 2.0 * pi;
    return {l.real(), im};
}

inline cplx poly_log_leading(const Poly& p) { return std::log(p.coeffs().back()); }
inline cplx poly_subleading_ratio(const Poly& p)
{
    const auto& c = p.coeffs();
    return c[c.size() - 2] / c.back();
}

inline VietaGap vieta_gap(const std::vector<cplx>& r, cplx p0, cplx log_lead, cplx sub_ratio)
{
    VietaGap g;
    cplx s = 0.0;
    double sa = 0.0;
    for (cplx z : r) {
        s += z;
        sa += std::abs(z);
    }
    g.sum = std::abs(s + sub_ratio) / std::max(1.0, sa);

    const std::size_t n = r.size();
    if (p0 == cplx(0.0)) {
        // prod r should vanish; report |prod r| itself
        double l = 0.0;
        for (cplx z : r) l += std::log(std::abs(z));
        g.product = std::exp(l);
        return g;
    }
    cplx lr = 0.0;
    for (cplx z : r) {
        if (z == cplx(0.0)) {
            g.product = 1.0;
            return g;
        }
        lr += std::log(z);
    }
    const cplx target = std::log(p0) - log_lead + cplx(0.0, std::numbers::pi * static_cast<double>(n % 2));
    const cplx d = wrap_log(lr - target);
    g.product = std::abs(std::expm1(d.real()) * std::polar(1.0, d.imag()) + (std::polar(1.0, d.imag()) - 1.0));
    return g;
}

/// Gauss-Seidel Aberth-Ehrlich sweeps followed by Newton polish. `Target`
/// provides eval_with_derivative(z) -> (p, p').
template <class Target>
ZeroSet aberth(const Target& p, std::vector<cplx> z, int max_sweeps)
{
    const std::size_t n = z.size();
    std::vector<char> done(n, 0);
    std::vector<double> last(n, 1e300);
    ZeroSet out;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        bool all = true;
        for (std::size_t k = 0; k < n; ++k) {
            if (done[k]) continue;
            const auto [v, dv] = p.eval_with_derivative(z[k]);
            if (v == cplx(0.0)) {
                done[k] = 1;
                continue;
            }
            const cplx ratio = v / dv;
            cplx s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) s += 1.0 / (z[k] - z[j]);
            cplx step = ratio / (1.0 - ratio * s);
            if (!detail::finite(step)) step = ratio;
            if (!detail::finite(step)) {
                // overflow far outside: pull the iterate back in
                z[k] *= 0.5;
                all = false;
                continue;
            }
            // long steps are the repulsion between iterates; keep the
            // direction, bound the length
            const double cap = 0.5 * (1.0 + std::abs(z[k]));
            if (std::abs(step) > cap) step *= cap / std::abs(step);
            z[k] -= step;
            // done at full precision, or once a small step stops shrinking
            // (the iterate is in the evaluation-noise ball)
            const double a = std::abs(step), scale = 1.0 + std::abs(z[k]);
            if (a <= 1e-14 * scale || (a <= 1e-7 * scale && a > 0.5 * last[k])) done[k] = 1;
            else all = false;
            last[k] = a;
        }
        if (all) break;
    }
    out.iterations = sweep + 1;
    out.converged = sweep < max_sweeps;
    out.residuals.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (int it = 0; it < 3; ++it) {
            const auto [v, dv] = p.eval_with_derivative(z[k]);
            if (v == cplx(0.0) || dv == cplx(0.0)) break;
            const cplx step = v / dv;
            if (!detail::finite(step) || std::abs(step) > 1e-8 * (1.0 + std::abs(z[k]))) break;
            z[k] -= step;
        }
        const auto [v, dv] = p.eval_with_derivative(z[k]);
        out.residuals[k] = v == cplx(0.0) ? 0.0 : std::abs(v) / std::abs(dv);
    }
    out.roots = std::move(z);
    return out;
}

inline std::vector<cplx> jittered_circle(std::size_t n, std::uint64_t seed, double jitter, auto&& place)
{
    const CounterStream s(child_seed(seed, n));
    std::vector<cplx> z(n);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = two_pi * (static_cast<double>(k) + 0.5 + jitter * (s.uniform(k) - 0.5)) / static_cast<double>(n);
        z[k] = place(t);
    }
    return z;
}

inline ZeroSet finish(ZeroSet zs, const VietaGap& g, double tol, const std::string& who)
{
    zs.vieta = g;
    if (!zs.converged)
        throw root_error(who + ": no convergence after " + std::to_string(zs.iterations) + " sweeps (worst residual " + std::to_string(zs.worst_residual()) + ")", std::move(zs));
    if (!vieta_tol_ok(g, tol)) {
        zs.converged = false;
        throw root_error(who + ": Vieta check failed (sum gap " + std::to_string(g.sum) + ", product gap " + std::to_string(g.product) + ")", std::move(zs));
    }
    return zs;
}

} // namespace detail

/// Fujiwara bound on the moduli of the zeros of p.
inline double fujiwara_bound(const Poly& p)
{
    const auto& c = p.coeffs();
    const std::size_t n = c.size() - 1;
    const double an = std::abs(c[n]);
    double m = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        double t = std::abs(c[n - k]) / an;
        if (k == n) t /= 2.0;
        m = std::max(m, std::pow(t, 1.0 / static_cast<double>(k)));
    }
    return 2.0 * m;
}

/// All zeros of a monomial-form polynomial (Aberth-Ehrlich from the Fujiwara circle).
inline ZeroSet find_roots(const Poly& p, const RootOptions& opt = {})
{
    const auto deg = p.degree();
    if (!deg || *deg < 1) throw domain_error("find_roots: degree >= 1 required");
    const std::size_t n = static_cast<std::size_t>(*deg);
    if (n == 1) {
        ZeroSet zs;
        zs.roots = {-p.coeffs()[0] / p.coeffs()[1]};
        zs.residuals = {0.0};
        zs.converged = true;
        zs.iterations = 0;
        return zs;
    }
    double R = fujiwara_bound(p);
    if (!(R > 0.0)) R = 1.0;
    auto z0 = detail::jittered_circle(n, opt.jitter_seed, opt.jitter, [R](double t) { return std::polar(R, t); });
    auto zs = detail::aberth(p, std::move(z0), opt.max_sweeps);
    const auto g = detail::vieta_gap(zs.roots, p.coeffs()[0], detail::poly_log_leading(p), detail::poly_subleading_ratio(p));
    return detail::finish(std::move(zs), g, opt.vieta_tol, "find_roots");
}

/// All zeros of a Faber-form polynomial; starts on the level curve Psi(level e^{it}).
inline ZeroSet find_roots(const FaberExpansion& p, const ConformalDomain& d, const RootOptions& opt = {})
{
    if (p.is_zero() || p.degree() < 1) throw domain_error("find_roots: degree >= 1 required");
    const std::size_t n = p.degree();
    auto z0 = detail::jittered_circle(n, opt.jitter_seed, opt.jitter, [&](double t) { return d.psi(std::polar(opt.level, t)); });
    auto zs = detail::aberth(p, std::move(z0), opt.max_sweeps);
    const auto g = detail::vieta_gap(zs.roots, p(0.0), p.log_leading(), p.subleading_ratio());
    return detail::finish(std::move(zs), g, opt.vieta_tol, "find_roots");
}

/// CSV rows trial,index,re,im,residual; the header is written when `header` is set.
inline void write_zeros_csv(std::ostream& os, const ZeroSet& zs, std::uint64_t trial, bool header = true)
{
    if (header) os << "trial,index,re,im,residual\n";
    char buf[128];
    for (std::size_t k = 0; k < zs.roots.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%llu,%zu,%.17g,%.17g,%.17g\n", static_cast<unsigned long long>(trial), k, zs.roots[k].real(), zs.roots[k].imag(), zs.residuals[k]);
        os << buf;
    }
}

/// Normalized zero counting measure.
struct CountingMeasure {
    std::vector<cplx> atoms;
    [[nodiscard]] double weight() const { return 1.0 / static_cast<double>(atoms.size()); }
    [[nodiscard]] double total_mass() const { return atoms.empty() ? 0.0 : static_cast<double>(atoms.size()) * weight(); }
};

inline CountingMeasure counting_measure(const ZeroSet& zs)
{
    if (zs.roots.empty()) throw domain_error("counting_measure: empty zero set");
    if (!zs.converged) throw domain_error("counting_measure: zero set is flagged unconverged");
    return {zs.roots};
}

/// Fraction of atoms inside the closed curve Psi(rho_K e^{it}).
inline double interior_mass(const CountingMeasure& cm, const ConformalDomain& d, double rho_K)
{
    if (!(rho_K > d.r_inner() && rho_K < 1.0))
        throw domain_error("interior_mass: r_inner < rho_K < 1 required (r_inner = " + std::to_string(d.r_inner()) + ")");
    const auto poly = d.level_curve(rho_K, 4096);
    std::size_t inside = 0;
    for (cplx a : cm.atoms)
        if (ConformalDomain::winding_number(poly, a) != 0) ++inside;
    return static_cast<double>(inside) / static_cast<double>(cm.atoms.size());
}

} // namespace rpz

#endif // RPZ_ROOTS_HPP
