#ifndef RPZ_DOMAIN_HPP
#define RPZ_DOMAIN_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rpz/error.hpp"
#include "rpz/series.hpp"

namespace rpz {

enum class domain_kind { disk, ellipse, perturbed_circle };

inline std::string to_string(domain_kind k)
{
    switch (k) {
    case domain_kind::disk: return "disk";
    case domain_kind::ellipse: return "ellipse";
    case domain_kind::perturbed_circle: return "perturbed_circle";
    }
    return "?";
}

/// A point on the level curve L_rho = Psi(|w| = rho).
struct LevelPoint {
    double theta;
    double rho;
    cplx z;
};

/// Jordan domain given by a finite Laurent exterior map
///
///     Psi(w) = b_1 w + b_0 + sum_{k=1}^{m} b_{-k} w^{-k},
///
/// conformal on |w| > r_inner. The closure E of the domain has capacity b_1 and
/// the inverse Phi maps the exterior of E onto |w| > 1.
class ConformalDomain {
public:
    static ConformalDomain disk() { return ConformalDomain(domain_kind::disk, {0.0, 0.0}, LaurentSlice::exact(0, {0.0, 1.0}), 0.0); }

    /// Interior of the ellipse with semi-axes a+b and a-b: Psi(w) = a w + b/w.
    static ConformalDomain ellipse(double a, double b)
    {
        if (!(std::isfinite(a) && std::isfinite(b))) throw domain_error("ellipse: non-finite parameter");
        if (!(b != 0.0)) throw domain_error("ellipse: |b| > 0 required (use disk for b = 0)");
        if (!(a > std::abs(b))) throw domain_error("ellipse: a > |b| required");
        return ConformalDomain(domain_kind::ellipse, {a, b}, LaurentSlice::exact(-1, {b, 0.0, a}), std::sqrt(std::abs(b) / a));
    }

    /// Psi(w) = w + c w^{-m}; univalent on |w| >= 1 when m |c| < 1.
    static ConformalDomain perturbed_circle(double c, int m)
    {
        if (!std::isfinite(c)) throw domain_error("perturbed_circle: non-finite c");
        if (m < 1) throw domain_error("perturbed_circle: m >= 1 required");
        const double mc = m * std::abs(c);
        if (!(mc < 1.0)) throw domain_error("perturbed_circle: m*|c| < 1 required (got " + std::to_string(mc) + ")");
        const double r = std::pow(mc, 1.0 / (m + 1)) + 0.05;
        if (!(r < 1.0)) throw domain_error("perturbed_circle: padded inner radius (m*|c|)^(1/(m+1)) + 0.05 must be < 1");
        std::vector<cplx> co(static_cast<std::size_t>(m + 2), 0.0);
        co.front() = c;
        co.back() = 1.0;
        return ConformalDomain(domain_kind::perturbed_circle, {c, static_cast<double>(m)}, LaurentSlice::exact(-m, std::move(co)), r);
    }

    /// Catalog lookup used by configuration parsing.
    static ConformalDomain make(const std::string& kind, double p1 = 0.0, double p2 = 0.0)
    {
        if (kind == "disk") return disk();
        if (kind == "ellipse") return ellipse(p1, p2);
        if (kind == "perturbed_circle") {
            if (p2 != std::floor(p2)) throw domain_error("perturbed_circle: m must be an integer");
            return perturbed_circle(p1, static_cast<int>(p2));
        }
        throw domain_error("unknown domain kind '" + kind + "'");
    }

    [[nodiscard]] domain_kind kind() const noexcept { return kind_; }
    [[nodiscard]] const LaurentSlice& psi_series() const noexcept { return psi_; }
    [[nodiscard]] double r_inner() const noexcept { return r_inner_; }
    [[nodiscard]] double capacity() const noexcept { return psi_.coeff(1).real(); }
    [[nodiscard]] double param(int i) const { return params_.at(static_cast<std::size_t>(i)); }

    /// Number of negative powers in Psi.
    [[nodiscard]] int tail_order() const noexcept { return -psi_.lo(); }

    /// b_k, the coefficient of w^k in Psi (k <= 1).
    [[nodiscard]] cplx psi_coeff(int k) const { return psi_.coeff(k); }

    [[nodiscard]] std::string describe() const
    {
        switch (kind_) {
        case domain_kind::disk: return "disk";
        case domain_kind::ellipse: return "ellipse(" + fmt(params_[0]) + "," + fmt(params_[1]) + ")";
        case domain_kind::perturbed_circle: return "perturbed_circle(" + fmt(params_[0]) + "," + std::to_string(static_cast<int>(params_[1])) + ")";
        }
        return "?";
    }

    [[nodiscard]] cplx psi(cplx w) const
    {
        check_w(w);
        return psi_unchecked(w);
    }

    [[nodiscard]] cplx psi_prime(cplx w) const
    {
        check_w(w);
        return psi_prime_unchecked(w);
    }

    /// Preimage w = Phi(z) using the analytic continuation of Phi into
    /// r_inner < |w| < 1, or nullopt when no such preimage exists.
    [[nodiscard]] std::optional<cplx> try_phi(cplx z) const
    {
        if (!detail::finite(z)) return std::nullopt;
        const double floor_r = r_inner_ + 1e-6;
        const double tol = 1e-12 * (1.0 + std::abs(z));
        if (auto w = newton(z, z / capacity(), tol); w && std::abs(*w) > floor_r) return w;
        const double seed_r[2] = {0.5 * (1.0 + r_inner_), 1.0};
        for (double sr : seed_r) {
            for (int k = 0; k < 16; ++k) {
                const cplx seed = std::polar(sr, 2.0 * std::numbers::pi * (k + 0.5) / 16.0);
                if (auto w = newton(z, seed, tol); w && std::abs(*w) > floor_r) return w;
            }
        }
        return std::nullopt;
    }

    /// Phi(z); throws domain_error ("inside-inner-annulus") for deep interior points.
    [[nodiscard]] cplx phi(cplx z) const
    {
        if (auto w = try_phi(z)) return *w;
        throw domain_error("inside-inner-annulus: no preimage with |w| > r_inner for z = (" + fmt(z.real()) + "," + fmt(z.imag()) + ")");
    }

    /// Phi'(z) = 1 / Psi'(Phi(z)).
    [[nodiscard]] cplx phi_prime(cplx z) const { return 1.0 / psi_prime_unchecked(phi(z)); }

    [[nodiscard]] LevelPoint level_point(double theta, double rho) const
    {
        if (!(rho > r_inner_)) throw domain_error("level curve rho must exceed r_inner");
        return {theta, rho, psi_unchecked(std::polar(rho, theta))};
    }

    /// M equispaced points Psi(rho e^{2 pi i j / M}).
    [[nodiscard]] std::vector<cplx> level_curve(double rho, std::size_t M) const
    {
        if (!(rho > r_inner_)) throw domain_error("level curve rho must exceed r_inner");
        std::vector<cplx> out(M);
        for (std::size_t j = 0; j < M; ++j) out[j] = psi_unchecked(std::polar(rho, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(M)));
        return out;
    }

    [[nodiscard]] std::vector<cplx> boundary(std::size_t M) const { return level_curve(1.0, M); }

    /// True when z lies strictly inside the curve L_rho (winding number test
    /// against a 4096-gon).
    [[nodiscard]] bool inside_level(cplx z, double rho, std::size_t segments = 4096) const
    {
        return winding_number(level_curve(rho, segments), z) != 0;
    }

    [[nodiscard]] bool contains(cplx z) const { return inside_level(z, 1.0); }

    /// Distance from an interior point to the boundary curve L.
    [[nodiscard]] double dist_to_boundary(cplx z0) const
    {
        if (!contains(z0)) throw domain_error("dist_to_boundary: point is not inside the domain");
        constexpr std::size_t grid = 4096;
        const double h = 2.0 * std::numbers::pi / grid;
        auto d = [&](double t) { return std::abs(z0 - psi_unchecked(std::polar(1.0, t))); };
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < grid; ++j) {
            const double v = d(h * static_cast<double>(j));
            if (v < best_d) {
                best_d = v;
                best = j;
            }
        }
        // golden-section on the bracketing cells
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        double lo = h * (static_cast<double>(best) - 1.0), hi = h * (static_cast<double>(best) + 1.0);
        double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
        double f1 = d(x1), f2 = d(x2);
        while (hi - lo > 1e-10) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - invphi * (hi - lo);
                f1 = d(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + invphi * (hi - lo);
                f2 = d(x2);
            }
        }
        return std::min({best_d, f1, f2});
    }

    /// Radius of the largest disk inscribed in the domain and its center.
    [[nodiscard]] std::pair<cplx, double> inradius() const
    {
        const auto bnd = boundary(1024);
        auto dist = [&](cplx z) {
            double m = std::numeric_limits<double>::infinity();
            for (const auto& b : bnd) m = std::min(m, std::abs(z - b));
            return winding_number(bnd, z) != 0 ? m : -1.0;
        };
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& b : bnd) {
            xmin = std::min(xmin, b.real());
            xmax = std::max(xmax, b.real());
            ymin = std::min(ymin, b.imag());
            ymax = std::max(ymax, b.imag());
        }
        cplx best{};
        double best_d = -1.0;
        constexpr int n = 40;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                const cplx z(xmin + (xmax - xmin) * i / n, ymin + (ymax - ymin) * j / n);
                const double v = dist(z);
                if (v > best_d) {
                    best_d = v;
                    best = z;
                }
            }
        double step = std::max(xmax - xmin, ymax - ymin) / n;
        while (step > 1e-9) {
            bool moved = false;
            for (cplx dir : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) {
                const cplx z = best + step * dir;
                const double v = dist(z);
                if (v > best_d) {
                    best_d = v;
                    best = z;
                    moved = true;
                }
            }
            if (!moved) step *= 0.5;
        }
        return {best, dist_to_boundary(best)};
    }

    /// Winding number of a closed polyline around z (Sunday's crossing rule).
    static int winding_number(const std::vector<cplx>& poly, cplx z)
    {
        int wn = 0;
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const cplx a = poly[i], b = poly[(i + 1) % n];
            const double cross = (b.real() - a.real()) * (z.imag() - a.imag()) - (z.real() - a.real()) * (b.imag() - a.imag());
            if (a.imag() <= z.imag()) {
                if (b.imag() > z.imag() && cross > 0) ++wn;
            } else if (b.imag() <= z.imag() && cross < 0) {
                --wn;
            }
        }
        return wn;
    }

    [[nodiscard]] cplx psi_unchecked(cplx w) const { return psi_(w); }

    [[nodiscard]] cplx psi_prime_unchecked(cplx w) const
    {
        cplx s(0.0);
        for (int k = psi_.lo(); k <= psi_.hi(); ++k) {
            if (k == 0) continue;
            s += static_cast<double>(k) * psi_.coeff(k) * LaurentSlice::pow_int(w, k - 1);
        }
        return s;
    }

private:
    ConformalDomain(domain_kind kind, std::vector<double> params, LaurentSlice psi, double r_inner)
        : kind_(kind), params_(std::move(params)), psi_(std::move(psi)), r_inner_(r_inner)
    {
        validate();
    }

    void validate() const
    {
        if (!(capacity() > 0.0)) throw domain_error("capacity must be positive");
        for (double rho : {r_inner_ + 0.05, 1.0, 2.0}) {
            for (int j = 0; j < 256; ++j) {
                const cplx w = std::polar(rho, 2.0 * std::numbers::pi * j / 256.0);
                if (std::abs(psi_prime_unchecked(w)) < 1e-12) throw domain_error("Psi' vanishes on |w| = " + fmt(rho));
            }
        }
    }

    void check_w(cplx w) const
    {
        if (!(std::abs(w) > r_inner_)) throw domain_error("|w| <= r_inner (" + fmt(r_inner_) + ")");
    }

    std::optional<cplx> newton(cplx z, cplx w, double tol) const
    {
        for (int it = 0; it < 100; ++it) {
            if (std::abs(w) < 1e-14) return std::nullopt;
            const cplx f = psi_unchecked(w) - z;
            const cplx fp = psi_prime_unchecked(w);
            if (std::abs(f) <= tol) {
                // one more step: quadratic convergence takes w to full precision
                const cplx last = fp != cplx(0.0) ? w - f / fp : w;
                return detail::finite(last) ? last : w;
            }
            if (std::abs(fp) == 0.0) return std::nullopt;
            cplx step = f / fp;
            // damp huge steps so iterates do not jump across the critical circle
            const double lim = 0.5 * std::max(std::abs(w), 1e-3);
            if (std::abs(step) > lim) step *= lim / std::abs(step);
            w -= step;
            if (!detail::finite(w)) return std::nullopt;
        }
        if (std::abs(psi_unchecked(w) - z) <= tol * 10.0) return w;
        return std::nullopt;
    }

    static std::string fmt(double x)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", x);
        return buf;
    }

    domain_kind kind_;
    std::vector<double> params_;
    LaurentSlice psi_;
    double r_inner_;
};

} // namespace rpz

#endif // RPZ_DOMAIN_HPP
