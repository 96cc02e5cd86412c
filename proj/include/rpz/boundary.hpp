#ifndef RPZ_BOUNDARY_HPP
#define RPZ_BOUNDARY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "rpz/bases.hpp"
#include "rpz/domain.hpp"
#include "rpz/error.hpp"
#include "rpz/faber.hpp"
#include "rpz/fft.hpp"
#include "rpz/random.hpp"
#include "rpz/series.hpp"
#include "rpz/stats.hpp"

namespace rpz {

// ---------------------------------------------------------------------------
// Faber tail E_n = Phi^n - F_n

struct FaberTail {
    cplx value;
    double bound = 0.0; // |Gamma_{r+eps}| (r+eps)^n / (2 pi dist(z, Gamma_{r+eps}))
};

inline FaberTail faber_tail(const ConformalDomain& d, std::size_t n, cplx z, double eps = 0.05)
{
    const double r = d.r_inner() + eps;
    const auto w = d.try_phi(z);
    if (!w || !(std::abs(*w) > r)) throw domain_error("faber_tail: z must lie outside Gamma_{r_inner+eps}");
    const FaberRecurrence rec(d);
    const cplx Fn = rec.values<0>(z, n)[n][0];
    FaberTail t;
    t.value = std::pow(*w, static_cast<int>(n)) - Fn;

    constexpr std::size_t M = 4096;
    const auto curve = d.level_curve(r, M);
    double len = 0.0, dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < M; ++j) {
        len += std::abs(curve[(j + 1) % M] - curve[j]);
        dist = std::min(dist, std::abs(curve[j] - z));
    }
    t.bound = len * std::pow(r, static_cast<double>(n)) / (2.0 * std::numbers::pi * dist);
    // cancellation in Phi^n - F_n costs ~n eps |w|^n
    const double slack = 64.0 * static_cast<double>(n + 1) * std::numeric_limits<double>::epsilon() * std::max(1.0, std::pow(std::abs(*w), static_cast<double>(n)));
    if (std::abs(t.value) > t.bound + slack)
        throw numerical_error("faber_tail: |E_" + std::to_string(n) + "| exceeds the contour bound");
    return t;
}

// ---------------------------------------------------------------------------
// Carleman split of a Bergman series

struct CarlemanSplit {
    cplx main;      // sum a_n sqrt((n+1)/pi) Phi^n Phi'
    cplx remainder; // sum a_n sqrt((n+1)/pi) Phi^n Phi' e_n
    cplx direct;    // sum a_n B_n, evaluated independently
    std::vector<cplx> remainder_partial;
    double cauchy_gap = 0.0; // sup |S_j - S_k| over the last quartile of partial sums
};

inline CarlemanSplit carleman_split(const BasisTable& table, const CoefficientSample& s, cplx z, std::size_t N)
{
    if (table.family() != basis_family::bergman) throw domain_error("carleman_split: Bergman basis required");
    if (N >= s.values.size() || N > table.max_degree()) throw domain_error("carleman_split: N exceeds the sample or the table");
    const auto& d = table.domain();
    const auto w = d.try_phi(z);
    if (!w) throw domain_error("carleman_split: Phi cannot be continued to z");
    const cplx dphi = 1.0 / d.psi_prime_unchecked(*w);

    CarlemanSplit out;
    out.remainder_partial.resize(N + 1);
    cplx wn = 1.0;
    for (std::size_t n = 0; n <= N; ++n) {
        const cplx m = std::sqrt(static_cast<double>(n + 1) / std::numbers::pi) * wn * dphi;
        const cplx b = table.eval(n, z);
        out.main += s.values[n] * m;
        out.remainder += s.values[n] * (b - m);
        out.remainder_partial[n] = out.remainder;
        wn *= *w;
    }
    out.direct = table.combine(std::span<const cplx>(s.values.data(), N + 1))(z);
    const std::size_t q0 = (3 * N) / 4;
    for (std::size_t j = q0; j <= N; ++j)
        for (std::size_t k = j + 1; k <= N; ++k)
            out.cauchy_gap = std::max(out.cauchy_gap, std::abs(out.remainder_partial[k] - out.remainder_partial[j]));
    return out;
}

// ---------------------------------------------------------------------------
// Taylor radius at an interior center

struct RadiusOptions {
    std::size_t K = 60;
    std::size_t M = 4096;
    double circle_fraction = 0.8; // quadrature radius / dist(z0, L)
    double noise_floor = 1e-13;   // relative to max |f| on the circle
};

struct RadiusEstimate {
    cplx center;
    std::vector<double> taylor_norms;
    double radius_est = 0.0;
    double dist_to_L = 0.0;
    bool no_singularity = false; // top-quartile coefficients below the noise floor
};

/// Convergence radius of the Taylor series of f at z0 by the root test on
/// Cauchy-quadrature coefficients (median of |c_k|^{-1/k}, top quartile).
template <class F>
RadiusEstimate taylor_radius(F&& f, cplx z0, const ConformalDomain& d, const RadiusOptions& opt = {})
{
    if (!d.contains(z0)) throw domain_error("taylor_radius: center must lie inside G");
    if (opt.K < 4) throw domain_error("taylor_radius: K >= 4 required");
    if (opt.M < 2 * opt.K + 2) throw domain_error("taylor_radius: M too small for K");
    RadiusEstimate e;
    e.center = z0;
    e.dist_to_L = d.dist_to_boundary(z0);
    const double rq = opt.circle_fraction * e.dist_to_L;
    if (!(opt.circle_fraction > 0.0 && opt.circle_fraction < 1.0)) throw domain_error("taylor_radius: quadrature circle must stay inside G");

    std::vector<cplx> v(opt.M);
    double fmax = 0.0;
    for (std::size_t j = 0; j < opt.M; ++j) {
        v[j] = f(z0 + std::polar(rq, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(opt.M)));
        fmax = std::max(fmax, std::abs(v[j]));
    }
    const auto X = detail::dft(std::move(v));
    e.taylor_norms.resize(opt.K + 1);
    const double floor_abs = opt.noise_floor * fmax;
    std::vector<double> roots;
    std::size_t below = 0;
    const std::size_t k0 = (3 * opt.K + 3) / 4;
    for (std::size_t k = 0; k <= opt.K; ++k) {
        const double scaled = std::abs(X[k]) / static_cast<double>(opt.M); // |c_k| rq^k
        e.taylor_norms[k] = scaled / std::pow(rq, static_cast<double>(k));
        if (k < k0) continue;
        if (!(scaled > floor_abs)) {
            ++below;
            continue;
        }
        roots.push_back(rq * std::pow(scaled, -1.0 / static_cast<double>(k)));
    }
    const double ceiling = rq * std::pow(opt.noise_floor, -1.0 / static_cast<double>(opt.K));
    if (2 * below > opt.K + 1 - k0 || roots.empty()) {
        e.no_singularity = true;
        e.radius_est = ceiling;
    } else {
        e.radius_est = std::min(stats::median(roots), ceiling);
    }
    return e;
}

inline RadiusEstimate taylor_radius(const Poly& p, cplx z0, const ConformalDomain& d, const RadiusOptions& opt = {})
{
    return taylor_radius([&](cplx z) { return p(z); }, z0, d, opt);
}

inline RadiusEstimate taylor_radius(const FaberExpansion& p, cplx z0, const ConformalDomain& d, const RadiusOptions& opt = {})
{
    return taylor_radius([&](cplx z) { return p(z); }, z0, d, opt);
}

// ---------------------------------------------------------------------------

struct EvidenceRow {
    cplx center;
    double dist = 0.0;
    double radius_est = 0.0;
    double ratio = 0.0;
    bool in_band = false;
    bool no_singularity = false;
};

struct BoundaryEvidence {
    std::vector<EvidenceRow> rows;
    double fraction_in_band = 0.0;
    double band_lo = 0.8, band_hi = 1.2;
    bool consistent = false; // fraction_in_band >= 0.8

    [[nodiscard]] std::string verdict() const
    {
        return consistent ? "consistent with natural boundary" : "inconsistent with natural boundary";
    }
};

struct EvidenceOptions {
    std::size_t N = 600;
    std::size_t centers = 20;
    double dist_lo = 0.1, dist_hi = 0.6; // fractions of the inradius
    double band_lo = 0.8, band_hi = 1.2;
    double pass_fraction = 0.8;
    RadiusOptions radius;
};

/// Seeded interior centers with dist(z, L) in [lo, hi] * inradius.
inline std::vector<cplx> evidence_centers(const ConformalDomain& d, std::size_t count, std::uint64_t seed, double lo, double hi)
{
    const auto bnd = d.boundary(1024);
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (cplx z : bnd) {
        x0 = std::min(x0, z.real());
        x1 = std::max(x1, z.real());
        y0 = std::min(y0, z.imag());
        y1 = std::max(y1, z.imag());
    }
    const double rin = d.inradius().second;
    const CounterStream s(child_seed(seed, 0xCE27E5ULL));
    std::vector<cplx> out;
    for (std::uint64_t i = 0; out.size() < count; i += 2) {
        if (i > 2'000'000) throw numerical_error("evidence_centers: could not place centers");
        const cplx z(x0 + (x1 - x0) * s.uniform(i), y0 + (y1 - y0) * s.uniform(i + 1));
        if (!d.contains(z)) continue;
        const double dist = d.dist_to_boundary(z);
        if (dist >= lo * rin && dist <= hi * rin) out.push_back(z);
    }
    return out;
}

/// Radius/dist ratios of f_N = sum_{k<N} a_k B_k at seeded interior centers.
/// The centers depend on `seed` only; `trial` selects the coefficient stream.
inline BoundaryEvidence boundary_evidence(const BasisTable& table, const CoefficientDistribution& dist, std::uint64_t seed, const EvidenceOptions& opt = {}, std::uint64_t trial = 0)
{
    if (!dist.finite_log_plus) throw domain_error("boundary_evidence: distribution must have E log+|a| finite");
    if (opt.N < 3 * opt.radius.K) throw domain_error("boundary_evidence: N >= 3K required");
    const auto s = sample(dist, opt.N - 1, seed, trial);
    const auto f = table.combine(s.values);
    const auto& d = table.domain();
    const auto centers = evidence_centers(d, opt.centers, seed, opt.dist_lo, opt.dist_hi);
    BoundaryEvidence ev;
    ev.band_lo = opt.band_lo;
    ev.band_hi = opt.band_hi;
    std::size_t hits = 0;
    for (cplx c : centers) {
        const auto e = taylor_radius([&](cplx z) { return f(z); }, c, d, opt.radius);
        EvidenceRow row{c, e.dist_to_L, e.radius_est, e.radius_est / e.dist_to_L, false, e.no_singularity};
        row.in_band = !row.no_singularity && row.ratio >= opt.band_lo && row.ratio <= opt.band_hi;
        hits += row.in_band ? 1 : 0;
        ev.rows.push_back(row);
    }
    ev.fraction_in_band = static_cast<double>(hits) / static_cast<double>(centers.size());
    ev.consistent = ev.fraction_in_band >= opt.pass_fraction;
    return ev;
}

/// Summary CSV: one row per center.
inline void write_evidence_csv(std::ostream& os, const BoundaryEvidence& ev)
{
    os << "center_re,center_im,dist,radius_est,ratio,in_band,no_singularity\n";
    char buf[160];
    for (const auto& r : ev.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n", r.center.real(), r.center.imag(), r.dist, r.radius_est, r.ratio, r.in_band ? 1 : 0, r.no_singularity ? 1 : 0);
        os << buf;
    }
}

} // namespace rpz

#endif // RPZ_BOUNDARY_HPP
