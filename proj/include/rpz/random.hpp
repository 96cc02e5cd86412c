#ifndef RPZ_RANDOM_HPP
#define RPZ_RANDOM_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "rpz/bases.hpp"
#include "rpz/error.hpp"
#include "rpz/faber.hpp"
#include "rpz/series.hpp"

namespace rpz {

// ---------------------------------------------------------------------------
// Counter-based generator: value i of stream (seed, trial) is a pure function
// of (seed, trial, i), so trials never share state and any draw can be
// regenerated independently.

namespace detail {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Child seed for trial `trial` of a run seeded with `seed`.
constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t trial) noexcept
{
    return detail::mix64(seed ^ detail::mix64(trial ^ 0xD1B54A32D192ED03ULL));
}

class CounterStream {
public:
    explicit constexpr CounterStream(std::uint64_t key) noexcept : key_(key) {}

    [[nodiscard]] constexpr std::uint64_t bits(std::uint64_t i) const noexcept
    {
        return detail::mix64(key_ + (i + 1) * 0x9E3779B97F4A7C15ULL);
    }

    /// Uniform on the open interval (0, 1).
    [[nodiscard]] double uniform(std::uint64_t i) const noexcept
    {
        return (static_cast<double>(bits(i) >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::uint64_t key_;
};

// ---------------------------------------------------------------------------

enum class dist_kind { complex_gaussian, rademacher, uniform_disk, pareto, sym_pareto, inverse_factorial };

/// Coefficient law plus the hypotheses it satisfies.
struct CoefficientDistribution {
    dist_kind kind = dist_kind::complex_gaussian;
    double alpha = 1.0; // Pareto tail index
    bool mean_zero = true;
    bool finite_variance = true;
    bool finite_log_plus = true;
    bool iid = true; // false for deterministic control profiles

    [[nodiscard]] std::string name() const
    {
        switch (kind) {
        case dist_kind::complex_gaussian: return "complex_gaussian";
        case dist_kind::rademacher: return "rademacher";
        case dist_kind::uniform_disk: return "uniform_disk";
        case dist_kind::pareto: return "pareto";
        case dist_kind::sym_pareto: return "sym_pareto";
        case dist_kind::inverse_factorial: return "inverse_factorial";
        }
        return "?";
    }

    [[nodiscard]] bool within_hypotheses() const noexcept { return iid && mean_zero && finite_variance; }
};

/// Registry lookup. `alpha` only matters for the Pareto laws.
inline CoefficientDistribution make_distribution(const std::string& name, double alpha = 1.0)
{
    CoefficientDistribution d;
    if (name == "complex_gaussian") d.kind = dist_kind::complex_gaussian;
    else if (name == "rademacher") d.kind = dist_kind::rademacher;
    else if (name == "uniform_disk") d.kind = dist_kind::uniform_disk;
    else if (name == "pareto" || name == "sym_pareto") {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw domain_error("pareto: alpha > 0 required");
        d.kind = name == "pareto" ? dist_kind::pareto : dist_kind::sym_pareto;
        d.alpha = alpha;
        d.finite_variance = alpha > 2.0;
        d.mean_zero = d.kind == dist_kind::sym_pareto && alpha > 1.0;
        d.finite_log_plus = true;
    } else if (name == "inverse_factorial") {
        d.kind = dist_kind::inverse_factorial;
        d.mean_zero = false;
        d.iid = false;
    } else {
        throw domain_error("unknown distribution '" + name + "'");
    }
    return d;
}

inline const std::vector<std::string>& distribution_names()
{
    static const std::vector<std::string> names{"complex_gaussian", "rademacher", "uniform_disk", "pareto", "sym_pareto", "inverse_factorial"};
    return names;
}

/// A reproducible draw a_0..a_n.
struct CoefficientSample {
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    CoefficientDistribution dist;
    std::vector<cplx> values;
};

/// Draw a_k for k = 0..n. Coefficient k consumes counters 2k and 2k+1 of the
/// trial stream, so a shorter sample is a prefix of a longer one.
inline CoefficientSample sample(const CoefficientDistribution& dist, std::size_t n, std::uint64_t seed, std::uint64_t trial = 0)
{
    const CounterStream s(child_seed(seed, trial));
    CoefficientSample out{seed, trial, dist, std::vector<cplx>(n + 1)};
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double log_fact = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const std::uint64_t c = 2 * k;
        cplx& a = out.values[k];
        switch (dist.kind) {
        case dist_kind::complex_gaussian: {
            // re, im independent N(0, 1/2): E|a|^2 = 1
            const double r = std::sqrt(-std::log(s.uniform(c)));
            a = std::polar(r, two_pi * s.uniform(c + 1));
            break;
        }
        case dist_kind::rademacher: a = (s.bits(c) >> 63) ? 1.0 : -1.0; break;
        case dist_kind::uniform_disk: a = std::polar(std::sqrt(2.0 * s.uniform(c)), two_pi * s.uniform(c + 1)); break;
        case dist_kind::pareto: a = std::pow(s.uniform(c), -1.0 / dist.alpha); break;
        case dist_kind::sym_pareto: {
            const double m = std::pow(s.uniform(c), -1.0 / dist.alpha);
            a = (s.bits(c + 1) >> 63) ? m : -m;
            break;
        }
        case dist_kind::inverse_factorial:
            if (k > 0) log_fact += std::log(static_cast<double>(k));
            a = std::exp(-log_fact);
            break;
        }
    }
    return out;
}

/// Monomial form of sum a_k B_k.
inline Poly assemble(const CoefficientSample& s, const BasisTable& table)
{
    if (s.values.size() > table.size()) throw domain_error("sample longer than basis table");
    std::vector<cplx> c(s.values.size(), 0.0);
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        const auto& p = table.polys()[k];
        for (std::size_t i = 0; i < p.size(); ++i) c[i] += s.values[k] * p.coeffs()[i];
    }
    return Poly(std::move(c));
}

/// Faber-coefficient form of sum a_k B_k (the representation used at large n).
inline FaberExpansion assemble_expansion(const CoefficientSample& s, const BasisTable& table) { return table.combine(s.values); }

struct SequenceSummary {
    double last_quartile_min = 0.0;
    double last_quartile_max = 0.0;
};

/// The three root-test sequences of a coefficient sample, indexed by m = 1..n:
///   nth_root[m]   = |a_m|^{1/m}
///   running_max[m] = (max_{k<=m} |a_k|)^{1/m}
///   window_max[m] = (max_{m - b log m < k <= m} |a_k|)^{1/m}
struct CoefficientStatistics {
    double b = 5.0;
    std::vector<double> nth_root, running_max, window_max;
    SequenceSummary nth_root_summary, running_max_summary, window_max_summary;
};

inline CoefficientStatistics coeff_statistics(const CoefficientSample& s, double b = 5.0)
{
    const auto& a = s.values;
    if (a.size() < 11) throw domain_error("coeff_statistics: n >= 10 required");
    if (std::all_of(a.begin(), a.end(), [](cplx x) { return x == cplx(0.0); }))
        throw domain_error("coeff_statistics: all-zero sample (coefficients must be non-trivial)");
    const std::size_t n = a.size() - 1;
    CoefficientStatistics st;
    st.b = b;
    st.nth_root.assign(n + 1, 0.0);
    st.running_max.assign(n + 1, 0.0);
    st.window_max.assign(n + 1, 0.0);
    double run = std::abs(a[0]);
    for (std::size_t m = 1; m <= n; ++m) {
        const double md = static_cast<double>(m);
        const double e = 1.0 / md;
        run = std::max(run, std::abs(a[m]));
        st.nth_root[m] = std::pow(std::abs(a[m]), e);
        st.running_max[m] = std::pow(run, e);
        const double lo_real = md - b * std::log(md);
        std::size_t lo = lo_real < 0.0 ? 0 : static_cast<std::size_t>(std::floor(lo_real)) + 1;
        lo = std::min(lo, m);
        double w = 0.0;
        for (std::size_t k = lo; k <= m; ++k) w = std::max(w, std::abs(a[k]));
        st.window_max[m] = std::pow(w, e);
    }
    auto summarize = [n](const std::vector<double>& v) {
        SequenceSummary out{1e300, -1e300};
        for (std::size_t m = (3 * n) / 4; m <= n; ++m) {
            if (m == 0) continue;
            out.last_quartile_min = std::min(out.last_quartile_min, v[m]);
            out.last_quartile_max = std::max(out.last_quartile_max, v[m]);
        }
        return out;
    };
    st.nth_root_summary = summarize(st.nth_root);
    st.running_max_summary = summarize(st.running_max);
    st.window_max_summary = summarize(st.window_max);
    return st;
}

} // namespace rpz

#endif // RPZ_RANDOM_HPP
