#ifndef RPZ_EXPERIMENT_RUN_HPP
#define RPZ_EXPERIMENT_RUN_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "rpz/bases.hpp"
#include "rpz/boundary.hpp"
#include "rpz/domain.hpp"
#include "rpz/error.hpp"
#include "rpz/experiment/config.hpp"
#include "rpz/potential.hpp"
#include "rpz/random.hpp"
#include "rpz/roots.hpp"
#include "rpz/stats.hpp"

#ifndef RPZ_VERSION
#define RPZ_VERSION "0.0.0"
#endif

namespace rpz::experiment {

using json = nlohmann::ordered_json;

enum exit_code : int { exit_pass = 0, exit_assertion = 1, exit_config = 2, exit_numerical = 3 };

struct Assertion {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunResult {
    int exit_code = exit_pass;
    std::vector<Assertion> assertions;
    std::vector<std::string> files; // written, in order
    json manifest;
    std::string error;              // set on a numerical failure

    [[nodiscard]] std::vector<Assertion> failures() const
    {
        std::vector<Assertion> out;
        for (const auto& a : assertions)
            if (!a.passed) out.push_back(a);
        return out;
    }
};

// ---------------------------------------------------------------------------
// utilities

/// RPZ_THREADS if set (a positive integer), else the hardware concurrency.
inline unsigned thread_count()
{
    if (const char* env = std::getenv("RPZ_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1 || v > 4096) throw config_error("RPZ_THREADS must be a positive integer, got '" + std::string(env) + "'");
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(0..count-1) on up to `threads` workers. If any call throws, the
/// exception of the lowest failing index is rethrown.
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn)
{
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw error("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

inline std::string utc_now()
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// CSV text with numbers at 17 significant digits.
class Csv {
public:
    explicit Csv(std::initializer_list<std::string> header)
    {
        bool first = true;
        for (const auto& h : header) {
            body_ += first ? "" : ",";
            body_ += h;
            first = false;
        }
        body_ += "\n";
    }

    Csv& operator<<(const std::string& s)
    {
        sep();
        body_ += s;
        return *this;
    }
    Csv& operator<<(const char* s) { return *this << std::string(s); }
    Csv& operator<<(double x)
    {
        sep();
        if (std::isnan(x)) body_ += "NA";
        else if (std::isinf(x)) body_ += x > 0 ? "inf" : "-inf";
        else body_ += detail::g17(x);
        return *this;
    }
    Csv& operator<<(std::optional<double> x) { return x ? *this << *x : *this << "NA"; }
    Csv& operator<<(std::uint64_t x) { return *this << std::to_string(x); }
    Csv& operator<<(int x) { return *this << std::to_string(x); }
    Csv& operator<<(bool b) { return *this << (b ? "1" : "0"); }

    void end_row()
    {
        body_ += "\n";
        fresh_ = true;
    }

    [[nodiscard]] const std::string& str() const noexcept { return body_; }

private:
    void sep()
    {
        if (!fresh_) body_ += ",";
        fresh_ = false;
    }
    std::string body_;
    bool fresh_ = true;
};

/// Everything an experiment produces before it is written out.
struct Outputs {
    std::string main_csv;
    std::vector<std::pair<std::string, std::string>> plots;
    json summary = json::object();
    std::vector<Assertion> assertions;
    std::vector<std::string> notes;

    void check(std::string name, bool ok, std::string detail) { assertions.push_back({std::move(name), ok, std::move(detail)}); }
};

namespace run_detail {

inline std::string fam_name(basis_family f) { return to_string(f); }

inline BasisTable table_for(const ExperimentConfig& c, const ConformalDomain& d, basis_family f, std::size_t N)
{
    if (f == basis_family::faber) return build_faber(d, N);
    BuildOptions opt;
    opt.precision = c.precision;
    return build_basis(d, f, N, opt);
}

inline std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

/// Median of the finite entries; NaN when there are none.
inline double median_finite(const std::vector<double>& v)
{
    std::vector<double> f;
    for (double x : v)
        if (std::isfinite(x)) f.push_back(x);
    return f.empty() ? std::numeric_limits<double>::quiet_NaN() : stats::median(f);
}

inline double quantile_finite(const std::vector<double>& v, double q)
{
    std::vector<double> f;
    for (double x : v)
        if (std::isfinite(x)) f.push_back(x);
    return f.empty() ? std::numeric_limits<double>::quiet_NaN() : stats::quantile(f, q);
}

/// Seeded-trend check: median at the largest n strictly below the median at the smallest n.
inline void trend(Outputs& o, const std::string& name, double at_lo, double at_hi, std::size_t n_lo, std::size_t n_hi)
{
    const bool ok = std::isfinite(at_lo) && std::isfinite(at_hi) && at_hi < at_lo;
    o.check(name, ok, "median at n=" + std::to_string(n_hi) + " is " + fmt(at_hi) + (ok ? " < " : " not < ") + fmt(at_lo) + " at n=" + std::to_string(n_lo));
}

inline std::string annotate(const std::string& what, const std::string& fam, std::uint64_t trial, std::size_t n)
{
    return what + " [family " + fam + ", trial " + std::to_string(trial) + ", n " + std::to_string(n) + "]";
}

inline std::string polyline_csv(const ConformalDomain& d)
{
    Csv csv{"re", "im"};
    const auto b = d.boundary(1024);
    for (std::size_t j = 0; j <= b.size(); ++j) {
        const cplx z = b[j % b.size()];
        csv << z.real() << z.imag();
        csv.end_row();
    }
    return csv.str();
}

// ---------------------------------------------------------------------------
// zeros / deriv / grothmann

struct ZeroRow {
    DiscrepancyReport rep;
    double worst_residual = 0.0;
    VietaGap vieta;
    int iterations = 0;
    std::size_t degree = 0;
    std::vector<cplx> roots;
};

inline Outputs zeros_like(const ExperimentConfig& c, unsigned threads)
{
    const auto d = c.domain.build();
    const auto dist = c.dist();
    const bool deriv = c.experiment == "deriv";
    const bool groth = c.experiment == "grothmann";
    const std::size_t F = c.families.size(), NN = c.n_list.size(), T = c.trials;
    const std::size_t n_lo = c.n_min(), n_hi = c.n_max();
    const std::size_t markov_max = deriv ? *std::max_element(c.deriv.markov_n_list.begin(), c.deriv.markov_n_list.end()) : 0;

    std::vector<BasisTable> tables;
    for (auto f : c.families) tables.push_back(table_for(c, d, f, std::max(n_hi, markov_max)));

    DiscrepancyProbes probes;
    probes.rho_K = c.zeros.rho_K;
    probes.R = c.zeros.R;
    probes.probe_points = c.zeros.probe_points;
    probes.boundary_points = c.zeros.boundary_points;
    probes.grid_tol = c.zeros.grid_tol;

    const std::size_t plot_trials = std::min<std::size_t>(T, 10);
    std::vector<ZeroRow> rows(F * NN * T);
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        const std::size_t f = i / (NN * T), ni = (i / T) % NN, t = i % T;
        const std::size_t n = c.n_list[ni];
        try {
            const auto P = assemble_expansion(sample(dist, n, c.seed, t), tables[f]);
            const auto target = deriv ? P.derivative() : P;
            const auto zs = find_roots(target, d);
            ZeroRow& r = rows[i];
            r.rep = discrepancy(zs, d, target, probes);
            r.worst_residual = zs.worst_residual();
            r.vieta = zs.vieta;
            r.iterations = zs.iterations;
            r.degree = zs.size();
            if (n == n_hi && t < plot_trials) r.roots = zs.roots;
        } catch (const error& e) {
            throw numerical_error(annotate(e.what(), fam_name(c.families[f]), t, n));
        }
    });

    Outputs o;
    Csv csv = groth ? Csv{"family", "domain", "n", "trial", "sup_norm_root", "interior_mass", "green_gap_max"}
                    : Csv{"family", "domain", "n", "trial", "degree", "ks_angle", "interior_mass", "excluded_mass", "assigned_mass", "lognorm_dev",
                          "green_gap_max", "sup_norm_root", "worst_residual", "vieta_sum", "vieta_product", "iterations"};
    const std::string dom = d.describe();
    for (std::size_t f = 0; f < F; ++f)
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t ni = 0; ni < NN; ++ni) {
                const auto& r = rows[(f * NN + ni) * T + t];
                csv << fam_name(c.families[f]) << dom << static_cast<std::uint64_t>(c.n_list[ni]) << static_cast<std::uint64_t>(t);
                if (groth) {
                    csv << r.rep.sup_norm_E_root << r.rep.interior_mass << r.rep.lognorm_gap_max;
                } else {
                    csv << static_cast<std::uint64_t>(r.degree) << r.rep.ks_angle << r.rep.interior_mass << r.rep.excluded_mass << r.rep.assigned_mass
                        << r.rep.lognorm_dev << r.rep.lognorm_gap_max << r.rep.sup_norm_E_root << r.worst_residual << r.vieta.sum << r.vieta.product
                        << r.iterations;
                }
                csv.end_row();
            }
    o.main_csv = csv.str();

    // per-(family, n) medians
    for (std::size_t f = 0; f < F; ++f) {
        const auto fam = fam_name(c.families[f]);
        json fj = json::object();
        std::vector<double> med_ks(NN), med_in(NN), med_ln(NN), med_sup(NN), med_gap(NN);
        Csv ks_plot{"n", "median_ks", "q1", "q3"};
        for (std::size_t ni = 0; ni < NN; ++ni) {
            std::vector<double> ks, in, ln, sup, gap;
            std::size_t na = 0;
            for (std::size_t t = 0; t < T; ++t) {
                const auto& r = rows[(f * NN + ni) * T + t].rep;
                if (r.ks_angle) ks.push_back(*r.ks_angle);
                else ++na;
                in.push_back(r.interior_mass);
                ln.push_back(r.lognorm_dev);
                sup.push_back(r.sup_norm_E_root);
                gap.push_back(std::abs(r.lognorm_gap_max));
            }
            med_ks[ni] = median_finite(ks);
            med_in[ni] = median_finite(in);
            med_ln[ni] = median_finite(ln);
            med_sup[ni] = median_finite(sup);
            med_gap[ni] = median_finite(gap);
            fj[std::to_string(c.n_list[ni])] = {{"median_ks", med_ks[ni]},
                                                {"q1_ks", quantile_finite(ks, 0.25)},
                                                {"q3_ks", quantile_finite(ks, 0.75)},
                                                {"ks_unassigned_trials", na},
                                                {"median_interior_mass", med_in[ni]},
                                                {"median_lognorm_dev", med_ln[ni]},
                                                {"median_sup_norm_root", med_sup[ni]},
                                                {"median_abs_green_gap", med_gap[ni]}};
            ks_plot << static_cast<std::uint64_t>(c.n_list[ni]) << med_ks[ni] << quantile_finite(ks, 0.25) << quantile_finite(ks, 0.75);
            ks_plot.end_row();
        }
        o.summary[fam] = fj;
        if (!groth) o.plots.emplace_back("plot_ks_vs_n_" + fam + ".csv", ks_plot.str());

        const auto lo = static_cast<std::size_t>(std::min_element(c.n_list.begin(), c.n_list.end()) - c.n_list.begin());
        const auto hi = static_cast<std::size_t>(std::max_element(c.n_list.begin(), c.n_list.end()) - c.n_list.begin());
        if (n_lo == n_hi) {
            o.notes.push_back(fam + ": a single degree in n_list, no trend assertions");
        } else if (groth) {
            std::vector<double> sup_dev(NN);
            for (std::size_t ni = 0; ni < NN; ++ni) sup_dev[ni] = std::max(0.0, med_sup[ni] - 1.0);
            trend(o, fam + ": sup-norm root excess over 1 decreases", sup_dev[lo], sup_dev[hi], n_lo, n_hi);
            trend(o, fam + ": interior mass decreases", med_in[lo], med_in[hi], n_lo, n_hi);
            trend(o, fam + ": exterior Green gap decreases", med_gap[lo], med_gap[hi], n_lo, n_hi);
        } else {
            const std::string what = deriv ? "derivative " : "";
            trend(o, fam + ": " + what + "ks_angle decreases", med_ks[lo], med_ks[hi], n_lo, n_hi);
            trend(o, fam + ": " + what + "interior mass decreases", med_in[lo], med_in[hi], n_lo, n_hi);
            trend(o, fam + ": " + what + "lognorm deviation decreases", med_ln[lo], med_ln[hi], n_lo, n_hi);
        }

        if (!groth) {
            Csv sc{"trial", "re", "im"};
            for (std::size_t t = 0; t < plot_trials; ++t)
                for (cplx z : rows[(f * NN + hi) * T + t].roots) {
                    sc << static_cast<std::uint64_t>(t) << z.real() << z.imag();
                    sc.end_row();
                }
            o.plots.emplace_back("plot_zeros_" + fam + ".csv", sc.str());
        }
    }
    o.plots.emplace_back("plot_boundary_polyline.csv", polyline_csv(d));

    if (deriv) {
        const auto& ml = c.deriv.markov_n_list;
        const std::size_t MT = c.deriv.markov_trials;
        std::vector<double> ratios(F * ml.size() * MT);
        parallel_for(ratios.size(), threads, [&](std::size_t i) {
            const std::size_t f = i / (ml.size() * MT), ni = (i / MT) % ml.size(), t = i % MT;
            try {
                ratios[i] = markov_bernstein_ratio(assemble_expansion(sample(dist, ml[ni], c.seed, t), tables[f]), d, c.zeros.grid_tol);
            } catch (const error& e) {
                throw numerical_error(annotate(e.what(), fam_name(c.families[f]), t, ml[ni]));
            }
        });
        for (std::size_t f = 0; f < F; ++f) {
            const auto fam = fam_name(c.families[f]);
            std::vector<double> x, y;
            for (std::size_t ni = 0; ni < ml.size(); ++ni)
                for (std::size_t t = 0; t < MT; ++t) {
                    x.push_back(std::log(static_cast<double>(ml[ni])));
                    y.push_back(std::log(ratios[(f * ml.size() + ni) * MT + t]));
                }
            const double slope = stats::fit_line(x, y).slope;
            Csv mb{"n", "trial", "ratio", "fitted_exponent"};
            for (std::size_t ni = 0; ni < ml.size(); ++ni)
                for (std::size_t t = 0; t < MT; ++t) {
                    mb << static_cast<std::uint64_t>(ml[ni]) << static_cast<std::uint64_t>(t) << ratios[(f * ml.size() + ni) * MT + t] << slope;
                    mb.end_row();
                }
            o.plots.emplace_back("plot_markov_bernstein_" + fam + ".csv", mb.str());
            o.summary[fam]["markov_bernstein_exponent"] = slope;
            o.check(fam + ": Markov-Bernstein exponent", slope <= c.deriv.max_exponent,
                    "fitted exponent " + fmt(slope) + (slope <= c.deriv.max_exponent ? " <= " : " > ") + fmt(c.deriv.max_exponent));
        }
    }
    return o;
}

// ---------------------------------------------------------------------------
// coeffs

inline Outputs coeffs(const ExperimentConfig& c, unsigned threads)
{
    const auto dist = c.dist();
    const std::size_t N = c.n_max(), T = c.trials, B = c.coeffs.b_list.size();
    std::vector<CoefficientStatistics> st(T * B);
    parallel_for(st.size(), threads, [&](std::size_t i) {
        const std::size_t t = i / B, bi = i % B;
        try {
            st[i] = coeff_statistics(sample(dist, N, c.seed, t), c.coeffs.b_list[bi]);
        } catch (const error& e) {
            throw numerical_error(annotate(e.what(), "-", t, N));
        }
    });

    Outputs o;
    Csv csv{"trial", "n", "b", "nth_root_lq_min", "nth_root_lq_max", "running_max_lq_min", "running_max_lq_max", "window_max_lq_min", "window_max_lq_max"};
    for (std::size_t i = 0; i < st.size(); ++i) {
        const auto& s = st[i];
        csv << static_cast<std::uint64_t>(i / B) << static_cast<std::uint64_t>(N) << s.b << s.nth_root_summary.last_quartile_min << s.nth_root_summary.last_quartile_max
            << s.running_max_summary.last_quartile_min << s.running_max_summary.last_quartile_max << s.window_max_summary.last_quartile_min
            << s.window_max_summary.last_quartile_max;
        csv.end_row();
    }
    o.main_csv = csv.str();

    Csv plot{"m", "nth_root", "running_max", "window_max"};
    for (std::size_t m = 1; m <= N; ++m) {
        plot << static_cast<std::uint64_t>(m) << st[0].nth_root[m] << st[0].running_max[m] << st[0].window_max[m];
        plot.end_row();
    }
    o.plots.emplace_back("plot_coeffs.csv", plot.str());

    for (std::size_t bi = 0; bi < B; ++bi) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t t = 0; t < T; ++t) {
            lo = std::min(lo, st[t * B + bi].window_max_summary.last_quartile_min);
            hi = std::max(hi, st[t * B + bi].window_max_summary.last_quartile_max);
        }
        o.summary["window_max_b_" + detail::g17(c.coeffs.b_list[bi])] = {{"last_quartile_min", lo}, {"last_quartile_max", hi}};
    }

    if (dist.kind == dist_kind::rademacher) {
        bool ones = true;
        for (const auto& s : st)
            for (std::size_t m = 1; m <= N; ++m) ones = ones && s.nth_root[m] == 1.0 && s.running_max[m] == 1.0 && s.window_max[m] == 1.0;
        o.check("rademacher sequences are identically 1", ones, ones ? "all three sequences equal 1 for every m, b and trial" : "some entry differs from 1");
    } else if (dist.iid) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t t = 0; t < T; ++t) {
            lo = std::min(lo, st[t * B].running_max_summary.last_quartile_min);
            hi = std::max(hi, st[t * B].running_max_summary.last_quartile_max);
        }
        const bool ok = lo >= c.coeffs.band_lo && hi <= c.coeffs.band_hi;
        o.summary["running_max"] = {{"last_quartile_min", lo}, {"last_quartile_max", hi}};
        o.check("running-max root in band over the last quartile", ok,
                "[" + fmt(lo) + ", " + fmt(hi) + "] " + (ok ? "within" : "outside") + " [" + fmt(c.coeffs.band_lo) + ", " + fmt(c.coeffs.band_hi) + "]");
    } else {
        o.notes.push_back("deterministic control profile: no coefficient assertions");
    }
    return o;
}

// ---------------------------------------------------------------------------
// recover

inline Outputs recover(const ExperimentConfig& c, unsigned threads)
{
    const auto d = c.domain.build();
    const auto dist = c.dist();
    const std::size_t F = c.families.size(), NN = c.n_list.size(), T = c.trials;
    std::vector<BasisTable> tables;
    for (auto f : c.families) tables.push_back(table_for(c, d, f, c.n_max()));
    RecoveryOptions ro;
    ro.R = c.recover.R;
    ro.M = c.recover.M;
    ro.tol = c.recover.tol;

    std::vector<std::pair<double, double>> err(F * NN * T);
    parallel_for(err.size(), threads, [&](std::size_t i) {
        const std::size_t f = i / (NN * T), ni = (i / T) % NN, t = i % T;
        const std::size_t n = c.n_list[ni];
        try {
            const auto s = sample(dist, n, c.seed, t);
            const auto a = peel_coefficients(assemble_expansion(s, tables[f]), tables[f], n, ro);
            double worst = 0.0;
            for (std::size_t k = 0; k <= n; ++k) worst = std::max(worst, std::abs(a[k] - s.values[k]));
            err[i] = {worst, std::abs(a[n] - s.values[n])};
        } catch (const error& e) {
            throw numerical_error(annotate(e.what(), fam_name(c.families[f]), t, n));
        }
    });

    Outputs o;
    Csv csv{"family", "domain", "n", "trial", "max_error", "top_error"};
    const std::string dom = d.describe();
    for (std::size_t f = 0; f < F; ++f) {
        double worst = 0.0;
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t ni = 0; ni < NN; ++ni) {
                const auto& e = err[(f * NN + ni) * T + t];
                csv << fam_name(c.families[f]) << dom << static_cast<std::uint64_t>(c.n_list[ni]) << static_cast<std::uint64_t>(t) << e.first << e.second;
                csv.end_row();
                worst = std::max(worst, e.first);
            }
        const auto fam = fam_name(c.families[f]);
        o.summary[fam] = {{"max_error", worst}};
        o.check(fam + ": peeled coefficients recovered", worst <= c.recover.max_error,
                "max error " + fmt(worst) + (worst <= c.recover.max_error ? " <= " : " > ") + fmt(c.recover.max_error));
    }
    o.main_csv = csv.str();
    return o;
}

// ---------------------------------------------------------------------------
// boundary

inline Outputs boundary(const ExperimentConfig& c, unsigned threads)
{
    const auto d = c.domain.build();
    const auto dist = c.dist();
    const bool is_control = !dist.iid;
    const auto control = make_distribution("inverse_factorial");
    const std::size_t F = c.families.size(), T = c.trials;

    EvidenceOptions eo;
    eo.N = c.boundary.N;
    eo.centers = c.boundary.centers;
    eo.dist_lo = c.boundary.dist_lo;
    eo.dist_hi = c.boundary.dist_hi;
    eo.band_lo = c.boundary.band_lo;
    eo.band_hi = c.boundary.band_hi;
    eo.pass_fraction = c.boundary.pass_fraction;
    eo.radius.K = c.boundary.K;
    eo.radius.M = c.boundary.M;
    eo.radius.circle_fraction = c.boundary.circle_fraction;
    eo.radius.noise_floor = c.boundary.noise_floor;

    std::vector<BasisTable> tables;
    for (auto f : c.families) tables.push_back(table_for(c, d, f, eo.N - 1));

    // per family: T runs of the configured law, then one control run
    const bool add_control = !is_control && c.boundary.control;
    const std::size_t per = T + (add_control ? 1 : 0);
    std::vector<BoundaryEvidence> ev(F * per);
    parallel_for(ev.size(), threads, [&](std::size_t i) {
        const std::size_t f = i / per, k = i % per;
        const bool ctl = k == T;
        try {
            ev[i] = boundary_evidence(tables[f], ctl ? control : dist, c.seed, eo, ctl ? 0 : k);
        } catch (const error& e) {
            throw numerical_error(annotate(e.what(), fam_name(c.families[f]), ctl ? 0 : k, eo.N));
        }
    });

    Outputs o;
    Csv csv{"family", "domain", "profile", "trial", "center_re", "center_im", "dist", "radius_est", "ratio", "in_band", "no_singularity"};
    const std::string dom = d.describe();
    const double control_max = 1.0 - c.boundary.pass_fraction;
    for (std::size_t f = 0; f < F; ++f) {
        const auto fam = fam_name(c.families[f]);
        Csv plot{"profile", "trial", "center_re", "center_im", "ratio"};
        json fj = json::array();
        for (std::size_t k = 0; k < per; ++k) {
            const auto& e = ev[f * per + k];
            const bool ctl = is_control || k == T;
            const std::string profile = ctl ? "control" : "primary";
            const std::uint64_t trial = k == T ? 0 : k;
            for (const auto& r : e.rows) {
                csv << fam << dom << profile << trial << r.center.real() << r.center.imag() << r.dist << r.radius_est << r.ratio << r.in_band << r.no_singularity;
                csv.end_row();
                plot << profile << trial << r.center.real() << r.center.imag() << r.ratio;
                plot.end_row();
            }
            fj.push_back({{"profile", profile}, {"trial", trial}, {"fraction_in_band", e.fraction_in_band}, {"verdict", e.verdict()}});
            const std::string label = fam + " " + profile + (ctl ? "" : " trial " + std::to_string(trial));
            if (ctl) {
                const bool ok = e.fraction_in_band < control_max;
                o.check(label + ": control rejected", ok,
                        fmt(e.fraction_in_band) + " in band; " + (ok ? "control behaved as entire" : "control did not behave as entire"));
            } else {
                o.check(label + ": natural-boundary evidence", e.consistent, fmt(e.fraction_in_band) + " in band; " + e.verdict());
            }
        }
        o.summary[fam] = fj;
        o.plots.emplace_back("plot_boundary_ratio_" + fam + ".csv", plot.str());
    }
    o.plots.emplace_back("plot_boundary_polyline.csv", polyline_csv(d));
    o.main_csv = csv.str();
    return o;
}

// ---------------------------------------------------------------------------
// basis

inline Outputs basis(const ExperimentConfig& c, unsigned threads)
{
    const auto d = c.domain.build();
    const std::size_t N = c.n_max();
    std::vector<std::optional<BasisTable>> tables(c.families.size());
    parallel_for(tables.size(), threads, [&](std::size_t f) { tables[f] = table_for(c, d, c.families[f], N); });

    Outputs o;
    Csv csv{"family", "domain", "n", "quantity", "value"};
    Csv dev_plot{"rho", "n", "max_dev", "fitted_slope"};
    const std::string dom = d.describe();
    const auto& a = c.asymptotics;
    auto row = [&](const std::string& fam, std::size_t n, const char* q, double v) {
        csv << fam << dom << static_cast<std::uint64_t>(n) << q << v;
        csv.end_row();
    };
    std::vector<std::size_t> n_pos;
    for (std::size_t n : c.n_list)
        if (n >= 1) n_pos.push_back(n);

    for (std::size_t f = 0; f < c.families.size(); ++f) {
        const auto& t = *tables[f];
        const auto fam = fam_name(c.families[f]);
        json fj = json::object();
        const double gr = t.meta().gram_residual;
        if (c.families[f] == basis_family::faber) {
            row(fam, N, "faber_oracle_gap", gr);
            o.check(fam + ": recurrence agrees with reversion", gr <= 1e-9, "gap " + fmt(gr));
        } else {
            row(fam, N, "gram_residual", gr);
            o.check(fam + ": Gram residual", gr <= 1e-8, "residual " + fmt(gr) + " (" + t.meta().method + ", " + t.meta().precision + ")");
        }
        fj["gram_or_oracle"] = gr;

        if (c.families[f] == basis_family::bergman) {
            const bool ext = c.precision == precision_mode::extended;
            auto check = [&](double rho) { return ext ? check_bergman_asymptotics_extended<100>(d, rho, c.n_list) : check_bergman_asymptotics(t, rho, c.n_list); };
            const auto out = check(a.rho_out);
            const double floor = ext ? 1e-90 : 1e-12; // rounding level of the deviations
            bool mono = true;
            for (std::size_t i = 0; i < out.rows.size(); ++i) {
                row(fam, out.rows[i].n, "bergman_dev_outside", out.rows[i].max_dev);
                dev_plot << a.rho_out << static_cast<std::uint64_t>(out.rows[i].n) << out.rows[i].max_dev << out.power_slope;
                dev_plot.end_row();
                if (i > 0) mono = mono && (out.rows[i].max_dev < out.rows[i - 1].max_dev || out.rows[i].max_dev <= floor);
            }
            o.check(fam + ": asymptotic deviation decreases outside", mono, "rho " + fmt(a.rho_out) + ", regime " + out.regime + (ext ? " (100 digits)" : ""));
            fj["power_slope_outside"] = out.power_slope;
            if (a.rho_in > d.r_inner()) {
                const auto in = check(a.rho_in);
                bool exact = true;
                for (const auto& r : in.rows) {
                    row(fam, r.n, "bergman_dev_inside", r.max_dev);
                    dev_plot << a.rho_in << static_cast<std::uint64_t>(r.n) << r.max_dev << in.geometric_slope;
                    dev_plot.end_row();
                    exact = exact && r.max_dev <= floor;
                }
                const bool geo = exact || (in.rows.size() >= 2 && in.geometric_slope < std::log(0.95));
                o.check(fam + ": geometric decay inside", geo, "rho " + fmt(a.rho_in) + ", log-slope " + fmt(in.geometric_slope) + (exact ? " (exact)" : ""));
                fj["geometric_slope_inside"] = in.geometric_slope;
            } else {
                o.notes.push_back(fam + ": rho_in <= r_inner, inside check skipped");
            }
        }

        const auto band = level_curve_bounds(t, a.rho_out, n_pos);
        for (const auto& r : band.rows) {
            row(fam, r.n, "level_band_min", r.min_ratio);
            row(fam, r.n, "level_band_max", r.max_ratio);
        }
        o.check(fam + ": level-curve band finite", std::isfinite(band.band_ratio) && band.band_ratio > 0.0,
                "band ratio " + fmt(band.band_ratio) + " with " + band.normalization);
        fj["level_band_ratio"] = band.band_ratio;

        const auto der = derivative_level_bounds(t, a.rho_out, n_pos);
        for (const auto& r : der.rows) {
            row(fam, r.n, "derivative_band_min", r.min_ratio);
            row(fam, r.n, "derivative_band_max", r.max_ratio);
        }
        fj["derivative_band_ratio"] = der.band_ratio;
        fj["derivative_normalization"] = der.normalization;

        const auto nth = nth_root_asymptotic(t, d.psi(a.nth_root_rho), n_pos);
        for (const auto& [n, v] : nth.values) row(fam, n, "nth_root", v);
        if (nth.values.size() >= 2) {
            const double first = std::abs(nth.values.front().second - nth.target), last = nth.final_deviation;
            const bool ok = last <= first + 4.0 * std::numeric_limits<double>::epsilon() * nth.target;
            o.check(fam + ": nth-root approaches |Phi|", ok, "deviation " + fmt(first) + " -> " + fmt(last));
        }
        o.summary[fam] = fj;
    }
    o.main_csv = csv.str();
    o.plots.emplace_back("plot_bergman_deviation.csv", dev_plot.str());
    return o;
}

inline json config_json(const ExperimentConfig& c)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream is(to_ini(c));
    pt::read_ini(is, tree);
    json j = json::object();
    for (const auto& [k, v] : tree) {
        if (v.empty()) {
            j[k] = v.data();
            continue;
        }
        json s = json::object();
        for (const auto& [k2, v2] : v) s[k2] = v2.data();
        j[k] = s;
    }
    return j;
}

inline std::string hypotheses_label(const CoefficientDistribution& d)
{
    if (!d.iid) return "deterministic control profile";
    return d.within_hypotheses() ? "within hypotheses" : "outside hypotheses";
}

} // namespace run_detail

/// Run one experiment and write its outputs to `out_dir`.
inline RunResult run(const ExperimentConfig& c, const std::filesystem::path& out_dir, unsigned threads)
{
    namespace fs = std::filesystem;
    using namespace run_detail;
    RunResult res;
    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    const auto dist = c.dist();

    json m;
    m["tool"] = "rpz";
    m["version"] = RPZ_VERSION;
    m["experiment"] = c.experiment;
    m["domain"] = c.domain.build().describe();
    m["seed"] = c.seed;
    m["trials"] = c.trials;
    m["threads"] = threads;
    m["config"] = config_json(c);
    m["config_ini"] = to_ini(c);
    json seeds = json::array();
    for (std::uint64_t t = 0; t < c.trials; ++t) seeds.push_back(child_seed(c.seed, t));
    m["trial_seeds"] = seeds;
    m["distribution"] = {{"name", dist.name()},
                         {"alpha", dist.alpha},
                         {"mean_zero", dist.mean_zero},
                         {"finite_variance", dist.finite_variance},
                         {"finite_log_plus", dist.finite_log_plus},
                         {"iid", dist.iid},
                         {"label", hypotheses_label(dist)}};

    Outputs o;
    try {
        if (c.experiment == "zeros" || c.experiment == "deriv" || c.experiment == "grothmann") o = zeros_like(c, threads);
        else if (c.experiment == "coeffs") o = coeffs(c, threads);
        else if (c.experiment == "recover") o = recover(c, threads);
        else if (c.experiment == "boundary") o = boundary(c, threads);
        else if (c.experiment == "basis") o = basis(c, threads);
        else throw config_error("unknown experiment '" + c.experiment + "'");
    } catch (const config_error&) {
        throw;
    } catch (const error& e) {
        res.exit_code = exit_numerical;
        res.error = e.what();
    }

    std::vector<std::pair<std::string, std::string>> files;
    if (res.error.empty()) {
        files.emplace_back(c.experiment + ".csv", o.main_csv);
        for (auto& p : o.plots) files.push_back(std::move(p));
    }
    fs::create_directories(out_dir);
    json fj = json::object();
    for (const auto& [name, body] : files) {
        std::ofstream out(out_dir / name, std::ios::binary);
        out << body;
        if (!out) throw error("cannot write " + (out_dir / name).string());
        fj[name] = {{"sha256", sha256_hex(body)}, {"bytes", body.size()}};
        res.files.push_back(name);
    }

    res.assertions = o.assertions;
    json aj = json::array(), fails = json::array();
    for (const auto& a : o.assertions) {
        aj.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
        if (!a.passed) fails.push_back({{"name", a.name}, {"detail", a.detail}});
    }
    if (res.error.empty()) res.exit_code = fails.empty() ? exit_pass : exit_assertion;

    m["files"] = fj;
    m["summary"] = o.summary;
    m["notes"] = o.notes;
    m["assertions"] = aj;
    m["failures"] = fails;
    if (!res.error.empty()) m["error"] = res.error;
    m["exit_code"] = res.exit_code;
    m["started"] = started;
    m["finished"] = utc_now();
    m["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ofstream mf(out_dir / "manifest.json", std::ios::binary);
    mf << m.dump(2) << "\n";
    if (!mf) throw error("cannot write " + (out_dir / "manifest.json").string());
    res.files.push_back("manifest.json");
    res.manifest = std::move(m);
    return res;
}

} // namespace rpz::experiment

#endif // RPZ_EXPERIMENT_RUN_HPP
