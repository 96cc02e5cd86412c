#ifndef RPZ_EXPERIMENT_CONFIG_HPP
#define RPZ_EXPERIMENT_CONFIG_HPP

#include <algorithm>
#include <charconv>
#include <concepts>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rpz/bases.hpp"
#include "rpz/domain.hpp"
#include "rpz/error.hpp"
#include "rpz/random.hpp"

namespace rpz::experiment {

inline const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names{"basis", "zeros", "deriv", "coeffs", "grothmann", "recover", "boundary"};
    return names;
}

struct DomainSpec {
    std::string kind = "disk";
    double a = 1.0, b = 0.25; // ellipse
    double c = 0.15;          // perturbed_circle
    int m = 2;

    [[nodiscard]] ConformalDomain build() const
    {
        if (kind == "ellipse") return ConformalDomain::ellipse(a, b);
        if (kind == "perturbed_circle") return ConformalDomain::perturbed_circle(c, m);
        return ConformalDomain::make(kind);
    }
};

struct ZerosKnobs {
    double rho_K = 0.7;
    double R = 2.0;
    std::size_t probe_points = 64;
    std::size_t boundary_points = 1024;
    double grid_tol = 1e-6;
};

struct DerivKnobs {
    std::vector<std::size_t> markov_n_list{50, 100, 200, 400};
    std::size_t markov_trials = 10;
    double max_exponent = 2.2;
};

struct CoeffsKnobs {
    std::vector<double> b_list{5.0};
    double band_lo = 0.98, band_hi = 1.05;
};

struct RecoverKnobs {
    double R = 2.0;
    std::size_t M = 8192;
    double tol = 1e-10;
    double max_error = 1e-6;
};

struct BoundaryKnobs {
    std::size_t N = 600;
    std::size_t centers = 20;
    double dist_lo = 0.1, dist_hi = 0.6;
    double band_lo = 0.8, band_hi = 1.2;
    double pass_fraction = 0.8;
    std::size_t K = 60;
    std::size_t M = 4096;
    double circle_fraction = 0.8;
    double noise_floor = 1e-13;
    bool control = true;
};

struct AsymptoticKnobs {
    double rho_out = 2.0;
    double rho_in = 0.8;
    double nth_root_rho = 2.0;
};

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::size_t trials = 1;
    std::vector<std::size_t> n_list;
    std::string output_dir = "out";

    DomainSpec domain;
    std::vector<basis_family> families{basis_family::bergman};
    precision_mode precision = precision_mode::double_precision;
    std::string distribution = "complex_gaussian";
    double alpha = 1.0;

    ZerosKnobs zeros;
    DerivKnobs deriv;
    CoeffsKnobs coeffs;
    RecoverKnobs recover;
    BoundaryKnobs boundary;
    AsymptoticKnobs asymptotics;

    [[nodiscard]] CoefficientDistribution dist() const { return make_distribution(distribution, alpha); }
    [[nodiscard]] std::size_t n_max() const { return n_list.empty() ? 0 : *std::max_element(n_list.begin(), n_list.end()); }
    [[nodiscard]] std::size_t n_min() const { return n_list.empty() ? 0 : *std::min_element(n_list.begin(), n_list.end()); }
};

namespace detail {

inline std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

/// Drops trailing "; ..." and "# ..." comments; line numbering is kept.
inline std::string strip_comments(const std::string& text)
{
    std::istringstream in(text);
    std::string out, line;
    while (std::getline(in, line)) {
        for (std::size_t i = 1; i < line.size(); ++i)
            if ((line[i] == ';' || line[i] == '#') && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
                line.erase(i);
                break;
            }
        out += line;
        out += '\n';
    }
    return out;
}

inline std::string g17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Typed access to one section of the parsed INI tree.
class Section {
public:
    Section(std::string name, const boost::property_tree::ptree* tree) : name_(std::move(name)), tree_(tree) {}

    [[nodiscard]] std::string key_name(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

    [[nodiscard]] bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

    [[nodiscard]] std::string raw(const std::string& key) const { return trim(tree_->get<std::string>(key)); }

    void fail(const std::string& key, const std::string& what) const { throw config_error("config key '" + key_name(key) + "': " + what); }

    void read(const std::string& key, std::string& out) const
    {
        if (has(key)) out = raw(key);
    }

    void read(const std::string& key, double& out) const
    {
        if (!has(key)) return;
        const auto s = raw(key);
        double v = 0.0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) fail(key, "expected a finite number, got '" + s + "'");
        out = v;
    }

    template <std::unsigned_integral U>
    void read(const std::string& key, U& out) const
    {
        if (!has(key)) return;
        out = static_cast<U>(parse_uint(key, raw(key)));
    }

    void read(const std::string& key, int& out) const
    {
        if (!has(key)) return;
        const auto s = raw(key);
        int v = 0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail(key, "expected an integer, got '" + s + "'");
        out = v;
    }

    void read(const std::string& key, bool& out) const
    {
        if (!has(key)) return;
        const auto s = raw(key);
        if (s == "true" || s == "yes" || s == "1") out = true;
        else if (s == "false" || s == "no" || s == "0") out = false;
        else fail(key, "expected true or false, got '" + s + "'");
    }

    [[nodiscard]] std::vector<std::string> list(const std::string& key) const
    {
        auto s = raw(key);
        if (!s.empty() && s.front() == '[') {
            if (s.back() != ']') fail(key, "unbalanced brackets in list '" + s + "'");
            s = s.substr(1, s.size() - 2);
        }
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) fail(key, "empty list element in '" + raw(key) + "'");
            out.push_back(item);
        }
        if (out.empty()) fail(key, "empty list");
        return out;
    }

    void read(const std::string& key, std::vector<std::size_t>& out) const
    {
        if (!has(key)) return;
        out.clear();
        for (const auto& s : list(key)) out.push_back(static_cast<std::size_t>(parse_uint(key, s)));
    }

    void read(const std::string& key, std::vector<double>& out) const
    {
        if (!has(key)) return;
        out.clear();
        for (const auto& s : list(key)) {
            double v = 0.0;
            const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
            if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) fail(key, "expected a finite number, got '" + s + "'");
            out.push_back(v);
        }
    }

    /// Keys of this section not in `known`.
    void reject_unknown(const std::set<std::string>& known) const
    {
        if (!tree_) return;
        for (const auto& [k, v] : *tree_) {
            if (!v.empty()) throw config_error("config: nested section '" + key_name(k) + "' is not supported");
            if (!known.count(k)) {
                const std::string where = name_.empty() ? "at top level" : "in section [" + name_ + "]";
                throw config_error("config: unknown key '" + k + "' " + where);
            }
        }
    }

private:
    std::uint64_t parse_uint(const std::string& key, const std::string& s) const
    {
        std::uint64_t v = 0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail(key, "expected a non-negative integer, got '" + s + "'");
        return v;
    }

    std::string name_;
    const boost::property_tree::ptree* tree_;
};

inline void require(bool ok, const Section& s, const std::string& key, const std::string& what)
{
    if (!ok) s.fail(key, what);
}

} // namespace detail

/// Parse and validate INI-style experiment configuration text.
///
/// `experiment` names the subcommand; a top-level `experiment =` key, when
/// present, must agree with it.
inline ExperimentConfig parse_config(const std::string& text, const std::string& experiment)
{
    using detail::require;
    using detail::Section;
    namespace pt = boost::property_tree;

    pt::ptree tree;
    try {
        std::istringstream is(detail::strip_comments(text));
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        std::istringstream lines(text);
        std::string line;
        for (unsigned long i = 0; i < e.line() && std::getline(lines, line);) ++i;
        throw config_error("config: malformed INI at line " + std::to_string(e.line()) + " ('" + detail::trim(line) + "'): " + e.message());
    }

    static const std::set<std::string> sections{"domain", "basis", "distribution", "zeros", "deriv", "coeffs", "recover", "boundary", "asymptotics"};
    pt::ptree top;
    std::map<std::string, const pt::ptree*> sec;
    for (const auto& [k, v] : tree) {
        if (sections.count(k)) sec[k] = &v;
        else if (!v.empty()) throw config_error("config: unknown section [" + k + "]");
        else top.put_child(pt::ptree::path_type(k, '\0'), v);
    }
    auto section = [&](const std::string& name) { return Section(name, sec.count(name) ? sec[name] : nullptr); };

    ExperimentConfig c;
    if (std::find(experiment_names().begin(), experiment_names().end(), experiment) == experiment_names().end())
        throw config_error("unknown experiment '" + experiment + "'");
    c.experiment = experiment;

    const Section root("", &top);
    root.reject_unknown({"experiment", "seed", "trials", "n_list", "output_dir"});
    if (root.has("experiment") && root.raw("experiment") != experiment)
        root.fail("experiment", "config is for '" + root.raw("experiment") + "' but the subcommand is '" + experiment + "'");
    c.has_seed = root.has("seed");
    root.read("seed", c.seed);
    root.read("trials", c.trials);
    root.read("n_list", c.n_list);
    root.read("output_dir", c.output_dir);
    require(c.trials >= 1, root, "trials", "trials >= 1 required");
    if (experiment != "boundary") require(!c.n_list.empty(), root, "n_list", "required field is missing");
    for (std::size_t n : c.n_list) require(n >= 1, root, "n_list", "every n must be >= 1");

    // domain
    const auto sd = section("domain");
    sd.reject_unknown({"kind", "a", "b", "c", "m"});
    // coefficient statistics do not depend on the domain; it defaults to the disk there
    require(sd.has("kind") || experiment == "coeffs", sd, "kind", "required field is missing");
    sd.read("kind", c.domain.kind);
    sd.read("a", c.domain.a);
    sd.read("b", c.domain.b);
    sd.read("c", c.domain.c);
    sd.read("m", c.domain.m);
    if (c.domain.kind != "disk" && c.domain.kind != "ellipse" && c.domain.kind != "perturbed_circle")
        sd.fail("kind", "unknown domain kind '" + c.domain.kind + "' (see rpz list-domains)");
    if (c.domain.kind == "disk")
        for (const char* k : {"a", "b", "c", "m"}) require(!sd.has(k), sd, k, "not a parameter of the disk");
    if (c.domain.kind == "ellipse")
        for (const char* k : {"c", "m"}) require(!sd.has(k), sd, k, "not a parameter of the ellipse");
    if (c.domain.kind == "perturbed_circle")
        for (const char* k : {"a", "b"}) require(!sd.has(k), sd, k, "not a parameter of perturbed_circle");
    ConformalDomain d = ConformalDomain::disk();
    try {
        d = c.domain.build();
    } catch (const domain_error& e) {
        throw config_error(std::string("config section [domain]: ") + e.what());
    }

    // basis
    const auto sb = section("basis");
    sb.reject_unknown({"family", "precision"});
    if (sb.has("family")) {
        c.families.clear();
        for (const auto& f : sb.list("family")) {
            if (f == "all") {
                c.families = {basis_family::bergman, basis_family::szego, basis_family::faber};
                break;
            }
            try {
                c.families.push_back(parse_family(f));
            } catch (const error&) {
                sb.fail("family", "unknown family '" + f + "' (bergman, szego, faber or all)");
            }
        }
    }
    if (sb.has("precision")) {
        const auto p = sb.raw("precision");
        if (p == "double") c.precision = precision_mode::double_precision;
        else if (p == "extended") c.precision = precision_mode::extended;
        else sb.fail("precision", "expected double or extended, got '" + p + "'");
    }

    // distribution
    const auto sx = section("distribution");
    sx.reject_unknown({"name", "alpha"});
    const bool needs_dist = experiment != "basis";
    if (needs_dist) require(sx.has("name"), sx, "name", "required field is missing");
    sx.read("name", c.distribution);
    sx.read("alpha", c.alpha);
    try {
        (void)c.dist();
    } catch (const domain_error& e) {
        sx.fail(sx.has("alpha") && c.distribution.find("pareto") != std::string::npos ? "alpha" : "name", std::string(e.what()) + " (see rpz list-distributions)");
    }
    if (sx.has("alpha")) require(c.distribution == "pareto" || c.distribution == "sym_pareto", sx, "alpha", "only the Pareto laws take alpha");

    // zeros / deriv / grothmann probes
    const auto sz = section("zeros");
    sz.reject_unknown({"rho_K", "R", "probe_points", "boundary_points", "grid_tol"});
    sz.read("rho_K", c.zeros.rho_K);
    sz.read("R", c.zeros.R);
    sz.read("probe_points", c.zeros.probe_points);
    sz.read("boundary_points", c.zeros.boundary_points);
    sz.read("grid_tol", c.zeros.grid_tol);
    const bool uses_probes = experiment == "zeros" || experiment == "deriv" || experiment == "grothmann";
    if (uses_probes || sz.has("rho_K"))
        require(c.zeros.rho_K > d.r_inner() && c.zeros.rho_K < 1.0, sz, "rho_K", "r_inner < rho_K < 1 required (r_inner = " + detail::g17(d.r_inner()) + ")");
    require(c.zeros.R > 1.0, sz, "R", "R > 1 required");
    require(c.zeros.probe_points >= 1, sz, "probe_points", ">= 1 required");
    require(c.zeros.boundary_points >= 16, sz, "boundary_points", ">= 16 required");
    require(c.zeros.grid_tol > 0.0 && c.zeros.grid_tol < 1.0, sz, "grid_tol", "0 < grid_tol < 1 required");

    const auto sv = section("deriv");
    sv.reject_unknown({"markov_n_list", "markov_trials", "max_exponent"});
    sv.read("markov_n_list", c.deriv.markov_n_list);
    sv.read("markov_trials", c.deriv.markov_trials);
    sv.read("max_exponent", c.deriv.max_exponent);
    require(c.deriv.markov_n_list.size() >= 2, sv, "markov_n_list", "at least two degrees required for the exponent fit");
    for (std::size_t n : c.deriv.markov_n_list) require(n >= 1, sv, "markov_n_list", "every n must be >= 1");
    require(c.deriv.markov_trials >= 1, sv, "markov_trials", ">= 1 required");

    const auto sc = section("coeffs");
    sc.reject_unknown({"b", "band_lo", "band_hi"});
    sc.read("b", c.coeffs.b_list);
    sc.read("band_lo", c.coeffs.band_lo);
    sc.read("band_hi", c.coeffs.band_hi);
    for (double b : c.coeffs.b_list) require(b > 0.0, sc, "b", "b > 0 required");
    require(c.coeffs.band_lo < c.coeffs.band_hi, sc, "band_lo", "band_lo < band_hi required");

    const auto sr = section("recover");
    sr.reject_unknown({"R", "M", "tol", "max_error"});
    sr.read("R", c.recover.R);
    sr.read("M", c.recover.M);
    sr.read("tol", c.recover.tol);
    sr.read("max_error", c.recover.max_error);
    require(c.recover.R > 1.0, sr, "R", "R > 1 required");
    require(c.recover.M >= 64 && (c.recover.M & (c.recover.M - 1)) == 0, sr, "M", "a power of two >= 64 required");
    require(c.recover.tol > 0.0, sr, "tol", "tol > 0 required");
    require(c.recover.max_error > 0.0, sr, "max_error", "max_error > 0 required");

    const auto sn = section("boundary");
    sn.reject_unknown({"N", "centers", "dist_lo", "dist_hi", "band_lo", "band_hi", "pass_fraction", "K", "M", "circle_fraction", "noise_floor", "control"});
    sn.read("N", c.boundary.N);
    sn.read("centers", c.boundary.centers);
    sn.read("dist_lo", c.boundary.dist_lo);
    sn.read("dist_hi", c.boundary.dist_hi);
    sn.read("band_lo", c.boundary.band_lo);
    sn.read("band_hi", c.boundary.band_hi);
    sn.read("pass_fraction", c.boundary.pass_fraction);
    sn.read("K", c.boundary.K);
    sn.read("M", c.boundary.M);
    sn.read("circle_fraction", c.boundary.circle_fraction);
    sn.read("noise_floor", c.boundary.noise_floor);
    sn.read("control", c.boundary.control);
    require(c.boundary.K >= 4, sn, "K", "K >= 4 required");
    require(c.boundary.N >= 3 * c.boundary.K, sn, "N", "N >= 3K required (K = " + std::to_string(c.boundary.K) + ")");
    require(c.boundary.centers >= 1, sn, "centers", ">= 1 required");
    require(c.boundary.dist_lo > 0.0 && c.boundary.dist_lo < c.boundary.dist_hi && c.boundary.dist_hi < 1.0, sn, "dist_lo", "0 < dist_lo < dist_hi < 1 required");
    require(c.boundary.band_lo < 1.0 && c.boundary.band_hi > 1.0, sn, "band_lo", "band_lo < 1 < band_hi required");
    require(c.boundary.pass_fraction > 0.0 && c.boundary.pass_fraction <= 1.0, sn, "pass_fraction", "0 < pass_fraction <= 1 required");
    require(c.boundary.M >= 2 * c.boundary.K + 2, sn, "M", "M >= 2K + 2 required");
    require(c.boundary.circle_fraction > 0.0 && c.boundary.circle_fraction < 1.0, sn, "circle_fraction", "0 < circle_fraction < 1 required");
    require(c.boundary.noise_floor > 0.0 && c.boundary.noise_floor < 1.0, sn, "noise_floor", "0 < noise_floor < 1 required");

    const auto sa = section("asymptotics");
    sa.reject_unknown({"rho_out", "rho_in", "nth_root_rho"});
    sa.read("rho_out", c.asymptotics.rho_out);
    sa.read("rho_in", c.asymptotics.rho_in);
    sa.read("nth_root_rho", c.asymptotics.nth_root_rho);
    require(c.asymptotics.rho_out > 1.0, sa, "rho_out", "rho_out > 1 required");
    require(c.asymptotics.rho_in < 1.0 && c.asymptotics.rho_in > 0.0, sa, "rho_in", "0 < rho_in < 1 required");
    require(c.asymptotics.nth_root_rho > 1.0, sa, "nth_root_rho", "nth_root_rho > 1 required");

    // experiment-specific requirements
    if (experiment == "zeros" || experiment == "deriv" || experiment == "grothmann")
        for (std::size_t n : c.n_list) require(n >= (experiment == "deriv" ? 3u : 2u), root, "n_list", experiment == "deriv" ? "n >= 3 required (P' needs degree >= 2)" : "n >= 2 required");
    if (experiment == "coeffs") require(c.n_max() >= 10, root, "n_list", "n >= 10 required for coefficient statistics");
    if (experiment == "boundary" && !c.n_list.empty()) root.fail("n_list", "not used by the boundary experiment (set boundary.N)");
    return c;
}

inline ExperimentConfig load_config(const std::string& path, const std::string& experiment)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), experiment);
}

/// Canonical INI text with every default filled in; parsing it reproduces `c`.
inline std::string to_ini(const ExperimentConfig& c)
{
    using detail::g17;
    auto ulist = [](const std::vector<std::size_t>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
        return s;
    };
    auto dlist = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + g17(v[i]);
        return s;
    };
    std::ostringstream os;
    os << "experiment = " << c.experiment << "\n";
    os << "seed = " << c.seed << "\n";
    os << "trials = " << c.trials << "\n";
    if (!c.n_list.empty()) os << "n_list = " << ulist(c.n_list) << "\n";
    os << "output_dir = " << c.output_dir << "\n";
    os << "\n[domain]\nkind = " << c.domain.kind << "\n";
    if (c.domain.kind == "ellipse") os << "a = " << g17(c.domain.a) << "\nb = " << g17(c.domain.b) << "\n";
    if (c.domain.kind == "perturbed_circle") os << "c = " << g17(c.domain.c) << "\nm = " << c.domain.m << "\n";
    os << "\n[basis]\nfamily = ";
    for (std::size_t i = 0; i < c.families.size(); ++i) os << (i ? ", " : "") << to_string(c.families[i]);
    os << "\nprecision = " << (c.precision == precision_mode::extended ? "extended" : "double") << "\n";
    os << "\n[distribution]\nname = " << c.distribution << "\n";
    if (c.distribution == "pareto" || c.distribution == "sym_pareto") os << "alpha = " << g17(c.alpha) << "\n";
    os << "\n[zeros]\nrho_K = " << g17(c.zeros.rho_K) << "\nR = " << g17(c.zeros.R) << "\nprobe_points = " << c.zeros.probe_points
       << "\nboundary_points = " << c.zeros.boundary_points << "\ngrid_tol = " << g17(c.zeros.grid_tol) << "\n";
    os << "\n[deriv]\nmarkov_n_list = " << ulist(c.deriv.markov_n_list) << "\nmarkov_trials = " << c.deriv.markov_trials
       << "\nmax_exponent = " << g17(c.deriv.max_exponent) << "\n";
    os << "\n[coeffs]\nb = " << dlist(c.coeffs.b_list) << "\nband_lo = " << g17(c.coeffs.band_lo) << "\nband_hi = " << g17(c.coeffs.band_hi) << "\n";
    os << "\n[recover]\nR = " << g17(c.recover.R) << "\nM = " << c.recover.M << "\ntol = " << g17(c.recover.tol) << "\nmax_error = " << g17(c.recover.max_error) << "\n";
    const auto& b = c.boundary;
    os << "\n[boundary]\nN = " << b.N << "\ncenters = " << b.centers << "\ndist_lo = " << g17(b.dist_lo) << "\ndist_hi = " << g17(b.dist_hi)
       << "\nband_lo = " << g17(b.band_lo) << "\nband_hi = " << g17(b.band_hi) << "\npass_fraction = " << g17(b.pass_fraction) << "\nK = " << b.K
       << "\nM = " << b.M << "\ncircle_fraction = " << g17(b.circle_fraction) << "\nnoise_floor = " << g17(b.noise_floor)
       << "\ncontrol = " << (b.control ? "true" : "false") << "\n";
    os << "\n[asymptotics]\nrho_out = " << g17(c.asymptotics.rho_out) << "\nrho_in = " << g17(c.asymptotics.rho_in)
       << "\nnth_root_rho = " << g17(c.asymptotics.nth_root_rho) << "\n";
    return os.str();
}

} // namespace rpz::experiment

#endif // RPZ_EXPERIMENT_CONFIG_HPP
