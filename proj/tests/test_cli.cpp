#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "rpz/experiment/config.hpp"
#include "rpz/experiment/run.hpp"

using namespace rpz;
using namespace rpz::experiment;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

const char* minimal_zeros = R"(experiment = zeros
seed = 1
trials = 50
n_list = [100, 400]

[domain]
kind = disk

[basis]
family = bergman

[distribution]
name = complex_gaussian
)";

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("rpz_test_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string config_error_of(const std::string& text, const std::string& experiment = "zeros")
{
    try {
        parse_config(text, experiment);
    } catch (const config_error& e) {
        return e.what();
    }
    return "";
}

std::string replace(std::string s, const std::string& from, const std::string& to)
{
    const auto i = s.find(from);
    REQUIRE(i != std::string::npos);
    return s.replace(i, from.size(), to);
}

int shell(const std::string& cmd)
{
    const int st = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

} // namespace

TEST_CASE("minimal zeros config is valid", "[config]")
{
    const auto c = parse_config(minimal_zeros, "zeros");
    CHECK(c.seed == 1);
    CHECK(c.has_seed);
    CHECK(c.trials == 50);
    CHECK(c.n_list == std::vector<std::size_t>{100, 400});
    CHECK(c.domain.kind == "disk");
    CHECK(c.families == std::vector<basis_family>{basis_family::bergman});
    CHECK(c.distribution == "complex_gaussian");
    CHECK(c.zeros.rho_K == 0.7);
    CHECK(c.zeros.R == 2.0);
}

TEST_CASE("config errors name the key and constraint", "[config]")
{
    const std::string ell = replace(minimal_zeros, "kind = disk", "kind = ellipse\na = 1\nb = 1");
    CHECK_THAT(config_error_of(ell), ContainsSubstring("a > |b| required"));
    CHECK_THAT(config_error_of(replace(minimal_zeros, "kind = disk", "kind = ellipse\na = 0.5\nb = -0.7")), ContainsSubstring("a > |b| required"));

    const auto famly = config_error_of(replace(minimal_zeros, "family = bergman", "famly = bergman"));
    CHECK_THAT(famly, ContainsSubstring("famly"));
    CHECK_THAT(famly, ContainsSubstring("unknown key"));

    CHECK_THAT(config_error_of(replace(minimal_zeros, "trials = 50", "trials = 50\ntrials = 4")), ContainsSubstring("trials"));
    CHECK_THAT(config_error_of(minimal_zeros, "deriv"), ContainsSubstring("experiment"));
    CHECK_THAT(config_error_of(replace(minimal_zeros, "name = complex_gaussian", "name = cauchy")), ContainsSubstring("distribution.name"));
    CHECK_THAT(config_error_of(replace(minimal_zeros, "name = complex_gaussian", "")), ContainsSubstring("distribution.name"));
    CHECK_THAT(config_error_of(replace(minimal_zeros, "trials = 50", "trials = 0")), ContainsSubstring("trials >= 1"));
    CHECK_THAT(config_error_of(replace(minimal_zeros, "trials = 50", "trials = -3")), ContainsSubstring("trials"));
    CHECK_THAT(config_error_of(replace(minimal_zeros, "n_list = [100, 400]", "n_list = [100, x]")), ContainsSubstring("n_list"));
    CHECK_THAT(config_error_of(std::string(minimal_zeros) + "[zeros]\nrho_K = 1.5\n"), ContainsSubstring("rho_K"));
    CHECK_THAT(config_error_of(replace(minimal_zeros, "kind = disk", "kind = perturbed_circle\nc = 0.6\nm = 2")), ContainsSubstring("m*|c| < 1"));
    CHECK_THAT(config_error_of(replace(minimal_zeros, "kind = disk", "kind = square")), ContainsSubstring("domain.kind"));

    const std::string deriv = replace(replace(minimal_zeros, "zeros", "deriv"), "[100, 400]", "[2, 400]");
    CHECK_THAT(config_error_of(deriv, "deriv"), ContainsSubstring("n >= 3"));
    const std::string bnd = replace(minimal_zeros, "experiment = zeros", "experiment = boundary");
    CHECK_THAT(config_error_of(bnd, "boundary"), ContainsSubstring("n_list"));
}

TEST_CASE("comments may trail a value", "[config]")
{
    const auto c = parse_config(replace(replace(minimal_zeros, "seed = 1", "# header\nseed = 9 ; trailing"), "kind = disk", "kind = disk\t# the unit disk"), "zeros");
    CHECK(c.seed == 9);
    CHECK(c.domain.kind == "disk");
}

TEST_CASE("canonical config text round-trips", "[config]")
{
    const auto c = parse_config(std::string(minimal_zeros) + "[coeffs]\nb = 1, 5, 10\n", "zeros");
    const auto text = to_ini(c);
    const auto again = parse_config(text, "zeros");
    CHECK(to_ini(again) == text);
    CHECK(again.coeffs.b_list == std::vector<double>{1.0, 5.0, 10.0});
}

TEST_CASE("SHA-256 of known strings", "[manifest]")
{
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("parallel_for covers every index and rethrows the lowest failure", "[run]")
{
    std::vector<int> hit(1000, 0);
    parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
    CHECK(std::count(hit.begin(), hit.end(), 1) == 1000);

    try {
        parallel_for(100, 4, [](std::size_t i) {
            if (i == 17 || i == 60) throw numerical_error("at " + std::to_string(i));
        });
        FAIL("expected a throw");
    } catch (const numerical_error& e) {
        CHECK(std::string(e.what()) == "at 17");
    }
}

TEST_CASE("RPZ_THREADS bounds the worker count", "[run]")
{
    ::setenv("RPZ_THREADS", "3", 1);
    CHECK(thread_count() == 3);
    ::setenv("RPZ_THREADS", "0", 1);
    CHECK_THROWS_AS(thread_count(), config_error);
    ::setenv("RPZ_THREADS", "2x", 1);
    CHECK_THROWS_AS(thread_count(), config_error);
    ::unsetenv("RPZ_THREADS");
    CHECK(thread_count() >= 1);
}

TEST_CASE("zeros run writes checksummed, byte-deterministic outputs", "[run]")
{
    const std::string text = replace(replace(minimal_zeros, "trials = 50", "trials = 6"), "[100, 400]", "[40, 80]");
    const auto c = parse_config(text, "zeros");
    const auto d1 = scratch("det1"), d2 = scratch("det2");
    const auto r1 = run(c, d1, 1);
    const auto r2 = run(c, d2, 3);
    CHECK(r1.exit_code == exit_pass);
    CHECK(r1.assertions.size() == 3);
    for (const char* f : {"zeros.csv", "plot_zeros_bergman.csv", "plot_ks_vs_n_bergman.csv", "plot_boundary_polyline.csv", "manifest.json"}) CHECK(fs::exists(d1 / f));

    const auto m = nlohmann::json::parse(slurp(d1 / "manifest.json"));
    for (const auto& name : {"zeros.csv", "plot_zeros_bergman.csv"}) {
        const auto body1 = slurp(d1 / name);
        CHECK(body1 == slurp(d2 / name));
        CHECK(m["files"][name]["sha256"] == sha256_hex(body1));
        CHECK(m["files"][name]["bytes"] == body1.size());
    }
    CHECK(m["exit_code"] == 0);
    CHECK(m["trial_seeds"].size() == 6);
    CHECK(m["trial_seeds"][2] == child_seed(1, 2));
    CHECK(m["distribution"]["label"] == "within hypotheses");
    CHECK(m["failures"].empty());

    // the config echo alone reproduces the run
    const auto echoed = parse_config(m["config_ini"].get<std::string>(), "zeros");
    const auto d3 = scratch("det3");
    run(echoed, d3, 2);
    CHECK(slurp(d3 / "zeros.csv") == slurp(d1 / "zeros.csv"));

    const auto csv = slurp(d1 / "zeros.csv");
    CHECK(csv.rfind("family,domain,n,trial,degree,ks_angle,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 12);
    CHECK_THAT(csv, ContainsSubstring("\nbergman,disk,40,0,40,"));
    CHECK(slurp(d1 / "plot_ks_vs_n_bergman.csv").rfind("n,median_ks,q1,q3\n", 0) == 0);
    CHECK(slurp(d1 / "plot_zeros_bergman.csv").rfind("trial,re,im\n", 0) == 0);
}

TEST_CASE("coeffs with rademacher: sequences identically 1", "[run]")
{
    const auto c = parse_config("experiment = coeffs\nseed = 3\ntrials = 2\nn_list = 300\n[distribution]\nname = rademacher\n", "coeffs");
    const auto r = run(c, scratch("rad"), 2);
    REQUIRE(r.assertions.size() == 1);
    CHECK(r.assertions[0].passed);
    CHECK(r.exit_code == exit_pass);
}

TEST_CASE("boundary run with the control profile flags it as entire", "[run]")
{
    const auto c = parse_config("experiment = boundary\nseed = 2\n[domain]\nkind = disk\n[basis]\nfamily = bergman\n"
                                "[distribution]\nname = inverse_factorial\n[boundary]\nN = 240\ncenters = 8\n",
                                "boundary");
    const auto r = run(c, scratch("ctl"), 2);
    REQUIRE(r.assertions.size() == 1);
    CHECK(r.assertions[0].passed);
    CHECK_THAT(r.assertions[0].detail, ContainsSubstring("control behaved as entire"));
    CHECK(r.exit_code == exit_pass);
    CHECK(r.manifest["distribution"]["label"] == "deterministic control profile");
}

TEST_CASE("failed assertions and numerical failures set the exit code", "[run]")
{
    const std::string rec = "experiment = recover\nseed = 1\ntrials = 2\nn_list = 8\n[domain]\nkind = disk\n[basis]\nfamily = bergman\n"
                            "[distribution]\nname = complex_gaussian\n";
    const auto strict = run(parse_config(rec + "[recover]\nmax_error = 1e-30\n", "recover"), scratch("strict"), 1);
    CHECK(strict.exit_code == exit_assertion);
    CHECK(strict.failures().size() == 1);
    CHECK(strict.manifest["failures"].size() == 1);

    const auto dir = scratch("num");
    const auto bad = run(parse_config(rec + "[recover]\ntol = 1e-300\nM = 64\n", "recover"), dir, 1);
    CHECK(bad.exit_code == exit_numerical);
    CHECK_THAT(bad.error, ContainsSubstring("trial 0, n 8"));
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK_FALSE(fs::exists(dir / "recover.csv"));
}

TEST_CASE("command-line exit codes", "[cli]")
{
    const std::string exe = RPZ_CLI_PATH;
    const auto dir = scratch("exe");
    fs::create_directories(dir);
    const std::string rec = "experiment = recover\ntrials = 1\nn_list = 6\n[domain]\nkind = disk\n[basis]\nfamily = faber\n"
                            "[distribution]\nname = rademacher\n";
    auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream(dir / name) << body;
        return (dir / name).string();
    };
    const auto ok = write("ok.ini", rec);
    const auto fail = write("fail.ini", rec + "[recover]\nmax_error = 1e-30\n");
    const auto num = write("num.ini", rec + "[recover]\ntol = 1e-300\nM = 64\n");
    const auto typo = write("typo.ini", replace(rec, "family", "famly"));
    const std::string out = " --out " + (dir / "out").string();

    CHECK(shell(exe + " recover --config " + ok + " --seed 4" + out) == 0);
    CHECK(fs::exists(dir / "out" / "recover.csv"));
    CHECK(shell(exe + " recover --config " + ok + out) == 2); // no seed anywhere
    CHECK(shell(exe + " recover --config " + fail + " --seed 4" + out) == 1);
    CHECK(shell(exe + " recover --config " + num + " --seed 4" + out) == 3);
    CHECK(shell(exe + " recover --config " + typo + " --seed 4" + out) == 2);
    CHECK(shell(exe + " recover --config " + (dir / "missing.ini").string() + " --seed 4" + out) == 2);
    CHECK(shell(exe + " zeros --config " + ok + " --seed 4" + out) == 2);
    CHECK(shell("RPZ_THREADS=none " + exe + " recover --config " + ok + " --seed 4" + out) == 2);
    CHECK(shell(exe + " list-domains") == 0);
    CHECK(shell(exe + " list-distributions") == 0);
    CHECK(shell(exe + " bogus") == 2);
}

TEST_CASE("shipped example configs parse and round-trip", "[config]")
{
    std::size_t count = 0;
    for (const auto& e : fs::directory_iterator(RPZ_CONFIG_DIR)) {
        if (e.path().extension() != ".ini") continue;
        const auto text = slurp(e.path());
        const auto line = text.substr(text.find("experiment = ") + 13);
        const auto experiment = line.substr(0, line.find('\n'));
        INFO(e.path().string());
        const auto c = load_config(e.path().string(), experiment);
        CHECK(c.has_seed);
        CHECK(to_ini(parse_config(to_ini(c), experiment)) == to_ini(c));
        ++count;
    }
    CHECK(count >= 7);
}
