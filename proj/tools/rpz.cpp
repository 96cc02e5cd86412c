// rpz: command-line driver for the random-polynomial experiments.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rpz/experiment/config.hpp"
#include "rpz/experiment/run.hpp"

namespace ex = rpz::experiment;

namespace {

void print_failures(const ex::RunResult& r)
{
    const auto fails = r.failures();
    std::fprintf(stderr, "%zu of %zu assertions failed:\n", fails.size(), r.assertions.size());
    for (const auto& a : fails) std::fprintf(stderr, "  FAIL  %-56s %s\n", a.name.c_str(), a.detail.c_str());
}

int run_experiment(const std::string& name, const std::string& config, std::optional<std::uint64_t> seed, std::optional<std::string> out)
{
    ex::ExperimentConfig c;
    unsigned threads = 1;
    try {
        c = ex::load_config(config, name);
        if (seed) {
            c.seed = *seed;
            c.has_seed = true;
        }
        if (!c.has_seed) throw rpz::config_error("config key 'seed': required (or pass --seed)");
        if (out) c.output_dir = *out;
        threads = ex::thread_count();
    } catch (const rpz::error& e) {
        std::fprintf(stderr, "rpz: %s\n", e.what());
        return ex::exit_config;
    }

    try {
        const auto r = ex::run(c, c.output_dir, threads);
        for (const auto& a : r.assertions) std::printf("%s  %s: %s\n", a.passed ? "PASS" : "FAIL", a.name.c_str(), a.detail.c_str());
        if (!r.error.empty()) std::fprintf(stderr, "rpz: numerical failure: %s\n", r.error.c_str());
        else if (r.exit_code == ex::exit_assertion) print_failures(r);
        std::printf("wrote %s/manifest.json (exit %d)\n", c.output_dir.c_str(), r.exit_code);
        return r.exit_code;
    } catch (const rpz::config_error& e) {
        std::fprintf(stderr, "rpz: %s\n", e.what());
        return ex::exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "rpz: %s\n", e.what());
        return ex::exit_numerical;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Random polynomials in Szego, Bergman and Faber bases on Jordan domains"};
    app.require_subcommand(1);

    app.add_subcommand("list-domains", "List the domain catalog")->callback([] {
        std::puts("disk              Psi(w) = w");
        std::puts("ellipse           Psi(w) = a w + b / w, requires a > |b|      keys: a, b");
        std::puts("perturbed_circle  Psi(w) = w + c w^(-m), requires m|c| < 1    keys: c, m");
    });
    app.add_subcommand("list-distributions", "List the coefficient distributions")->callback([] {
        for (const auto& n : rpz::distribution_names()) {
            const auto d = rpz::make_distribution(n);
            const char* label = !d.iid ? "deterministic control profile" : d.within_hypotheses() ? "within hypotheses" : "outside hypotheses";
            std::printf("%-18s %s\n", n.c_str(), label);
        }
    });

    struct Args {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::optional<std::string> out;
    };
    std::vector<std::pair<std::string, Args>> args;
    args.reserve(ex::experiment_names().size());
    int code = 0;
    for (const auto& name : ex::experiment_names()) {
        auto& a = args.emplace_back(name, Args{}).second;
        auto* sub = app.add_subcommand(name, "Run the " + name + " experiment");
        sub->add_option("--config", a.config, "Configuration file (INI)")->required();
        sub->add_option("--seed", a.seed, "Master seed (overrides the config)");
        sub->add_option("--out", a.out, "Output directory (overrides the config)");
        sub->callback([&code, &a, name] { code = run_experiment(name, a.config, a.seed, a.out); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : ex::exit_config;
    }
    return code;
}
