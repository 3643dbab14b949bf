// Command-line runner: besovtight {run,oracle,report}.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "besovtight/config.hpp"
#include "besovtight/parallel.hpp"
#include "besovtight/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitCheckFailed = 2;

std::string read_text(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int run_and_commit(besovtight::ExperimentConfig cfg, int threads, const std::string& out_override) {
    if (!out_override.empty()) cfg.output = out_override;
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = besovtight::run_experiment(cfg, threads);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    besovtight::commit_outputs(cfg, result, cfg.output, secs);
    for (const auto& m : result.messages) std::cout << m << '\n';
    std::cout << (result.check_passed ? "check: PASS" : "check: FAIL") << "  (outputs in " << cfg.output << ")\n";
    return result.check_passed ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Besov-space tightness experiments for the critical Ising magnetization field"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::int64_t seed = -1;
    int threads = besovtight::default_threads();

    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("--config", config_path, "Config file (INI with [sections])")->required();
    run->add_option("--seed", seed, "Override [experiment] seed");
    run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "Override [experiment] output directory");

    auto* oracle = app.add_subcommand("oracle", "Exact-enumeration identity checks");
    oracle->add_option("--out", out_dir, "Also write oracle.csv and a manifest here");
    oracle->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* report = app.add_subcommand("report", "Verify and summarise a finished run");
    report->add_option("--out", out_dir, "Output directory of the run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*run) {
            auto cfg = besovtight::parse_config(read_text(config_path));
            if (seed < -1 || seed == std::numeric_limits<std::int64_t>::min())
                throw besovtight::ConfigError(0, 0, "--seed must be non-negative");
            if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
            besovtight::validate_config(cfg);
            return run_and_commit(cfg, threads, out_dir);
        }
        if (*oracle) {
            besovtight::ExperimentConfig cfg;
            cfg.kind = besovtight::ExperimentKind::oracle;
            if (out_dir.empty()) {
                const auto checks = besovtight::ising::run_oracle_suite();
                for (const auto& c : checks)
                    std::printf("%s %-36s observed=%.3e expected=%.3e\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                                c.observed, c.expected);
                return besovtight::ising::all_passed(checks) ? kExitOk : kExitCheckFailed;
            }
            return run_and_commit(cfg, threads, out_dir);
        }
        if (*report) {
            const auto v = besovtight::verify_manifest(out_dir);
            for (const auto& p : v.problems) std::cout << "problem: " << p << '\n';
            std::ifstream s(std::filesystem::path(out_dir) / "summary.csv");
            if (s) std::cout << s.rdbuf();
            std::cout << (v.ok ? "manifest: OK\n" : "manifest: FAILED\n");
            return v.ok ? kExitOk : kExitCheckFailed;
        }
    } catch (const besovtight::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitOk;
}
