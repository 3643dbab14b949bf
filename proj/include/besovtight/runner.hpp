#pragma once

// Experiment runner: executes a validated ExperimentConfig, renders its tables
// and summaries, and commits them with a digest manifest.

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "besovtight/besov.hpp"
#include "besovtight/config.hpp"
#include "besovtight/ensemble.hpp"
#include "besovtight/ising/experiments.hpp"
#include "besovtight/ising/oracle_suite.hpp"
#include "besovtight/ising/snapshot.hpp"
#include "besovtight/tightness.hpp"
#include "besovtight/wavelet.hpp"

namespace besovtight {

inline constexpr const char* kVersion = "besovtight 1.0.0";

using Json = nlohmann::ordered_json;

struct OutputFile {
    std::string name;  // relative to the output directory
    std::string content;
};

struct RunResult {
    std::vector<OutputFile> files;
    bool check_passed = true;
    std::vector<std::string> messages;
    std::vector<std::uint64_t> chain_seeds;
};

struct RunManifest {
    std::string config_echo;
    std::string version = kVersion;
    std::vector<std::uint64_t> chain_seeds;
    double wall_clock_seconds = 0.0;
    std::vector<std::pair<std::string, std::string>> digests;  // file, sha256 hex
};

inline std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

inline std::string csv_num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline Json json_num(double v) { return std::isfinite(v) ? Json(v) : Json(csv_num(v)); }

/// Rows of the sample-summary table: observable, value, stderr, n_samples, seed.
class SummaryTable {
public:
    void add(const std::string& observable, double value, double stderr_, std::size_t n, std::uint64_t seed) {
        rows_ << observable << ',' << csv_num(value) << ',' << csv_num(stderr_) << ',' << n << ',' << seed << '\n';
    }
    std::string str() const { return "observable,value,stderr,n_samples,seed\n" + rows_.str(); }

private:
    std::ostringstream rows_;
};

inline ising::ChainSchedule schedule_of(const ExperimentConfig& c, int threads) {
    ising::ChainSchedule s;
    s.chains = c.chains;
    s.sweeps = c.sweeps;
    s.burn_in = c.burn_in;
    s.thin = c.thin;
    s.seed = c.seed;
    s.threads = threads;
    return s;
}

inline std::vector<std::uint64_t> chain_seeds(std::uint64_t seed, int chains) {
    std::vector<std::uint64_t> out;
    for (int c = 0; c < chains; ++c) out.push_back(derive_seed(seed, static_cast<std::uint64_t>(c)));
    return out;
}

inline MomentRegion moment_region(const ExperimentConfig& c, const std::string& id) {
    MomentRegion mr;
    mr.region.K = c.K;
    mr.region.k = c.k;
    mr.region.U = Domain::box(c.U());
    mr.n_min = c.k;
    mr.n_max = c.n_max;
    mr.rule = c.positions == "lattice" ? PositionRule::lattice_in_K : PositionRule::support_in_K;
    mr.id = id;
    return mr;
}

inline MagnetizationLattice magnetization_lattice(const ExperimentConfig& c) {
    MagnetizationLattice lat;
    lat.L = c.L;
    lat.a = c.spacing();
    lat.offset = c.lattice_offset();
    lat.boundary = c.boundary;
    return lat;
}

inline std::string level_table_csv(const MomentScalingReport& r) {
    std::ostringstream os;
    os << "level,n,value,stderr,x_count,sample_count,kind,argmax_x1,argmax_x2\n";
    auto row = [&](const char* tag, const LevelRecord& l) {
        os << tag << ',' << l.n << ',' << csv_num(l.value) << ',' << csv_num(l.stderr_) << ',' << l.x_count << ','
           << l.sample_count << ',' << l.kind << ',' << csv_num(l.argmax.x) << ',' << csv_num(l.argmax.y) << '\n';
    };
    row("father", r.father);
    for (const auto& l : r.levels) row("mother", l);
    return os.str();
}

inline Json report_json(const MomentScalingReport& r) {
    Json j;
    j["basis"] = r.basis_id;
    j["region"] = r.region_id;
    j["p"] = json_num(r.p);
    j["has_fit"] = r.has_fit;
    j["slope"] = json_num(r.slope);
    j["beta_hat"] = json_num(r.beta_hat());
    j["slope_stderr"] = json_num(r.slope_stderr);
    j["intercept"] = json_num(r.intercept);
    j["father_value"] = json_num(r.father.value);
    j["warnings"] = r.warnings;
    return j;
}

inline Json verdict_json(const TightnessVerdict& v) {
    Json j;
    j["alpha"] = json_num(v.alpha);
    j["p"] = json_num(v.p);
    j["q"] = json_num(v.q);
    j["multiplier"] = json_num(v.multiplier);
    j["besov"] = v.besov_label();
    j["besov_margin"] = json_num(v.besov_margin);
    j["holder"] = v.holder_label();
    j["holder_margin"] = json_num(v.holder_margin);
    j["kind"] = TightnessVerdict::kind;
    return j;
}

namespace detail {

inline bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

inline Json exponent_json(const ising::ExponentResult& r, double target, double tol) {
    Json j;
    j["observable"] = r.observable;
    j["has_fit"] = r.has_fit;
    j["exponent"] = json_num(r.exponent);
    j["exponent_stderr"] = json_num(r.exponent_stderr);
    j["target"] = target;
    j["tolerance"] = tol;
    j["warnings"] = r.warnings;
    return j;
}

inline std::string rows_csv(const char* xname, const std::vector<ising::ScalingRow>& rows) {
    std::ostringstream os;
    os << xname << ",value,stderr,n_samples\n";
    for (const auto& r : rows)
        os << csv_num(r.x) << ',' << csv_num(r.estimate.mean) << ',' << csv_num(r.estimate.stderr_) << ','
           << r.estimate.n << '\n';
    return os.str();
}

inline std::string snapshot_bytes(const ising::SwendsenWangChain& chain, int L, std::uint64_t seed) {
    ising::Snapshot s;
    s.L = L;
    s.boundary = chain.domain().boundary();
    s.seed = seed;
    s.spins = chain.spins();
    s.omega = chain.omega();
    std::ostringstream os(std::ios::binary);
    ising::write_snapshot(os, s);
    return os.str();
}

}  // namespace detail

/// Runs the configured experiment. Outputs depend only on (config, seed).
inline RunResult run_experiment(const ExperimentConfig& cfg, int threads) {
    validate_config(cfg);
    RunResult out;
    const double p = cfg.p_bond.value_or(ising::critical_parameters().p_c);
    const auto sched = schedule_of(cfg, threads);
    Json summary;
    summary["experiment"] = to_string(cfg.kind);
    summary["seed"] = cfg.seed;
    summary["p_bond"] = p;
    SummaryTable table;

    switch (cfg.kind) {
        case ExperimentKind::oracle: {
            const auto checks = ising::run_oracle_suite();
            std::ostringstream os;
            os << "check,passed,observed,expected,tolerance\n";
            for (const auto& c : checks) {
                os << c.name << ',' << (c.passed ? 1 : 0) << ',' << csv_num(c.observed) << ',' << csv_num(c.expected)
                   << ',' << csv_num(c.tolerance) << '\n';
                out.messages.push_back((c.passed ? "PASS " : "FAIL ") + c.name);
            }
            out.check_passed = ising::all_passed(checks);
            summary["checks"] = checks.size();
            summary["all_passed"] = out.check_passed;
            out.files.push_back({"oracle.csv", os.str()});
            break;
        }
        case ExperimentKind::two_point: {
            const auto r = ising::two_point_experiment(cfg.L, cfg.boundary, cfg.distances, sched, p);
            out.chain_seeds = chain_seeds(cfg.seed, cfg.chains);
            for (const auto& row : r.rows)
                table.add("corr_m" + std::to_string(static_cast<int>(row.x)), row.estimate.mean, row.estimate.stderr_,
                          row.estimate.n, cfg.seed);
            table.add("eta", r.exponent, r.exponent_stderr, r.rows.front().estimate.n, cfg.seed);
            out.check_passed = r.has_fit && detail::within(r.exponent, 0.25, 0.04);
            summary["fit"] = detail::exponent_json(r, 0.25, 0.04);
            out.files.push_back({"two_point.csv", detail::rows_csv("distance", r.rows)});
            out.messages.push_back("eta = " + csv_num(r.exponent) + " +- " + csv_num(r.exponent_stderr));
            break;
        }
        case ExperimentKind::one_arm: {
            const auto r = ising::one_arm_experiment(cfg.radii, sched, p);
            for (int m : cfg.radii) {
                const auto seeds = chain_seeds(cfg.seed ^ mix64(static_cast<std::uint64_t>(m)), cfg.chains);
                if (m > 0) out.chain_seeds.insert(out.chain_seeds.end(), seeds.begin(), seeds.end());
            }
            for (const auto& row : r.rows)
                table.add("one_arm_m" + std::to_string(static_cast<int>(row.x)), row.estimate.mean,
                          row.estimate.stderr_, row.estimate.n, cfg.seed);
            table.add("one_arm_exponent", r.exponent, r.exponent_stderr, r.rows.back().estimate.n, cfg.seed);
            out.check_passed = r.has_fit && detail::within(r.exponent, 0.125, 0.04);
            summary["fit"] = detail::exponent_json(r, 0.125, 0.04);
            out.files.push_back({"one_arm.csv", detail::rows_csv("m", r.rows)});
            out.messages.push_back("one-arm exponent = " + csv_num(r.exponent) + " +- " + csv_num(r.exponent_stderr));
            break;
        }
        case ExperimentKind::corr_sum: {
            const auto r = ising::correlation_sum_experiment(cfg.sizes, cfg.order, sched, p);
            for (int N : cfg.sizes) {
                const auto seeds = chain_seeds(cfg.seed ^ mix64(static_cast<std::uint64_t>(N)), cfg.chains);
                out.chain_seeds.insert(out.chain_seeds.end(), seeds.begin(), seeds.end());
            }
            for (const auto& row : r.rows)
                table.add("corr_sum_N" + std::to_string(static_cast<int>(row.x)), row.estimate.mean,
                          row.estimate.stderr_, row.estimate.n, cfg.seed);
            out.check_passed = r.max_ratio <= 3.0;
            summary["order"] = r.order;
            summary["max_ratio"] = json_num(r.max_ratio);
            summary["ratio_limit"] = 3.0;
            out.files.push_back({"corr_sum.csv", detail::rows_csv("N", r.rows)});
            out.messages.push_back("normalized sums: max/min = " + csv_num(r.max_ratio));
            break;
        }
        case ExperimentKind::moment_scaling:
        case ExperimentKind::converse: {
            const auto lat = magnetization_lattice(cfg);
            std::vector<WaveletBasis2D> bases;
            const bool moments = cfg.kind == ExperimentKind::moment_scaling;
            if (moments)
                for (int n : cfg.bases) bases.push_back(WaveletBasis2D::daubechies(n, cfg.depth_for(n)));
            FieldObservers proto;
            for (const auto& b : bases) proto.moments.emplace_back(b, moment_region(cfg, "K"), cfg.p);
            if (!moments)
                proto.converse.emplace_back(lat.grid(), ConverseSetup{cfg.centre, cfg.radius, cfg.lambdas},
                                            radial_step_eta);
            std::vector<std::string> snaps(static_cast<std::size_t>(cfg.chains));
            const auto obs = run_magnetization_ensemble(lat, sched, p, proto,
                                                        [&](std::size_t c, const ising::SwendsenWangChain& ch) {
                                                            snaps[c] = detail::snapshot_bytes(
                                                                ch, cfg.L, derive_seed(cfg.seed, c));
                                                        });
            out.chain_seeds = chain_seeds(cfg.seed, cfg.chains);
            for (std::size_t c = 0; c < snaps.size(); ++c) {
                char name[48];
                std::snprintf(name, sizeof name, "snapshots/chain_%04zu.bts", c);
                out.files.push_back({name, std::move(snaps[c])});
            }
            const std::size_t samples = static_cast<std::size_t>(cfg.chains) * static_cast<std::size_t>(cfg.sweeps);
            if (moments) {
                Json reports = Json::array();
                for (std::size_t b = 0; b < bases.size(); ++b) {
                    const auto rep = moment_bound_scaling(collect_moments(obs, b));
                    Json rj = report_json(rep);
                    Json verdicts = Json::array();
                    if (rep.has_fit)
                        for (std::size_t t = 0; t < cfg.alphas.size(); ++t)
                            verdicts.push_back(
                                verdict_json(tightness_verdict(rep, cfg.alphas[t], cfg.p, cfg.q, cfg.margins[t])));
                    rj["verdicts"] = verdicts;
                    reports.push_back(rj);
                    out.files.push_back({"moments_" + rep.basis_id + ".csv", level_table_csv(rep)});
                    table.add("beta_hat_" + rep.basis_id, rep.beta_hat(), rep.slope_stderr, samples, cfg.seed);
                    const bool ok = rep.has_fit && detail::within(rep.beta_hat(), -0.125, 0.06);
                    out.check_passed = out.check_passed && ok;
                    out.messages.push_back(rep.basis_id + ": beta_hat = " + csv_num(rep.beta_hat()) + " +- " +
                                           csv_num(rep.slope_stderr));
                }
                summary["reports"] = reports;
            } else {
                const auto prof = lower_bound_profile(collect_converse(obs));
                std::ostringstream os;
                os << "lambda,mean,stderr,n_samples,used\n";
                for (const auto& r : prof.rows) {
                    os << csv_num(r.lambda) << ',' << csv_num(r.mean) << ',' << csv_num(r.stderr_) << ',' << r.samples
                       << ',' << (r.used ? 1 : 0) << '\n';
                    if (r.used) table.add("X_lambda_" + csv_num(r.lambda), r.mean, r.stderr_, r.samples, cfg.seed);
                }
                table.add("growth_exponent", prof.growth, prof.growth_stderr, samples, cfg.seed);
                out.files.push_back({"converse.csv", os.str()});
                summary["growth"] = json_num(prof.growth);
                summary["growth_stderr"] = json_num(prof.growth_stderr);
                summary["warnings"] = prof.warnings;
                out.check_passed = prof.has_fit && detail::within(prof.growth, 0.125, 0.05);
                out.messages.push_back("growth exponent = " + csv_num(prof.growth) + " +- " +
                                       csv_num(prof.growth_stderr));
            }
            break;
        }
        case ExperimentKind::kolmogorov: {
            const auto lat = magnetization_lattice(cfg);
            const auto domain = ising::LatticeDomain::box(cfg.L, cfg.L, cfg.boundary);
            ising::SwendsenWangChain chain(domain, p, derive_seed(cfg.seed, 0));
            for (long t = 0; t < cfg.burn_in + 1; ++t) chain.sweep();
            out.chain_seeds = {derive_seed(cfg.seed, 0)};
            const auto field = magnetization_field(chain.spins(), domain, lat.a, lat.U());
            const auto haar = WaveletBasis2D::daubechies(1, cfg.depth_for(1));
            const AdaptedRegion region{cfg.K, cfg.k, Domain::box(cfg.U()), "K"};
            const auto gaps = kolmogorov_convergence_check(field, haar, region, cfg.n_max, cfg.alpha, cfg.p);
            const double norm = local_seminorm(build_pyramid(field, haar, region, cfg.n_max), {cfg.alpha, cfg.p, 1.0});
            std::ostringstream os;
            os << "N,gap\n";
            bool monotone = true;
            for (std::size_t t = 0; t < gaps.size(); ++t) {
                os << cfg.k + static_cast<int>(t) << ',' << csv_num(gaps[t]) << '\n';
                if (t > 0 && gaps[t] > gaps[t - 1] + 1e-10) monotone = false;
            }
            const bool terminal = gaps.back() < 1e-6 * norm;
            out.check_passed = monotone && terminal;
            summary["norm"] = json_num(norm);
            summary["non_increasing"] = monotone;
            summary["terminal_gap"] = json_num(gaps.back());
            out.files.push_back({"kolmogorov.csv", os.str()});
            table.add("terminal_gap", gaps.back(), 0.0, 1, cfg.seed);
            break;
        }
    }
    summary["check_passed"] = out.check_passed;
    out.files.push_back({"summary.csv", table.str()});
    out.files.push_back({"summary.json", summary.dump(2) + "\n"});
    return out;
}

inline Json manifest_json(const RunManifest& m) {
    Json j;
    j["version"] = m.version;
    j["config"] = m.config_echo;
    j["chain_seeds"] = m.chain_seeds;
    j["wall_clock_seconds"] = m.wall_clock_seconds;
    Json files = Json::object();
    for (const auto& [name, digest] : m.digests) files[name] = digest;
    j["sha256"] = files;
    return j;
}

namespace detail {
inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("cannot write " + p.string());
}
}  // namespace detail

/// Writes every file into out/.staging-<seed>, renames them into `out`, then
/// publishes manifest.json last via its own temp file. A failed run leaves the
/// staging directory behind and no manifest.
inline RunManifest commit_outputs(const ExperimentConfig& cfg, const RunResult& result,
                                  const std::filesystem::path& out, double wall_clock_seconds) {
    namespace fs = std::filesystem;
    fs::create_directories(out);
    const fs::path staging = out / (".staging-" + std::to_string(cfg.seed));
    fs::remove_all(staging);
    RunManifest m;
    m.config_echo = echo_config(cfg);
    m.chain_seeds = result.chain_seeds;
    m.wall_clock_seconds = wall_clock_seconds;
    for (const auto& f : result.files) {
        if (f.name.find("..") != std::string::npos || fs::path(f.name).is_absolute())
            throw std::invalid_argument("output name escapes the output directory: " + f.name);
        detail::write_file(staging / f.name, f.content);
        m.digests.emplace_back(f.name, sha256_hex(f.content));
    }
    detail::write_file(staging / "config.ini", m.config_echo);
    m.digests.emplace_back("config.ini", sha256_hex(m.config_echo));
    fs::remove(out / "manifest.json");
    for (const auto& [name, digest] : m.digests) {
        const fs::path target = out / name;
        fs::create_directories(target.parent_path());
        fs::rename(staging / name, target);
    }
    detail::write_file(staging / "manifest.json", manifest_json(m).dump(2) + "\n");
    fs::rename(staging / "manifest.json", out / "manifest.json");
    fs::remove_all(staging);
    return m;
}

struct VerifyResult {
    bool ok = true;
    std::vector<std::string> problems;
};

/// Recomputes every digest listed in out/manifest.json.
inline VerifyResult verify_manifest(const std::filesystem::path& out) {
    VerifyResult v;
    std::ifstream is(out / "manifest.json");
    if (!is) return {false, {"missing manifest.json"}};
    const auto j = Json::parse(is);
    for (const auto& [name, digest] : j.at("sha256").items()) {
        std::ifstream f(out / name, std::ios::binary);
        if (!f) {
            v.ok = false;
            v.problems.push_back("missing " + name);
            continue;
        }
        std::ostringstream ss;
        ss << f.rdbuf();
        if (sha256_hex(ss.str()) != digest.get<std::string>()) {
            v.ok = false;
            v.problems.push_back("digest mismatch: " + name);
        }
    }
    return v;
}

}  // namespace besovtight
