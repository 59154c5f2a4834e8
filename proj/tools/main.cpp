// specsense: spectrum-sensing detection toolkit.
//
// Subcommands: calibrate (empirical thresholds), sense (one decision on a
// sample file), sweep (Monte Carlo Pd/Pfa report), selftest (property suite).
// Exit codes: 0 = no signal / success, 10 = signal present, 11 = config
// error, 12 = runtime error.

#include "CLI11.hpp"

#include "specsense/detectors.hpp"
#include "specsense/errors.hpp"
#include "specsense/frames.hpp"
#include "specsense/gauss.hpp"
#include "specsense/matfunc.hpp"
#include "specsense/montecarlo.hpp"
#include "specsense/rng.hpp"
#include "specsense/signals.hpp"
#include "specsense/stream.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ss = specsense;

namespace {

constexpr int kExitAbsent = 0;
constexpr int kExitPresent = 10;
constexpr int kExitConfig = 11;
constexpr int kExitRuntime = 12;

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Every run logs its fully resolved configuration (defaults materialized) so
// any output can be reproduced from the log alone.
void log_resolved(CLI::App& cmd) {
    std::cerr << "# resolved config [" << cmd.get_name() << "]\n";
    std::istringstream in(cmd.config_to_str(true, false));
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) std::cerr << "#   " << line << "\n";
    }
}

struct GeometryOpts {
    std::size_t L = 32;
    std::size_t K = 166;
    std::size_t Nk = 600;
    std::size_t stride = 1;
};

void add_geometry(CLI::App* cmd, GeometryOpts& g, bool with_k) {
    cmd->add_option("--L", g.L, "sensing vector length (smoothing factor)")
        ->capture_default_str();
    cmd->add_option("--Nk", g.Nk, "vectors per sub-segment")->capture_default_str();
    if (with_k) {
        cmd->add_option("--K", g.K, "sub-segments per sensing segment")
            ->capture_default_str();
    }
    cmd->add_option("--stride", g.stride, "samples between consecutive vectors")
        ->capture_default_str();
}

struct SignalOpts {
    std::string kind = "vsb_like";
    double ar1_rho = 0.9;
    std::string path;
};

void add_signal(CLI::App* cmd, SignalOpts& s) {
    cmd->add_option("--signal", s.kind, "signal source: vsb_like, ar1, file")
        ->capture_default_str();
    cmd->add_option("--ar1-rho", s.ar1_rho, "AR(1) coefficient for signal=ar1")
        ->capture_default_str();
    cmd->add_option("--signal-path", s.path, "sample file for signal=file");
}

CLI::Option* add_seed(CLI::App* cmd, std::uint64_t& seed) {
    return cmd->add_option("--seed", seed, "master seed (env SPECSENSE_SEED; flag wins)")
        ->capture_default_str();
}

void add_config_flag(CLI::App* cmd, std::string& path) {
    cmd->add_option("--config", path,
                    "flat key=value config file ('#' comments); flags win");
}

struct ConfigEntry {
    std::string key;
    std::string value;
    std::size_t line;
};

// Flat key=value config parsing. Keys are long option names without the
// leading dashes; later duplicates win; '#' starts a comment.
std::vector<ConfigEntry> parse_flat_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ss::ConfigError("cannot open config file: " + path);
    std::vector<ConfigEntry> entries;
    const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ss::ConfigError(path + ":" + std::to_string(lineno) +
                                  ": expected key=value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ss::ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        }
        if (key == "config") {
            throw ss::ConfigError(path + ":" + std::to_string(lineno) +
                                  ": config files cannot nest");
        }
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        std::erase_if(entries, [&](const ConfigEntry& e) { return e.key == key; });
        entries.push_back({std::move(key), std::move(value), lineno});
    }
    return entries;
}

// Expands a --config file and the SPECSENSE_SEED env var into option tokens
// inserted right after the subcommand. A key is only injected when its flag
// is absent from the real command line, so precedence is exactly:
// flag > SPECSENSE_SEED > config file > built-in default.
std::vector<std::string> expand_args(CLI::App& app, const std::vector<std::string>& raw) {
    std::size_t sub_idx = raw.size();
    CLI::App* sub = nullptr;
    for (std::size_t i = 0; i < raw.size() && !sub; ++i) {
        sub = app.get_subcommand_no_throw(raw[i]);
        sub_idx = i;
    }
    if (!sub) return raw;

    const auto has_flag = [&](const std::string& key) {
        const std::string bare = "--" + key;
        const std::string eq = bare + "=";
        for (std::size_t i = sub_idx + 1; i < raw.size(); ++i) {
            if (raw[i] == bare || raw[i].rfind(eq, 0) == 0) return true;
        }
        return false;
    };

    std::string config_path;
    for (std::size_t i = sub_idx + 1; i < raw.size(); ++i) {
        if (raw[i] == "--config" && i + 1 < raw.size()) config_path = raw[i + 1];
        else if (raw[i].rfind("--config=", 0) == 0) config_path = raw[i].substr(9);
    }

    std::vector<std::string> out(raw.begin(), raw.begin() + sub_idx + 1);

    const char* env_seed = std::getenv("SPECSENSE_SEED");
    const bool use_env_seed = env_seed != nullptr && *env_seed != '\0' &&
                              !has_flag("seed") &&
                              sub->get_option_no_throw("--seed") != nullptr;
    if (use_env_seed) {
        out.emplace_back("--seed");
        out.emplace_back(env_seed);
    }

    if (!config_path.empty()) {
        for (auto& [key, value, line] : parse_flat_config(config_path)) {
            if (sub->get_option_no_throw("--" + key) == nullptr) {
                throw ss::ConfigError(config_path + ":" + std::to_string(line) +
                                      ": unknown key '" + key + "' for subcommand " +
                                      sub->get_name());
            }
            if (has_flag(key)) continue;                 // explicit flag wins
            if (key == "seed" && use_env_seed) continue; // env wins over file
            out.emplace_back("--" + key);
            out.emplace_back(std::move(value));
        }
    }

    out.insert(out.end(), raw.begin() + sub_idx + 1, raw.end());
    return out;
}

// Signal-covariance prior for EC, estimated from one long clean stream of the
// chosen source. The source is unit power, so the same prior serves any noise
// level; only sigma2 changes the gain matrix.
ss::EcPrior build_ec_prior(const ss::SignalSpec& spec, std::size_t L, double sigma2,
                           std::uint64_t master_seed) {
    const std::size_t n = 200000;
    const std::size_t avail = n - L + 1;
    const ss::SensingConfig cfg = ss::make_config(L, 2, avail / 2, 1);
    const std::uint64_t seed = ss::SeedChain(master_seed).mix("ec-prior").value();
    return ss::EcPrior(ss::whole_segment_covariance(ss::generate_signal(spec, n, seed), cfg),
                       sigma2);
}

std::map<std::string, double> read_threshold_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ss::FileNotFound("cannot open threshold table: " + path);
    std::map<std::string, double> table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        std::string name;
        double value;
        if (!(row >> name)) continue;
        if (!(row >> value)) {
            throw ss::ConfigError(path + ":" + std::to_string(lineno) +
                                  ": expected '<detector> <threshold>'");
        }
        table[name] = value;
    }
    return table;
}

ss::SampleStream read_input(const std::string& path, const std::string& format) {
    if (format == "text") return ss::read_samples_text(path);
    if (format == "f32le") return ss::read_samples_f32le(path);
    // auto: .txt reads as text, everything else as f32le
    const bool txt = path.size() > 4 && path.compare(path.size() - 4, 4, ".txt") == 0;
    return txt ? ss::read_samples_text(path) : ss::read_samples_f32le(path);
}

// ---------------------------------------------------------------- calibrate

struct CalibrateOpts {
    GeometryOpts geo;
    double pfa = 0.01;
    std::size_t trials = 5000;
    std::uint64_t seed = 1;
    std::vector<std::string> detectors{"mme", "agm"};
    double sigma2 = 1.0;
    SignalOpts signal;
    std::string feature_file;
    std::string save_feature;
    double gamma_e = 0.85;
    std::string out = "thresholds.txt";
};

int run_calibrate(CLI::App& cmd, const CalibrateOpts& o) {
    log_resolved(cmd);
    const ss::SensingConfig cfg = ss::make_config(o.geo.L, o.geo.K, o.geo.Nk, o.geo.stride);
    const ss::SignalSpec spec = ss::SignalSpec::parse(o.signal.kind, o.signal.ar1_rho,
                                                      o.signal.path);

    ss::DetectorContext ctx;
    std::vector<std::pair<std::string, double>> table;
    for (const std::string& name : o.detectors) {
        const ss::DetectorKind kind = ss::detector_from_name(name);
        if (kind == ss::DetectorKind::FMD) continue; // closed form, printed below
        if (kind == ss::DetectorKind::FTM && !ctx.ftm_feature) {
            if (!o.feature_file.empty()) {
                ctx.ftm_feature = ss::feature_from_file(o.feature_file);
            } else {
                std::vector<ss::SampleStream> segs;
                for (int i = 0; i < 2; ++i) {
                    const std::uint64_t s =
                        ss::SeedChain(o.seed).mix("ftm-learn").mix(i).value();
                    segs.push_back(
                        ss::generate_signal(spec, cfg.samples_needed(cfg.Ns), s));
                }
                auto feat = ss::fla_learn(segs, cfg, o.gamma_e);
                if (!feat) {
                    throw ss::Error("ftm: feature learning failed at gamma_e=" +
                                    fmt6(o.gamma_e) + " for signal " + spec.name());
                }
                ctx.ftm_feature = std::move(*feat);
            }
            if (!o.save_feature.empty()) {
                ss::feature_to_file(o.save_feature, *ctx.ftm_feature);
            }
        }
        if (kind == ss::DetectorKind::EC && !ctx.ec_prior) {
            ctx.ec_prior = build_ec_prior(spec, cfg.L, o.sigma2, o.seed);
        }
        const double thr = ss::calibrate_threshold_empirical(
            kind, ss::NoiseModel{o.sigma2}, cfg, o.pfa, o.trials, o.seed, ctx);
        table.emplace_back(name, thr);
    }

    const double gamma = ss::fmd_threshold(o.pfa, cfg.K, cfg.Nk, cfg.L, o.sigma2);

    std::ofstream out(o.out, std::ios::trunc);
    if (!out) throw ss::FileNotFound("cannot open output file: " + o.out);
    out << "# empirical thresholds: pfa=" << fmt6(o.pfa) << " trials=" << o.trials
        << " L=" << cfg.L << " K=" << cfg.K << " Nk=" << cfg.Nk << " stride="
        << cfg.vector_stride << " sigma2=" << fmt6(o.sigma2) << " seed=" << o.seed << "\n";
    out << "# fmd analytic gamma = " << fmt17(gamma) << " (not an empirical row)\n";
    for (const auto& [name, thr] : table) out << name << " " << fmt17(thr) << "\n";
    if (!out) throw ss::Error("failed writing " + o.out);

    for (const auto& [name, thr] : table) {
        std::cout << name << " " << fmt17(thr) << "\n";
    }
    std::cout << "fmd " << fmt17(gamma) << " (analytic, sigma2=" << fmt6(o.sigma2)
              << ")\n";
    std::cerr << "wrote " << table.size() << " thresholds to " << o.out << "\n";
    return kExitAbsent;
}

// -------------------------------------------------------------------- sense

struct SenseOpts {
    std::string input;
    std::string format = "auto";
    GeometryOpts geo;
    std::size_t K = 0; // 0 = derive from stream length
    std::vector<std::string> detectors{"fmd"};
    std::string fn = "identity";
    std::optional<double> fn_param;
    double pfa = 0.01;
    std::string noise_mode = "from_data";
    std::optional<double> sigma2;
    std::string thresholds_file;
    std::string feature_file;
    SignalOpts signal;
    std::uint64_t seed = 1;
};

int run_sense(CLI::App& cmd, const SenseOpts& o) {
    log_resolved(cmd);
    std::cerr << "#   input=" << o.input << "\n";

    const ss::SampleStream stream = read_input(o.input, o.format);
    std::size_t K = o.K;
    if (K == 0) {
        if (stream.size() < o.geo.L) {
            throw ss::InsufficientSamples("stream shorter than one sensing vector");
        }
        K = ((stream.size() - o.geo.L) / o.geo.stride + 1) / o.geo.Nk;
        if (K < 2) {
            throw ss::InsufficientSamples(
                "stream supports fewer than 2 sub-segments at this geometry");
        }
    }
    const ss::SensingConfig cfg = ss::make_config(o.geo.L, K, o.geo.Nk, o.geo.stride);

    std::map<std::string, double> table;
    if (!o.thresholds_file.empty()) table = read_threshold_table(o.thresholds_file);
    const auto table_threshold = [&](const std::string& name) {
        const auto it = table.find(name);
        if (it == table.end()) {
            throw ss::ConfigError("no threshold for detector '" + name +
                                  "'; run calibrate and pass --thresholds");
        }
        return it->second;
    };

    const ss::MonotoneFn identity = ss::monotone_fn("identity");
    bool any_present = false;
    for (const std::string& name : o.detectors) {
        const ss::DetectorKind kind = ss::detector_from_name(name);
        ss::DetectorOutcome outcome;
        if (kind == ss::DetectorKind::FMD) {
            ss::FmdParams params;
            params.f = ss::monotone_fn(o.fn, o.fn_param);
            params.pfa_target = o.pfa;
            params.noise_est_mode = o.noise_mode == "external"
                                        ? ss::NoiseEstMode::external
                                        : ss::NoiseEstMode::from_data;
            params.external_sigma2 = o.sigma2;
            params.validate();
            outcome = ss::fmd_decide(stream, cfg, params);
        } else {
            ss::DetectorContext ctx;
            if (kind == ss::DetectorKind::FTM) {
                if (o.feature_file.empty()) {
                    throw ss::ConfigError("ftm needs --feature (a learned feature file)");
                }
                ctx.ftm_feature = ss::feature_from_file(o.feature_file);
            }
            if (kind == ss::DetectorKind::EC) {
                if (!o.sigma2) throw ss::ConfigError("ec needs --sigma2 (noise prior)");
                const ss::SignalSpec spec =
                    ss::SignalSpec::parse(o.signal.kind, o.signal.ar1_rho, o.signal.path);
                ctx.ec_prior = build_ec_prior(spec, cfg.L, *o.sigma2, o.seed);
            }
            outcome.statistic = ss::detector_statistic(kind, stream, cfg, ctx, identity);
            outcome.threshold = table_threshold(name);
            outcome.decision = outcome.statistic > outcome.threshold
                                   ? ss::Decision::signal_present
                                   : ss::Decision::signal_absent;
        }

        const bool present = outcome.decision == ss::Decision::signal_present;
        any_present = any_present || present;
        std::cout << name << ": statistic=" << fmt17(outcome.statistic)
                  << " threshold=" << fmt17(outcome.threshold)
                  << " decision=" << (present ? "signal_present" : "signal_absent") << "\n";
        for (const auto& [k, v] : outcome.diagnostics) {
            std::cout << "  " << k << "=" << fmt6(v) << "\n";
        }
    }
    return any_present ? kExitPresent : kExitAbsent;
}

// -------------------------------------------------------------------- sweep

struct SweepOpts {
    SignalOpts signal;
    std::vector<std::string> detectors{"fmd", "mme", "agm", "ec"};
    std::vector<double> snr{-22, -21, -20, -19, -18, -17};
    std::vector<std::size_t> ns{100000};
    std::size_t L = 32;
    std::size_t Nk = 600;
    std::size_t stride = 1;
    std::size_t trials = 500;
    double pfa = 0.01;
    std::size_t cal_trials = 0;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    double gamma_e = 0.85;
    double failure_budget = 0.01;
    std::string out = "report.csv";
    std::string long_out;
    std::string json_out;
};

int run_sweep(CLI::App& cmd, const SweepOpts& o) {
    log_resolved(cmd);
    ss::TrialPlan plan;
    plan.detectors.clear();
    for (const std::string& name : o.detectors) {
        plan.detectors.push_back(ss::detector_from_name(name));
    }
    plan.signal = ss::SignalSpec::parse(o.signal.kind, o.signal.ar1_rho, o.signal.path);
    plan.snr_grid = o.snr;
    plan.ns_grid = o.ns;
    plan.L = o.L;
    plan.Nk = o.Nk;
    plan.vector_stride = o.stride;
    plan.n_trials = o.trials;
    plan.pfa_target = o.pfa;
    plan.master_seed = o.seed;
    plan.cal_trials = o.cal_trials;
    plan.failure_budget = o.failure_budget;
    plan.threads = o.threads;
    plan.gamma_e = o.gamma_e;
    plan.validate();

    const ss::TrialReport report = ss::snr_sweep(plan);
    ss::write_report_csv(o.out, report);
    if (!o.long_out.empty()) ss::write_report_long_csv(o.long_out, report);
    if (!o.json_out.empty()) ss::write_report_json(o.json_out, report);

    for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "wrote " << report.rows.size() << " rows to " << o.out << " (wall "
              << fmt6(report.wall_seconds) << " s)\n";
    if (report.any_cell_over_budget()) {
        std::cerr << "error: at least one cell exceeded the trial failure budget\n";
        return kExitRuntime;
    }
    return kExitAbsent;
}

// ----------------------------------------------------------------- selftest

struct SelftestOpts {
    std::uint64_t seed = 1;
    std::string fault = "none";
    std::size_t trials = 500;
};

// Exactly symmetric Wishart-style PSD matrix G G^T / dim.
ss::CovMatrix random_psd(std::size_t dim, ss::Rng& rng) {
    std::vector<double> g(dim * dim);
    for (double& x : g) x = rng.gaussian();
    std::vector<double> e(dim * dim, 0.0);
    for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = a; b < dim; ++b) {
            double acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k) acc += g[a * dim + k] * g[b * dim + k];
            e[a * dim + b] = e[b * dim + a] = acc / static_cast<double>(dim);
        }
    }
    return ss::CovMatrix(dim, std::move(e), dim);
}

int run_selftest(CLI::App& cmd, const SelftestOpts& o) {
    log_resolved(cmd);
    struct Row {
        std::string name;
        bool pass;
        std::string detail;
    };
    std::vector<Row> rows;

    { // Trace monotonicity under the Loewner order, all registered functions.
        std::size_t violations = 0;
        ss::Rng rng(ss::SeedChain(o.seed).mix("selftest").mix("fact1").value());
        const std::size_t dim = 16;
        for (std::size_t i = 0; i < 100; ++i) {
            const ss::CovMatrix A = random_psd(dim, rng);
            const ss::CovMatrix D = random_psd(dim, rng);
            std::vector<double> e(dim * dim);
            for (std::size_t j = 0; j < e.size(); ++j) e[j] = A.entries()[j] + D.entries()[j];
            const ss::CovMatrix B(dim, std::move(e), dim);
            for (const ss::MonotoneFn& f : ss::registered_fns()) {
                const double ta = ss::trace_fn(A, f);
                const double tb = ss::trace_fn(B, f);
                if (ta > tb + 1e-9 * std::max(1.0, std::abs(tb))) ++violations;
            }
        }
        rows.push_back({"trace-monotonicity", violations == 0,
                        std::to_string(violations) + " violations / 400 checks"});
    }

    { // Trace-then-average equals average-then-trace.
        const ss::SensingConfig cfg = ss::make_config(8, 5, 80);
        double worst = 0.0;
        for (std::size_t i = 0; i < 100; ++i) {
            const std::uint64_t s =
                ss::SeedChain(o.seed).mix("selftest").mix("trace-avg").mix(i).value();
            const ss::SampleStream stream =
                ss::generate_noise(cfg.samples_needed(cfg.Ns), 1.0, s);
            std::vector<ss::CovMatrix> subs;
            for (std::size_t k = 1; k <= cfg.K; ++k) {
                subs.push_back(ss::sub_segment_covariance(stream, cfg, k));
            }
            std::vector<double> traces;
            for (const auto& m : subs) traces.push_back(m.trace());
            const double t1 = ss::fmd_statistic_traces(traces);
            const double t2 = ss::average_covariance(subs).trace();
            worst = std::max(worst, std::abs(t1 - t2) / std::max(1.0, std::abs(t2)));
        }
        rows.push_back({"trace-average-identity", worst <= 1e-12,
                        "max relative gap " + fmt6(worst)});
    }

    { // Scale invariance: FMD from-data decisions, MME/AGM statistics.
        const ss::SensingConfig cfg = ss::make_config(8, 5, 80);
        ss::FmdParams params; // from_data default
        const ss::MonotoneFn identity = ss::monotone_fn("identity");
        std::size_t violations = 0;
        for (std::size_t i = 0; i < 20; ++i) {
            const std::uint64_t s =
                ss::SeedChain(o.seed).mix("selftest").mix("scale").mix(i).value();
            const ss::SampleStream base =
                ss::generate_noise(cfg.samples_needed(cfg.Ns), 1.0, s);
            const ss::DetectorOutcome ref = ss::fmd_decide(base, cfg, params);
            const double mme0 = ss::mme_statistic(ss::whole_segment_covariance(base, cfg));
            const double agm0 = ss::agm_statistic(ss::whole_segment_covariance(base, cfg));
            for (const double c : {0.1, 10.0}) {
                ss::SampleStream scaled = base;
                for (double& x : scaled.samples) x *= c;
                if (ss::fmd_decide(scaled, cfg, params).decision != ref.decision) ++violations;
                const ss::CovMatrix R = ss::whole_segment_covariance(scaled, cfg);
                if (std::abs(ss::mme_statistic(R) - mme0) > 1e-9 * mme0) ++violations;
                if (std::abs(ss::agm_statistic(R) - agm0) > 1e-9 * agm0) ++violations;
            }
        }
        rows.push_back({"scale-invariance", violations == 0,
                        std::to_string(violations) + " violations / 120 checks"});
    }

    { // Analytic threshold holds the false-alarm rate (reduced trial count).
        const ss::SensingConfig cfg = ss::make_config(32, 166, 600);
        double gamma = ss::fmd_threshold(0.01, cfg.K, cfg.Nk, cfg.L, 1.0);
        if (o.fault == "threshold-sign") gamma = -gamma; // deliberate fault hook
        std::size_t hits = 0;
        for (std::size_t t = 0; t < o.trials; ++t) {
            const std::uint64_t s =
                ss::SeedChain(o.seed).mix("selftest").mix("pfa").mix(t).value();
            const ss::SampleStream noise =
                ss::generate_noise(cfg.samples_needed(cfg.Ns), 1.0, s);
            const double rho = ss::fmd_statistic_traces(ss::sub_segment_traces(noise, cfg));
            if (rho > gamma) ++hits;
        }
        const double pfa = static_cast<double>(hits) / static_cast<double>(o.trials);
        rows.push_back({"pfa-calibration", pfa <= 0.03,
                        "pfa_emp=" + fmt6(pfa) + " target 0.01, band [0, 0.03]"});
    }

    bool all = true;
    for (const Row& r : rows) {
        all = all && r.pass;
        std::printf("%-24s %s  (%s)\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                    r.detail.c_str());
    }
    std::printf("selftest: %s\n", all ? "all properties pass" : "FAILURES detected");
    return all ? kExitAbsent : kExitRuntime;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectrum-sensing detection toolkit"};
    app.require_subcommand(1);
    std::string config_path;

    CalibrateOpts cal;
    CLI::App* cal_cmd = app.add_subcommand(
        "calibrate", "empirically calibrate baseline detector thresholds");
    add_config_flag(cal_cmd, config_path);
    add_geometry(cal_cmd, cal.geo, true);
    cal_cmd->add_option("--pfa", cal.pfa, "target false-alarm probability")
        ->capture_default_str();
    cal_cmd->add_option("--trials", cal.trials, "noise-only calibration trials")
        ->capture_default_str();
    add_seed(cal_cmd, cal.seed);
    cal_cmd
        ->add_option("--detectors", cal.detectors,
                     "comma-separated detector list (mme,agm,ftm,ec)")
        ->delimiter(',')
        ->capture_default_str();
    cal_cmd->add_option("--sigma2", cal.sigma2, "noise variance of the calibration model")
        ->capture_default_str();
    add_signal(cal_cmd, cal.signal);
    cal_cmd->add_option("--feature", cal.feature_file, "learned feature file for ftm");
    cal_cmd->add_option("--save-feature", cal.save_feature,
                        "write the learned ftm feature here");
    cal_cmd->add_option("--gamma-e", cal.gamma_e, "ftm feature-learning gate")
        ->capture_default_str();
    cal_cmd->add_option("--out", cal.out, "threshold table output path")
        ->capture_default_str();

    SenseOpts sen;
    CLI::App* sen_cmd =
        app.add_subcommand("sense", "run detectors on a raw sample file");
    add_config_flag(sen_cmd, config_path);
    sen_cmd->add_option("input", sen.input, "sample file")->required();
    sen_cmd
        ->add_option("--format", sen.format, "input format: auto, f32le, text")
        ->check(CLI::IsMember({"auto", "f32le", "text"}))
        ->capture_default_str();
    add_geometry(sen_cmd, sen.geo, false);
    sen_cmd->add_option("--K", sen.K, "sub-segments (0 = derive from stream length)")
        ->capture_default_str();
    sen_cmd
        ->add_option("--detectors", sen.detectors,
                     "comma-separated detector list (fmd,mme,agm,ftm,ec)")
        ->delimiter(',')
        ->capture_default_str();
    sen_cmd->add_option("--fn", sen.fn, "fmd matrix function: identity, sqrt, power, log1p")
        ->capture_default_str();
    sen_cmd->add_option("--p", sen.fn_param, "parameter for --fn power");
    sen_cmd->add_option("--pfa", sen.pfa, "fmd target false-alarm probability")
        ->capture_default_str();
    sen_cmd
        ->add_option("--noise-mode", sen.noise_mode,
                     "fmd noise variance source: from_data, external")
        ->check(CLI::IsMember({"from_data", "external"}))
        ->capture_default_str();
    sen_cmd->add_option("--sigma2", sen.sigma2,
                        "known noise variance (fmd external mode; ec prior)");
    sen_cmd->add_option("--thresholds", sen.thresholds_file,
                        "threshold table from calibrate (baselines)");
    sen_cmd->add_option("--feature", sen.feature_file, "learned feature file for ftm");
    add_signal(sen_cmd, sen.signal);
    add_seed(sen_cmd, sen.seed);

    SweepOpts swp;
    CLI::App* swp_cmd =
        app.add_subcommand("sweep", "Monte Carlo Pd/Pfa sweep, CSV report");
    add_config_flag(swp_cmd, config_path);
    add_signal(swp_cmd, swp.signal);
    swp_cmd
        ->add_option("--detectors", swp.detectors,
                     "comma-separated detector list (fmd,mme,agm,ftm,ec)")
        ->delimiter(',')
        ->capture_default_str();
    swp_cmd->add_option("--snr", swp.snr, "SNR grid in dB (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    swp_cmd->add_option("--ns", swp.ns, "segment sizes in samples (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    swp_cmd->add_option("--L", swp.L, "sensing vector length")->capture_default_str();
    swp_cmd->add_option("--Nk", swp.Nk, "vectors per sub-segment")->capture_default_str();
    swp_cmd->add_option("--stride", swp.stride, "samples between consecutive vectors")
        ->capture_default_str();
    swp_cmd->add_option("--trials", swp.trials, "Monte Carlo trials per cell")
        ->capture_default_str();
    swp_cmd->add_option("--pfa", swp.pfa, "target false-alarm probability")
        ->capture_default_str();
    swp_cmd
        ->add_option("--cal-trials", swp.cal_trials,
                     "calibration trials (0 = ceil(50/pfa))")
        ->capture_default_str();
    add_seed(swp_cmd, swp.seed);
    swp_cmd->add_option("--threads", swp.threads, "worker threads (0 = auto)")
        ->capture_default_str();
    swp_cmd->add_option("--gamma-e", swp.gamma_e, "ftm feature-learning gate")
        ->capture_default_str();
    swp_cmd
        ->add_option("--failure-budget", swp.failure_budget,
                     "max tolerated failed-trial fraction per cell")
        ->capture_default_str();
    swp_cmd->add_option("--out", swp.out, "report CSV path")->capture_default_str();
    swp_cmd->add_option("--long-out", swp.long_out, "long-format CSV path (plotting)");
    swp_cmd->add_option("--json-out", swp.json_out, "JSON report path");

    SelftestOpts st;
    CLI::App* st_cmd =
        app.add_subcommand("selftest", "run the built-in property suite");
    add_config_flag(st_cmd, config_path);
    add_seed(st_cmd, st.seed);
    st_cmd
        ->add_option("--fault-injection", st.fault,
                     "negative-control hook: none, threshold-sign")
        ->check(CLI::IsMember({"none", "threshold-sign"}))
        ->capture_default_str();
    st_cmd->add_option("--trials", st.trials, "trials for the false-alarm property")
        ->capture_default_str();

    try {
        std::vector<std::string> args =
            expand_args(app, std::vector<std::string>(argv + 1, argv + argc));
        std::reverse(args.begin(), args.end()); // CLI11's vector parse pops from the back
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    } catch (const ss::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (cal_cmd->parsed()) return run_calibrate(*cal_cmd, cal);
        if (sen_cmd->parsed()) return run_sense(*sen_cmd, sen);
        if (swp_cmd->parsed()) return run_sweep(*swp_cmd, swp);
        if (st_cmd->parsed()) return run_selftest(*st_cmd, st);
    } catch (const ss::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ss::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitAbsent;
}
