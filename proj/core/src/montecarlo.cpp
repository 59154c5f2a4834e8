#include "specsense/montecarlo.hpp"

#include "specsense/errors.hpp"
#include "specsense/gauss.hpp"
#include "specsense/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

namespace specsense {

namespace {

constexpr double kZ95 = 1.959963984540054;

double noise_var_for_snr(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

void TrialPlan::validate() const {
    if (detectors.empty()) throw EmptyInput("TrialPlan: empty detector set");
    if (snr_grid.empty()) throw ConfigError("TrialPlan: empty snr_grid");
    if (ns_grid.empty()) throw ConfigError("TrialPlan: empty ns_grid");
    if (n_trials < 100) throw ConfigError("TrialPlan: n_trials must be >= 100");
    if (!(pfa_target > 0.0 && pfa_target < 1.0)) {
        throw ConfigError("TrialPlan: pfa_target must lie in (0,1)");
    }
    if (!(failure_budget >= 0.0 && failure_budget <= 1.0)) {
        throw ConfigError("TrialPlan: failure_budget must lie in [0,1]");
    }
    for (std::size_t ns : ns_grid) config_for(ns);
}

SensingConfig TrialPlan::config_for(std::size_t ns) const {
    if (ns < L) throw ConfigError("TrialPlan: segment shorter than one vector");
    const std::size_t avail = (ns - L) / vector_stride + 1;
    const std::size_t K = avail / Nk;
    if (K < 2) {
        throw ConfigError("TrialPlan: segment of " + std::to_string(ns) +
                          " samples yields fewer than 2 sub-segments");
    }
    return make_config(L, K, Nk, vector_stride);
}

std::size_t TrialPlan::effective_cal_trials() const {
    if (cal_trials > 0) return cal_trials;
    return static_cast<std::size_t>(std::ceil(50.0 / pfa_target));
}

bool TrialReport::any_cell_over_budget() const {
    return std::any_of(rows.begin(), rows.end(),
                       [](const CellResult& r) { return r.over_budget; });
}

WilsonInterval wilson95(std::size_t successes, std::size_t n) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half =
        kZ95 * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    // At the boundaries the interval endpoint is exactly 0 (or 1); computing
    // center-half there leaves ulp-level residue, so pin the exact value.
    const double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi = successes == n ? 1.0 : std::min(1.0, center + half);
    return {lo, hi};
}

CellSetup::CellSetup(const TrialPlan& plan) : plan_(plan) {
    const bool need_ftm = std::count(plan.detectors.begin(), plan.detectors.end(),
                                     DetectorKind::FTM) > 0;
    const bool need_ec = std::count(plan.detectors.begin(), plan.detectors.end(),
                                    DetectorKind::EC) > 0;
    const std::size_t cal = plan.effective_cal_trials();

    // EC's Rs prior: whole-segment covariance of one long clean stream
    // ("perfect prior knowledge" framing); the signal is unit-power, so this
    // is reused across SNR levels.
    std::optional<CovMatrix> rs_unit;
    if (need_ec) {
        const std::size_t n = 200000;
        const std::size_t avail = n - plan.L + 1;
        const SensingConfig prior_cfg = make_config(plan.L, 2, avail / 2, 1);
        const std::uint64_t seed = SeedChain(plan.master_seed).mix("ec-prior").value();
        rs_unit = whole_segment_covariance(generate_signal(plan.signal, n, seed), prior_cfg);
    }

    for (std::size_t ns : plan.ns_grid) {
        const SensingConfig cfg = plan.config_for(ns);
        const std::size_t n_samples = cfg.samples_needed(cfg.Ns);

        std::optional<Feature> feat;
        if (need_ftm) {
            // Blind-learn the feature from two clean segments; a source whose
            // leading eigenvector is unstable fails the gate by design.
            std::vector<SampleStream> segs;
            for (int i = 0; i < 2; ++i) {
                const std::uint64_t seed =
                    SeedChain(plan.master_seed).mix("ftm-learn").mix(ns).mix(i).value();
                segs.push_back(generate_signal(plan.signal, n_samples, seed));
            }
            feat = fla_learn(segs, cfg, plan.gamma_e);
            if (!feat) {
                throw Error("ftm: blind feature learning failed at gamma_e=" +
                            fmt(plan.gamma_e) + " for signal " + plan.signal.name());
            }
        }

        DetectorContext cal_ctx;
        cal_ctx.ftm_feature = feat;
        for (DetectorKind det : plan.detectors) {
            if (det == DetectorKind::MME || det == DetectorKind::AGM ||
                det == DetectorKind::FTM) {
                scale_free_thresholds_[det][ns] = calibrate_threshold_empirical(
                    det, NoiseModel{1.0}, cfg, plan.pfa_target, cal, plan.master_seed,
                    cal_ctx);
            }
        }

        std::vector<CovMatrix> unit_covs;
        if (need_ec) {
            // Stored unit-variance noise covariances; scaling noise by
            // sqrt(Pn) scales the covariance by Pn, so each SNR level only
            // re-quantiles Pn * Ns * Tr(M(Pn) R_unit).
            unit_covs.reserve(cal);
            for (std::size_t t = 0; t < cal; ++t) {
                const std::uint64_t seed = SeedChain(plan.master_seed)
                                               .mix("calibrate")
                                               .mix("ec")
                                               .mix(ns)
                                               .mix(t)
                                               .value();
                unit_covs.push_back(
                    whole_segment_covariance(generate_noise(n_samples, 1.0, seed), cfg));
            }
        }

        for (double snr : plan.snr_grid) {
            DetectorContext ctx;
            ctx.ftm_feature = feat;
            if (need_ec) {
                const double pn = noise_var_for_snr(snr);
                EcPrior prior(*rs_unit, pn);
                std::vector<double> stats(unit_covs.size());
                for (std::size_t t = 0; t < unit_covs.size(); ++t) {
                    stats[t] = pn * ec_statistic_from_cov(unit_covs[t], prior);
                }
                ec_thresholds_[{ns, snr}] =
                    empirical_quantile(std::move(stats), 1.0 - plan.pfa_target);
                ctx.ec_prior = std::move(prior);
            }
            contexts_[{ns, snr}] = std::move(ctx);
        }
    }
}

double CellSetup::threshold(DetectorKind det, std::size_t ns, double snr_db) const {
    if (det == DetectorKind::FMD) {
        const SensingConfig cfg = plan_.config_for(ns);
        return fmd_threshold(plan_.pfa_target, cfg.K, cfg.Nk, cfg.L,
                             noise_var_for_snr(snr_db));
    }
    if (det == DetectorKind::EC) {
        return ec_thresholds_.at({ns, snr_db});
    }
    return scale_free_thresholds_.at(det).at(ns);
}

const DetectorContext& CellSetup::context(std::size_t ns, double snr_db) const {
    return contexts_.at({ns, snr_db});
}

CellResult run_cell(const TrialPlan& plan, DetectorKind detector, double snr_db,
                    std::size_t ns, double threshold, const DetectorContext& ctx) {
    const SensingConfig cfg = plan.config_for(ns);
    const std::size_t n_samples = cfg.samples_needed(cfg.Ns);
    const double pn = noise_var_for_snr(snr_db);
    const std::size_t nt = plan.n_trials;
    const MonotoneFn identity = monotone_fn("identity");
    const std::string det_name = detector_name(detector);

    enum : unsigned char { kOk, kFailed };
    struct Slot {
        double stat = 0.0;
        unsigned char status = kOk;
        bool detect = false;
    };
    std::vector<Slot> h1(nt), h0(nt);

    // Indices [0, nt) run H1 trials, [nt, 2*nt) run H0 trials. Seeds depend
    // only on (master_seed, role, detector, snr, ns, trial), never on the
    // execution schedule.
    parallel_for(2 * nt, plan.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            const bool under_h1 = idx < nt;
            const std::size_t t = under_h1 ? idx : idx - nt;
            Slot& slot = under_h1 ? h1[t] : h0[t];
            try {
                SampleStream stream;
                if (under_h1) {
                    const std::uint64_t sig_seed = SeedChain(plan.master_seed)
                                                       .mix("h1-signal")
                                                       .mix(det_name)
                                                       .mix(snr_db)
                                                       .mix(ns)
                                                       .mix(t)
                                                       .value();
                    const std::uint64_t noise_seed = SeedChain(plan.master_seed)
                                                         .mix("h1-noise")
                                                         .mix(det_name)
                                                         .mix(snr_db)
                                                         .mix(ns)
                                                         .mix(t)
                                                         .value();
                    stream = add_awgn(generate_signal(plan.signal, n_samples, sig_seed),
                                      snr_db, noise_seed);
                } else {
                    const std::uint64_t noise_seed = SeedChain(plan.master_seed)
                                                         .mix("h0-noise")
                                                         .mix(det_name)
                                                         .mix(snr_db)
                                                         .mix(ns)
                                                         .mix(t)
                                                         .value();
                    stream = generate_noise(n_samples, pn, noise_seed);
                }
                slot.stat = detector_statistic(detector, stream, cfg, ctx, identity);
                slot.detect = slot.stat > threshold;
            } catch (const Error&) {
                slot.status = kFailed;
            }
        }
    });

    CellResult r;
    r.detector = detector;
    r.signal = plan.signal.name();
    r.snr_db = snr_db;
    r.ns = ns;
    r.n_trials = nt;
    r.threshold = threshold;

    std::size_t h1_ok = 0, h1_hits = 0, h0_ok = 0, h0_hits = 0;
    double h1_sum = 0.0, h0_sum = 0.0;
    for (const Slot& s : h1) {
        if (s.status == kFailed) {
            ++r.failures;
            continue;
        }
        ++h1_ok;
        h1_sum += s.stat;
        if (s.detect) ++h1_hits;
    }
    for (const Slot& s : h0) {
        if (s.status == kFailed) {
            ++r.failures;
            continue;
        }
        ++h0_ok;
        h0_sum += s.stat;
        if (s.detect) ++h0_hits;
    }

    r.pd = h1_ok ? static_cast<double>(h1_hits) / static_cast<double>(h1_ok) : 0.0;
    const WilsonInterval wi = wilson95(h1_hits, h1_ok);
    r.pd_lo = wi.lo;
    r.pd_hi = wi.hi;
    r.pfa_emp = h0_ok ? static_cast<double>(h0_hits) / static_cast<double>(h0_ok) : 0.0;
    r.mean_stat_h1 = h1_ok ? h1_sum / static_cast<double>(h1_ok) : 0.0;
    r.mean_stat_h0 = h0_ok ? h0_sum / static_cast<double>(h0_ok) : 0.0;
    r.over_budget =
        static_cast<double>(r.failures) > plan.failure_budget * static_cast<double>(2 * nt);
    return r;
}

TrialReport snr_sweep(const TrialPlan& plan) {
    plan.validate();
    const auto t0 = std::chrono::steady_clock::now();

    CellSetup setup(plan);
    TrialReport report;
    report.pfa_target = plan.pfa_target;
    report.master_seed = plan.master_seed;

    for (DetectorKind det : plan.detectors) {
        for (std::size_t ns : plan.ns_grid) {
            for (double snr : plan.snr_grid) {
                CellResult row = run_cell(plan, det, snr, ns, setup.threshold(det, ns, snr),
                                          setup.context(ns, snr));
                if (row.over_budget) {
                    report.warnings.push_back("cell " + detector_name(det) + " ns=" +
                                              std::to_string(ns) + " snr=" + fmt(snr) +
                                              ": " + std::to_string(row.failures) +
                                              " failed trials exceed the failure budget");
                }
                report.rows.push_back(std::move(row));
            }
        }
    }

    // Pd should rise with SNR; flag drops beyond 3 Wilson intervals.
    for (DetectorKind det : plan.detectors) {
        for (std::size_t ns : plan.ns_grid) {
            std::vector<const CellResult*> cells;
            for (const CellResult& r : report.rows) {
                if (r.detector == det && r.ns == ns) cells.push_back(&r);
            }
            std::sort(cells.begin(), cells.end(), [](const CellResult* a, const CellResult* b) {
                return a->snr_db < b->snr_db;
            });
            for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
                const double hw_i = 0.5 * (cells[i]->pd_hi - cells[i]->pd_lo);
                const double hw_n = 0.5 * (cells[i + 1]->pd_hi - cells[i + 1]->pd_lo);
                const double slack = 3.0 * std::max(hw_i, hw_n);
                if (cells[i]->pd > cells[i + 1]->pd + slack) {
                    report.warnings.push_back(
                        "Pd non-monotonic beyond 3 Wilson intervals for " +
                        detector_name(det) + " ns=" + std::to_string(ns) + " between snr=" +
                        fmt(cells[i]->snr_db) + " and snr=" + fmt(cells[i + 1]->snr_db));
                }
            }
        }
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

double snr_at_pd(const TrialReport& report, DetectorKind detector, std::size_t ns,
                 double target_pd) {
    std::vector<std::pair<double, double>> pts; // (snr, pd)
    for (const CellResult& r : report.rows) {
        if (r.detector == detector && r.ns == ns) pts.emplace_back(r.snr_db, r.pd);
    }
    if (pts.empty()) {
        throw NotBracketed("snr_at_pd: no cells for detector/segment size");
    }
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double p0 = pts[i].second, p1 = pts[i + 1].second;
        if (p0 == target_pd) return pts[i].first;
        if ((p0 - target_pd) * (p1 - target_pd) <= 0.0 && p0 != p1) {
            return pts[i].first +
                   (target_pd - p0) * (pts[i + 1].first - pts[i].first) / (p1 - p0);
        }
    }
    if (pts.back().second == target_pd) return pts.back().first;
    throw NotBracketed("snr_at_pd: sweep does not bracket the target Pd");
}

namespace {

void write_row(std::ofstream& out, const CellResult& r) {
    out << detector_name(r.detector) << ',' << csv_escape(r.signal) << ',' << fmt(r.snr_db)
        << ',' << r.ns << ',' << r.n_trials << ',' << fmt(r.pd) << ',' << fmt(r.pd_lo) << ','
        << fmt(r.pd_hi) << ',' << fmt(r.pfa_emp) << ',' << fmt(r.threshold) << ','
        << fmt(r.mean_stat_h0) << ',' << fmt(r.mean_stat_h1) << ',' << r.failures << '\n';
}

} // namespace

void write_report_csv(const std::string& path, const TrialReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FileNotFound("cannot open report file for writing: " + path);
    out << "detector,signal,snr_db,ns,n_trials,pd,pd_lo,pd_hi,pfa_emp,threshold,"
           "mean_stat_h0,mean_stat_h1,failures\n";
    for (const CellResult& r : report.rows) write_row(out, r);
    if (!out) throw Error("failed writing report: " + path);
}

void write_report_long_csv(const std::string& path, const TrialReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FileNotFound("cannot open report file for writing: " + path);
    out << "detector,signal,ns,snr_db,metric,value\n";
    for (const CellResult& r : report.rows) {
        const std::pair<const char*, double> metrics[] = {
            {"pd", r.pd}, {"pd_lo", r.pd_lo}, {"pd_hi", r.pd_hi}, {"pfa_emp", r.pfa_emp}};
        for (const auto& [metric, value] : metrics) {
            out << detector_name(r.detector) << ',' << csv_escape(r.signal) << ',' << r.ns
                << ',' << fmt(r.snr_db) << ',' << metric << ',' << fmt(value) << '\n';
        }
    }
    if (!out) throw Error("failed writing report: " + path);
}

void write_report_json(const std::string& path, const TrialReport& report) {
    nlohmann::json j;
    j["pfa_target"] = report.pfa_target;
    j["master_seed"] = report.master_seed;
    j["wall_seconds"] = report.wall_seconds;
    j["warnings"] = report.warnings;
    j["rows"] = nlohmann::json::array();
    for (const CellResult& r : report.rows) {
        j["rows"].push_back({{"detector", detector_name(r.detector)},
                             {"signal", r.signal},
                             {"snr_db", r.snr_db},
                             {"ns", r.ns},
                             {"n_trials", r.n_trials},
                             {"pd", r.pd},
                             {"pd_lo", r.pd_lo},
                             {"pd_hi", r.pd_hi},
                             {"pfa_emp", r.pfa_emp},
                             {"threshold", r.threshold},
                             {"mean_stat_h0", r.mean_stat_h0},
                             {"mean_stat_h1", r.mean_stat_h1},
                             {"failures", r.failures}});
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FileNotFound("cannot open report file for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw Error("failed writing report: " + path);
}

void parallel_for(std::size_t total, std::size_t threads,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
    if (total == 0) return;
    std::size_t n_workers = threads == 0
                                ? std::max(1u, std::thread::hardware_concurrency())
                                : threads;
    n_workers = std::min(n_workers, total);
    if (n_workers <= 1) {
        fn(0, total);
        return;
    }
    const std::size_t chunk = (total + n_workers - 1) / n_workers;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(total, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, w, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace specsense
