#pragma once

#include "specsense/config.hpp"
#include "specsense/detectors.hpp"
#include "specsense/signals.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace specsense {

// One Monte Carlo experiment: detectors x snr_grid x ns_grid cells.
struct TrialPlan {
    std::vector<DetectorKind> detectors{DetectorKind::FMD, DetectorKind::MME,
                                        DetectorKind::AGM, DetectorKind::EC};
    SignalSpec signal;
    std::vector<double> snr_grid{-22, -21, -20, -19, -18, -17};
    std::vector<std::size_t> ns_grid{100000};

    std::size_t L = 32;
    std::size_t Nk = 600;
    std::size_t vector_stride = 1;

    std::size_t n_trials = 500;
    double pfa_target = 0.01;
    std::uint64_t master_seed = 1;
    std::size_t cal_trials = 0;     // 0 = ceil(50/pfa_target)
    double failure_budget = 0.01;   // fraction of failed trials that fails a cell
    std::size_t threads = 1;        // worker cap; 0 = hardware concurrency
    double gamma_e = 0.85;          // FLA learning gate, FTM only

    void validate() const;

    // Geometry for one segment size: K = floor(available_vectors / Nk).
    SensingConfig config_for(std::size_t ns) const;

    std::size_t effective_cal_trials() const;
};

// One (detector, snr, ns) row of the report.
struct CellResult {
    DetectorKind detector{};
    std::string signal;
    double snr_db = 0.0;
    std::size_t ns = 0;
    std::size_t n_trials = 0;
    double pd = 0.0, pd_lo = 0.0, pd_hi = 0.0;
    double pfa_emp = 0.0;
    double threshold = 0.0;
    double mean_stat_h0 = 0.0, mean_stat_h1 = 0.0;
    std::size_t failures = 0;
    bool over_budget = false;
};

struct TrialReport {
    std::vector<CellResult> rows;
    std::vector<std::string> warnings; // monotonicity flags, over-budget cells
    double pfa_target = 0.0;
    std::uint64_t master_seed = 0;
    double wall_seconds = 0.0;

    bool any_cell_over_budget() const;
};

struct WilsonInterval {
    double lo = 0.0, hi = 0.0;
};

// 95% Wilson score interval for a binomial proportion.
WilsonInterval wilson95(std::size_t successes, std::size_t n);

// Precomputed per-(detector, ns[, snr]) thresholds and contexts.
// FMD keeps its closed form, evaluated with the true injected noise variance
// (known-noise evaluation; the from-data estimator is only consistent under
// H0, where its spread would drown the threshold margin - see README).
// MME/AGM/FTM are exactly scale-invariant, so one unit-variance calibration
// per segment size covers every SNR; EC re-quantiles stored unit-noise
// covariances per SNR because its gain matrix depends on the noise power.
class CellSetup {
public:
    CellSetup(const TrialPlan& plan);

    double threshold(DetectorKind det, std::size_t ns, double snr_db) const;
    const DetectorContext& context(std::size_t ns, double snr_db) const;

private:
    struct Key {
        std::size_t ns;
        double snr_db;
        bool operator<(const Key& o) const {
            return ns != o.ns ? ns < o.ns : snr_db < o.snr_db;
        }
    };
    const TrialPlan& plan_;
    std::map<DetectorKind, std::map<std::size_t, double>> scale_free_thresholds_;
    std::map<Key, double> ec_thresholds_;
    std::map<Key, DetectorContext> contexts_;
};

// Runs n_trials H1 trials plus n_trials noise-only trials for one cell.
// Per-trial seeds derive from (master_seed, role, detector, snr, ns, trial),
// so rows are bit-identical regardless of scheduling or thread count; failed
// trials are excluded and counted.
CellResult run_cell(const TrialPlan& plan, DetectorKind detector, double snr_db,
                    std::size_t ns, double threshold, const DetectorContext& ctx);

// All cells, with Pd-monotonicity violations beyond 3 Wilson intervals and
// over-budget cells flagged in warnings.
TrialReport snr_sweep(const TrialPlan& plan);

// Linear interpolation of the SNR achieving target_pd for one detector and
// segment size; throws NotBracketed when the sweep does not cross it.
double snr_at_pd(const TrialReport& report, DetectorKind detector, std::size_t ns,
                 double target_pd);

// detector,signal,snr_db,ns,n_trials,pd,pd_lo,pd_hi,pfa_emp,threshold,
// mean_stat_h0,mean_stat_h1,failures
void write_report_csv(const std::string& path, const TrialReport& report);

// Long format for plotting: detector,signal,ns,snr_db,metric,value.
void write_report_long_csv(const std::string& path, const TrialReport& report);

void write_report_json(const std::string& path, const TrialReport& report);

// Static-chunked parallel map over [0, total); fn(begin, end) must only touch
// disjoint slots. threads = 0 uses hardware concurrency; <= 1 runs inline.
void parallel_for(std::size_t total, std::size_t threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace specsense
