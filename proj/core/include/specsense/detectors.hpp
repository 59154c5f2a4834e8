#pragma once

#include "specsense/config.hpp"
#include "specsense/covmatrix.hpp"
#include "specsense/frames.hpp"
#include "specsense/matfunc.hpp"
#include "specsense/stream.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace specsense {

enum class DetectorKind { FMD, MME, AGM, FTM, EC };

std::string detector_name(DetectorKind kind);
DetectorKind detector_from_name(const std::string& name);

enum class NoiseEstMode { from_data, external };

struct FmdParams {
    MonotoneFn f = monotone_fn("identity");
    double pfa_target = 0.01;
    NoiseEstMode noise_est_mode = NoiseEstMode::from_data;
    std::optional<double> external_sigma2;

    void validate() const {
        if (!(pfa_target > 0.0 && pfa_target < 1.0)) {
            throw DomainError("FmdParams: pfa_target must lie in (0,1)");
        }
        if (noise_est_mode == NoiseEstMode::external && !external_sigma2) {
            throw ConfigError("FmdParams: external noise mode needs external_sigma2");
        }
    }
};

enum class Decision { signal_absent, signal_present };

struct DetectorOutcome {
    double statistic = 0.0;
    double threshold = 0.0;
    Decision decision = Decision::signal_absent;
    std::map<std::string, double> diagnostics;
};

// Unit-Euclidean-norm feature vector (a leading eigenvector). The stored sign
// makes the largest-magnitude entry positive so serialized features are
// reproducible; comparisons use absolute correlation and ignore sign anyway.
class Feature {
public:
    explicit Feature(std::vector<double> v);

    const std::vector<double>& values() const { return v_; }
    std::size_t size() const { return v_.size(); }

private:
    std::vector<double> v_;
};

Feature feature_from_file(const std::string& path);
void feature_to_file(const std::string& path, const Feature& f);

// Signal-covariance / noise-variance prior for the estimator-correlator.
// Caches the gain matrix Rs (Rs + sigma2 I)^-1 at construction.
class EcPrior {
public:
    EcPrior(CovMatrix Rs, double sigma2);

    const CovMatrix& Rs() const { return Rs_; }
    double sigma2() const { return sigma2_; }
    const std::vector<double>& gain() const { return gain_; }
    std::size_t dim() const { return Rs_.dim(); }

private:
    CovMatrix Rs_;
    double sigma2_;
    std::vector<double> gain_; // row-major symmetric L x L
};

// --- FMD ---

// rho = Tr(f(mean of sub-segment covariances)), via the matrix route.
double fmd_statistic(std::span<const CovMatrix> sub_covs, const MonotoneFn& f);

// Identity-f shortcut: mean of the sub-segment traces. Equals the matrix
// route to 1e-12 relative; both paths are kept and cross-checked.
double fmd_statistic_traces(std::span<const double> traces);

// sigma_n^2 estimate from the spread of Z_k = Tr(R_x,k):
// sqrt(Nk/(2 L^2) * sample variance of Z). Needs K >= 2.
double estimate_noise_variance(std::span<const CovMatrix> sub_covs, std::size_t L,
                               std::size_t Nk);
double estimate_noise_variance_from_traces(std::span<const double> traces, std::size_t L,
                                           std::size_t Nk);

// Closed-form threshold gamma = (1 + Qinv(pfa) sqrt(2/(K Nk))) L sigma2_hat.
double fmd_threshold(double pfa, std::size_t K, std::size_t Nk, std::size_t L,
                     double sigma2_hat);

// Full pipeline: sub-segment covariances (trace shortcut when f is the
// identity), noise estimate per params, threshold, decision. Diagnostics
// carry rho, gamma, sigma2_hat, K, Nk, L.
DetectorOutcome fmd_decide(const SampleStream& stream, const SensingConfig& cfg,
                           const FmdParams& params);

// --- baselines ---

// lambda_max / lambda_min; throws SingularCovariance when the spectrum floor
// sits below 1e-12 * Tr(R).
double mme_statistic(const CovMatrix& R);

// Arithmetic over geometric mean of the spectrum, >= 1; geometric mean in the
// log domain. Same singularity guard as MME.
double agm_statistic(const CovMatrix& R);

// Max over all cyclic lags l of |sum_k a[k] b[(k+l) mod L]|; in [0,1] for
// unit-norm inputs.
double lagged_similarity(const Feature& a, const Feature& b);

Feature leading_eigenvector(const CovMatrix& R);

// Blind feature learning: scan consecutive segment pairs, return the later
// leading eigenvector of the first pair whose similarity exceeds gamma_e;
// nullopt when no pair qualifies.
std::optional<Feature> fla_learn(std::span<const SampleStream> segments,
                                 const SensingConfig& cfg, double gamma_e);

DetectorOutcome ftm_decide(const SampleStream& stream, const SensingConfig& cfg,
                           const Feature& learned, double gamma_ftm);

// T_EC = sum_j x_j^T Rs (Rs + sigma2 I)^-1 x_j over the given vectors.
double ec_statistic(std::span<const SensingVector> vectors, const EcPrior& prior);

// Same statistic from a precomputed segment covariance:
// sum_j x^T M x = n_vectors * Tr(M R). Cross-checked against ec_statistic.
double ec_statistic_from_cov(const CovMatrix& R, const EcPrior& prior);

// --- empirical calibration ---

struct NoiseModel {
    double sigma2 = 1.0;
};

// Learned feature / EC prior needed by FTM and EC statistics.
struct DetectorContext {
    std::optional<Feature> ftm_feature;
    std::optional<EcPrior> ec_prior;
};

// One noise-only statistic draw for any detector; shared by calibration and
// the Monte Carlo driver.
double detector_statistic(DetectorKind kind, const SampleStream& stream,
                          const SensingConfig& cfg, const DetectorContext& ctx,
                          const MonotoneFn& f);

// Empirical (1 - pfa) quantile (linear-interpolation estimator) of the H0
// statistic over n_trials noise-only runs. Deterministic in master_seed;
// needs n_trials >= 50/pfa so the tail holds >= 50 samples. FMD has a closed
// form and is rejected here.
double calibrate_threshold_empirical(DetectorKind kind, const NoiseModel& noise,
                                     const SensingConfig& cfg, double pfa,
                                     std::size_t n_trials, std::uint64_t master_seed,
                                     const DetectorContext& ctx = {});

// Linear-interpolation empirical quantile of a sample (R-7), p in [0,1].
double empirical_quantile(std::vector<double> values, double p);

} // namespace specsense
