#include "specsense/detectors.hpp"

#include "specsense/errors.hpp"
#include "specsense/gauss.hpp"
#include "specsense/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace specsense {

std::string detector_name(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::FMD: return "fmd";
        case DetectorKind::MME: return "mme";
        case DetectorKind::AGM: return "agm";
        case DetectorKind::FTM: return "ftm";
        case DetectorKind::EC: return "ec";
    }
    throw DomainError("detector_name: unknown kind");
}

DetectorKind detector_from_name(const std::string& name) {
    if (name == "fmd") return DetectorKind::FMD;
    if (name == "mme") return DetectorKind::MME;
    if (name == "agm") return DetectorKind::AGM;
    if (name == "ftm") return DetectorKind::FTM;
    if (name == "ec") return DetectorKind::EC;
    throw ConfigError("unknown detector '" + name + "'");
}

Feature::Feature(std::vector<double> v) : v_(std::move(v)) {
    if (v_.empty()) throw EmptyInput("Feature: empty vector");
    double norm2 = 0.0;
    for (double x : v_) norm2 += x * x;
    const double norm = std::sqrt(norm2);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw DomainError("Feature: vector must have positive finite norm");
    }
    std::size_t imax = 0;
    for (std::size_t i = 1; i < v_.size(); ++i) {
        if (std::abs(v_[i]) > std::abs(v_[imax])) imax = i;
    }
    const double scale = (v_[imax] < 0.0 ? -1.0 : 1.0) / norm;
    for (double& x : v_) x *= scale;
}

Feature feature_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound("cannot open feature file: " + path);
    std::vector<double> v;
    double x;
    while (in >> x) v.push_back(x);
    return Feature(std::move(v));
}

void feature_to_file(const std::string& path, const Feature& f) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FileNotFound("cannot open feature file for writing: " + path);
    char buf[48];
    for (double x : f.values()) {
        std::snprintf(buf, sizeof buf, "%.17g\n", x);
        out << buf;
    }
}

EcPrior::EcPrior(CovMatrix Rs, double sigma2) : Rs_(std::move(Rs)), sigma2_(sigma2) {
    if (!(sigma2_ > 0.0)) throw DomainError("EcPrior: sigma2 must be positive");
    // Rs and (Rs + sigma2 I)^-1 share an eigenbasis, so the gain matrix is
    // V diag(lambda/(lambda+sigma2)) V^T; sym_eigen also enforces Rs PSD.
    const std::size_t n = Rs_.dim();
    EigenDecomp d = sym_eigen(Rs_);
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = d.eigenvalues[i] / (d.eigenvalues[i] + sigma2_);
    }
    gain_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                acc += d.vec(i, k) * g[k] * d.vec(j, k);
            }
            gain_[i * n + j] = acc;
            gain_[j * n + i] = acc;
        }
    }
}

// --- FMD ---

double fmd_statistic(std::span<const CovMatrix> sub_covs, const MonotoneFn& f) {
    return trace_fn(average_covariance(sub_covs), f);
}

double fmd_statistic_traces(std::span<const double> traces) {
    if (traces.empty()) throw EmptyInput("fmd_statistic_traces: no traces");
    double acc = 0.0;
    for (double z : traces) acc += z;
    return acc / static_cast<double>(traces.size());
}

double estimate_noise_variance_from_traces(std::span<const double> traces, std::size_t L,
                                           std::size_t Nk) {
    const std::size_t K = traces.size();
    if (K < 2) throw TooFewSubSegments("estimate_noise_variance: needs K >= 2");
    double mean = 0.0;
    for (double z : traces) mean += z;
    mean /= static_cast<double>(K);
    double ss = 0.0;
    for (double z : traces) ss += (z - mean) * (z - mean);
    const double sample_var = ss / static_cast<double>(K - 1);
    return std::sqrt(static_cast<double>(Nk) * sample_var /
                     (2.0 * static_cast<double>(L) * static_cast<double>(L)));
}

double estimate_noise_variance(std::span<const CovMatrix> sub_covs, std::size_t L,
                               std::size_t Nk) {
    std::vector<double> z(sub_covs.size());
    for (std::size_t i = 0; i < sub_covs.size(); ++i) z[i] = sub_covs[i].trace();
    return estimate_noise_variance_from_traces(z, L, Nk);
}

double fmd_threshold(double pfa, std::size_t K, std::size_t Nk, std::size_t L,
                     double sigma2_hat) {
    if (!(pfa > 0.0 && pfa < 1.0)) throw DomainError("fmd_threshold: pfa must lie in (0,1)");
    if (!(sigma2_hat >= 0.0)) throw DomainError("fmd_threshold: sigma2_hat must be >= 0");
    const double n = static_cast<double>(K) * static_cast<double>(Nk);
    return (1.0 + q_inverse(pfa) * std::sqrt(2.0 / n)) * static_cast<double>(L) * sigma2_hat;
}

DetectorOutcome fmd_decide(const SampleStream& stream, const SensingConfig& cfg,
                           const FmdParams& params) {
    cfg.validate();
    params.validate();

    double rho;
    double sigma2_hat;
    if (params.f.name() == "identity") {
        // Trace route: Tr and the K-average commute, so rho comes straight
        // from the sub-segment traces without materializing matrices.
        const std::vector<double> z = sub_segment_traces(stream, cfg);
        rho = fmd_statistic_traces(z);
        sigma2_hat = (params.noise_est_mode == NoiseEstMode::external)
                         ? *params.external_sigma2
                         : estimate_noise_variance_from_traces(z, cfg.L, cfg.Nk);
    } else {
        std::vector<CovMatrix> covs;
        covs.reserve(cfg.K);
        for (std::size_t k = 1; k <= cfg.K; ++k) {
            covs.push_back(sub_segment_covariance(stream, cfg, k));
        }
        rho = fmd_statistic(covs, params.f);
        sigma2_hat = (params.noise_est_mode == NoiseEstMode::external)
                         ? *params.external_sigma2
                         : estimate_noise_variance(covs, cfg.L, cfg.Nk);
    }

    DetectorOutcome out;
    out.statistic = rho;
    out.threshold = fmd_threshold(params.pfa_target, cfg.K, cfg.Nk, cfg.L, sigma2_hat);
    out.decision = (out.statistic > out.threshold) ? Decision::signal_present
                                                   : Decision::signal_absent;
    out.diagnostics["rho"] = rho;
    out.diagnostics["gamma"] = out.threshold;
    out.diagnostics["sigma2_hat"] = sigma2_hat;
    out.diagnostics["K"] = static_cast<double>(cfg.K);
    out.diagnostics["Nk"] = static_cast<double>(cfg.Nk);
    out.diagnostics["L"] = static_cast<double>(cfg.L);
    return out;
}

// --- baselines ---

namespace {

std::vector<double> positive_spectrum(const CovMatrix& R, const char* who) {
    EigenDecomp d = sym_eigen(R);
    const double floor = 1e-12 * R.trace();
    if (!(d.eigenvalues.front() > floor)) {
        throw SingularCovariance(std::string(who) + ": covariance is singular within tolerance");
    }
    return std::move(d.eigenvalues);
}

} // namespace

double mme_statistic(const CovMatrix& R) {
    const std::vector<double> ev = positive_spectrum(R, "mme_statistic");
    return ev.back() / ev.front();
}

double agm_statistic(const CovMatrix& R) {
    const std::vector<double> ev = positive_spectrum(R, "agm_statistic");
    double am = 0.0, lg = 0.0;
    for (double v : ev) {
        am += v;
        lg += std::log(v);
    }
    const double n = static_cast<double>(ev.size());
    return (am / n) / std::exp(lg / n);
}

double lagged_similarity(const Feature& a, const Feature& b) {
    if (a.size() != b.size()) throw DimensionMismatch("lagged_similarity: length mismatch");
    const std::size_t L = a.size();
    const std::vector<double>& va = a.values();
    const std::vector<double>& vb = b.values();
    double best = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        double dot = 0.0;
        for (std::size_t k = 0; k < L; ++k) {
            std::size_t idx = k + l;
            if (idx >= L) idx -= L;
            dot += va[k] * vb[idx];
        }
        best = std::max(best, std::abs(dot));
    }
    return best;
}

Feature leading_eigenvector(const CovMatrix& R) {
    EigenDecomp d = sym_eigen(R);
    const std::size_t n = R.dim();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = d.vec(i, n - 1);
    return Feature(std::move(v));
}

std::optional<Feature> fla_learn(std::span<const SampleStream> segments,
                                 const SensingConfig& cfg, double gamma_e) {
    if (segments.size() < 2) {
        throw TooFewSegments("fla_learn: needs at least two sensing segments");
    }
    Feature prev = leading_eigenvector(whole_segment_covariance(segments[0], cfg));
    for (std::size_t i = 1; i < segments.size(); ++i) {
        Feature cur = leading_eigenvector(whole_segment_covariance(segments[i], cfg));
        if (lagged_similarity(prev, cur) > gamma_e) {
            return cur;
        }
        prev = std::move(cur);
    }
    return std::nullopt;
}

DetectorOutcome ftm_decide(const SampleStream& stream, const SensingConfig& cfg,
                           const Feature& learned, double gamma_ftm) {
    const Feature extracted = leading_eigenvector(whole_segment_covariance(stream, cfg));
    DetectorOutcome out;
    out.statistic = lagged_similarity(learned, extracted);
    out.threshold = gamma_ftm;
    out.decision = (out.statistic > out.threshold) ? Decision::signal_present
                                                   : Decision::signal_absent;
    out.diagnostics["similarity"] = out.statistic;
    return out;
}

double ec_statistic(std::span<const SensingVector> vectors, const EcPrior& prior) {
    const std::size_t n = prior.dim();
    const std::vector<double>& M = prior.gain();
    double acc = 0.0;
    for (const SensingVector& v : vectors) {
        if (v.values.size() != n) {
            throw DimensionMismatch("ec_statistic: vector length does not match prior");
        }
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            const double* mi = M.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) row += mi[j] * v.values[j];
            acc += v.values[i] * row;
        }
    }
    return acc;
}

double ec_statistic_from_cov(const CovMatrix& R, const EcPrior& prior) {
    if (R.dim() != prior.dim()) {
        throw DimensionMismatch("ec_statistic_from_cov: dimension mismatch");
    }
    const std::size_t n = R.dim();
    const std::vector<double>& M = prior.gain();
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            tr += M[i * n + j] * R(j, i);
        }
    }
    return static_cast<double>(R.n_vectors()) * tr;
}

// --- empirical calibration ---

double detector_statistic(DetectorKind kind, const SampleStream& stream,
                          const SensingConfig& cfg, const DetectorContext& ctx,
                          const MonotoneFn& f) {
    switch (kind) {
        case DetectorKind::FMD: {
            if (f.name() == "identity") {
                const std::vector<double> z = sub_segment_traces(stream, cfg);
                return fmd_statistic_traces(z);
            }
            std::vector<CovMatrix> covs;
            covs.reserve(cfg.K);
            for (std::size_t k = 1; k <= cfg.K; ++k) {
                covs.push_back(sub_segment_covariance(stream, cfg, k));
            }
            return fmd_statistic(covs, f);
        }
        case DetectorKind::MME:
            return mme_statistic(whole_segment_covariance(stream, cfg));
        case DetectorKind::AGM:
            return agm_statistic(whole_segment_covariance(stream, cfg));
        case DetectorKind::FTM: {
            if (!ctx.ftm_feature) throw ConfigError("FTM statistic needs a learned feature");
            const Feature got = leading_eigenvector(whole_segment_covariance(stream, cfg));
            return lagged_similarity(*ctx.ftm_feature, got);
        }
        case DetectorKind::EC: {
            if (!ctx.ec_prior) throw ConfigError("EC statistic needs an EcPrior");
            return ec_statistic_from_cov(whole_segment_covariance(stream, cfg), *ctx.ec_prior);
        }
    }
    throw DomainError("detector_statistic: unknown kind");
}

double empirical_quantile(std::vector<double> values, double p) {
    if (values.empty()) throw EmptyInput("empirical_quantile: no values");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("empirical_quantile: p outside [0,1]");
    std::sort(values.begin(), values.end());
    const double h = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double calibrate_threshold_empirical(DetectorKind kind, const NoiseModel& noise,
                                     const SensingConfig& cfg, double pfa,
                                     std::size_t n_trials, std::uint64_t master_seed,
                                     const DetectorContext& ctx) {
    if (kind == DetectorKind::FMD) {
        throw ConfigError("calibrate_threshold_empirical: FMD threshold is closed-form");
    }
    if (!(pfa > 0.0 && pfa < 1.0)) throw DomainError("calibration: pfa must lie in (0,1)");
    cfg.validate();
    if (static_cast<double>(n_trials) < 50.0 / pfa) {
        throw TooFewTrials("calibration: n_trials must be >= 50/pfa");
    }
    const std::size_t n_samples = cfg.samples_needed(cfg.Ns);
    const double sd = std::sqrt(noise.sigma2);
    const MonotoneFn identity = monotone_fn("identity");

    std::vector<double> stats(n_trials);
    for (std::size_t t = 0; t < n_trials; ++t) {
        const std::uint64_t seed = SeedChain(master_seed)
                                       .mix("calibrate")
                                       .mix(detector_name(kind))
                                       .mix(t)
                                       .value();
        Rng rng(seed);
        SampleStream s;
        s.origin = StreamOrigin::noise_only;
        s.samples.resize(n_samples);
        for (double& x : s.samples) x = sd * rng.gaussian();
        stats[t] = detector_statistic(kind, s, cfg, ctx, identity);
    }
    return empirical_quantile(std::move(stats), 1.0 - pfa);
}

} // namespace specsense
