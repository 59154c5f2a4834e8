// Microbenchmarks for the per-trial hot path: stream generation, covariance
// accumulation, eigendecomposition, and each detector statistic.

#include "specsense/detectors.hpp"
#include "specsense/frames.hpp"
#include "specsense/matfunc.hpp"
#include "specsense/rng.hpp"
#include "specsense/signals.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace specsense;

namespace {

SampleStream cached_noise(std::size_t n) {
    static std::vector<std::pair<std::size_t, SampleStream>> cache;
    for (auto& [size, stream] : cache) {
        if (size == n) return stream;
    }
    cache.emplace_back(n, generate_noise(n, 1.0, 42));
    return cache.back().second;
}

CovMatrix random_cov(std::size_t dim) {
    Rng rng(7);
    std::vector<double> g(dim * dim);
    for (double& v : g) v = rng.gaussian();
    std::vector<double> e(dim * dim, 0.0);
    for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = a; b < dim; ++b) {
            double s = 0.0;
            for (std::size_t k = 0; k < dim; ++k) s += g[a * dim + k] * g[b * dim + k];
            s /= static_cast<double>(dim);
            e[a * dim + b] = s;
            e[b * dim + a] = s;
        }
    }
    return CovMatrix(dim, std::move(e), 100);
}

void BM_generate_noise(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_noise(n, 1.0, seed++));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_generate_noise)->Arg(25000)->Arg(100000);

void BM_generate_vsb(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_signal(SignalSpec{}, n, seed++));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_generate_vsb)->Arg(25000)->Arg(100000);

void BM_whole_covariance(benchmark::State& state) {
    const SensingConfig cfg; // L=32, Ns=99600
    SampleStream s = cached_noise(cfg.samples_needed(cfg.Ns));
    for (auto _ : state) {
        benchmark::DoNotOptimize(whole_segment_covariance(s, cfg));
    }
}
BENCHMARK(BM_whole_covariance);

void BM_sub_segment_traces(benchmark::State& state) {
    const SensingConfig cfg;
    SampleStream s = cached_noise(cfg.samples_needed(cfg.Ns));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sub_segment_traces(s, cfg));
    }
}
BENCHMARK(BM_sub_segment_traces);

void BM_sym_eigen(benchmark::State& state) {
    CovMatrix R = random_cov(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sym_eigen(R));
    }
}
BENCHMARK(BM_sym_eigen)->Arg(8)->Arg(32);

void BM_fmd_decide(benchmark::State& state) {
    const SensingConfig cfg;
    SampleStream s = cached_noise(cfg.samples_needed(cfg.Ns));
    FmdParams params;
    params.noise_est_mode = NoiseEstMode::external;
    params.external_sigma2 = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fmd_decide(s, cfg, params));
    }
}
BENCHMARK(BM_fmd_decide);

void BM_mme_statistic(benchmark::State& state) {
    const SensingConfig cfg;
    SampleStream s = cached_noise(cfg.samples_needed(cfg.Ns));
    CovMatrix R = whole_segment_covariance(s, cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mme_statistic(R));
    }
}
BENCHMARK(BM_mme_statistic);

void BM_detector_trial(benchmark::State& state) {
    // One full H0 trial: fresh noise, covariance, statistic.
    const SensingConfig cfg;
    const std::size_t n = cfg.samples_needed(cfg.Ns);
    const MonotoneFn id = monotone_fn("identity");
    DetectorContext ctx;
    std::uint64_t seed = 9;
    for (auto _ : state) {
        SampleStream s = generate_noise(n, 1.0, seed++);
        benchmark::DoNotOptimize(detector_statistic(DetectorKind::MME, s, cfg, ctx, id));
    }
}
BENCHMARK(BM_detector_trial);

} // namespace

BENCHMARK_MAIN();
