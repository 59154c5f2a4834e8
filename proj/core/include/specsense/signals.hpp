#pragma once

#include "specsense/stream.hpp"

#include <cstdint>
#include <string>

namespace specsense {

// Synthetic signal source. Every generated stream is normalized to exactly
// unit empirical power, so the injected noise variance alone sets the SNR.
struct SignalSpec {
    enum class Kind { vsb_like, ar1, file };

    Kind kind = Kind::vsb_like;
    double ar1_rho = 0.9;   // ar1 only
    std::string path;       // file only

    std::string name() const;
    static SignalSpec parse(const std::string& text, double ar1_rho, const std::string& path);
};

// Deterministic in seed. vsb_like: i.i.d. 8-PAM symbols, upsampled x2 and
// shaped by a root-raised-cosine filter (rolloff 0.115, half-span 8 symbols),
// giving a serially correlated, low-rank-dominant source. ar1: stationary
// first-order autoregression. file: samples loaded from disk (f32le, or text
// for .txt paths), then normalized like the synthetic kinds.
SampleStream generate_signal(const SignalSpec& spec, std::size_t n, std::uint64_t seed);

// s + w with w i.i.d. Gaussian of variance 10^(-snr_db/10); callers keep the
// signal at unit power so snr_db is exact.
SampleStream add_awgn(const SampleStream& signal, double snr_db, std::uint64_t seed);

// White Gaussian stream of variance sigma2, tagged noise_only.
SampleStream generate_noise(std::size_t n, double sigma2, std::uint64_t seed);

} // namespace specsense
