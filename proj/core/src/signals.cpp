#include "specsense/signals.hpp"

#include "specsense/errors.hpp"
#include "specsense/rng.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

namespace specsense {

namespace {

constexpr int kSps = 2;       // samples per symbol
constexpr int kHalfSyms = 8;  // filter half-span in symbols
constexpr double kRolloff = 0.115;

// Root-raised-cosine impulse response, unit symbol period, with the removable
// singularities at t=0 and |4bt|=1 filled by their limits.
std::vector<double> rrc_taps() {
    const int n_taps = 2 * kHalfSyms * kSps + 1;
    std::vector<double> taps(n_taps);
    const double b = kRolloff;
    const double pi = std::numbers::pi;
    for (int i = 0; i < n_taps; ++i) {
        const double t = static_cast<double>(i - kHalfSyms * kSps) / kSps;
        double v;
        if (std::abs(t) < 1e-12) {
            v = 1.0 - b + 4.0 * b / pi;
        } else if (std::abs(std::abs(4.0 * b * t) - 1.0) < 1e-9) {
            v = (b / std::sqrt(2.0)) * ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * b)) +
                                        (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * b)));
        } else {
            const double num =
                std::sin(pi * t * (1.0 - b)) + 4.0 * b * t * std::cos(pi * t * (1.0 + b));
            const double den = pi * t * (1.0 - 16.0 * b * b * t * t);
            v = num / den;
        }
        taps[i] = v;
    }
    return taps;
}

void normalize_unit_power(SampleStream& s) {
    const double p = s.power();
    if (!(p > 0.0)) throw DomainError("generate_signal: zero-power stream");
    const double inv = 1.0 / std::sqrt(p);
    for (double& x : s.samples) x *= inv;
}

SampleStream make_vsb_like(std::size_t n, std::uint64_t seed) {
    static const std::vector<double> taps = rrc_taps();
    const std::size_t t_len = taps.size();
    Rng rng(seed);

    // Enough upsampled symbols to cover n outputs plus full filter overlap.
    const std::size_t up_len = n + t_len - 1;
    const std::size_t n_sym = up_len / kSps + 1;
    std::vector<double> up(n_sym * kSps, 0.0);
    for (std::size_t i = 0; i < n_sym; ++i) {
        up[i * kSps] = static_cast<double>(2 * static_cast<int>(rng.uniform_int(8)) - 7);
    }

    SampleStream s;
    s.origin = StreamOrigin::signal_plus_noise;
    s.samples.resize(n);
    // Taps are symmetric, so correlation equals convolution here.
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < t_len; ++j) {
            acc += taps[j] * up[i + j];
        }
        s.samples[i] = acc;
    }
    normalize_unit_power(s);
    return s;
}

SampleStream make_ar1(std::size_t n, double rho, std::uint64_t seed) {
    if (!(rho > -1.0 && rho < 1.0)) throw DomainError("ar1: rho must lie in (-1,1)");
    Rng rng(seed);
    SampleStream s;
    s.origin = StreamOrigin::signal_plus_noise;
    s.samples.resize(n);
    // Stationary start: x0 ~ N(0,1), innovations scaled to keep unit variance.
    const double innov = std::sqrt(1.0 - rho * rho);
    double x = rng.gaussian();
    s.samples[0] = x;
    for (std::size_t i = 1; i < n; ++i) {
        x = rho * x + innov * rng.gaussian();
        s.samples[i] = x;
    }
    normalize_unit_power(s);
    return s;
}

} // namespace

std::string SignalSpec::name() const {
    switch (kind) {
        case Kind::vsb_like: return "vsb_like";
        case Kind::ar1: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "ar1(%.4g)", ar1_rho);
            return buf;
        }
        case Kind::file: {
            const std::size_t slash = path.find_last_of('/');
            return "file:" + (slash == std::string::npos ? path : path.substr(slash + 1));
        }
    }
    return "?";
}

SignalSpec SignalSpec::parse(const std::string& text, double ar1_rho, const std::string& path) {
    SignalSpec spec;
    spec.ar1_rho = ar1_rho;
    spec.path = path;
    if (text == "vsb_like") {
        spec.kind = Kind::vsb_like;
    } else if (text == "ar1") {
        spec.kind = Kind::ar1;
    } else if (text == "file") {
        spec.kind = Kind::file;
        if (path.empty()) throw ConfigError("signal=file needs signal_path");
    } else {
        throw ConfigError("unknown signal kind '" + text + "'");
    }
    return spec;
}

SampleStream generate_signal(const SignalSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw DomainError("generate_signal: n must be >= 1");
    switch (spec.kind) {
        case SignalSpec::Kind::vsb_like:
            return make_vsb_like(n, seed);
        case SignalSpec::Kind::ar1:
            return make_ar1(n, spec.ar1_rho, seed);
        case SignalSpec::Kind::file: {
            SampleStream s = (spec.path.size() > 4 &&
                              spec.path.compare(spec.path.size() - 4, 4, ".txt") == 0)
                                 ? read_samples_text(spec.path)
                                 : read_samples_f32le(spec.path);
            if (s.size() < n) {
                throw InsufficientSamples("signal file shorter than requested stream");
            }
            s.samples.resize(n);
            normalize_unit_power(s);
            return s;
        }
    }
    throw DomainError("generate_signal: unknown kind");
}

SampleStream add_awgn(const SampleStream& signal, double snr_db, std::uint64_t seed) {
    Rng rng(seed);
    const double sd = std::sqrt(std::pow(10.0, -snr_db / 10.0));
    SampleStream out;
    out.origin = StreamOrigin::signal_plus_noise;
    out.samples.resize(signal.size());
    for (std::size_t i = 0; i < signal.size(); ++i) {
        out.samples[i] = signal.samples[i] + sd * rng.gaussian();
    }
    return out;
}

SampleStream generate_noise(std::size_t n, double sigma2, std::uint64_t seed) {
    if (!(sigma2 >= 0.0)) throw DomainError("generate_noise: sigma2 must be >= 0");
    Rng rng(seed);
    const double sd = std::sqrt(sigma2);
    SampleStream s;
    s.origin = StreamOrigin::noise_only;
    s.samples.resize(n);
    for (double& x : s.samples) x = sd * rng.gaussian();
    return s;
}

} // namespace specsense
