#pragma once

#include "specsense/errors.hpp"

#include <cstddef>
#include <string>

namespace specsense {

// Frame geometry: L samples per sensing vector, K sub-segments of Nk vectors
// each, Ns = K*Nk vectors per segment, consecutive vectors vector_stride
// samples apart (1 = maximally overlapping windows).
struct SensingConfig {
    std::size_t L = 32;
    std::size_t Ns = 99600;
    std::size_t K = 166;
    std::size_t Nk = 600;
    double fs = 1.0;                  // sample rate, metadata only
    std::size_t vector_stride = 1;

    void validate() const {
        if (L < 2) throw ConfigError("SensingConfig: L must be >= 2");
        if (K < 2) throw ConfigError("SensingConfig: K must be >= 2");
        if (Nk < L) throw ConfigError("SensingConfig: Nk must be >= L");
        if (Ns != K * Nk) throw ConfigError("SensingConfig: Ns must equal K*Nk");
        if (vector_stride < 1) throw ConfigError("SensingConfig: vector_stride must be >= 1");
        if (!(fs > 0.0)) throw ConfigError("SensingConfig: fs must be positive");
    }

    // Samples consumed by vector j0..j0+count-1 at this geometry.
    std::size_t samples_needed(std::size_t count, std::size_t start_sample = 0) const {
        if (count == 0) return start_sample;
        return start_sample + (count - 1) * vector_stride + L;
    }
};

struct ConfigWithWarning {
    SensingConfig cfg;
    std::string warning; // empty when nothing was adjusted
};

// Build a config from (L, K, Nk) with Ns derived exactly.
SensingConfig make_config(std::size_t L, std::size_t K, std::size_t Nk,
                          std::size_t vector_stride = 1, double fs = 1.0);

// Build a config from a requested segment size Ns; when K does not divide Ns,
// Ns is truncated down to K*floor(Ns/K) and the adjustment is reported.
ConfigWithWarning make_config_from_ns(std::size_t L, std::size_t K, std::size_t Ns,
                                      std::size_t vector_stride = 1, double fs = 1.0);

} // namespace specsense
