#include "specsense/config.hpp"

#include <cstdio>

namespace specsense {

SensingConfig make_config(std::size_t L, std::size_t K, std::size_t Nk,
                          std::size_t vector_stride, double fs) {
    SensingConfig cfg;
    cfg.L = L;
    cfg.K = K;
    cfg.Nk = Nk;
    cfg.Ns = K * Nk;
    cfg.vector_stride = vector_stride;
    cfg.fs = fs;
    cfg.validate();
    return cfg;
}

ConfigWithWarning make_config_from_ns(std::size_t L, std::size_t K, std::size_t Ns,
                                      std::size_t vector_stride, double fs) {
    if (K == 0) throw ConfigError("SensingConfig: K must be >= 2");
    ConfigWithWarning out;
    const std::size_t nk = Ns / K;
    const std::size_t ns = K * nk;
    if (ns != Ns) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "Ns=%zu is not divisible by K=%zu; truncated to Ns=%zu (Nk=%zu)",
                      Ns, K, ns, nk);
        out.warning = buf;
    }
    out.cfg = make_config(L, K, nk, vector_stride, fs);
    return out;
}

} // namespace specsense
