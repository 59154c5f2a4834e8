#include "specsense/frames.hpp"

#include "specsense/errors.hpp"

#include <cmath>
#include <cstdio>

namespace specsense {

namespace {

std::string short_msg(const char* fmt, std::size_t a, std::size_t b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    return buf;
}

// Prefix sums of x[i]*x[i+lag] with Neumaier compensation. Stored prefixes are
// accurate to ~eps relative, so differences of distant prefixes keep the
// 1e-12-relative identities between whole-segment and averaged sub-segment
// covariances intact at 1e5-sample scale.
void prefix_products(const double* x, std::size_t n_terms, std::size_t lag,
                     std::vector<double>& prefix) {
    prefix.resize(n_terms + 1);
    prefix[0] = 0.0;
    double acc = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < n_terms; ++i) {
        const double term = x[i] * x[i + lag];
        const double t = acc + term;
        if (std::abs(acc) >= std::abs(term)) {
            comp += (acc - t) + term;
        } else {
            comp += (term - t) + acc;
        }
        acc = t;
        prefix[i + 1] = acc + comp;
    }
}

// Covariance of nvec stride-spaced windows of length L starting at `offset`.
CovMatrix windows_covariance(const SampleStream& stream, std::size_t L, std::size_t offset,
                             std::size_t nvec, std::size_t stride) {
    std::vector<double> entries(L * L, 0.0);
    const double* x = stream.samples.data() + offset;
    const double inv = 1.0 / static_cast<double>(nvec);

    if (stride == 1) {
        // Entry (a, a+d) = (P_d[a+nvec] - P_d[a]) / nvec.
        std::vector<double> prefix;
        const std::size_t span = nvec - 1 + L; // samples touched
        for (std::size_t d = 0; d < L; ++d) {
            prefix_products(x, span - d, d, prefix);
            for (std::size_t a = 0; a + d < L; ++a) {
                const double v = (prefix[a + nvec] - prefix[a]) * inv;
                entries[a * L + (a + d)] = v;
                entries[(a + d) * L + a] = v;
            }
        }
    } else {
        for (std::size_t j = 0; j < nvec; ++j) {
            const double* v = x + j * stride;
            for (std::size_t a = 0; a < L; ++a) {
                const double va = v[a];
                double* row = entries.data() + a * L;
                for (std::size_t b = a; b < L; ++b) {
                    row[b] += va * v[b];
                }
            }
        }
        for (std::size_t a = 0; a < L; ++a) {
            for (std::size_t b = a; b < L; ++b) {
                const double m = entries[a * L + b] * inv;
                entries[a * L + b] = m;
                entries[b * L + a] = m;
            }
        }
    }
    return CovMatrix(L, std::move(entries), nvec);
}

// Vector count for sub-segment k allowing the final one to truncate.
std::size_t sub_segment_vectors(const SampleStream& stream, const SensingConfig& cfg,
                                std::size_t k, std::size_t* offset_out) {
    if (k < 1 || k > cfg.K) {
        throw IndexOutOfRange(short_msg("sub-segment index %zu outside 1..%zu", k, cfg.K));
    }
    const std::size_t offset = (k - 1) * cfg.Nk * cfg.vector_stride;
    *offset_out = offset;
    const std::size_t full_need = cfg.samples_needed(cfg.Nk, offset);
    if (stream.size() >= full_need) return cfg.Nk;
    if (k < cfg.K) {
        throw InsufficientSamples(
            short_msg("sub-segment %zu needs %zu samples", k, full_need));
    }
    // Final sub-segment: keep whatever full vectors remain.
    if (stream.size() < offset + cfg.L) {
        throw InsufficientSamples(
            short_msg("final sub-segment %zu needs at least %zu samples", k, offset + cfg.L));
    }
    return (stream.size() - offset - cfg.L) / cfg.vector_stride + 1;
}

} // namespace

std::vector<SensingVector> build_vectors(const SampleStream& stream, const SensingConfig& cfg,
                                         std::size_t start, std::size_t count) {
    if (count == std::size_t(-1)) {
        if (stream.size() < start + cfg.L) {
            throw InsufficientSamples(
                short_msg("stream of %zu samples holds no vector at start %zu", stream.size(),
                          start));
        }
        count = (stream.size() - start - cfg.L) / cfg.vector_stride + 1;
    }
    const std::size_t need = cfg.samples_needed(count, start);
    if (stream.size() < need) {
        throw InsufficientSamples(
            short_msg("stream holds %zu samples, %zu required", stream.size(), need));
    }
    std::vector<SensingVector> out(count);
    for (std::size_t j = 0; j < count; ++j) {
        const double* base = stream.samples.data() + start + j * cfg.vector_stride;
        out[j].values.assign(base, base + cfg.L);
    }
    return out;
}

CovMatrix sub_segment_covariance(const SampleStream& stream, const SensingConfig& cfg,
                                 std::size_t k) {
    cfg.validate();
    std::size_t offset = 0;
    const std::size_t nvec = sub_segment_vectors(stream, cfg, k, &offset);
    return windows_covariance(stream, cfg.L, offset, nvec, cfg.vector_stride);
}

CovMatrix whole_segment_covariance(const SampleStream& stream, const SensingConfig& cfg) {
    cfg.validate();
    const std::size_t need = cfg.samples_needed(cfg.Ns);
    if (stream.size() < need) {
        throw InsufficientSamples(
            short_msg("segment needs %zu samples, stream holds %zu", need, stream.size()));
    }
    return windows_covariance(stream, cfg.L, 0, cfg.Ns, cfg.vector_stride);
}

CovMatrix average_covariance(std::span<const CovMatrix> mats) {
    if (mats.empty()) throw EmptyInput("average_covariance: no matrices");
    const std::size_t L = mats.front().dim();
    std::size_t total = 0;
    std::vector<double> acc(L * L, 0.0);
    for (const CovMatrix& m : mats) {
        if (m.dim() != L) {
            throw DimensionMismatch("average_covariance: mixed dimensions");
        }
        const std::vector<double>& e = m.entries();
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += e[i];
        total += m.n_vectors();
    }
    const double inv = 1.0 / static_cast<double>(mats.size());
    for (double& v : acc) v *= inv;
    return CovMatrix(L, std::move(acc), total);
}

std::vector<double> sub_segment_traces(const SampleStream& stream, const SensingConfig& cfg) {
    cfg.validate();
    std::vector<double> z(cfg.K);
    if (cfg.vector_stride != 1) {
        for (std::size_t k = 1; k <= cfg.K; ++k) {
            z[k - 1] = sub_segment_covariance(stream, cfg, k).trace();
        }
        return z;
    }
    // ||x_j||^2 = C[j+L] - C[j] with C the compensated prefix of squares.
    std::size_t offset_last = 0;
    const std::size_t nvec_last = sub_segment_vectors(stream, cfg, cfg.K, &offset_last);
    const std::size_t span = offset_last + nvec_last - 1 + cfg.L;
    std::vector<double> prefix;
    prefix_products(stream.samples.data(), span, 0, prefix);
    for (std::size_t k = 0; k < cfg.K; ++k) {
        const std::size_t off = k * cfg.Nk;
        const std::size_t nvec = (k + 1 == cfg.K) ? nvec_last : cfg.Nk;
        double acc = 0.0, comp = 0.0;
        for (std::size_t j = 0; j < nvec; ++j) {
            const double term = prefix[off + j + cfg.L] - prefix[off + j];
            const double t = acc + term;
            if (std::abs(acc) >= std::abs(term)) {
                comp += (acc - t) + term;
            } else {
                comp += (term - t) + acc;
            }
            acc = t;
        }
        z[k] = (acc + comp) / static_cast<double>(nvec);
    }
    return z;
}

} // namespace specsense
