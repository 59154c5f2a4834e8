#pragma once

#include "specsense/config.hpp"
#include "specsense/covmatrix.hpp"
#include "specsense/stream.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace specsense {

// One sensing vector: L consecutive samples.
struct SensingVector {
    std::vector<double> values;
};

// Vectors j = 0..count-1, vector j starting at sample start + j*stride.
// count = SIZE_MAX takes every vector that fits from start.
std::vector<SensingVector> build_vectors(const SampleStream& stream, const SensingConfig& cfg,
                                         std::size_t start, std::size_t count = std::size_t(-1));

// Covariance of the k-th sub-segment (k is 1-based, 1..K): the mean of
// x_i x_i^T over its Nk vectors. Vectors may read up to L-1 samples past the
// nominal boundary; the final sub-segment truncates its vector count when the
// stream lacks those trailing samples, recording the actual n_vectors.
CovMatrix sub_segment_covariance(const SampleStream& stream, const SensingConfig& cfg,
                                 std::size_t k);

// Covariance over all Ns = K*Nk vectors of the segment.
CovMatrix whole_segment_covariance(const SampleStream& stream, const SensingConfig& cfg);

// Entrywise mean; n_vectors is the sum of the inputs' counts.
CovMatrix average_covariance(std::span<const CovMatrix> mats);

// Trace of each sub-segment covariance (Z_k values) computed directly from
// the stream via sliding squared-norm sums; identical to taking traces of
// sub_segment_covariance but O(n) total. Fast path requires stride 1 and
// falls back to building matrices otherwise.
std::vector<double> sub_segment_traces(const SampleStream& stream, const SensingConfig& cfg);

} // namespace specsense
