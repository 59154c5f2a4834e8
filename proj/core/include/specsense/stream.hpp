#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace specsense {

enum class StreamOrigin { noise_only, signal_plus_noise, file_input };

// Ordered real sample stream x[n] with a provenance tag.
struct SampleStream {
    std::vector<double> samples;
    StreamOrigin origin = StreamOrigin::file_input;

    std::size_t size() const { return samples.size(); }

    // Throws DomainError on NaN/Inf.
    void validate() const;

    // Empirical mean square over all samples.
    double power() const;
};

// Optional sidecar metadata for raw capture files.
struct StreamMeta {
    std::optional<double> fs;
    std::optional<std::string> label;
};

// Headerless binary, 32-bit IEEE-754 little-endian floats.
SampleStream read_samples_f32le(const std::string& path);
void write_samples_f32le(const std::string& path, const SampleStream& stream);

// Plain text, one float per line; '#' lines ignored.
SampleStream read_samples_text(const std::string& path);
void write_samples_text(const std::string& path, const SampleStream& stream);

// Sidecar "<path>.meta": flat key=value lines (fs=..., label=...).
std::optional<StreamMeta> read_stream_meta(const std::string& sample_path);
void write_stream_meta(const std::string& sample_path, const StreamMeta& meta);

} // namespace specsense
