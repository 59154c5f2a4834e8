#include "specsense/stream.hpp"

#include "specsense/errors.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace specsense {

namespace {

// Samples are stored little-endian on disk regardless of host order.
float from_le(std::uint32_t le) {
    if constexpr (std::endian::native == std::endian::big) {
        le = __builtin_bswap32(le);
    }
    return std::bit_cast<float>(le);
}

std::uint32_t to_le(float v) {
    auto bits = std::bit_cast<std::uint32_t>(v);
    if constexpr (std::endian::native == std::endian::big) {
        bits = __builtin_bswap32(bits);
    }
    return bits;
}

} // namespace

void SampleStream::validate() const {
    for (double v : samples) {
        if (!std::isfinite(v)) throw DomainError("SampleStream: non-finite sample");
    }
}

double SampleStream::power() const {
    if (samples.empty()) return 0.0;
    double acc = 0.0, comp = 0.0;
    for (double v : samples) {
        const double term = v * v;
        const double y = term - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc / static_cast<double>(samples.size());
}

SampleStream read_samples_f32le(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFound("cannot open sample file: " + path);
    in.seekg(0, std::ios::end);
    const std::streamoff bytes = in.tellg();
    in.seekg(0, std::ios::beg);
    if (bytes % 4 != 0) {
        throw DomainError("truncated f32le sample file (size not a multiple of 4): " + path);
    }
    const std::size_t n = static_cast<std::size_t>(bytes / 4);
    std::vector<std::uint32_t> raw(n);
    if (n > 0 && !in.read(reinterpret_cast<char*>(raw.data()), bytes)) {
        throw DomainError("short read on sample file: " + path);
    }
    SampleStream s;
    s.origin = StreamOrigin::file_input;
    s.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.samples[i] = static_cast<double>(from_le(raw[i]));
    s.validate();
    return s;
}

void write_samples_f32le(const std::string& path, const SampleStream& stream) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FileNotFound("cannot open file for writing: " + path);
    std::vector<std::uint32_t> raw(stream.samples.size());
    for (std::size_t i = 0; i < stream.samples.size(); ++i) {
        raw[i] = to_le(static_cast<float>(stream.samples[i]));
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size() * 4));
    if (!out) throw Error("failed writing sample file: " + path);
}

SampleStream read_samples_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound("cannot open sample file: " + path);
    SampleStream s;
    s.origin = StreamOrigin::file_input;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        try {
            std::size_t used = 0;
            s.samples.push_back(std::stod(line.substr(pos), &used));
        } catch (const std::exception&) {
            std::ostringstream msg;
            msg << path << ":" << lineno << ": not a number: " << line;
            throw DomainError(msg.str());
        }
    }
    s.validate();
    return s;
}

void write_samples_text(const std::string& path, const SampleStream& stream) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FileNotFound("cannot open file for writing: " + path);
    char buf[48];
    for (double v : stream.samples) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        out << buf;
    }
    if (!out) throw Error("failed writing sample file: " + path);
}

std::optional<StreamMeta> read_stream_meta(const std::string& sample_path) {
    std::ifstream in(sample_path + ".meta");
    if (!in) return std::nullopt;
    StreamMeta meta;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        const std::size_t eq = line.find('=', pos);
        if (eq == std::string::npos) continue;
        std::string key = line.substr(pos, eq - pos);
        std::string val = line.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        while (!val.empty() && (val.back() == ' ' || val.back() == '\t' || val.back() == '\r')) {
            val.pop_back();
        }
        std::size_t vp = val.find_first_not_of(" \t");
        if (vp != std::string::npos) val = val.substr(vp);
        if (key == "fs") {
            meta.fs = std::stod(val);
        } else if (key == "label") {
            meta.label = val;
        }
    }
    return meta;
}

void write_stream_meta(const std::string& sample_path, const StreamMeta& meta) {
    std::ofstream out(sample_path + ".meta", std::ios::trunc);
    if (!out) throw FileNotFound("cannot open meta file for writing: " + sample_path + ".meta");
    char buf[64];
    if (meta.fs) {
        std::snprintf(buf, sizeof buf, "fs=%.17g\n", *meta.fs);
        out << buf;
    }
    if (meta.label) out << "label=" << *meta.label << "\n";
}

} // namespace specsense
