#pragma once

#include "specsense/covmatrix.hpp"
#include "specsense/rng.hpp"
#include "specsense/stream.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <unistd.h>
#include <vector>

namespace testutil {

inline bool contains(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

// Random PSD matrix G G^T / dim, exactly symmetric by construction.
inline specsense::CovMatrix random_psd(std::size_t dim, specsense::Rng& rng,
                                       std::size_t n_vectors = 1) {
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
    return specsense::CovMatrix(dim, std::move(e), n_vectors);
}

// A + c c^T: Loewner-dominates A by a random rank-one bump.
inline specsense::CovMatrix rank_one_bump(const specsense::CovMatrix& A,
                                          specsense::Rng& rng, double scale = 1.0) {
    const std::size_t n = A.dim();
    std::vector<double> c(n);
    for (double& v : c) v = scale * rng.gaussian();
    std::vector<double> e = A.entries();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) e[a * n + b] += c[a] * c[b];
    }
    return specsense::CovMatrix(n, std::move(e), A.n_vectors());
}

inline specsense::SampleStream stream_of(std::vector<double> samples) {
    specsense::SampleStream s;
    s.samples = std::move(samples);
    s.origin = specsense::StreamOrigin::noise_only;
    return s;
}

// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        const auto base = std::filesystem::temp_directory_path();
        static int counter = 0;
        for (int i = 0; i < 10000; ++i) {
            auto p = base / ("specsense-test-" + std::to_string(::getpid()) + "-" +
                             std::to_string(counter++));
            std::error_code ec;
            if (std::filesystem::create_directory(p, ec)) {
                path = p;
                return;
            }
        }
        throw std::runtime_error("TempDir: could not create scratch directory");
    }

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }

    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace testutil
