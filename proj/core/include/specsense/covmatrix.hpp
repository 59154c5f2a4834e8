#pragma once

#include "specsense/errors.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace specsense {

// L x L real symmetric sample covariance with the vector count it averages.
// Symmetry is validated at construction; positive semidefiniteness (up to the
// 1e-10 relative clamp window) is enforced where the spectrum is computed.
class CovMatrix {
public:
    CovMatrix() = default;

    CovMatrix(std::size_t dim, std::vector<double> entries, std::size_t n_vectors)
        : dim_(dim), n_vectors_(n_vectors), entries_(std::move(entries)) {
        if (entries_.size() != dim_ * dim_) {
            throw DimensionMismatch("CovMatrix: entry buffer size does not match dimension");
        }
        validate_symmetric();
    }

    static CovMatrix zero(std::size_t dim, std::size_t n_vectors = 0) {
        return CovMatrix(dim, std::vector<double>(dim * dim, 0.0), n_vectors);
    }

    static CovMatrix identity(std::size_t dim, std::size_t n_vectors = 0) {
        std::vector<double> e(dim * dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) e[i * dim + i] = 1.0;
        return CovMatrix(dim, std::move(e), n_vectors);
    }

    static CovMatrix diag(const std::vector<double>& d, std::size_t n_vectors = 0) {
        std::vector<double> e(d.size() * d.size(), 0.0);
        for (std::size_t i = 0; i < d.size(); ++i) e[i * d.size() + i] = d[i];
        return CovMatrix(d.size(), std::move(e), n_vectors);
    }

    std::size_t dim() const { return dim_; }
    std::size_t n_vectors() const { return n_vectors_; }
    void set_n_vectors(std::size_t n) { n_vectors_ = n; }

    double operator()(std::size_t a, std::size_t b) const { return entries_[a * dim_ + b]; }
    double& at(std::size_t a, std::size_t b) { return entries_[a * dim_ + b]; }

    const std::vector<double>& entries() const { return entries_; }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) t += entries_[i * dim_ + i];
        return t;
    }

    double inf_norm() const {
        double m = 0.0;
        for (double v : entries_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    void validate_symmetric() const {
        double scale = inf_norm();
        for (double v : entries_) {
            if (!std::isfinite(v)) throw DomainError("CovMatrix: non-finite entry");
        }
        const double tol = 1e-12 * (scale > 0.0 ? scale : 1.0);
        for (std::size_t a = 0; a < dim_; ++a) {
            for (std::size_t b = a + 1; b < dim_; ++b) {
                if (std::abs(entries_[a * dim_ + b] - entries_[b * dim_ + a]) > tol) {
                    throw NotSymmetric("CovMatrix: asymmetry beyond 1e-12 relative");
                }
            }
        }
    }

    std::size_t dim_ = 0;
    std::size_t n_vectors_ = 0;
    std::vector<double> entries_;
};

} // namespace specsense
