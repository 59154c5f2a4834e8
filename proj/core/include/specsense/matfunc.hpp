#pragma once

#include "specsense/covmatrix.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace specsense {

// Scalar map f: [0,inf) -> [0,inf) with f(0)=0, continuous, increasing.
// Instances are validated against those preconditions at construction, since
// the trace inequality the detector rests on requires all three.
class MonotoneFn {
public:
    MonotoneFn(std::string name, std::function<double(double)> eval,
               std::optional<double> param = std::nullopt);

    const std::string& name() const { return name_; }
    std::optional<double> param() const { return param_; }
    double operator()(double x) const { return eval_(x); }

private:
    void validate() const;

    std::string name_;
    std::function<double(double)> eval_;
    std::optional<double> param_;
};

// Built-in functions: "identity" (default), "sqrt", "power" (param p > 0),
// "log1p". Throws ConfigError for unknown names or bad parameters.
MonotoneFn monotone_fn(const std::string& name,
                       std::optional<double> param = std::nullopt);

// The immutable startup registry: identity, sqrt, power(p=1.7), log1p.
const std::vector<MonotoneFn>& registered_fns();

struct EigenDecomp {
    std::vector<double> eigenvalues;   // ascending
    std::vector<double> eigenvectors;  // column i of the L x L matrix = vector for eigenvalues[i]
    std::size_t dim = 0;

    double vec(std::size_t row, std::size_t col) const { return eigenvectors[row * dim + col]; }
};

// Eigendecomposition by cyclic Jacobi rotations (cap 100 sweeps, off-diagonal
// Frobenius tolerance 1e-12*||A||_F). Eigenvalues in [-1e-10*Tr(A), 0) are
// clamped to 0; anything below that window throws DomainError, since sample
// covariances are PSD up to rounding only.
EigenDecomp sym_eigen(const CovMatrix& A);

// V f(Lambda) V^T.
CovMatrix apply_fn(const CovMatrix& A, const MonotoneFn& f);

// Sum of f over the spectrum.
double trace_fn(const CovMatrix& A, const MonotoneFn& f);

// True iff A precedes B in the Loewner order: min eig(B - A) >= -1e-10*Tr(B).
bool loewner_leq(const CovMatrix& A, const CovMatrix& B);

} // namespace specsense
