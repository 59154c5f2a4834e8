#include "specsense/matfunc.hpp"

#include "specsense/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace specsense {

MonotoneFn::MonotoneFn(std::string name, std::function<double(double)> eval,
                       std::optional<double> param)
    : name_(std::move(name)), eval_(std::move(eval)), param_(param) {
    validate();
}

void MonotoneFn::validate() const {
    if (eval_(0.0) != 0.0) {
        throw DomainError("MonotoneFn '" + name_ + "': f(0) must be exactly 0");
    }
    // Strictly increasing on a log grid spanning 1e-6..1e6, with 0 prepended.
    std::vector<double> grid{0.0};
    for (int i = 0; i <= 48; ++i) {
        grid.push_back(std::pow(10.0, -6.0 + 0.25 * i));
    }
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        vals[i] = eval_(grid[i]);
        if (!std::isfinite(vals[i])) {
            throw DomainError("MonotoneFn '" + name_ + "': non-finite value on [0, 1e6]");
        }
        if (i > 0 && !(vals[i] > vals[i - 1])) {
            throw DomainError("MonotoneFn '" + name_ + "': not strictly increasing");
        }
    }
    // Continuity probe: refining any grid interval 8-fold must split its
    // increase across sub-steps; a jump concentrates in a single sub-step.
    for (std::size_t i = 2; i < grid.size(); ++i) {
        const double a = grid[i - 1], b = grid[i];
        const double inc = vals[i] - vals[i - 1];
        const double r = std::pow(b / a, 1.0 / 8.0);
        double prev = vals[i - 1];
        double max_sub = 0.0;
        double xx = a;
        for (int s = 1; s <= 8; ++s) {
            xx = (s == 8) ? b : xx * r;
            const double fx = eval_(xx);
            max_sub = std::max(max_sub, fx - prev);
            prev = fx;
        }
        if (max_sub > 0.95 * inc + 1e-12 * (1.0 + std::abs(vals[i]))) {
            throw DomainError("MonotoneFn '" + name_ + "': discontinuity detected near " +
                              std::to_string(b));
        }
    }
}

MonotoneFn monotone_fn(const std::string& name, std::optional<double> param) {
    if (name == "identity") {
        return MonotoneFn("identity", [](double x) { return x; });
    }
    if (name == "sqrt") {
        return MonotoneFn("sqrt", [](double x) { return std::sqrt(x); });
    }
    if (name == "power") {
        const double p = param.value_or(2.0);
        if (!(p > 0.0)) throw ConfigError("monotone_fn: power exponent must be > 0");
        return MonotoneFn("power", [p](double x) { return std::pow(x, p); }, p);
    }
    if (name == "log1p") {
        return MonotoneFn("log1p", [](double x) { return std::log1p(x); });
    }
    throw ConfigError("monotone_fn: unknown function '" + name + "'");
}

const std::vector<MonotoneFn>& registered_fns() {
    static const std::vector<MonotoneFn> registry = [] {
        std::vector<MonotoneFn> r;
        r.push_back(monotone_fn("identity"));
        r.push_back(monotone_fn("sqrt"));
        r.push_back(monotone_fn("power", 1.7));
        r.push_back(monotone_fn("log1p"));
        return r;
    }();
    return registry;
}

namespace {

// Cyclic Jacobi on a dense symmetric matrix; a is row-major n x n and is
// destroyed. v receives the accumulated rotations (columns = eigenvectors).
void jacobi(std::vector<double>& a, std::vector<double>& v, std::size_t n) {
    v.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
    if (n == 1) return;

    double norm_f = 0.0;
    for (double x : a) norm_f += x * x;
    norm_f = std::sqrt(norm_f);
    const double tol = 1e-12 * norm_f;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += 2.0 * a[p * n + q] * a[p * n + q];
            }
        }
        if (std::sqrt(off) <= tol) return;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                     : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a[i * n + p];
                    const double aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a[p * n + i];
                    const double aqi = a[q * n + i];
                    a[p * n + i] = c * api - s * aqi;
                    a[q * n + i] = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v[i * n + p];
                    const double viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }
    // Check convergence after the final sweep before giving up.
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            off += 2.0 * a[p * n + q] * a[p * n + q];
        }
    }
    if (std::sqrt(off) > tol) {
        throw NotConverged("jacobi: 100-sweep cap exceeded");
    }
}

// Eigendecomposition without the PSD clamp, for possibly indefinite inputs.
EigenDecomp raw_sym_eigen(const std::vector<double>& entries, std::size_t n) {
    std::vector<double> a = entries;
    std::vector<double> v;
    jacobi(a, v, n);

    EigenDecomp out;
    out.dim = n;
    out.eigenvalues.resize(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a[x * n + x] < a[y * n + y]; });
    out.eigenvectors.resize(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = a[order[j] * n + order[j]];
        for (std::size_t i = 0; i < n; ++i) {
            out.eigenvectors[i * n + j] = v[i * n + order[j]];
        }
    }
    return out;
}

} // namespace

EigenDecomp sym_eigen(const CovMatrix& A) {
    EigenDecomp d = raw_sym_eigen(A.entries(), A.dim());
    const double clamp_floor = -1e-10 * std::max(A.trace(), 0.0);
    for (double& lambda : d.eigenvalues) {
        if (lambda < 0.0) {
            if (lambda < clamp_floor) {
                throw DomainError("sym_eigen: eigenvalue below the PSD rounding window");
            }
            lambda = 0.0;
        }
    }
    return d;
}

CovMatrix apply_fn(const CovMatrix& A, const MonotoneFn& f) {
    const std::size_t n = A.dim();
    EigenDecomp d = sym_eigen(A);
    std::vector<double> fl(n);
    for (std::size_t i = 0; i < n; ++i) {
        fl[i] = f(d.eigenvalues[i]);
        if (!std::isfinite(fl[i]) || fl[i] < 0.0) {
            throw DomainError("apply_fn: function value outside [0,inf) on the spectrum");
        }
    }
    // B = V diag(fl) V^T, upper triangle then mirrored so the result is
    // symmetric exactly.
    std::vector<double> b(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                acc += d.vec(i, k) * fl[k] * d.vec(j, k);
            }
            b[i * n + j] = acc;
            b[j * n + i] = acc;
        }
    }
    return CovMatrix(n, std::move(b), A.n_vectors());
}

double trace_fn(const CovMatrix& A, const MonotoneFn& f) {
    EigenDecomp d = sym_eigen(A);
    double acc = 0.0;
    for (double lambda : d.eigenvalues) {
        const double v = f(lambda);
        if (!std::isfinite(v) || v < 0.0) {
            throw DomainError("trace_fn: function value outside [0,inf) on the spectrum");
        }
        acc += v;
    }
    return acc;
}

bool loewner_leq(const CovMatrix& A, const CovMatrix& B) {
    if (A.dim() != B.dim()) {
        throw DimensionMismatch("loewner_leq: dimension mismatch");
    }
    const std::size_t n = A.dim();
    std::vector<double> diff(n * n);
    for (std::size_t i = 0; i < n * n; ++i) {
        diff[i] = B.entries()[i] - A.entries()[i];
    }
    EigenDecomp d = raw_sym_eigen(diff, n);
    return d.eigenvalues.front() >= -1e-10 * B.trace();
}

} // namespace specsense
