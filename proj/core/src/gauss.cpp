#include "specsense/gauss.hpp"

#include "specsense/errors.hpp"

#include <cmath>

namespace specsense {

double q_function(double t) {
    return 0.5 * std::erfc(t / std::sqrt(2.0));
}

double q_inverse(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("q_inverse: p must lie in (0,1)");
    }
    // Q is strictly decreasing; Q(-40) and Q(40) bracket every p in (0,1)
    // representable in double precision.
    double lo = -40.0, hi = 40.0;
    double mid = 0.0;
    for (int i = 0; i < 200; ++i) {
        mid = 0.5 * (lo + hi);
        const double q = q_function(mid);
        if (std::abs(q - p) <= 1e-12) {
            return mid;
        }
        if (q > p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-15 * (1.0 + std::abs(mid))) {
            break;
        }
    }
    return mid;
}

} // namespace specsense
