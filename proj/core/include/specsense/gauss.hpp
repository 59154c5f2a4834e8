#pragma once

namespace specsense {

// Gaussian upper-tail probability Q(t) = P(N(0,1) > t).
double q_function(double t);

// Inverse of Q on (0,1), by bisection to 1e-12 absolute on the probability
// scale. Throws DomainError outside (0,1).
double q_inverse(double p);

} // namespace specsense
