#pragma once

#include <vector>

namespace stskotfs {

/// Gauss-Legendre nodes and weights on [a, b].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Newton iteration on the Legendre recurrence; exact for polynomials up to
/// degree 2*order-1. Rules are cached per (order, a, b) behind a mutex.
const QuadratureRule& gauss_legendre(int order, double a, double b);

} // namespace stskotfs
