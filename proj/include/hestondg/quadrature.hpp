#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hestondg {

// Quadrature rule on the reference triangle {xi>=0, eta>=0, xi+eta<=1}.
// Weights sum to 1 and are fractions of the element area.
struct TriQuadrature {
    std::vector<Eigen::Vector2d> points;  // (xi, eta)
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
    // Smallest built-in rule exact for polynomials of total degree <= deg.
    static const TriQuadrature& get(int deg);
};

// Gauss-Legendre rule on [0,1]; exact for polynomials of degree <= 2n-1.
struct LineQuadrature {
    std::vector<double> points;
    std::vector<double> weights;  // sum to 1

    std::size_t size() const { return points.size(); }
    static const LineQuadrature& get(int n);
};

}  // namespace hestondg
