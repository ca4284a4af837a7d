#pragma once

#include <iosfwd>
#include <memory>

#include "hestondg/assembly.hpp"
#include "hestondg/timestepping.hpp"

namespace hestondg {

// Per-element residual indicators; all stored squared.
struct ErrorIndicators {
    Eigen::VectorXd cell;       // weighted strong residual
    Eigen::VectorXd interior;   // flux and solution jumps on interior edges
    Eigen::VectorXd dirichlet;  // Dirichlet data mismatch
    Eigen::VectorXd neumann;    // Neumann flux mismatch
    Eigen::VectorXd total;      // eta_K^2
    double eta = 0.0;           // sqrt(sum eta_K^2)
};

// Residual estimator from the first time step: u1 the solution after one
// implicit Euler half-step of size dt1, u0 the projected initial data, both
// on the same space.  Weights are the Peclet-robust choice
// rho = min(h / sqrt(d0), 1/sqrt(r)) with the reaction part dropped at r=0.
ErrorIndicators estimate(const DGSolution& u1, const DGSolution& u0, double dt1,
                         const PDECoefficients& coeffs, const BoundarySpec& bc,
                         const PenaltyTable& pen);

// Smallest set S (ties by ascending id) with sum_{K in S} eta_K^2 >=
// theta^2 * eta^2.
std::vector<int> mark(const ErrorIndicators& ind, double theta_mark);

struct AdaptResult {
    std::shared_ptr<const Mesh> mesh;
    std::vector<double> eta_history;  // one entry per estimate
    bool converged = false;           // eta < eps reached before max_rounds
    int rounds = 0;                   // refinements performed
};

struct AdaptOptions {
    double eps = 0.0;        // target estimator value
    double theta_mark = 0.5;
    int max_rounds = 10;
    double dt = 0.0125;      // scheme step size; the probe step is dt/2
    int degree = 1;
};

// SOLVE -> ESTIMATE -> MARK -> REFINE until eta < eps or max_rounds.
AdaptResult adapt_loop(const PDECoefficients& coeffs, const BoundarySpec& bc,
                       const ScalarField& initial, const std::vector<double>& kinks,
                       std::shared_ptr<const Mesh> mesh0, const AdaptOptions& opts);

// CSV dump: element id, eta_K and its components.
void write_indicators(std::ostream& os, const ErrorIndicators& ind);

}  // namespace hestondg
