#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <functional>
#include <memory>
#include <vector>

#include "hestondg/assembly.hpp"

namespace hestondg {

struct TimeGrid {
    double T = 1.0;
    double dt = 0.01;

    // number of steps; T must be an integral multiple of dt
    int steps() const;
    void validate() const;
};

enum class Scheme { CrankNicolson, RannacherCN, BackwardEuler };

// Direct factorization of (M + coef*A), reusable across time steps.
class SystemFactorization {
  public:
    SystemFactorization(const SpMat& M, const SpMat& A, double coef);
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  private:
    Eigen::SparseLU<SpMat> lu_;
};

using LoadFn = std::function<Eigen::VectorXd(double tau)>;

struct MarchResult {
    Eigen::VectorXd u;
    double tau = 0.0;
    // solution snapshots at requested times (tau, coefficients)
    std::vector<std::pair<double, Eigen::VectorXd>> snapshots;
};

// Integrate M u_t + A u = l(t) from tau=0 to tau=T.
//
// RannacherCN starts with four backward Euler solves of step dt/2 (so the
// first 2*dt of physical time), then Crank-Nicolson steps of size dt; both
// phases share the factorization of (M + dt/2 A).  A shorter final step, if
// the remaining time requires one, gets its own factorization.
MarchResult march(const SpMat& M, const SpMat& A, const LoadFn& load, const Eigen::VectorXd& u0,
                  const TimeGrid& grid, Scheme scheme,
                  const std::vector<double>& snapshot_times = {});

}  // namespace hestondg
