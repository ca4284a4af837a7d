#include "hestondg/timestepping.hpp"

#include <cmath>
#include <stdexcept>

namespace hestondg {

int TimeGrid::steps() const {
    const double j = T / dt;
    const double jr = std::round(j);
    if (std::abs(j - jr) > 1e-12 * std::max(1.0, j))
        throw std::invalid_argument("TimeGrid: T must be an integral multiple of dt");
    return static_cast<int>(jr);
}

void TimeGrid::validate() const {
    if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("TimeGrid: T, dt must be > 0");
    (void)steps();
}

SystemFactorization::SystemFactorization(const SpMat& M, const SpMat& A, double coef) {
    SpMat s = M + coef * A;
    s.makeCompressed();
    lu_.compute(s);
    if (lu_.info() != Eigen::Success)
        throw std::runtime_error("SystemFactorization: singular system matrix");
}

Eigen::VectorXd SystemFactorization::solve(const Eigen::VectorXd& rhs) const {
    return lu_.solve(rhs);
}

namespace {

void maybe_snapshot(MarchResult& res, const std::vector<double>& times, double tau,
                    const Eigen::VectorXd& u, double dt) {
    for (double t : times)
        if (std::abs(t - tau) < 1e-9 * std::max(1.0, dt)) {
            res.snapshots.emplace_back(tau, u);
            return;
        }
}

}  // namespace

MarchResult march(const SpMat& M, const SpMat& A, const LoadFn& load, const Eigen::VectorXd& u0,
                  const TimeGrid& grid, Scheme scheme, const std::vector<double>& snapshot_times) {
    grid.validate();
    if (M.rows() != A.rows() || M.rows() != u0.size())
        throw std::invalid_argument("march: dimension mismatch");
    const double dt = grid.dt;
    const int J = grid.steps();
    if (scheme == Scheme::RannacherCN && J < 2)
        throw std::invalid_argument("march: RannacherCN needs T >= 2*dt");

    MarchResult res;
    res.u = u0;
    res.tau = 0.0;
    maybe_snapshot(res, snapshot_times, 0.0, res.u, dt);

    if (scheme == Scheme::BackwardEuler) {
        SystemFactorization fac(M, A, dt);
        for (int n = 0; n < J; ++n) {
            const double tau_next = (n + 1) * dt;
            res.u = fac.solve(M * res.u + dt * load(tau_next));
            res.tau = tau_next;
            maybe_snapshot(res, snapshot_times, res.tau, res.u, dt);
        }
        return res;
    }

    // Crank-Nicolson phases use (M + dt/2 A) on both schemes.
    SystemFactorization fac(M, A, 0.5 * dt);
    double tau = 0.0;
    int cn_steps = J;
    if (scheme == Scheme::RannacherCN) {
        // four implicit Euler half-steps with the same matrix
        for (int n = 0; n < 4; ++n) {
            tau = 0.5 * dt * (n + 1);
            res.u = fac.solve(M * res.u + 0.5 * dt * load(tau));
            res.tau = tau;
            maybe_snapshot(res, snapshot_times, tau, res.u, dt);
        }
        cn_steps = J - 2;
    }
    const double tau0 = tau;
    Eigen::VectorXd l_prev = load(tau);
    for (int n = 0; n < cn_steps; ++n) {
        const double tau_next = tau0 + dt * (n + 1);
        Eigen::VectorXd l_next = load(tau_next);
        res.u = fac.solve(M * res.u - 0.5 * dt * (A * res.u) + 0.5 * dt * (l_prev + l_next));
        l_prev = std::move(l_next);
        tau = tau_next;
        res.tau = tau;
        maybe_snapshot(res, snapshot_times, tau, res.u, dt);
    }
    // shortened final step in case the phases do not land exactly on T
    const double rem = grid.T - tau;
    if (rem > 1e-12 * grid.T) {
        SystemFactorization last(M, A, 0.5 * rem);
        Eigen::VectorXd l_next = load(grid.T);
        res.u = last.solve(M * res.u - 0.5 * rem * (A * res.u) + 0.5 * rem * (l_prev + l_next));
        res.tau = grid.T;
        maybe_snapshot(res, snapshot_times, res.tau, res.u, dt);
    }
    return res;
}

}  // namespace hestondg
