#pragma once

#include "hestondg/config.hpp"

namespace hestondg {

struct SolveOutput {
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const DGSpace> space;
    DGSolution solution;  // at tau = T
    std::vector<std::pair<double, DGSolution>> snapshots;
    AdaptResult adapt;    // populated in adaptive mode
    double setup_seconds = 0.0;
    double march_seconds = 0.0;
};

// Project the payoff, assemble, march to tau = T on a uniform or
// adaptively generated mesh.
SolveOutput solve_pde(const RunConfig& cfg, const std::vector<double>& snapshot_taus = {});

// Value of a solution at the contract spot (v0, x(S0)).
double price_at_spot(const SolveOutput& out, const RunConfig& cfg);

// Minimum nodal trace value over all elements (exact range for degree 1).
double min_nodal_value(const DGSolution& sol);

// (v, x, U) triples on an n_v x n_x output lattice, CSV with header.
void write_surface_csv(std::ostream& os, const DGSolution& sol, int n_v = 101, int n_x = 101);

}  // namespace hestondg
