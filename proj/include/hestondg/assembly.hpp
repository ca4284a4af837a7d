#pragma once

#include <Eigen/Sparse>
#include <iosfwd>

#include "hestondg/dg_space.hpp"
#include "hestondg/model.hpp"

namespace hestondg {

using SpMat = Eigen::SparseMatrix<double>;

// Interior penalty sigma_e = (3 d1^2/d0) k(k+1) cot(theta), doubled on
// Dirichlet boundary edges; d0, d1 are the extreme eigenvalues of A on the
// edge and theta the smallest angle over all triangles.
double penalty_sigma(double d0, double d1, int degree, double theta, bool boundary_edge);

struct PenaltyTable {
    std::vector<double> sigma;  // per edge id, boundary edges use the Dirichlet formula
    std::vector<double> d0;
    std::vector<double> d1;
    double theta = 0.0;
};

// Eigenvalue bounds use A at the mean edge variance, floored at
// max(v_min, 1e-8) so the table stays finite where A degenerates.
PenaltyTable compute_penalties(const DGSpace& space, const PDECoefficients& coeffs);
PenaltyTable compute_penalties(const DGSpace& space, const HestonParams& p);

// Block-diagonal mass matrix (phi_j, phi_i).
SpMat assemble_mass(const DGSpace& space);

// SIPG stiffness: volume diffusion/convection/reaction, interior and
// Dirichlet face penalty and consistency terms, upwind jump terms on inflow
// element faces and the inflow-boundary term.  Time independent.
SpMat assemble_stiffness(const DGSpace& space, const PDECoefficients& coeffs,
                         const BoundarySpec& bc, const PenaltyTable& pen);
SpMat assemble_stiffness(const DGSpace& space, const HestonParams& p, const BoundarySpec& bc,
                         const PenaltyTable& pen);

// Boundary load at time tau: Neumann data, Dirichlet penalty/consistency
// data and the Dirichlet inflow term.
Eigen::VectorXd assemble_load(const DGSpace& space, const PDECoefficients& coeffs,
                              const BoundarySpec& bc, const PenaltyTable& pen, double tau);

// Volume source (f, phi_i); optional split lines as in l2_project.
Eigen::VectorXd assemble_volume_source(const DGSpace& space, const ScalarField& f,
                                       const std::vector<double>& kink_lines = {});

// Coordinate-format (row, col, value) dump.
void write_triplets(std::ostream& os, const SpMat& m);

}  // namespace hestondg
