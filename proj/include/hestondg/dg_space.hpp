#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "hestondg/mesh.hpp"
#include "hestondg/quadrature.hpp"

namespace hestondg {

// Lagrange shape functions on the reference triangle, degrees 1 and 2.
// Node order: vertices (0,0),(1,0),(0,1) then, for degree 2, the edge
// midpoints (1/2,0),(1/2,1/2),(0,1/2).
struct ReferenceBasis {
    int degree = 1;
    int n = 3;

    explicit ReferenceBasis(int k);
    void values(double xi, double eta, double* out) const;
    void gradients(double xi, double eta, Eigen::Vector2d* out) const;
    // constant per shape function for k <= 2
    void hessians(Eigen::Matrix2d* out) const;
};

struct ElementMap {
    Eigen::Vector2d origin;   // image of (0,0)
    Eigen::Matrix2d J;        // columns p1-p0, p2-p0
    Eigen::Matrix2d J_inv_t;
    double det = 0.0;         // = 2*area

    Eigen::Vector2d to_physical(const Eigen::Vector2d& ref) const {
        return origin + J * ref;
    }
    Eigen::Vector2d to_reference(const Eigen::Vector2d& phys) const {
        return J_inv_t.transpose() * (phys - origin);
    }
};

// Discontinuous piecewise-P_k space over a mesh.  DoFs are blocked per
// element: element m owns [m*n_local, (m+1)*n_local).
class DGSpace {
  public:
    DGSpace(std::shared_ptr<const Mesh> mesh, int degree);

    const Mesh& mesh() const { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
    int degree() const { return degree_; }
    int n_local() const { return basis_.n; }
    int n_elements() const { return mesh_->n_triangles(); }
    int dim() const { return n_elements() * n_local(); }
    int elem_offset(int e) const { return e * n_local(); }

    const ReferenceBasis& basis() const { return basis_; }
    const ElementMap& element_map(int e) const { return maps_[e]; }
    const TriQuadrature& volume_rule() const { return *volume_rule_; }
    const LineQuadrature& edge_rule() const { return *edge_rule_; }

    // reference mass matrix \int_ref N_i N_j (element mass = det * this)
    const Eigen::MatrixXd& reference_mass() const { return ref_mass_; }
    const Eigen::LDLT<Eigen::MatrixXd>& reference_mass_ldlt() const { return ref_mass_ldlt_; }

    // value of the basis expansion of element e with coefficients u at a
    // physical point
    double eval_element(int e, const Eigen::Ref<const Eigen::VectorXd>& u,
                        const Eigen::Vector2d& p) const;
    Eigen::Vector2d grad_element(int e, const Eigen::Ref<const Eigen::VectorXd>& u,
                                 const Eigen::Vector2d& p) const;

  private:
    std::shared_ptr<const Mesh> mesh_;
    int degree_;
    ReferenceBasis basis_;
    std::vector<ElementMap> maps_;
    const TriQuadrature* volume_rule_;
    const LineQuadrature* edge_rule_;
    Eigen::MatrixXd ref_mass_;
    Eigen::LDLT<Eigen::MatrixXd> ref_mass_ldlt_;
};

struct DGSolution {
    std::shared_ptr<const DGSpace> space;
    Eigen::VectorXd coeffs;
    double tau = 0.0;
};

double eval(const DGSolution& sol, double v, double x);

using ScalarField = std::function<double(double v, double x)>;

// Element-local L2 projection.  Elements crossed by one of the vertical
// lines x = c (payoff kinks) are split along them so the integrand is
// smooth on every quadrature sub-cell.
DGSolution l2_project(const ScalarField& f, std::shared_ptr<const DGSpace> space,
                      const std::vector<double>& kink_lines = {});

// Quadrature over one element respecting the split lines; callback receives
// physical point and weight (summing to the element area).
void for_each_quad_point(const DGSpace& space, int e, const std::vector<double>& kink_lines,
                         int quad_degree,
                         const std::function<void(const Eigen::Vector2d&, double)>& fn);

}  // namespace hestondg
