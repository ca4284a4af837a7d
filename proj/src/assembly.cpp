#include "hestondg/assembly.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace hestondg {

double penalty_sigma(double d0, double d1, int degree, double theta, bool boundary_edge) {
    if (d0 <= 0.0) throw std::invalid_argument("penalty_sigma: d0 must be positive");
    const double base = 3.0 * d1 * d1 / d0 * degree * (degree + 1) / std::tan(theta);
    return boundary_edge ? 2.0 * base : base;
}

namespace {

void edge_ellipticity(const PDECoefficients& coeffs, double v_floor, const Mesh& mesh,
                      const MeshEdge& e, double& d0, double& d1) {
    const double v_mean = 0.5 * (mesh.vertex(e.a)[0] + mesh.vertex(e.b)[0]);
    const Eigen::Matrix2d A = coeffs.A(std::max(v_mean, v_floor));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(A);
    d0 = es.eigenvalues()[0];
    d1 = es.eigenvalues()[1];
}

}  // namespace

PenaltyTable compute_penalties(const DGSpace& space, const PDECoefficients& coeffs) {
    const Mesh& mesh = space.mesh();
    PenaltyTable t;
    t.theta = mesh.min_angle();
    const double v_floor = std::max(mesh.domain().v_min, 1e-8);
    const std::size_t ne = mesh.edges().size();
    t.sigma.resize(ne);
    t.d0.resize(ne);
    t.d1.resize(ne);
    for (std::size_t i = 0; i < ne; ++i) {
        const MeshEdge& e = mesh.edges()[i];
        double d0, d1;
        edge_ellipticity(coeffs, v_floor, mesh, e, d0, d1);
        if (d0 <= 0.0)
            throw std::runtime_error("compute_penalties: degenerate diffusion on an edge");
        t.d0[i] = d0;
        t.d1[i] = d1;
        t.sigma[i] = penalty_sigma(d0, d1, space.degree(), t.theta, e.is_boundary());
    }
    return t;
}

PenaltyTable compute_penalties(const DGSpace& space, const HestonParams& p) {
    return compute_penalties(space, heston_coefficients(p));
}

SpMat assemble_mass(const DGSpace& space) {
    const int nl = space.n_local();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(space.n_elements()) * nl * nl);
    for (int e = 0; e < space.n_elements(); ++e) {
        const double det = space.element_map(e).det;
        const int off = space.elem_offset(e);
        for (int i = 0; i < nl; ++i)
            for (int j = 0; j < nl; ++j)
                trips.emplace_back(off + i, off + j, det * space.reference_mass()(i, j));
    }
    SpMat m(space.dim(), space.dim());
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

namespace {

struct FaceTrace {
    // basis values and physical gradients of one element at one edge point
    double val[6];
    Eigen::Vector2d grad[6];
};

void trace_at(const DGSpace& space, int elem, const Eigen::Vector2d& p, FaceTrace& tr) {
    const ElementMap& m = space.element_map(elem);
    const Eigen::Vector2d ref = m.to_reference(p);
    space.basis().values(ref[0], ref[1], tr.val);
    Eigen::Vector2d gref[6];
    space.basis().gradients(ref[0], ref[1], gref);
    for (int i = 0; i < space.n_local(); ++i) tr.grad[i] = m.J_inv_t * gref[i];
}

// b.n is linear along a straight edge; when its sign flips inside the edge
// the upwind terms are only piecewise smooth, so quadrature intervals are
// split at the root.
struct EdgeSplit {
    double bounds[3] = {0.0, 1.0, 1.0};
    int parts = 1;
};

EdgeSplit split_at_inflow_change(const PDECoefficients& coeffs, const Eigen::Vector2d& pa,
                                 const Eigen::Vector2d& pb, const Eigen::Vector2d& n) {
    EdgeSplit s;
    const double b0 = coeffs.b(pa[0]).dot(n);
    const double b1 = coeffs.b(pb[0]).dot(n);
    if (b0 * b1 < 0.0) {
        const double r = b0 / (b0 - b1);
        if (r > 1e-12 && r < 1.0 - 1e-12) {
            s.bounds[1] = r;
            s.parts = 2;
        }
    }
    return s;
}

}  // namespace

SpMat assemble_stiffness(const DGSpace& space, const PDECoefficients& coeffs,
                         const BoundarySpec& bc, const PenaltyTable& pen) {
    const Mesh& mesh = space.mesh();
    const int nl = space.n_local();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(space.dim()) * nl * 4);

    // volume terms
    const TriQuadrature& vq = space.volume_rule();
    std::vector<double> vals(nl);
    std::vector<Eigen::Vector2d> grads(nl);
    Eigen::Vector2d gref[6];
    for (int e = 0; e < space.n_elements(); ++e) {
        const ElementMap& m = space.element_map(e);
        const double area = mesh.tri(e).area;
        const int off = space.elem_offset(e);
        Eigen::MatrixXd loc = Eigen::MatrixXd::Zero(nl, nl);
        for (std::size_t k = 0; k < vq.size(); ++k) {
            const Eigen::Vector2d p = m.to_physical(vq.points[k]);
            const double w = area * vq.weights[k];
            space.basis().values(vq.points[k][0], vq.points[k][1], vals.data());
            space.basis().gradients(vq.points[k][0], vq.points[k][1], gref);
            for (int i = 0; i < nl; ++i) grads[i] = m.J_inv_t * gref[i];
            const Eigen::Matrix2d A = coeffs.A(p[0]);
            const Eigen::Vector2d b = coeffs.b(p[0]);
            for (int j = 0; j < nl; ++j) {
                const Eigen::Vector2d Agj = A * grads[j];
                const double conv_j = b.dot(grads[j]);
                for (int i = 0; i < nl; ++i) {
                    loc(i, j) += w * (Agj.dot(grads[i]) + conv_j * vals[i] +
                                      coeffs.reaction * vals[j] * vals[i]);
                }
            }
        }
        for (int i = 0; i < nl; ++i)
            for (int j = 0; j < nl; ++j) trips.emplace_back(off + i, off + j, loc(i, j));
    }

    // face terms
    const LineQuadrature& eq = space.edge_rule();
    FaceTrace t0, t1;
    for (std::size_t ei = 0; ei < mesh.edges().size(); ++ei) {
        const MeshEdge& edge = mesh.edges()[ei];
        const Eigen::Vector2d pa = mesh.vertex(edge.a);
        const Eigen::Vector2d pb = mesh.vertex(edge.b);
        const Eigen::Vector2d n = edge.normal;  // out of tri[0]
        const double sig_h = pen.sigma[ei] / edge.length;
        const int e0 = edge.tri[0];
        const int off0 = space.elem_offset(e0);

        const EdgeSplit split = split_at_inflow_change(coeffs, pa, pb, n);
        if (!edge.is_boundary()) {
            const int e1 = edge.tri[1];
            const int off1 = space.elem_offset(e1);
            Eigen::MatrixXd l00 = Eigen::MatrixXd::Zero(nl, nl);
            Eigen::MatrixXd l01 = Eigen::MatrixXd::Zero(nl, nl);
            Eigen::MatrixXd l10 = Eigen::MatrixXd::Zero(nl, nl);
            Eigen::MatrixXd l11 = Eigen::MatrixXd::Zero(nl, nl);
            for (int part = 0; part < split.parts; ++part)
            for (std::size_t k = 0; k < eq.size(); ++k) {
                const double lo = split.bounds[part], hi = split.bounds[part + 1];
                const double s = lo + eq.points[k] * (hi - lo);
                const Eigen::Vector2d p = pa + s * (pb - pa);
                const double w = edge.length * (hi - lo) * eq.weights[k];
                trace_at(space, e0, p, t0);
                trace_at(space, e1, p, t1);
                const Eigen::Matrix2d A = coeffs.A(p[0]);
                const Eigen::Vector2d b = coeffs.b(p[0]);
                for (int j = 0; j < nl; ++j) {
                    const double fj0 = (A * t0.grad[j]).dot(n);
                    const double fj1 = (A * t1.grad[j]).dot(n);
                    for (int i = 0; i < nl; ++i) {
                        const double fi0 = (A * t0.grad[i]).dot(n);
                        const double fi1 = (A * t1.grad[i]).dot(n);
                        // jump(u).jump(w) with n = n0: (u0-u1)(w0-w1)
                        l00(i, j) += w * (sig_h * t0.val[j] * t0.val[i] -
                                          0.5 * fi0 * t0.val[j] - 0.5 * fj0 * t0.val[i]);
                        l01(i, j) += w * (-sig_h * t1.val[j] * t0.val[i] +
                                          0.5 * fi0 * t1.val[j] - 0.5 * fj1 * t0.val[i]);
                        l10(i, j) += w * (-sig_h * t0.val[j] * t1.val[i] -
                                          0.5 * fi1 * t0.val[j] + 0.5 * fj0 * t1.val[i]);
                        l11(i, j) += w * (sig_h * t1.val[j] * t1.val[i] +
                                          0.5 * fi1 * t1.val[j] + 0.5 * fj1 * t1.val[i]);
                    }
                }
                // upwind: the element whose outward normal has b.n < 0 takes
                // b.n (u_out - u_in) w_in on this point
                const double bn = b.dot(n);
                if (bn < 0.0) {
                    for (int j = 0; j < nl; ++j)
                        for (int i = 0; i < nl; ++i) {
                            l01(i, j) += w * bn * t1.val[j] * t0.val[i];
                            l00(i, j) -= w * bn * t0.val[j] * t0.val[i];
                        }
                } else if (bn > 0.0) {
                    for (int j = 0; j < nl; ++j)
                        for (int i = 0; i < nl; ++i) {
                            l10(i, j) += w * (-bn) * t0.val[j] * t1.val[i];
                            l11(i, j) -= w * (-bn) * t1.val[j] * t1.val[i];
                        }
                }
            }
            for (int i = 0; i < nl; ++i)
                for (int j = 0; j < nl; ++j) {
                    trips.emplace_back(off0 + i, off0 + j, l00(i, j));
                    trips.emplace_back(off0 + i, off1 + j, l01(i, j));
                    trips.emplace_back(off1 + i, off0 + j, l10(i, j));
                    trips.emplace_back(off1 + i, off1 + j, l11(i, j));
                }
        } else {
            const bool dirichlet = bc.type(static_cast<Side>(edge.side)) == BCType::Dirichlet;
            Eigen::MatrixXd loc = Eigen::MatrixXd::Zero(nl, nl);
            for (int part = 0; part < split.parts; ++part)
            for (std::size_t k = 0; k < eq.size(); ++k) {
                const double lo = split.bounds[part], hi = split.bounds[part + 1];
                const double s = lo + eq.points[k] * (hi - lo);
                const Eigen::Vector2d p = pa + s * (pb - pa);
                const double w = edge.length * (hi - lo) * eq.weights[k];
                trace_at(space, e0, p, t0);
                const Eigen::Matrix2d A = coeffs.A(p[0]);
                const double bn = coeffs.b(p[0]).dot(n);
                if (dirichlet) {
                    for (int j = 0; j < nl; ++j) {
                        const double fj = (A * t0.grad[j]).dot(n);
                        for (int i = 0; i < nl; ++i) {
                            const double fi = (A * t0.grad[i]).dot(n);
                            loc(i, j) += w * (sig_h * t0.val[j] * t0.val[i] -
                                              fi * t0.val[j] - fj * t0.val[i]);
                        }
                    }
                }
                if (bn < 0.0) {
                    // inflow boundary term -int b.n u w
                    for (int j = 0; j < nl; ++j)
                        for (int i = 0; i < nl; ++i)
                            loc(i, j) -= w * bn * t0.val[j] * t0.val[i];
                }
            }
            for (int i = 0; i < nl; ++i)
                for (int j = 0; j < nl; ++j) trips.emplace_back(off0 + i, off0 + j, loc(i, j));
        }
    }

    SpMat a(space.dim(), space.dim());
    a.setFromTriplets(trips.begin(), trips.end());
    return a;
}

SpMat assemble_stiffness(const DGSpace& space, const HestonParams& p, const BoundarySpec& bc,
                         const PenaltyTable& pen) {
    return assemble_stiffness(space, heston_coefficients(p), bc, pen);
}

Eigen::VectorXd assemble_load(const DGSpace& space, const PDECoefficients& coeffs,
                              const BoundarySpec& bc, const PenaltyTable& pen, double tau) {
    const Mesh& mesh = space.mesh();
    const int nl = space.n_local();
    Eigen::VectorXd l = Eigen::VectorXd::Zero(space.dim());
    const LineQuadrature& eq = space.edge_rule();
    FaceTrace t0;
    for (std::size_t ei = 0; ei < mesh.edges().size(); ++ei) {
        const MeshEdge& edge = mesh.edges()[ei];
        if (!edge.is_boundary()) continue;
        const Side side = static_cast<Side>(edge.side);
        const bool dirichlet = bc.type(side) == BCType::Dirichlet;
        const Eigen::Vector2d pa = mesh.vertex(edge.a);
        const Eigen::Vector2d pb = mesh.vertex(edge.b);
        const Eigen::Vector2d n = edge.normal;
        const double sig_h = pen.sigma[ei] / edge.length;
        const int e0 = edge.tri[0];
        const int off0 = space.elem_offset(e0);
        const EdgeSplit split = split_at_inflow_change(coeffs, pa, pb, n);
        for (int part = 0; part < split.parts; ++part)
        for (std::size_t k = 0; k < eq.size(); ++k) {
            const double lo = split.bounds[part], hi = split.bounds[part + 1];
            const double s = lo + eq.points[k] * (hi - lo);
            const Eigen::Vector2d p = pa + s * (pb - pa);
            const double w = edge.length * (hi - lo) * eq.weights[k];
            const double data = bc(side, tau, p[0], p[1]);
            trace_at(space, e0, p, t0);
            if (!dirichlet) {
                // Neumann flux data
                for (int i = 0; i < nl; ++i) l[off0 + i] += w * data * t0.val[i];
                continue;
            }
            const Eigen::Matrix2d A = coeffs.A(p[0]);
            const double bn = coeffs.b(p[0]).dot(n);
            for (int i = 0; i < nl; ++i) {
                const double fi = (A * t0.grad[i]).dot(n);
                l[off0 + i] += w * data * (sig_h * t0.val[i] - fi);
            }
            if (bn < 0.0) {
                for (int i = 0; i < nl; ++i) l[off0 + i] -= w * bn * data * t0.val[i];
            }
        }
    }
    return l;
}

Eigen::VectorXd assemble_volume_source(const DGSpace& space, const ScalarField& f,
                                       const std::vector<double>& kink_lines) {
    const int nl = space.n_local();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.dim());
    double vals[6];
    for (int e = 0; e < space.n_elements(); ++e) {
        const ElementMap& m = space.element_map(e);
        const int off = space.elem_offset(e);
        for_each_quad_point(space, e, kink_lines, 2 * space.degree() + 1,
                            [&](const Eigen::Vector2d& p, double w) {
                                const Eigen::Vector2d ref = m.to_reference(p);
                                space.basis().values(ref[0], ref[1], vals);
                                const double fw = w * f(p[0], p[1]);
                                for (int i = 0; i < nl; ++i) rhs[off + i] += fw * vals[i];
                            });
    }
    return rhs;
}

void write_triplets(std::ostream& os, const SpMat& m) {
    for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it)
            os << it.row() << " " << it.col() << " " << it.value() << "\n";
}

}  // namespace hestondg
