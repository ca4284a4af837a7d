#include "hestondg/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace hestondg {

namespace {

double robust_weight(double h, double d0, double reaction) {
    const double diff = h / std::sqrt(d0);
    if (reaction <= 0.0) return diff;
    return std::min(diff, 1.0 / std::sqrt(reaction));
}

}  // namespace

ErrorIndicators estimate(const DGSolution& u1, const DGSolution& u0, double dt1,
                         const PDECoefficients& coeffs, const BoundarySpec& bc,
                         const PenaltyTable& pen) {
    if (u1.space != u0.space)
        throw std::invalid_argument("estimate: solutions live on different spaces");
    if (!(dt1 > 0.0)) throw std::invalid_argument("estimate: dt1 must be > 0");
    const DGSpace& sp = *u1.space;
    const Mesh& mesh = sp.mesh();
    const int nl = sp.n_local();
    const int ne = sp.n_elements();
    const double r = coeffs.reaction;
    const double v_floor = std::max(mesh.domain().v_min, 1e-8);

    ErrorIndicators ind;
    ind.cell = Eigen::VectorXd::Zero(ne);
    ind.interior = Eigen::VectorXd::Zero(ne);
    ind.dirichlet = Eigen::VectorXd::Zero(ne);
    ind.neumann = Eigen::VectorXd::Zero(ne);

    // cell residuals
    const TriQuadrature& vq = TriQuadrature::get(2 * sp.degree() + 1);
    std::vector<double> vals(nl);
    Eigen::Vector2d gref[6];
    Eigen::Matrix2d href[6], hphys[6];
    sp.basis().hessians(href);
    for (int e = 0; e < ne; ++e) {
        const ElementMap& m = sp.element_map(e);
        const int off = sp.elem_offset(e);
        for (int i = 0; i < nl; ++i) hphys[i] = m.J_inv_t * href[i] * m.J_inv_t.transpose();
        const double v_c = (mesh.vertex(mesh.tri(e).v[0])[0] + mesh.vertex(mesh.tri(e).v[1])[0] +
                            mesh.vertex(mesh.tri(e).v[2])[0]) /
                           3.0;
        const double d0_K =
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(coeffs.A(std::max(v_c, v_floor)))
                .eigenvalues()[0];
        const double rho = robust_weight(mesh.tri(e).diameter, d0_K, r);
        double acc = 0.0;
        for (std::size_t k = 0; k < vq.size(); ++k) {
            const Eigen::Vector2d p = m.to_physical(vq.points[k]);
            const double w = mesh.tri(e).area * vq.weights[k];
            sp.basis().values(vq.points[k][0], vq.points[k][1], vals.data());
            sp.basis().gradients(vq.points[k][0], vq.points[k][1], gref);
            double u1v = 0.0, u0v = 0.0;
            Eigen::Vector2d g = Eigen::Vector2d::Zero();
            Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
            for (int i = 0; i < nl; ++i) {
                const double c1 = u1.coeffs[off + i];
                u1v += c1 * vals[i];
                u0v += u0.coeffs[off + i] * vals[i];
                g += c1 * (m.J_inv_t * gref[i]);
                H += c1 * hphys[i];
            }
            const Eigen::Matrix2d A = coeffs.A(p[0]);
            const Eigen::Matrix2d dA = coeffs.dA_dv(p[0]);
            const double divAgrad = A(0, 0) * H(0, 0) + 2.0 * A(0, 1) * H(0, 1) +
                                    A(1, 1) * H(1, 1) + dA(0, 0) * g[0] + dA(0, 1) * g[1];
            const double R = (u1v - u0v) / dt1 - divAgrad + coeffs.b(p[0]).dot(g) + r * u1v;
            acc += w * R * R;
        }
        ind.cell[e] = rho * rho * acc;
    }

    // edge residuals
    const LineQuadrature& eq = sp.edge_rule();
    for (std::size_t ei = 0; ei < mesh.edges().size(); ++ei) {
        const MeshEdge& edge = mesh.edges()[ei];
        const Eigen::Vector2d pa = mesh.vertex(edge.a);
        const Eigen::Vector2d pb = mesh.vertex(edge.b);
        const Eigen::Vector2d n = edge.normal;
        const double d0 = pen.d0[ei];
        const double rho_e = robust_weight(edge.length, d0, r);
        const double w_flux = rho_e / std::sqrt(d0);
        double w_jump = pen.sigma[ei] / edge.length + edge.length / d0;
        if (r > 0.0) w_jump += r * edge.length;
        const int e0 = edge.tri[0];

        double acc_flux = 0.0, acc_jump = 0.0;
        if (!edge.is_boundary()) {
            const int e1 = edge.tri[1];
            for (std::size_t k = 0; k < eq.size(); ++k) {
                const Eigen::Vector2d p = pa + eq.points[k] * (pb - pa);
                const double w = edge.length * eq.weights[k];
                const Eigen::Matrix2d A = coeffs.A(p[0]);
                const double jf = (A * (sp.grad_element(e0, u1.coeffs, p) -
                                        sp.grad_element(e1, u1.coeffs, p)))
                                      .dot(n);
                const double ju =
                    sp.eval_element(e0, u1.coeffs, p) - sp.eval_element(e1, u1.coeffs, p);
                acc_flux += w * jf * jf;
                acc_jump += w * ju * ju;
            }
            const double contrib = 0.5 * (w_flux * acc_flux + w_jump * acc_jump);
            ind.interior[e0] += contrib;
            ind.interior[e1] += contrib;
        } else {
            const Side side = static_cast<Side>(edge.side);
            for (std::size_t k = 0; k < eq.size(); ++k) {
                const Eigen::Vector2d p = pa + eq.points[k] * (pb - pa);
                const double w = edge.length * eq.weights[k];
                const double data = bc(side, u1.tau, p[0], p[1]);
                if (bc.type(side) == BCType::Dirichlet) {
                    const double d = sp.eval_element(e0, u1.coeffs, p) - data;
                    acc_jump += w * d * d;
                } else {
                    const Eigen::Matrix2d A = coeffs.A(p[0]);
                    const double d = (A * sp.grad_element(e0, u1.coeffs, p)).dot(n) - data;
                    acc_flux += w * d * d;
                }
            }
            if (bc.type(side) == BCType::Dirichlet)
                ind.dirichlet[e0] += w_jump * acc_jump;
            else
                ind.neumann[e0] += w_flux * acc_flux;
        }
    }

    ind.total = ind.cell + ind.interior + ind.dirichlet + ind.neumann;
    ind.eta = std::sqrt(ind.total.sum());
    return ind;
}

std::vector<int> mark(const ErrorIndicators& ind, double theta_mark) {
    if (!(theta_mark > 0.0 && theta_mark < 1.0))
        throw std::invalid_argument("mark: theta_mark must lie in (0,1)");
    const int ne = static_cast<int>(ind.total.size());
    std::vector<int> order(ne);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (ind.total[a] != ind.total[b]) return ind.total[a] > ind.total[b];
        return a < b;
    });
    const double target = theta_mark * theta_mark * ind.total.sum();
    std::vector<int> marked;
    double acc = 0.0;
    for (int id : order) {
        if (acc >= target) break;
        if (ind.total[id] <= 0.0) break;
        marked.push_back(id);
        acc += ind.total[id];
    }
    std::sort(marked.begin(), marked.end());
    return marked;
}

AdaptResult adapt_loop(const PDECoefficients& coeffs, const BoundarySpec& bc,
                       const ScalarField& initial, const std::vector<double>& kinks,
                       std::shared_ptr<const Mesh> mesh0, const AdaptOptions& opts) {
    if (!(opts.eps >= 0.0)) throw std::invalid_argument("adapt_loop: eps must be >= 0");
    AdaptResult res;
    res.mesh = std::move(mesh0);
    for (int round = 0;; ++round) {
        auto space = std::make_shared<DGSpace>(res.mesh, opts.degree);
        DGSolution u0 = l2_project(initial, space, kinks);
        const PenaltyTable pen = compute_penalties(*space, coeffs);
        const SpMat M = assemble_mass(*space);
        const SpMat A = assemble_stiffness(*space, coeffs, bc, pen);
        const double dt1 = 0.5 * opts.dt;
        SystemFactorization fac(M, A, dt1);
        const Eigen::VectorXd l1 = assemble_load(*space, coeffs, bc, pen, dt1);
        DGSolution u1{space, fac.solve(M * u0.coeffs + dt1 * l1), dt1};
        const ErrorIndicators ind = estimate(u1, u0, dt1, coeffs, bc, pen);
        res.eta_history.push_back(ind.eta);
        if (ind.eta < opts.eps) {
            res.converged = true;
            return res;
        }
        if (round >= opts.max_rounds) return res;
        const std::vector<int> marked = mark(ind, opts.theta_mark);
        if (marked.empty()) return res;
        res.mesh = std::make_shared<Mesh>(refine(*res.mesh, marked));
        res.rounds = round + 1;
    }
}

void write_indicators(std::ostream& os, const ErrorIndicators& ind) {
    os << "element,eta,cell,interior,dirichlet,neumann\n";
    for (int e = 0; e < ind.total.size(); ++e)
        os << e << "," << std::sqrt(ind.total[e]) << "," << std::sqrt(ind.cell[e]) << ","
           << std::sqrt(ind.interior[e]) << "," << std::sqrt(ind.dirichlet[e]) << ","
           << std::sqrt(ind.neumann[e]) << "\n";
    os.flush();
}

}  // namespace hestondg
