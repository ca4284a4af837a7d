#include "hestondg/dg_space.hpp"

#include <cmath>
#include <stdexcept>

namespace hestondg {

ReferenceBasis::ReferenceBasis(int k) : degree(k) {
    if (k != 1 && k != 2) throw std::invalid_argument("ReferenceBasis: degree must be 1 or 2");
    n = (k + 1) * (k + 2) / 2;
}

void ReferenceBasis::values(double xi, double eta, double* out) const {
    const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
    if (degree == 1) {
        out[0] = l0;
        out[1] = l1;
        out[2] = l2;
        return;
    }
    out[0] = l0 * (2.0 * l0 - 1.0);
    out[1] = l1 * (2.0 * l1 - 1.0);
    out[2] = l2 * (2.0 * l2 - 1.0);
    out[3] = 4.0 * l0 * l1;
    out[4] = 4.0 * l1 * l2;
    out[5] = 4.0 * l2 * l0;
}

void ReferenceBasis::gradients(double xi, double eta, Eigen::Vector2d* out) const {
    if (degree == 1) {
        out[0] = {-1.0, -1.0};
        out[1] = {1.0, 0.0};
        out[2] = {0.0, 1.0};
        return;
    }
    const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
    out[0] = {1.0 - 4.0 * l0, 1.0 - 4.0 * l0};
    out[1] = {4.0 * l1 - 1.0, 0.0};
    out[2] = {0.0, 4.0 * l2 - 1.0};
    out[3] = {4.0 * (l0 - l1), -4.0 * l1};
    out[4] = {4.0 * l2, 4.0 * l1};
    out[5] = {-4.0 * l2, 4.0 * (l0 - l2)};
}

void ReferenceBasis::hessians(Eigen::Matrix2d* out) const {
    if (degree == 1) {
        for (int i = 0; i < 3; ++i) out[i].setZero();
        return;
    }
    out[0] << 4, 4, 4, 4;
    out[1] << 4, 0, 0, 0;
    out[2] << 0, 0, 0, 4;
    out[3] << -8, -4, -4, 0;
    out[4] << 0, 4, 4, 0;
    out[5] << 0, -4, -4, -8;
}

DGSpace::DGSpace(std::shared_ptr<const Mesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree), basis_(degree) {
    maps_.reserve(mesh_->n_triangles());
    for (const auto& t : mesh_->triangles()) {
        ElementMap m;
        const Eigen::Vector2d& p0 = mesh_->vertex(t.v[0]);
        m.origin = p0;
        m.J.col(0) = mesh_->vertex(t.v[1]) - p0;
        m.J.col(1) = mesh_->vertex(t.v[2]) - p0;
        m.det = m.J.determinant();
        m.J_inv_t = m.J.inverse().transpose();
        maps_.push_back(m);
    }
    volume_rule_ = &TriQuadrature::get(2 * degree + 1);
    edge_rule_ = &LineQuadrature::get(degree + 3);

    ref_mass_.setZero(basis_.n, basis_.n);
    const TriQuadrature& q = TriQuadrature::get(2 * degree);
    std::vector<double> vals(basis_.n);
    for (std::size_t k = 0; k < q.size(); ++k) {
        basis_.values(q.points[k][0], q.points[k][1], vals.data());
        for (int i = 0; i < basis_.n; ++i)
            for (int j = 0; j < basis_.n; ++j)
                ref_mass_(i, j) += 0.5 * q.weights[k] * vals[i] * vals[j];
    }
    ref_mass_ldlt_.compute(ref_mass_);
}

double DGSpace::eval_element(int e, const Eigen::Ref<const Eigen::VectorXd>& u,
                             const Eigen::Vector2d& p) const {
    const Eigen::Vector2d ref = maps_[e].to_reference(p);
    double vals[6];
    basis_.values(ref[0], ref[1], vals);
    double s = 0.0;
    const int off = elem_offset(e);
    for (int i = 0; i < basis_.n; ++i) s += u[off + i] * vals[i];
    return s;
}

Eigen::Vector2d DGSpace::grad_element(int e, const Eigen::Ref<const Eigen::VectorXd>& u,
                                      const Eigen::Vector2d& p) const {
    const ElementMap& m = maps_[e];
    const Eigen::Vector2d ref = m.to_reference(p);
    Eigen::Vector2d grads[6];
    basis_.gradients(ref[0], ref[1], grads);
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    const int off = elem_offset(e);
    for (int i = 0; i < basis_.n; ++i) g += u[off + i] * (m.J_inv_t * grads[i]);
    return g;
}

double eval(const DGSolution& sol, double v, double x) {
    const int e = sol.space->mesh().locate(v, x);
    if (e < 0) throw std::out_of_range("eval: point outside the domain");
    return sol.space->eval_element(e, sol.coeffs, {v, x});
}

namespace {

// Clip a convex polygon against the half-plane keep_left ? {x <= c} : {x >= c}.
std::vector<Eigen::Vector2d> clip_halfplane(const std::vector<Eigen::Vector2d>& poly, double c,
                                            bool keep_left) {
    std::vector<Eigen::Vector2d> out;
    const auto inside = [&](const Eigen::Vector2d& p) {
        return keep_left ? p[1] <= c + 1e-14 : p[1] >= c - 1e-14;
    };
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d& a = poly[i];
        const Eigen::Vector2d& b = poly[(i + 1) % n];
        const bool ia = inside(a), ib = inside(b);
        if (ia) out.push_back(a);
        if (ia != ib) {
            const double t = (c - a[1]) / (b[1] - a[1]);
            out.push_back(a + t * (b - a));
        }
    }
    return out;
}

double polygon_area(const std::vector<Eigen::Vector2d>& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& p = poly[i];
        const auto& q = poly[(i + 1) % poly.size()];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * std::abs(a);
}

}  // namespace

void for_each_quad_point(const DGSpace& space, int e, const std::vector<double>& kink_lines,
                         int quad_degree,
                         const std::function<void(const Eigen::Vector2d&, double)>& fn) {
    const Mesh& mesh = space.mesh();
    const Triangle& tri = mesh.tri(e);
    const TriQuadrature& q = TriQuadrature::get(quad_degree);
    std::vector<Eigen::Vector2d> corners{mesh.vertex(tri.v[0]), mesh.vertex(tri.v[1]),
                                         mesh.vertex(tri.v[2])};
    double x_lo = corners[0][1], x_hi = corners[0][1];
    for (const auto& p : corners) {
        x_lo = std::min(x_lo, p[1]);
        x_hi = std::max(x_hi, p[1]);
    }
    std::vector<double> cuts;
    for (double c : kink_lines)
        if (c > x_lo + 1e-14 && c < x_hi - 1e-14) cuts.push_back(c);
    if (cuts.empty()) {
        for (std::size_t k = 0; k < q.size(); ++k) {
            const Eigen::Vector2d p = space.element_map(e).to_physical(q.points[k]);
            fn(p, tri.area * q.weights[k]);
        }
        return;
    }
    std::sort(cuts.begin(), cuts.end());
    // slabs between consecutive cut lines, each clipped to the triangle
    std::vector<double> bounds{x_lo - 1.0};
    bounds.insert(bounds.end(), cuts.begin(), cuts.end());
    bounds.push_back(x_hi + 1.0);
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
        std::vector<Eigen::Vector2d> poly = corners;
        poly = clip_halfplane(poly, bounds[s], false);
        if (poly.size() < 3) continue;
        poly = clip_halfplane(poly, bounds[s + 1], true);
        if (poly.size() < 3 || polygon_area(poly) < 1e-300) continue;
        // fan triangulation of the clipped convex polygon
        for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
            const Eigen::Vector2d& a = poly[0];
            const Eigen::Vector2d& b = poly[i];
            const Eigen::Vector2d& c = poly[i + 1];
            const double area =
                0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
            if (area < 1e-300) continue;
            for (std::size_t k = 0; k < q.size(); ++k) {
                const Eigen::Vector2d p =
                    a + q.points[k][0] * (b - a) + q.points[k][1] * (c - a);
                fn(p, area * q.weights[k]);
            }
        }
    }
}

DGSolution l2_project(const ScalarField& f, std::shared_ptr<const DGSpace> space,
                      const std::vector<double>& kink_lines) {
    const DGSpace& sp = *space;
    const int nl = sp.n_local();
    DGSolution sol{space, Eigen::VectorXd::Zero(sp.dim()), 0.0};
    Eigen::VectorXd rhs(nl);
    double vals[6];
    for (int e = 0; e < sp.n_elements(); ++e) {
        rhs.setZero();
        const ElementMap& m = sp.element_map(e);
        for_each_quad_point(sp, e, kink_lines, 2 * sp.degree() + 1,
                            [&](const Eigen::Vector2d& p, double w) {
                                const Eigen::Vector2d ref = m.to_reference(p);
                                sp.basis().values(ref[0], ref[1], vals);
                                const double fw = w * f(p[0], p[1]);
                                for (int i = 0; i < nl; ++i) rhs[i] += fw * vals[i];
                            });
        // element mass = det * reference mass
        sol.coeffs.segment(e * nl, nl) = sp.reference_mass_ldlt().solve(rhs / m.det);
    }
    return sol;
}

}  // namespace hestondg
