#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "hestondg/assembly.hpp"
#include "hestondg/quadrature.hpp"

using namespace hestondg;

namespace {

PDECoefficients constant_coeffs(const Eigen::Matrix2d& A, const Eigen::Vector2d& b, double r) {
    PDECoefficients c;
    c.A = [A](double) { return A; };
    c.b = [b](double) { return b; };
    c.dA_dv = [](double) { return Eigen::Matrix2d::Zero().eval(); };
    c.reaction = r;
    return c;
}

HestonParams table1_params() {
    return HestonParams{1.0, 0.09, 0.4, -0.7, 0.05, 0.01, 1.0, 105.0, 100.0, 0.25};
}

std::shared_ptr<const Mesh> square_mesh(int n, double lo = 0.0, double hi = 1.0) {
    return std::make_shared<Mesh>(uniform_mesh(Domain{lo, hi, lo, hi}, n, n));
}

}  // namespace

TEST_SUITE("assembly") {

TEST_CASE("penalty formula") {
    CHECK(penalty_sigma(1.0, 1.0, 1, M_PI / 4, false) == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(penalty_sigma(1.0, 1.0, 1, M_PI / 4, true) == doctest::Approx(12.0).epsilon(1e-13));
    CHECK(penalty_sigma(1.0, 1.0, 2, M_PI / 3, false) ==
          doctest::Approx(6.0 * std::sqrt(3.0)).epsilon(1e-13));
    CHECK_THROWS_AS(penalty_sigma(0.0, 1.0, 1, M_PI / 4, false), std::invalid_argument);
}

TEST_CASE("penalty table matches the closed-form 2x2 eigenvalues") {
    const HestonParams p = table1_params();
    auto mesh = std::make_shared<Mesh>(uniform_mesh(Domain{0.5, 2.5, -1.0, 1.0}, 4, 4));
    DGSpace sp(mesh, 1);
    const PenaltyTable t = compute_penalties(sp, p);
    REQUIRE(t.sigma.size() == mesh->edges().size());
    for (std::size_t e = 0; e < mesh->edges().size(); ++e) {
        const MeshEdge& edge = mesh->edges()[e];
        const double v = 0.5 * (mesh->vertex(edge.a)[0] + mesh->vertex(edge.b)[0]);
        // eigenvalues of (v/2)[[s^2, rs],[rs, 1]] by the quadratic formula
        const double s2 = p.sigma * p.sigma, rs = p.rho * p.sigma;
        const double tr = 0.5 * v * (s2 + 1.0);
        const double det = 0.25 * v * v * (s2 - rs * rs);
        const double disc = std::sqrt(tr * tr - 4.0 * det);
        const double d0 = 0.5 * (tr - disc), d1 = 0.5 * (tr + disc);
        CHECK(t.d0[e] == doctest::Approx(d0).epsilon(1e-10));
        CHECK(t.d1[e] == doctest::Approx(d1).epsilon(1e-10));
        const double expect = (edge.is_boundary() ? 6.0 : 3.0) * d1 * d1 / d0 * 2.0 /
                              std::tan(mesh->min_angle());
        CHECK(t.sigma[e] == doctest::Approx(expect).epsilon(1e-10));
        CHECK(t.sigma[e] > 0.0);
    }
}

TEST_CASE("mass matrix: block sums, SPD, discontinuous block structure") {
    auto mesh = square_mesh(1);
    for (int k : {1, 2}) {
        DGSpace sp(mesh, k);
        const SpMat m = assemble_mass(sp);
        const int nl = sp.n_local();
        // sum over the element-0 block equals its area (shape functions sum to 1)
        double block_sum = 0.0;
        for (int i = 0; i < nl; ++i)
            for (int j = 0; j < nl; ++j) block_sum += m.coeff(i, j);
        CHECK(block_sum == doctest::Approx(0.5).epsilon(1e-13));
        // no coupling between elements
        for (int i = 0; i < nl; ++i)
            for (int j = nl; j < 2 * nl; ++j) CHECK(m.coeff(i, j) == 0.0);
        const Eigen::MatrixXd dense(m);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
        CHECK(es.eigenvalues()[0] > 0.0);
    }
}

TEST_CASE("pure diffusion SIPG matrix is symmetric") {
    Eigen::Matrix2d A;
    A << 0.08, -0.14, -0.14, 0.5;
    const PDECoefficients c = constant_coeffs(A, Eigen::Vector2d::Zero(), 0.0);
    auto mesh = square_mesh(4);
    for (int k : {1, 2}) {
        DGSpace sp(mesh, k);
        const PenaltyTable pen = compute_penalties(sp, c);
        const SpMat a = assemble_stiffness(sp, c, BoundarySpec::homogeneous_dirichlet(), pen);
        const double scale = Eigen::MatrixXd(a).cwiseAbs().maxCoeff();
        CHECK((Eigen::MatrixXd(a) - Eigen::MatrixXd(a).transpose()).cwiseAbs().maxCoeff() <
              1e-12 * scale);
    }
}

TEST_CASE("constants lie in the kernel without Dirichlet faces") {
    Eigen::Matrix2d A = 0.5 * Eigen::Matrix2d::Identity();
    const PDECoefficients c = constant_coeffs(A, Eigen::Vector2d::Zero(), 0.0);
    auto mesh = square_mesh(3);
    DGSpace sp(mesh, 1);
    const PenaltyTable pen = compute_penalties(sp, c);
    const SpMat a = assemble_stiffness(sp, c, BoundarySpec::homogeneous_neumann(), pen);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(sp.dim());
    const double scale = Eigen::MatrixXd(a).cwiseAbs().maxCoeff();
    CHECK((a * ones).lpNorm<Eigen::Infinity>() < 1e-12 * std::max(1.0, scale));
}

TEST_CASE("with reaction only, the operator acts as the mass matrix on constants") {
    Eigen::Matrix2d A = 0.5 * Eigen::Matrix2d::Identity();
    const PDECoefficients c = constant_coeffs(A, Eigen::Vector2d::Zero(), 1.0);
    auto mesh = square_mesh(2);
    DGSpace sp(mesh, 1);
    const PenaltyTable pen = compute_penalties(sp, c);
    const SpMat a = assemble_stiffness(sp, c, BoundarySpec::homogeneous_neumann(), pen);
    const SpMat m = assemble_mass(sp);
    const double cval = 3.7;
    const Eigen::VectorXd u = cval * Eigen::VectorXd::Ones(sp.dim());
    CHECK(((a * u) - (m * u)).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("upwind face terms vanish on continuous data; inflow boundary term matches quadrature") {
    Eigen::Matrix2d A = 0.5 * Eigen::Matrix2d::Identity();
    const Eigen::Vector2d b(0.8, 0.3);
    const PDECoefficients with_b = constant_coeffs(A, b, 0.0);
    const PDECoefficients no_b = constant_coeffs(A, Eigen::Vector2d::Zero(), 0.0);
    auto mesh = square_mesh(3);
    DGSpace sp(mesh, 1);
    const PenaltyTable pen = compute_penalties(sp, no_b);
    const BoundarySpec bc = BoundarySpec::homogeneous_dirichlet();
    const SpMat d = assemble_stiffness(sp, with_b, bc, pen) - assemble_stiffness(sp, no_b, bc, pen);
    // on u = 1 the volume convection and all interior upwind terms drop out,
    // leaving only -int_{inflow boundary} b.n phi_i
    const Eigen::VectorXd r = d * Eigen::VectorXd::Ones(sp.dim());
    Eigen::VectorXd oracle = Eigen::VectorXd::Zero(sp.dim());
    const LineQuadrature& gl = LineQuadrature::get(32);
    for (const auto& edge : mesh->edges()) {
        if (!edge.is_boundary()) continue;
        const double bn = b.dot(edge.normal);
        if (bn >= 0.0) continue;
        const Eigen::Vector2d pa = mesh->vertex(edge.a), pb = mesh->vertex(edge.b);
        for (std::size_t q = 0; q < gl.size(); ++q) {
            const Eigen::Vector2d pt = pa + gl.points[q] * (pb - pa);
            const Eigen::Vector2d ref = sp.element_map(edge.tri[0]).to_reference(pt);
            double vals[6];
            sp.basis().values(ref[0], ref[1], vals);
            for (int i = 0; i < sp.n_local(); ++i)
                oracle[sp.elem_offset(edge.tri[0]) + i] -=
                    edge.length * gl.weights[q] * bn * vals[i];
        }
    }
    CHECK((r - oracle).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("load vanishes for homogeneous data") {
    const HestonParams p = table1_params();
    auto mesh = square_mesh(2);
    DGSpace sp(mesh, 1);
    const PDECoefficients c = heston_coefficients(p);
    const PenaltyTable pen = compute_penalties(sp, c);
    for (auto bc : {BoundarySpec::homogeneous_dirichlet(), BoundarySpec::homogeneous_neumann()})
        CHECK(assemble_load(sp, c, bc, pen, 0.37).norm() == 0.0);

    // butterfly data: zero Dirichlet in x, zero Neumann in v, for all tau
    HestonParams bp{2.5, 0.06, 0.5, -0.1, std::log(1.052), std::log(1.048), 0.25, 0.5, 1.0, 0.05225};
    const Domain d{0.0025, 0.559951, -5.0, 5.0};
    auto bmesh = std::make_shared<Mesh>(uniform_mesh(d, 4, 8));
    DGSpace bsp(bmesh, 1);
    const PDECoefficients bcoef = heston_coefficients(bp);
    const PenaltyTable bpen = compute_penalties(bsp, bcoef);
    const BoundarySpec bspec = boundary_spec(3, bp, d);
    for (double tau : {0.0, 0.1, 0.25})
        CHECK(assemble_load(bsp, bcoef, bspec, bpen, tau).norm() == 0.0);
}

TEST_CASE("call-data load matches an independent high-order quadrature") {
    const HestonParams p = table1_params();
    const Domain d{0.0, 4.0, -2.0, 2.0};
    auto mesh = std::make_shared<Mesh>(uniform_mesh(d, 8, 8));
    DGSpace sp(mesh, 1);
    const PDECoefficients c = heston_coefficients(p);
    const PenaltyTable pen = compute_penalties(sp, c);
    const BoundarySpec bc = boundary_spec(1, p, d);
    const double tau = 0.0;
    const Eigen::VectorXd l = assemble_load(sp, c, bc, pen, tau);

    Eigen::VectorXd oracle = Eigen::VectorXd::Zero(sp.dim());
    const LineQuadrature& gl = LineQuadrature::get(32);
    for (std::size_t ei = 0; ei < mesh->edges().size(); ++ei) {
        const MeshEdge& edge = mesh->edges()[ei];
        if (!edge.is_boundary()) continue;
        const Eigen::Vector2d pa = mesh->vertex(edge.a), pb = mesh->vertex(edge.b);
        const int e0 = edge.tri[0];
        // integrate each smooth piece of the pointwise-upwinded integrand
        std::vector<double> bounds{0.0, 1.0};
        const double b0 = c.b(pa[0]).dot(edge.normal), b1 = c.b(pb[0]).dot(edge.normal);
        if (b0 * b1 < 0.0) bounds.insert(bounds.begin() + 1, b0 / (b0 - b1));
        for (std::size_t part = 0; part + 1 < bounds.size(); ++part)
        for (std::size_t q = 0; q < gl.size(); ++q) {
            const double s = bounds[part] + gl.points[q] * (bounds[part + 1] - bounds[part]);
            const Eigen::Vector2d pt = pa + s * (pb - pa);
            const double w = edge.length * (bounds[part + 1] - bounds[part]) * gl.weights[q];
            const double data = bc(static_cast<Side>(edge.side), tau, pt[0], pt[1]);
            const Eigen::Vector2d ref = sp.element_map(e0).to_reference(pt);
            double vals[6];
            Eigen::Vector2d grads_ref[6];
            sp.basis().values(ref[0], ref[1], vals);
            sp.basis().gradients(ref[0], ref[1], grads_ref);
            const Eigen::Matrix2d Ae = c.A(pt[0]);
            const double bn = c.b(pt[0]).dot(edge.normal);
            for (int i = 0; i < sp.n_local(); ++i) {
                const Eigen::Vector2d g = sp.element_map(e0).J_inv_t * grads_ref[i];
                double val = data * (pen.sigma[ei] / edge.length * vals[i] -
                                     (Ae * g).dot(edge.normal));
                if (bn < 0.0) val -= bn * data * vals[i];
                oracle[sp.elem_offset(e0) + i] += w * val;
            }
        }
    }
    // boundary data are smooth per piece; both rules resolve them closely
    CHECK((l - oracle).lpNorm<Eigen::Infinity>() < 1e-7 * oracle.lpNorm<Eigen::Infinity>());
}

TEST_CASE("coercivity proxy for the symmetric part") {
    Eigen::Matrix2d A = 0.5 * Eigen::Matrix2d::Identity();
    const PDECoefficients c = constant_coeffs(A, Eigen::Vector2d::Zero(), 0.0);
    auto mesh = square_mesh(2);
    DGSpace sp(mesh, 1);
    const PenaltyTable pen = compute_penalties(sp, c);

    const SpMat an = assemble_stiffness(sp, c, BoundarySpec::homogeneous_neumann(), pen);
    Eigen::MatrixXd sym = 0.5 * (Eigen::MatrixXd(an) + Eigen::MatrixXd(an).transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    CHECK(es.eigenvalues()[0] > -1e-10);  // PSD, kernel = constants
    CHECK(std::abs(es.eigenvalues()[0]) < 1e-10);

    const SpMat ad = assemble_stiffness(sp, c, BoundarySpec::homogeneous_dirichlet(), pen);
    Eigen::MatrixXd symd = 0.5 * (Eigen::MatrixXd(ad) + Eigen::MatrixXd(ad).transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esd(symd);
    CHECK(esd.eigenvalues()[0] > 1e-10);

    // doubling the penalty keeps the system solvable
    PenaltyTable doubled = pen;
    for (double& s : doubled.sigma) s *= 2.0;
    const SpMat a2 = assemble_stiffness(sp, c, BoundarySpec::homogeneous_dirichlet(), doubled);
    Eigen::SparseLU<SpMat> lu;
    SpMat sys = a2;
    sys.makeCompressed();
    lu.compute(sys);
    CHECK(lu.info() == Eigen::Success);
}

TEST_CASE("couplings stay within edge-adjacent element blocks") {
    const HestonParams p = table1_params();
    const Domain d{0.0, 4.0, -2.0, 2.0};
    auto mesh = std::make_shared<Mesh>(uniform_mesh(d, 3, 3));
    DGSpace sp(mesh, 2);
    const PDECoefficients c = heston_coefficients(p);
    const PenaltyTable pen = compute_penalties(sp, c);
    const SpMat a = assemble_stiffness(sp, c, boundary_spec(1, p, d), pen);
    // adjacency from the mesh edges
    std::set<std::pair<int, int>> ok;
    for (int t = 0; t < mesh->n_triangles(); ++t) ok.insert({t, t});
    for (const auto& e : mesh->edges())
        if (!e.is_boundary()) {
            ok.insert({e.tri[0], e.tri[1]});
            ok.insert({e.tri[1], e.tri[0]});
        }
    const int nl = sp.n_local();
    for (int k = 0; k < a.outerSize(); ++k)
        for (SpMat::InnerIterator it(a, k); it; ++it)
            if (it.value() != 0.0) CHECK(ok.count({int(it.row()) / nl, int(it.col()) / nl}) == 1);
}

TEST_CASE("triplet dump") {
    auto mesh = square_mesh(1);
    DGSpace sp(mesh, 1);
    const SpMat m = assemble_mass(sp);
    std::ostringstream os;
    write_triplets(os, m);
    CHECK(os.str().find("0 0 ") != std::string::npos);
}

}  // TEST_SUITE
