#include "hestondg/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

namespace hestondg {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SolveOutput solve_pde(const RunConfig& cfg, const std::vector<double>& snapshot_taus) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    SolveOutput out;

    const PDECoefficients coeffs = heston_coefficients(cfg.params);
    const BoundarySpec bc = cfg.boundary();
    const ScalarField initial = cfg.initial_condition();
    const std::vector<double> kinks = cfg.kink_lines();

    if (cfg.mode == MeshMode::Adaptive) {
        auto mesh0 = std::make_shared<Mesh>(uniform_mesh(cfg.domain, cfg.n_v, cfg.n_x));
        AdaptOptions opts = cfg.adapt;
        opts.degree = cfg.degree;
        opts.dt = cfg.dt;
        out.adapt = adapt_loop(coeffs, bc, initial, kinks, mesh0, opts);
        out.mesh = out.adapt.mesh;
    } else {
        out.mesh = std::make_shared<Mesh>(uniform_mesh(cfg.domain, cfg.n_v, cfg.n_x));
    }

    auto space = std::make_shared<DGSpace>(out.mesh, cfg.degree);
    out.space = space;
    DGSolution u0 = l2_project(initial, space, kinks);
    const PenaltyTable pen = compute_penalties(*space, coeffs);
    const SpMat M = assemble_mass(*space);
    const SpMat A = assemble_stiffness(*space, coeffs, bc, pen);
    const LoadFn load = [&](double tau) {
        return assemble_load(*space, coeffs, bc, pen, tau);
    };
    out.setup_seconds = seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const TimeGrid grid{cfg.params.T, cfg.dt};
    MarchResult m = march(M, A, load, u0.coeffs, grid, cfg.scheme, snapshot_taus);
    out.march_seconds = seconds_since(t1);

    out.solution = DGSolution{space, std::move(m.u), m.tau};
    for (auto& [tau, u] : m.snapshots)
        out.snapshots.emplace_back(tau, DGSolution{space, std::move(u), tau});
    return out;
}

double price_at_spot(const SolveOutput& out, const RunConfig& cfg) {
    return eval(out.solution, cfg.params.v0, cfg.x_of_spot());
}

double min_nodal_value(const DGSolution& sol) {
    const DGSpace& sp = *sol.space;
    const Mesh& mesh = sp.mesh();
    double lo = std::numeric_limits<double>::infinity();
    for (int e = 0; e < sp.n_elements(); ++e) {
        const auto& t = mesh.tri(e);
        for (int k = 0; k < 3; ++k)
            lo = std::min(lo, sp.eval_element(e, sol.coeffs, mesh.vertex(t.v[k])));
        if (sp.degree() == 2) {
            for (int k = 0; k < 3; ++k) {
                const Eigen::Vector2d mid =
                    0.5 * (mesh.vertex(t.v[k]) + mesh.vertex(t.v[(k + 1) % 3]));
                lo = std::min(lo, sp.eval_element(e, sol.coeffs, mid));
            }
        }
    }
    return lo;
}

void write_surface_csv(std::ostream& os, const DGSolution& sol, int n_v, int n_x) {
    const Domain& d = sol.space->mesh().domain();
    os << "v,x,U\n";
    for (int i = 0; i < n_v; ++i) {
        const double v = d.v_min + d.v_extent() * i / (n_v - 1);
        for (int j = 0; j < n_x; ++j) {
            const double x = d.x_min + d.x_extent() * j / (n_x - 1);
            os << v << "," << x << "," << eval(sol, v, x) << "\n";
        }
    }
    os.flush();
}

}  // namespace hestondg
