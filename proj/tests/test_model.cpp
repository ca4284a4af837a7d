#include <doctest.h>

#include <cmath>
#include <random>

#include "hestondg/model.hpp"

using namespace hestondg;

namespace {

HestonParams table1_params() {
    return HestonParams{1.0, 0.09, 0.4, -0.7, 0.05, 0.01, 1.0, 105.0, 100.0, 0.25};
}

HestonParams table3_params() {
    return HestonParams{1.98937, 0.011876, 0.33147, 0.0258519,
                        std::log(1.0005), std::log(100.0), 0.25, 123.4, 123.4, 0.011876};
}

// Simpson integration of the standard normal density, used as an oracle.
double phi_by_quadrature(double x) {
    const double lo = -12.0;
    const int n = 4000;
    const double h = (x - lo) / n;
    auto dens = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); };
    double s = dens(lo) + dens(x);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * dens(lo + i * h);
    return s * h / 3.0;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("diffusion matrix scales linearly in v and matches direct substitution") {
    const HestonParams p = table1_params();
    CHECK(diffusion_matrix(0.0, p).norm() == 0.0);

    const Eigen::Matrix2d a1 = diffusion_matrix(1.0, p);
    CHECK(a1(0, 0) == doctest::Approx(0.08).epsilon(1e-14));
    CHECK(a1(0, 1) == doctest::Approx(-0.14).epsilon(1e-14));
    CHECK(a1(1, 0) == doctest::Approx(-0.14).epsilon(1e-14));
    CHECK(a1(1, 1) == doctest::Approx(0.5).epsilon(1e-14));

    // eigenvalue ratio does not depend on v
    double ratio0 = 0.0;
    for (double v : {0.1, 1.0, 4.0}) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(diffusion_matrix(v, p));
        CHECK(es.eigenvalues()[0] > 0.0);
        const double r = es.eigenvalues()[1] / es.eigenvalues()[0];
        if (ratio0 == 0.0) ratio0 = r;
        CHECK(r == doctest::Approx(ratio0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(diffusion_matrix(-1e-10, p), std::invalid_argument);
}

TEST_CASE("smallest eigenvalue stays positive for any |rho|<1, v>0") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        HestonParams p = table1_params();
        p.rho = -0.999 + 1.998 * u(rng);
        p.sigma = 0.05 + 2.0 * u(rng);
        const double v = 1e-6 + 4.0 * u(rng);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(diffusion_matrix(v, p));
        CHECK(es.eigenvalues()[0] > 0.0);
    }
}

TEST_CASE("convection field values") {
    const HestonParams p = table1_params();
    const Eigen::Vector2d b0 = convection_field(0.0, p);
    CHECK(b0[0] == doctest::Approx(-0.01).epsilon(1e-12));
    CHECK(b0[1] == doctest::Approx(-0.18).epsilon(1e-12));
    const Eigen::Vector2d b1 = convection_field(1.0, p);
    CHECK(b1[0] == doctest::Approx(0.99).epsilon(1e-12));
    CHECK(b1[1] == doctest::Approx(0.32).epsilon(1e-12));

    // with kappa=theta=sigma=rho=0 and r_d=r_f only the v/2 component stays
    HestonParams q = p;
    q.kappa = q.theta = q.sigma = q.rho = 0.0;
    q.r_f = q.r_d;
    for (double v : {0.0, 0.5, 2.0}) {
        const Eigen::Vector2d b = convection_field(v, q);
        CHECK(b[0] == 0.0);
        CHECK(b[1] == doctest::Approx(0.5 * v).epsilon(1e-15));
    }
}

TEST_CASE("feller condition") {
    CHECK(feller_holds(table1_params()));        // 0.18 >= 0.16
    CHECK_FALSE(feller_holds(table3_params()));  // 0.04725 < 0.10987
    HestonParams p = table1_params();
    p.sigma = 1e-300;
    CHECK(feller_holds(p));
}

TEST_CASE("payoffs") {
    const HestonParams p = table1_params();
    CHECK(payoff(OptionKind::call(), 0.0, p) == 0.0);
    const OptionKind bf = OptionKind::butterfly(0.1, 0.5, 0.9);
    CHECK(payoff(bf, 0.0, p) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(payoff(OptionKind::digital(), 1e-9, p) == 1.0);
    CHECK(payoff(OptionKind::digital(), -1e-9, p) == 0.0);
    CHECK_THROWS_AS(OptionKind::butterfly(0.1, 0.45, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(OptionKind::butterfly(0.9, 0.5, 0.1), std::invalid_argument);
}

TEST_CASE("butterfly payoff is the call combination, pointwise in S") {
    const OptionKind bf = OptionKind::butterfly(0.1, 0.5, 0.9);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.01, 2.0);
    HestonParams p = table1_params();
    for (int i = 0; i < 100; ++i) {
        const double s = u(rng);
        auto call_at = [&](double strike) {
            HestonParams q = p;
            q.K = strike;
            return payoff(OptionKind::call(), std::log(s / strike), q);
        };
        const double combo = call_at(0.1) - 2.0 * call_at(0.5) + call_at(0.9);
        CHECK(payoff(bf, std::log(s / 0.5), p) == doctest::Approx(combo).epsilon(1e-11));
    }
}

TEST_CASE("normal cdf") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.96) == doctest::Approx(phi_by_quadrature(1.96)).epsilon(1e-9));
    CHECK(std::abs(normal_cdf(1.96) - 0.9750) < 1e-4);
    CHECK(normal_cdf(-8.0) < 1e-14);
    std::mt19937 rng(11);
    // beyond |x| ~ 8.3 the cdf is not representable strictly inside (0,1)
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    double prev_x = -1e9, prev_y = 0.0;
    std::vector<double> xs(10000);
    for (auto& x : xs) x = u(rng);
    std::sort(xs.begin(), xs.end());
    for (double x : xs) {
        const double y = normal_cdf(x);
        CHECK(y > 0.0);
        CHECK(y < 1.0);
        CHECK(y >= prev_y);
        CHECK(normal_cdf(-x) == doctest::Approx(1.0 - y).epsilon(1e-12));
        prev_x = x;
        prev_y = y;
    }
    (void)prev_x;
}

TEST_CASE("boundary set 1: Dirichlet call data") {
    const HestonParams p = table1_params();
    const Domain d{0.0, 4.0, -2.0, 2.0};
    const BoundarySpec bc = boundary_spec(1, p, d);
    for (int s = 0; s < 4; ++s) CHECK(bc.tag[s] == BCType::Dirichlet);

    CHECK(bc(Side::XMin, 0.3, 1.0, d.x_min) == 0.0);
    // tau = 0 on v_max gives K e^x
    CHECK(bc(Side::VMax, 0.0, d.v_max, 0.7) == doctest::Approx(p.K * std::exp(0.7)).epsilon(1e-14));
    // tau = 0 boundary data agree with the payoff on the x sides
    CHECK(bc(Side::XMax, 0.0, 1.0, d.x_max) ==
          doctest::Approx(payoff(OptionKind::call(), d.x_max, p)).epsilon(1e-13));
    CHECK(bc(Side::XMin, 0.0, 1.0, d.x_min) ==
          doctest::Approx(payoff(OptionKind::call(), d.x_min, p)).epsilon(1e-13));
    // v_min data: (K e^{x - r_f tau} - K e^{-r_d tau})^+
    const double tau = 0.4, x = 0.25;
    const double expect =
        std::max(p.K * std::exp(x - p.r_f * tau) - p.K * std::exp(-p.r_d * tau), 0.0);
    CHECK(bc(Side::VMin, tau, d.v_min, x) == doctest::Approx(expect).epsilon(1e-14));
    CHECK_THROWS_AS(boundary_spec(5, p, d), std::invalid_argument);
}

TEST_CASE("boundary set 2: blended side is consistent at the corners") {
    const HestonParams p = table3_params();
    const Domain d{0.0025, 0.559951, 2.990790, 6.640072};
    const BoundarySpec bc = boundary_spec(2, p, d);
    CHECK(bc.type(Side::XMax) == BCType::Neumann);
    const double tau = 0.1;
    const double at_vmin = bc(Side::VMin, tau, d.v_min, d.x_min);
    const double at_vmax = bc(Side::VMax, tau, d.v_max, d.x_min);
    CHECK(bc(Side::XMin, tau, d.v_min, d.x_min) == doctest::Approx(at_vmin).epsilon(1e-12));
    CHECK(bc(Side::XMin, tau, d.v_max, d.x_min) == doctest::Approx(at_vmax).epsilon(1e-12));
    const double mid = 0.5 * (d.v_min + d.v_max);
    CHECK(bc(Side::XMin, tau, mid, d.x_min) ==
          doctest::Approx(0.5 * (at_vmin + at_vmax)).epsilon(1e-12));
    // Neumann data on x_max: (1/2) v e^{x - r_f tau}
    CHECK(bc(Side::XMax, tau, 0.3, d.x_max) ==
          doctest::Approx(0.5 * 0.3 * std::exp(d.x_max - p.r_f * tau)).epsilon(1e-12));
}

TEST_CASE("boundary sets 3 and 4") {
    HestonParams p{2.5, 0.06, 0.5, -0.1, std::log(1.052), std::log(1.048), 0.25, 1.0, 1.0, 0.05225};
    const Domain d{0.0025, 0.559951, -5.0, 5.0};
    const BoundarySpec b3 = boundary_spec(3, p, d);
    CHECK(b3.type(Side::VMin) == BCType::Neumann);
    CHECK(b3.type(Side::VMax) == BCType::Neumann);
    CHECK(b3.type(Side::XMin) == BCType::Dirichlet);
    CHECK(b3.type(Side::XMax) == BCType::Dirichlet);
    for (int s = 0; s < 4; ++s) CHECK(b3.value[s](0.1, 0.2, 0.3) == 0.0);

    const BoundarySpec b4 = boundary_spec(4, p, d);
    CHECK(b4.type(Side::XMax) == BCType::Dirichlet);
    CHECK(b4(Side::XMin, 0.1, 0.2, d.x_min) == 0.0);
    // e^{x_max} * 1.048^{-1/4} at tau = 0.25
    const double expect = std::exp(d.x_max) * std::pow(1.048, -0.25);
    CHECK(b4(Side::XMax, 0.25, 0.2, d.x_max) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("parameter validation") {
    HestonParams p = table1_params();
    CHECK_NOTHROW(p.validate());
    p.sigma = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = table1_params();
    p.rho = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = table1_params();
    p.v0 = -0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    Domain d{1.0, 1.0, 0.0, 1.0};
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    Domain neg{-0.5, 1.0, 0.0, 1.0};
    CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
}

}  // TEST_SUITE
