#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hestondg {

// Model constants of the variance process and the option contract.
struct HestonParams {
    double kappa = 1.0;    // mean reversion rate (1/year)
    double theta = 0.09;   // long-run variance
    double sigma = 0.4;    // vol of vol
    double rho = -0.7;     // correlation, strictly inside (-1,1)
    double r_d = 0.05;     // domestic rate
    double r_f = 0.01;     // foreign rate
    double T = 1.0;        // maturity (years)
    double K = 100.0;      // strike
    double S0 = 100.0;     // spot
    double v0 = 0.25;      // initial variance

    void validate() const;
};

// Bounded computational rectangle in (v, x).
struct Domain {
    double v_min = 0.0;
    double v_max = 4.0;
    double x_min = -2.0;
    double x_max = 2.0;

    void validate() const;
    double v_extent() const { return v_max - v_min; }
    double x_extent() const { return x_max - x_min; }
};

struct OptionKind {
    enum Type { EuropeanCall, EuropeanPut, Butterfly, DigitalCall };
    Type type = EuropeanCall;
    double K1 = 0.0, K2 = 0.0, K3 = 0.0;  // butterfly strikes, K2 = (K1+K3)/2

    static OptionKind call() { return {EuropeanCall, 0, 0, 0}; }
    static OptionKind put() { return {EuropeanPut, 0, 0, 0}; }
    static OptionKind digital() { return {DigitalCall, 0, 0, 0}; }
    static OptionKind butterfly(double k1, double k2, double k3);
};

enum class Side { VMin = 0, VMax = 1, XMin = 2, XMax = 3 };
enum class BCType { Dirichlet, Neumann };

// Boundary value as a function of (tau, v, x).  On Dirichlet sides the
// value is U^D, on Neumann sides the prescribed conormal flux A grad(U).n.
using BoundaryFn = std::function<double(double tau, double v, double x)>;

struct BoundarySpec {
    std::array<BCType, 4> tag{BCType::Dirichlet, BCType::Dirichlet,
                              BCType::Dirichlet, BCType::Dirichlet};
    std::array<BoundaryFn, 4> value;

    BCType type(Side s) const { return tag[static_cast<int>(s)]; }
    double operator()(Side s, double tau, double v, double x) const {
        return value[static_cast<int>(s)](tau, v, x);
    }
    static BoundarySpec homogeneous_dirichlet();
    static BoundarySpec homogeneous_neumann();
};

// Coefficients of du/dtau - div(A grad u) + b.grad u + r u = 0 in z=(v,x).
// dA_dv is the v-derivative of A, needed assembled strong residuals.
struct PDECoefficients {
    std::function<Eigen::Matrix2d(double v)> A;
    std::function<Eigen::Vector2d(double v)> b;
    std::function<Eigen::Matrix2d(double v)> dA_dv;
    double reaction = 0.0;
};

Eigen::Matrix2d diffusion_matrix(double v, const HestonParams& p);
Eigen::Vector2d convection_field(double v, const HestonParams& p);
bool feller_holds(const HestonParams& p);
PDECoefficients heston_coefficients(const HestonParams& p);

// Terminal payoff in log-moneyness x = log(S/K); for the butterfly the
// reference level is K2, i.e. x = log(S/K2).
double payoff(const OptionKind& kind, double x, const HestonParams& p);

// x-locations where the payoff has a kink or jump (quadrature split lines).
std::vector<double> payoff_kinks(const OptionKind& kind);

double normal_cdf(double x);

struct BoundarySpecOptions {
    // d_- of the closed-form side of example 2 uses v_max as printed in the
    // source it reproduces; set false to use v_min instead.
    bool d_minus_uses_vmax = true;
};

// The four built-in boundary condition sets.  Examples 1, 3 and 4 are posed
// in log-moneyness x = log(S/K); example 2 is posed in log-price x = log(S),
// with the money line at x = log(K).
BoundarySpec boundary_spec(int example, const HestonParams& p, const Domain& d,
                           const BoundarySpecOptions& opts = {});

}  // namespace hestondg
