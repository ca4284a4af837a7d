#include "hestondg/model.hpp"

#include <cmath>

namespace hestondg {

void HestonParams::validate() const {
    auto req = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("HestonParams: ") + what);
    };
    req(sigma > 0.0, "sigma must be > 0");
    req(kappa > 0.0, "kappa must be > 0");
    req(theta > 0.0, "theta must be > 0");
    req(T > 0.0, "T must be > 0");
    req(K > 0.0, "K must be > 0");
    req(S0 > 0.0, "S0 must be > 0");
    req(v0 >= 0.0, "v0 must be >= 0");
    req(rho > -1.0 && rho < 1.0, "rho must lie strictly inside (-1,1)");
    req(std::isfinite(r_d) && std::isfinite(r_f), "rates must be finite");
}

void Domain::validate() const {
    if (!(v_min < v_max) || !(x_min < x_max))
        throw std::invalid_argument("Domain: empty rectangle");
    if (v_min < 0.0) throw std::invalid_argument("Domain: v_min must be >= 0");
}

OptionKind OptionKind::butterfly(double k1, double k2, double k3) {
    if (!(k1 < k2 && k2 < k3))
        throw std::invalid_argument("butterfly: strikes must satisfy K1 < K2 < K3");
    if (std::abs(k2 - 0.5 * (k1 + k3)) > 1e-12 * k3)
        throw std::invalid_argument("butterfly: K2 must equal (K1+K3)/2");
    return {Butterfly, k1, k2, k3};
}

Eigen::Matrix2d diffusion_matrix(double v, const HestonParams& p) {
    if (v < 0.0) throw std::invalid_argument("diffusion_matrix: v < 0");
    Eigen::Matrix2d A;
    A << p.sigma * p.sigma, p.rho * p.sigma,
         p.rho * p.sigma,   1.0;
    return 0.5 * v * A;
}

Eigen::Vector2d convection_field(double v, const HestonParams& p) {
    if (v < 0.0) throw std::invalid_argument("convection_field: v < 0");
    Eigen::Vector2d b;
    b[0] = v * p.kappa - p.kappa * p.theta + 0.5 * p.sigma * p.sigma;
    b[1] = 0.5 * v - (p.r_d - p.r_f) + 0.5 * p.rho * p.sigma;
    return b;
}

bool feller_holds(const HestonParams& p) {
    return 2.0 * p.kappa * p.theta >= p.sigma * p.sigma;
}

PDECoefficients heston_coefficients(const HestonParams& p) {
    PDECoefficients c;
    c.A = [p](double v) { return diffusion_matrix(v, p); };
    c.b = [p](double v) { return convection_field(v, p); };
    c.dA_dv = [p](double) {
        Eigen::Matrix2d B;
        B << p.sigma * p.sigma, p.rho * p.sigma,
             p.rho * p.sigma,   1.0;
        return (0.5 * B).eval();
    };
    c.reaction = p.r_d;
    return c;
}

double payoff(const OptionKind& kind, double x, const HestonParams& p) {
    switch (kind.type) {
        case OptionKind::EuropeanCall:
            return std::max(p.K * std::exp(x) - p.K, 0.0);
        case OptionKind::EuropeanPut:
            return std::max(p.K - p.K * std::exp(x), 0.0);
        case OptionKind::Butterfly: {
            const double s = kind.K2 * std::exp(x);
            return std::max(s - kind.K1, 0.0) - 2.0 * std::max(s - kind.K2, 0.0) +
                   std::max(s - kind.K3, 0.0);
        }
        case OptionKind::DigitalCall:
            return p.K * std::exp(x) > p.K ? 1.0 : 0.0;
    }
    return 0.0;
}

std::vector<double> payoff_kinks(const OptionKind& kind) {
    switch (kind.type) {
        case OptionKind::EuropeanCall:
        case OptionKind::EuropeanPut:
        case OptionKind::DigitalCall:
            return {0.0};
        case OptionKind::Butterfly:
            return {std::log(kind.K1 / kind.K2), 0.0, std::log(kind.K3 / kind.K2)};
    }
    return {};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

BoundarySpec BoundarySpec::homogeneous_dirichlet() {
    BoundarySpec s;
    auto zero = [](double, double, double) { return 0.0; };
    s.value = {zero, zero, zero, zero};
    return s;
}

BoundarySpec BoundarySpec::homogeneous_neumann() {
    BoundarySpec s = homogeneous_dirichlet();
    s.tag.fill(BCType::Neumann);
    return s;
}

namespace {

// Closed-form call value used on the v_min side of example 2, in log-price
// coordinates: S = e^x, moneyness m = x - log K.  The variance entering d_-
// is configurable; the default reproduces the printed formula (v_max).
double bs_call_side(double tau, double x, const HestonParams& p, const Domain& d,
                    bool d_minus_uses_vmax) {
    const double m = x - std::log(p.K);
    if (tau <= 1e-14) return std::max(std::exp(x) - p.K, 0.0);
    const double v_plus = d.v_min;
    const double v_minus = d_minus_uses_vmax ? d.v_max : d.v_min;
    const double d_plus = (m + (p.r_d - p.r_f + 0.5 * v_plus) * tau) / std::sqrt(v_plus * tau);
    const double d_minus = (m + (p.r_d - p.r_f - 0.5 * v_minus) * tau) / std::sqrt(v_minus * tau);
    return std::exp(x - p.r_f * tau) * normal_cdf(d_plus) -
           p.K * std::exp(-p.r_d * tau) * normal_cdf(d_minus);
}

}  // namespace

BoundarySpec boundary_spec(int example, const HestonParams& p, const Domain& d,
                           const BoundarySpecOptions& opts) {
    BoundarySpec s;
    const double K = p.K;
    const double r_d = p.r_d, r_f = p.r_f;
    auto zero = [](double, double, double) { return 0.0; };

    switch (example) {
        case 1: {
            // European call, Dirichlet on all four sides.
            s.tag.fill(BCType::Dirichlet);
            s.value[int(Side::VMin)] = [K, r_d, r_f](double tau, double, double x) {
                return std::max(K * std::exp(x - r_f * tau) - K * std::exp(-r_d * tau), 0.0);
            };
            s.value[int(Side::VMax)] = [K, r_f](double tau, double, double x) {
                return K * std::exp(x - r_f * tau);
            };
            s.value[int(Side::XMin)] = zero;
            const double x_max = d.x_max;
            s.value[int(Side::XMax)] = [K, r_d, r_f, x_max](double tau, double, double) {
                return std::max(K * std::exp(x_max - r_f * tau) - K * std::exp(-r_d * tau), 0.0);
            };
            break;
        }
        case 2: {
            // Convection-dominated call in log-price coordinates x = log S.
            const Domain dom = d;
            const HestonParams pp = p;
            const bool dmv = opts.d_minus_uses_vmax;
            s.tag[int(Side::VMin)] = BCType::Dirichlet;
            s.tag[int(Side::VMax)] = BCType::Dirichlet;
            s.tag[int(Side::XMin)] = BCType::Dirichlet;
            s.tag[int(Side::XMax)] = BCType::Neumann;
            s.value[int(Side::VMin)] = [pp, dom, dmv](double tau, double, double x) {
                return bs_call_side(tau, x, pp, dom, dmv);
            };
            s.value[int(Side::VMax)] = [r_f](double tau, double, double x) {
                return std::exp(x - r_f * tau);
            };
            // x_min value blends the two v-side values linearly in v.
            s.value[int(Side::XMin)] = [pp, dom, dmv, r_f](double tau, double v, double x) {
                const double lambda = (v - dom.v_min) / (dom.v_max - dom.v_min);
                const double at_vmax = std::exp(x - r_f * tau);
                const double at_vmin = bs_call_side(tau, x, pp, dom, dmv);
                return lambda * at_vmax + (1.0 - lambda) * at_vmin;
            };
            // Prescribed conormal flux A grad(U).n on the outflow x side.
            s.value[int(Side::XMax)] = [r_f](double tau, double v, double x) {
                return 0.5 * v * std::exp(x - r_f * tau);
            };
            break;
        }
        case 3: {
            // Butterfly: homogeneous Dirichlet in x, homogeneous Neumann in v.
            s.tag[int(Side::VMin)] = BCType::Neumann;
            s.tag[int(Side::VMax)] = BCType::Neumann;
            s.tag[int(Side::XMin)] = BCType::Dirichlet;
            s.tag[int(Side::XMax)] = BCType::Dirichlet;
            s.value = {zero, zero, zero, zero};
            break;
        }
        case 4: {
            // Digital call: as example 3 but inhomogeneous Dirichlet at x_max.
            s.tag[int(Side::VMin)] = BCType::Neumann;
            s.tag[int(Side::VMax)] = BCType::Neumann;
            s.tag[int(Side::XMin)] = BCType::Dirichlet;
            s.tag[int(Side::XMax)] = BCType::Dirichlet;
            s.value[int(Side::VMin)] = zero;
            s.value[int(Side::VMax)] = zero;
            s.value[int(Side::XMin)] = zero;
            const double x_max = d.x_max;
            s.value[int(Side::XMax)] = [r_f, x_max](double tau, double, double) {
                return std::exp(x_max - r_f * tau);
            };
            break;
        }
        default:
            throw std::invalid_argument("boundary_spec: example must be 1..4");
    }
    return s;
}

}  // namespace hestondg
