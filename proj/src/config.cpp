#include "hestondg/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hestondg {

void RunConfig::validate() const {
    params.validate();
    domain.validate();
    if (example < 1 || example > 4)
        throw std::invalid_argument("RunConfig: example must be 1..4");
    if (degree != 1 && degree != 2)
        throw std::invalid_argument("RunConfig: degree must be 1 or 2");
    if (!(dt > 0.0)) throw std::invalid_argument("RunConfig: dt must be > 0");
    if (mode == MeshMode::Uniform) {
        if (n_v < 1 || n_x < 1)
            throw std::invalid_argument("RunConfig: uniform mesh needs n_v, n_x >= 1");
    } else {
        if (adapt.max_rounds < 0 || !(adapt.theta_mark > 0.0 && adapt.theta_mark < 1.0))
            throw std::invalid_argument("RunConfig: bad adaptive parameters");
        if (n_v < 1 || n_x < 1)
            throw std::invalid_argument("RunConfig: adaptive mode needs an initial n_v, n_x");
    }
    if (option.type == OptionKind::Butterfly && !(option.K1 < option.K2 && option.K2 < option.K3))
        throw std::invalid_argument("RunConfig: bad butterfly strikes");
    TimeGrid{params.T, dt}.validate();
}

ScalarField RunConfig::initial_condition() const {
    const OptionKind kind = option;
    const HestonParams p = params;
    if (!log_price_coords)
        return [kind, p](double, double x) { return payoff(kind, x, p); };
    const double shift = std::log(params.K);
    return [kind, p, shift](double, double x) { return payoff(kind, x - shift, p); };
}

std::vector<double> RunConfig::kink_lines() const {
    std::vector<double> kinks = payoff_kinks(option);
    if (log_price_coords) {
        const double shift = std::log(params.K);
        for (double& c : kinks) c += shift;
    }
    return kinks;
}

double RunConfig::x_of_spot() const {
    if (log_price_coords) return std::log(params.S0);
    const double ref = option.type == OptionKind::Butterfly ? option.K2 : params.K;
    return std::log(params.S0 / ref);
}

BoundarySpec RunConfig::boundary() const { return boundary_spec(example, params, domain); }

RunConfig preset(const std::string& name) {
    RunConfig c;
    if (name == "table1" || name == "example1") {
        c.name = "table1";
        c.params = HestonParams{1.0, 0.09, 0.4, -0.7, 0.05, 0.01, 1.0, 105.0, 100.0, 0.25};
        c.domain = Domain{0.0, 4.0, -2.0, 2.0};
        c.option = OptionKind::call();
        c.example = 1;
        c.n_v = 64;
        c.n_x = 64;
        c.dt = 0.01;
        c.degree = 1;
        c.scheme = Scheme::RannacherCN;
    } else if (name == "example2" || name == "convection") {
        c.name = "example2";
        c.params = HestonParams{1.98937, 0.011876, 0.33147, 0.0258519,
                                std::log(1.0005),  std::log(100.0),
                                0.25,    123.4,    123.4,   0.011876};
        c.domain = Domain{0.0025, 0.559951, 2.990790, 6.640072};
        c.option = OptionKind::call();
        c.example = 2;
        c.log_price_coords = true;
        c.mode = MeshMode::Adaptive;
        c.n_v = 16;
        c.n_x = 16;
        c.adapt = AdaptOptions{0.0, 0.5, 8, 0.0125, 1};
        c.dt = 0.0125;
        c.degree = 1;
        c.scheme = Scheme::RannacherCN;
    } else if (name == "butterfly" || name == "example3") {
        c.name = "butterfly";
        c.params = HestonParams{2.5,  0.06, 0.5, -0.1, std::log(1.052), std::log(1.048),
                                0.25, 0.5,  1.0, 0.05225};  // K is the reference level K2
        c.domain = Domain{0.0025, 0.559951, -5.0, 5.0};
        c.option = OptionKind::butterfly(0.1, 0.5, 0.9);
        c.example = 3;
        c.n_v = 35;   // ~ spacing 0.016
        c.n_x = 128;  // ~ spacing 0.078
        c.dt = 0.025;
        c.degree = 1;
        c.scheme = Scheme::RannacherCN;
    } else if (name == "digital" || name == "example4") {
        c.name = "digital";
        c.params = HestonParams{2.5,  0.06, 0.5, -0.1, std::log(1.052), std::log(1.048),
                                0.25, 1.0,  1.0, 0.05225};
        c.domain = Domain{0.0025, 0.559951, -5.0, 5.0};
        c.option = OptionKind::digital();
        c.example = 4;
        c.n_v = 32;
        c.n_x = 128;
        c.dt = 0.025;
        c.degree = 1;
        c.scheme = Scheme::RannacherCN;
    } else {
        throw std::invalid_argument("preset: unknown name '" + name + "'");
    }
    c.adapt.degree = c.degree;
    c.adapt.dt = c.dt;
    return c;
}

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::CrankNicolson: return "cn";
        case Scheme::RannacherCN: return "rannacher";
        case Scheme::BackwardEuler: return "be";
    }
    return "?";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "cn" || name == "crank-nicolson") return Scheme::CrankNicolson;
    if (name == "rannacher" || name == "rannacher-cn") return Scheme::RannacherCN;
    if (name == "be" || name == "backward-euler") return Scheme::BackwardEuler;
    throw std::invalid_argument("scheme: unknown name '" + name + "'");
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto as_double = [&]() { return std::stod(value); };
    auto as_int = [&]() { return std::stoi(value); };
    if (key == "kappa") cfg.params.kappa = as_double();
    else if (key == "theta") cfg.params.theta = as_double();
    else if (key == "sigma") cfg.params.sigma = as_double();
    else if (key == "rho") cfg.params.rho = as_double();
    else if (key == "r_d") cfg.params.r_d = as_double();
    else if (key == "r_f") cfg.params.r_f = as_double();
    else if (key == "T") cfg.params.T = as_double();
    else if (key == "K") cfg.params.K = as_double();
    else if (key == "S0") cfg.params.S0 = as_double();
    else if (key == "v0") cfg.params.v0 = as_double();
    else if (key == "domain.v_min") cfg.domain.v_min = as_double();
    else if (key == "domain.v_max") cfg.domain.v_max = as_double();
    else if (key == "domain.x_min") cfg.domain.x_min = as_double();
    else if (key == "domain.x_max") cfg.domain.x_max = as_double();
    else if (key == "n_v") cfg.n_v = as_int();
    else if (key == "n_x") cfg.n_x = as_int();
    else if (key == "degree") cfg.degree = cfg.adapt.degree = as_int();
    else if (key == "dt") cfg.dt = cfg.adapt.dt = as_double();
    else if (key == "scheme") cfg.scheme = scheme_from_name(value);
    else if (key == "example") cfg.example = as_int();
    else if (key == "mesh") {
        if (value == "uniform") cfg.mode = MeshMode::Uniform;
        else if (value == "adaptive") cfg.mode = MeshMode::Adaptive;
        else throw std::invalid_argument("mesh: expected uniform|adaptive");
    }
    else if (key == "adaptive.eps") cfg.adapt.eps = as_double();
    else if (key == "adaptive.theta_mark") cfg.adapt.theta_mark = as_double();
    else if (key == "adaptive.max_rounds") cfg.adapt.max_rounds = as_int();
    else if (key == "option") {
        if (value == "call") cfg.option = OptionKind::call();
        else if (value == "put") cfg.option = OptionKind::put();
        else if (value == "digital") cfg.option = OptionKind::digital();
        else throw std::invalid_argument("option: expected call|put|digital (butterfly via K1,K2,K3)");
    }
    else if (key == "K1") cfg.option.K1 = as_double(), cfg.option.type = OptionKind::Butterfly;
    else if (key == "K2") cfg.option.K2 = as_double(), cfg.option.type = OptionKind::Butterfly;
    else if (key == "K3") cfg.option.K3 = as_double(), cfg.option.type = OptionKind::Butterfly;
    else if (key == "mc.paths") cfg.mc.paths = std::stoll(value);
    else if (key == "mc.steps") cfg.mc.steps = as_int();
    else if (key == "mc.antithetic") cfg.mc.antithetic = value == "1" || value == "true";
    else if (key == "seed") cfg.mc.seed = std::stoull(value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::runtime_error("config: bad line " + std::to_string(lineno));
            continue;
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "preset") {
            base = preset(value);
            continue;
        }
        apply_override(base, key, value);
    }
    return base;
}

}  // namespace hestondg
