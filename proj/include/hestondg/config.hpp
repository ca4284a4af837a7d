#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "hestondg/adaptivity.hpp"
#include "hestondg/model.hpp"
#include "hestondg/reference.hpp"
#include "hestondg/timestepping.hpp"

namespace hestondg {

enum class MeshMode { Uniform, Adaptive };

struct RunConfig {
    std::string name = "custom";
    HestonParams params;
    Domain domain;
    OptionKind option = OptionKind::call();
    int example = 1;                // boundary condition set
    bool log_price_coords = false;  // x = log S instead of log(S/K)

    MeshMode mode = MeshMode::Uniform;
    int n_v = 64;
    int n_x = 64;
    AdaptOptions adapt;             // used in Adaptive mode (degree/dt mirrored below)

    int degree = 1;
    double dt = 0.01;
    Scheme scheme = Scheme::RannacherCN;

    MCConfig mc;

    void validate() const;

    // payoff as a field over the computational rectangle
    ScalarField initial_condition() const;
    std::vector<double> kink_lines() const;
    // evaluation abscissa of the spot price
    double x_of_spot() const;
    BoundarySpec boundary() const;
};

// Built-in parameter sets: "table1" (call with Dirichlet data),
// "example2" (convection dominated call), "butterfly", "digital".
RunConfig preset(const std::string& name);

// Flat key=value file; '#' starts a comment.
RunConfig load_config_file(const std::string& path, RunConfig base = preset("table1"));
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

}  // namespace hestondg
