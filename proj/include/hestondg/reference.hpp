#pragma once

#include <complex>
#include <cstdint>

#include "hestondg/model.hpp"

namespace hestondg {

// Pieces of the k-th characteristic-function factor at frequency omega.
struct CharFnParts {
    std::complex<double> b;
    std::complex<double> d;
    std::complex<double> h;
    std::complex<double> C;
    std::complex<double> D;
    std::complex<double> f;
};

CharFnParts char_fn_parts(int k, double omega, double tau, const HestonParams& p, double ln_s,
                          double v);

struct ReferenceKind {
    enum Type { Call, Put, Digital };
};

// Semi-analytic price by Fourier integration of the in-the-money
// probabilities Q1, Q2; evaluated at spot S0, variance v0, time t.
double heston_price(ReferenceKind::Type kind, const HestonParams& p, double t = 0.0);

struct MCConfig {
    std::int64_t paths = 1000000;
    int steps = 0;  // 0: 250 per year of maturity
    std::uint64_t seed = 42;
    bool antithetic = false;

    void validate() const;
};

struct MCResult {
    double price = 0.0;
    double std_error = 0.0;
};

// Full-truncation Euler simulation with correlated increments; per-path
// RNG streams keyed by path index make the result independent of the
// number of worker threads.
MCResult mc_price(ReferenceKind::Type kind, const HestonParams& p, const MCConfig& cfg);

}  // namespace hestondg
