#include "hestondg/reference.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "hestondg/quadrature.hpp"

namespace hestondg {

namespace {

using cplx = std::complex<double>;
constexpr cplx I{0.0, 1.0};

cplx log1p_over_x(const cplx& x) {
    if (std::abs(x) < 1e-300) return 1.0;
    return std::log(1.0 + x) / x;
}

}  // namespace

// The printed C and D contain kappa*theta/sigma^2 against terms that vanish
// like sigma^2; the evaluation below cancels sigma^2 analytically through
// b_minus = (b - i rho sigma w)^2 - d^2 = -sigma^2((-1)^k iw + w^2) over
// b_plus, and writes the log ratio (1 - h e^{d tau})/(1 - h) as
// e^{d tau} (1 + delta) so that neither overflow nor cancellation occurs.
CharFnParts char_fn_parts(int k, double omega, double tau, const HestonParams& p, double ln_s,
                          double v) {
    if (k != 1 && k != 2) throw std::invalid_argument("char_fn_parts: k must be 1 or 2");
    CharFnParts r;
    const double sig2 = p.sigma * p.sigma;
    r.b = (k - 2.0) * p.rho * p.sigma + p.kappa;
    const cplx rsiw = p.rho * p.sigma * I * omega;
    const double sign = (k == 1) ? -1.0 : 1.0;
    const cplx iw_term = sign * I * omega + omega * omega;
    r.d = std::sqrt((rsiw - r.b) * (rsiw - r.b) + sig2 * iw_term);
    const cplx bp = r.b - rsiw + r.d;
    const cplx bm_over_sig2 = -iw_term / bp;
    const cplx bm = sig2 * bm_over_sig2;
    r.h = bp / bm;
    const cplx invh = bm / bp;
    const cplx emdt = std::exp(-r.d * tau);
    // (e^{-d tau} - h)/(1 - h) = 1 + delta
    const cplx delta = invh * (emdt - 1.0) / (invh - 1.0);
    const cplx delta_over_sig2 = bm_over_sig2 * (emdt - 1.0) / (bp * (invh - 1.0));
    r.C = (p.r_d - p.r_f) * I * omega * tau +
          p.kappa * p.theta *
              (tau * bm_over_sig2 - 2.0 * delta_over_sig2 * log1p_over_x(delta));
    r.D = bm_over_sig2 * (emdt - 1.0) / (emdt * invh - 1.0);
    r.f = std::exp(r.C + r.D * v + I * omega * ln_s);
    return r;
}

namespace {

// Integrand of Q_k with branch tracking of the characteristic-function
// logarithm: evaluation points must arrive in increasing omega order.
class QIntegrand {
  public:
    QIntegrand(int k, double tau, const HestonParams& p, double ln_s, double ln_k, double v)
        : k_(k), tau_(tau), p_(p), ln_s_(ln_s), ln_k_(ln_k), v_(v) {}

    double operator()(double omega) {
        CharFnParts parts = char_fn_parts(k_, omega, tau_, p_, ln_s_, v_);
        // the principal log of (e^{-d tau} - h)/(1 - h) is the only branch
        // cut source; unwrap its argument against the previous point
        const cplx emdt = std::exp(-parts.d * tau_);
        const cplx invh = 1.0 / parts.h;
        const cplx ratio = 1.0 + invh * (emdt - 1.0) / (invh - 1.0);
        const double two_pi = 2.0 * M_PI;
        double wound = std::arg(ratio) + winding_ * two_pi;
        while (wound - prev_arg_ > M_PI) {
            winding_ -= 1;
            wound -= two_pi;
        }
        while (wound - prev_arg_ < -M_PI) {
            winding_ += 1;
            wound += two_pi;
        }
        prev_arg_ = wound;
        if (winding_ != 0) {
            // rebuild C (and f) with the continuously tracked logarithm
            const double sig2 = p_.sigma * p_.sigma;
            const cplx log_unwrapped =
                parts.d * tau_ + cplx(std::log(std::abs(ratio)), wound);
            const cplx bp = parts.b - p_.rho * p_.sigma * I * omega + parts.d;
            const cplx C = (p_.r_d - p_.r_f) * I * omega * tau_ +
                           p_.kappa * p_.theta / sig2 * (bp * tau_ - 2.0 * log_unwrapped);
            parts.f = std::exp(C + parts.D * v_ + I * omega * ln_s_);
        }
        const cplx val = std::exp(-I * omega * ln_k_) * parts.f / (I * omega);
        return val.real();
    }

    void reset() {
        winding_ = 0;
        prev_arg_ = 0.0;
    }

  private:
    int k_;
    double tau_;
    HestonParams p_;
    double ln_s_, ln_k_, v_;
    int winding_ = 0;
    double prev_arg_ = 0.0;
};

double q_probability(int k, double tau, const HestonParams& p, double ln_s, double ln_k,
                     double v) {
    QIntegrand f(k, tau, p, ln_s, ln_k, v);
    // truncation point from the integrand tail
    double omega_max = 50.0;
    for (int i = 0; i < 20; ++i) {
        f.reset();
        const double tail = std::abs(f(omega_max));
        if (tail < 1e-12) break;
        omega_max *= 2.0;
    }
    // panel-doubling Gauss-Legendre until two successive estimates agree
    const LineQuadrature& gl = LineQuadrature::get(24);
    double prev = 0.0;
    for (int panels = 4; panels <= 4096; panels *= 2) {
        f.reset();
        double integral = 0.0;
        const double w = omega_max / panels;
        for (int s = 0; s < panels; ++s) {
            const double a = s * w;
            for (std::size_t q = 0; q < gl.size(); ++q)
                integral += w * gl.weights[q] * f(a + gl.points[q] * w);
        }
        if (panels > 4 && std::abs(integral - prev) < 1e-10) {
            prev = integral;
            break;
        }
        prev = integral;
        if (panels == 4096)
            throw std::runtime_error("heston_price: Fourier quadrature did not converge");
    }
    return 0.5 + prev / M_PI;
}

}  // namespace

double heston_price(ReferenceKind::Type kind, const HestonParams& p, double t) {
    p.validate();
    const double tau = p.T - t;
    if (!(tau > 0.0)) throw std::invalid_argument("heston_price: requires T - t > 0");
    if (!(p.v0 > 0.0)) throw std::invalid_argument("heston_price: requires v0 > 0");
    const double ln_s = std::log(p.S0);
    const double ln_k = std::log(p.K);
    const double q1 = q_probability(1, tau, p, ln_s, ln_k, p.v0);
    const double q2 = q_probability(2, tau, p, ln_s, ln_k, p.v0);
    const double df_d = std::exp(-p.r_d * tau);
    const double df_f = std::exp(-p.r_f * tau);
    switch (kind) {
        case ReferenceKind::Call:
            return p.S0 * df_f * q1 - p.K * df_d * q2;
        case ReferenceKind::Put:
            return p.S0 * df_f * (q1 - 1.0) + p.K * df_d * (1.0 - q2);
        case ReferenceKind::Digital:
            return df_d * q2;
    }
    return 0.0;
}

void MCConfig::validate() const {
    if (paths < 2) throw std::invalid_argument("MCConfig: need at least 2 paths");
    if (steps < 0) throw std::invalid_argument("MCConfig: steps must be >= 0");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct PathPayoff {
    ReferenceKind::Type kind;
    double K;

    double operator()(double s) const {
        switch (kind) {
            case ReferenceKind::Call:
                return std::max(s - K, 0.0);
            case ReferenceKind::Put:
                return std::max(K - s, 0.0);
            case ReferenceKind::Digital:
                return s > K ? 1.0 : 0.0;
        }
        return 0.0;
    }
};

}  // namespace

MCResult mc_price(ReferenceKind::Type kind, const HestonParams& p, const MCConfig& cfg) {
    p.validate();
    cfg.validate();
    const int steps = cfg.steps > 0
                          ? cfg.steps
                          : std::max(1, static_cast<int>(std::lround(250.0 * p.T)));
    const double dt = p.T / steps;
    const double sqdt = std::sqrt(dt);
    const double rho_c = std::sqrt(1.0 - p.rho * p.rho);
    const double drift = (p.r_d - p.r_f) * dt;
    const PathPayoff payoff{kind, p.K};
    const double discount = std::exp(-p.r_d * p.T);

    const std::int64_t n = cfg.paths;
    auto run_path = [&](std::uint64_t path_idx, double& out) {
        std::mt19937_64 rng(splitmix64(cfg.seed ^ (0x5851f42d4c957f2dULL * (path_idx + 1))));
        std::normal_distribution<double> normal;
        double acc = 0.0;
        const int reps = cfg.antithetic ? 2 : 1;
        double ln_s[2] = {std::log(p.S0), std::log(p.S0)};
        double v[2] = {p.v0, p.v0};
        for (int m = 0; m < steps; ++m) {
            const double z1 = normal(rng);
            const double z2 = normal(rng);
            for (int a = 0; a < reps; ++a) {
                const double s1 = a == 0 ? z1 : -z1;
                const double s2 = a == 0 ? z2 : -z2;
                const double dws = s1 * sqdt;
                const double dwv = (p.rho * s1 + rho_c * s2) * sqdt;
                const double vp = std::max(v[a], 0.0);
                ln_s[a] += drift - 0.5 * vp * dt + std::sqrt(vp) * dws;
                v[a] += p.kappa * (p.theta - vp) * dt + p.sigma * std::sqrt(vp) * dwv;
            }
        }
        for (int a = 0; a < reps; ++a) acc += payoff(std::exp(ln_s[a]));
        out = discount * acc / reps;
    };

    // fixed-size chunks reduced in chunk order: deterministic for a seed
    const std::int64_t chunk = 8192;
    const std::int64_t n_chunks = (n + chunk - 1) / chunk;
    std::vector<double> sum(n_chunks, 0.0), sum2(n_chunks, 0.0);
    const unsigned n_workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(n_chunks));
    std::vector<std::thread> workers;
    std::atomic<std::int64_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            const std::int64_t lo = c * chunk, hi = std::min(n, lo + chunk);
            double s = 0.0, s2 = 0.0;
            for (std::int64_t i = lo; i < hi; ++i) {
                double x;
                run_path(static_cast<std::uint64_t>(i), x);
                s += x;
                s2 += x * x;
            }
            sum[c] = s;
            sum2[c] = s2;
        }
    };
    for (unsigned w = 0; w < n_workers; ++w) workers.emplace_back(work);
    for (auto& t : workers) t.join();

    double s = 0.0, s2 = 0.0;
    for (std::int64_t c = 0; c < n_chunks; ++c) {
        s += sum[c];
        s2 += sum2[c];
    }
    MCResult res;
    res.price = s / n;
    const double var = std::max(0.0, (s2 - s * s / n) / (n - 1));
    res.std_error = std::sqrt(var / n);
    return res;
}

}  // namespace hestondg
