#include "hestondg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace hestondg {

namespace {

void push_orbit3(TriQuadrature& q, double a, double w) {
    // Permutations of barycentric (1-2a, a, a); reference coords are
    // (xi, eta) = (lambda_2, lambda_3).
    const double c = 1.0 - 2.0 * a;
    q.points.emplace_back(a, a);
    q.points.emplace_back(c, a);
    q.points.emplace_back(a, c);
    q.weights.insert(q.weights.end(), 3, w);
}

TriQuadrature make_deg2() {
    TriQuadrature q;
    push_orbit3(q, 1.0 / 6.0, 1.0 / 3.0);
    return q;
}

TriQuadrature make_deg4() {
    TriQuadrature q;
    push_orbit3(q, 0.445948490915965, 0.223381589678011);
    push_orbit3(q, 0.091576213509771, 0.109951743655322);
    return q;
}

TriQuadrature make_deg5() {
    TriQuadrature q;
    q.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    q.weights.push_back(0.225);
    push_orbit3(q, 0.470142064105115, 0.132394152788506);
    push_orbit3(q, 0.101286507323456, 0.125939180544827);
    return q;
}

// Collapsed-square (Duffy) tensor rule for high degrees.
TriQuadrature make_duffy(int deg) {
    const int n = deg / 2 + 2;
    const LineQuadrature& g = LineQuadrature::get(n);
    TriQuadrature q;
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double u = g.points[i], v = g.points[j];
            q.points.emplace_back(u * (1.0 - v), v);
            q.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - v));
        }
    }
    return q;
}

std::vector<double> legendre_roots(int n) {
    // Newton iteration on P_n over [-1,1]; returned in ascending order
    // (consumers integrating oscillatory data rely on monotone nodes).
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r[n - 1 - i] = x;
    }
    return r;
}

}  // namespace

const TriQuadrature& TriQuadrature::get(int deg) {
    static std::map<int, TriQuadrature> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(deg);
    if (it != cache.end()) return it->second;
    TriQuadrature q;
    if (deg <= 2)
        q = make_deg2();
    else if (deg <= 4)
        q = make_deg4();
    else if (deg <= 5)
        q = make_deg5();
    else
        q = make_duffy(deg);
    return cache.emplace(deg, std::move(q)).first->second;
}

const LineQuadrature& LineQuadrature::get(int n) {
    if (n < 1) throw std::invalid_argument("LineQuadrature: n >= 1 required");
    static std::map<int, LineQuadrature> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    LineQuadrature q;
    const auto roots = legendre_roots(n);
    for (double x : roots) {
        // weight on [-1,1]: 2 / ((1-x^2) P_n'(x)^2), mapped to [0,1]
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        q.points.push_back(0.5 * (x + 1.0));
        q.weights.push_back(1.0 / ((1.0 - x * x) * dp * dp));
    }
    return cache.emplace(n, std::move(q)).first->second;
}

}  // namespace hestondg
