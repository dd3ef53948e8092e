#include "vforms/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace vforms {

namespace {

Quadrature1D compute_gauss_legendre(int q) {
    Quadrature1D rule;
    rule.nodes.resize(q);
    rule.weights.resize(q);
    for (int i = 0; i < q; ++i) {
        // Chebyshev-like initial guess, then Newton on P_q.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= q; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = q * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[q - 1 - i] = x;
        rule.weights[q - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace

const Quadrature1D& gauss_legendre(int order) {
    if (order < 1 || order > 512) throw std::invalid_argument("quadrature order out of range");
    static std::map<int, Quadrature1D> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
    return it->second;
}

BoxRule box_rule(const Box& box, int order) {
    const Quadrature1D& q1 = gauss_legendre(order);
    const int n = box.dim();
    BoxRule rule;
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(order);
    rule.points.reserve(total);
    rule.weights.reserve(total);

    std::vector<int> pick(n, 0);
    std::vector<double> x(n);
    while (true) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            const double half = 0.5 * (box.hi[i] - box.lo[i]);
            x[i] = box.lo[i] + half * (q1.nodes[pick[i]] + 1.0);
            w *= half * q1.weights[pick[i]];
        }
        rule.points.push_back(x);
        rule.weights.push_back(w);
        int i = n - 1;
        while (i >= 0 && pick[i] + 1 == order) {
            pick[i] = 0;
            --i;
        }
        if (i < 0) break;
        ++pick[i];
    }
    return rule;
}

}  // namespace vforms
