#pragma once

#include "nvstirap/core.hpp"

#include <cmath>
#include <vector>

namespace nvstirap::quadrature {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [a, b] (Newton iteration on P_n).
inline Rule gauss_legendre(int n, double a, double b)
{
    if (n < 1)
        throw ConfigError("Gauss-Legendre rule needs at least one node");
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1)
                p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        if (n == 1) {
            x = 0.0;
            dp = 1.0;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = mid - half * x;
        rule.nodes[n - 1 - i] = mid + half * x;
        rule.weights[i] = half * w;
        rule.weights[n - 1 - i] = half * w;
    }
    return rule;
}

/// Trapezoid rule with n intervals on [a, b]; endpoints carry half weight.
inline Rule trapezoid(int n, double a, double b)
{
    if (n < 1)
        throw ConfigError("trapezoid rule needs at least one interval");
    Rule rule;
    const double h = (b - a) / n;
    for (int i = 0; i <= n; ++i) {
        rule.nodes.push_back(a + i * h);
        rule.weights.push_back((i == 0 || i == n) ? 0.5 * h : h);
    }
    return rule;
}

} // namespace nvstirap::quadrature
