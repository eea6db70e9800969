#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <queue>
#include <string>
#include <vector>

#include "ris_isl/core.hpp"

namespace ris_isl {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
inline QuadratureRule gauss_legendre_rule(std::size_t n) {
    if (n == 0) throw invalid_argument_error("Gauss-Legendre rule needs at least one node");
    if (n == 1) return {{0.0}, {2.0}};
    QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

/// Rules are cached per node count; lookups are thread-safe.
inline const QuadratureRule& cached_gauss_legendre(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, QuadratureRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, gauss_legendre_rule(n)).first;
    return it->second;
}

template <class F>
double gauss_legendre(F&& f, double a, double b, const QuadratureRule& rule) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return sum * half;
}

template <class F>
double gauss_legendre(F&& f, double a, double b, std::size_t n) {
    return gauss_legendre(std::forward<F>(f), a, b, cached_gauss_legendre(n));
}

struct AdaptiveOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-300;
    std::size_t nodes = 32;
    std::size_t max_panels = 4096;
};

/// Globally adaptive Gauss-Legendre: the panel with the largest error
/// estimate (n-point vs two half-panels) is bisected until the summed
/// estimate meets max(rel_tol |I|, abs_tol).
template <class F>
double adaptive_gauss_legendre(F&& f, double a, double b, const AdaptiveOptions& opt = {}) {
    const QuadratureRule& rule = cached_gauss_legendre(opt.nodes);
    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    auto evaluate = [&](double lo, double hi) {
        const double mid = 0.5 * (lo + hi);
        const double whole = gauss_legendre(f, lo, hi, rule);
        const double split = gauss_legendre(f, lo, mid, rule) + gauss_legendre(f, mid, hi, rule);
        return Panel{lo, hi, split, std::abs(split - whole)};
    };

    std::priority_queue<Panel> panels;
    panels.push(evaluate(a, b));
    double total = panels.top().value;
    double error = panels.top().error;
    while (error > std::max(opt.rel_tol * std::abs(total), opt.abs_tol)) {
        if (panels.size() >= opt.max_panels) {
            throw numeric_error("adaptive quadrature did not reach relative tolerance " +
                                std::to_string(opt.rel_tol) + " (estimate " +
                                std::to_string(total) + ", error " + std::to_string(error) + ")");
        }
        const Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = evaluate(worst.a, mid);
        const Panel right = evaluate(mid, worst.b);
        panels.push(left);
        panels.push(right);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        if (!std::isfinite(total)) throw numeric_error("quadrature produced a non-finite value");
    }
    // Re-sum from the panels so the result does not carry update round-off.
    double sum = 0.0;
    std::vector<Panel> all;
    all.reserve(panels.size());
    while (!panels.empty()) {
        all.push_back(panels.top());
        panels.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    for (const auto& p : all) sum += p.value;
    return sum;
}

/// n-point Gauss-Hermite rule for weight exp(-x^2) (physicists' convention).
inline QuadratureRule gauss_hermite_rule(std::size_t n) {
    if (n == 0) throw invalid_argument_error("Gauss-Hermite rule needs at least one node");
    QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
    const double pim4 = std::pow(pi, -0.25);
    const std::size_t half = (n + 1) / 2;
    double z = 0.0;
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < half; ++i) {
        // Initial guesses after Numerical Recipes' gauher.
        if (i == 0) {
            z = std::sqrt(2.0 * nd + 1.0) - 1.85575 * std::pow(2.0 * nd + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(nd, 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[n - 1];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[n - 2];
        } else {
            z = 2.0 * z - rule.nodes[n - i + 1];
        }
        double pp = 0.0;
        for (int iter = 0; iter < 200; ++iter) {
            double p1 = pim4;
            double p2 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * nd) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        rule.nodes[n - 1 - i] = z;
        rule.nodes[i] = -z;
        rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / (pp * pp);
    }
    return rule;
}

}  // namespace ris_isl
