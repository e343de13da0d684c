#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <vector>

#include "fairmat/domain.hpp"
#include "fairmat/polytope.hpp"

namespace fairmat {

struct FrankWolfeOptions {
    double tol = 1e-9;
    std::size_t max_iterations = 1000000;
};

struct FrankWolfeResult {
    std::vector<double> x;  // row-major n × m
    std::size_t n = 0;
    std::size_t m = 0;
    double objective = 0;
    double gap = 0;
    std::size_t iterations = 0;
    /// Active vertices and their weights at termination.
    std::vector<std::pair<double, DeterministicAssignment>> active;

    double at(std::size_t i, std::size_t e) const { return x[i * m + e]; }
};

namespace detail {

/// Σ_i Σ_k (Σ_{t≤k} (1 − x_{i,o_i(t)}))² and friends, for the anonymous
/// objective.
struct AnonymousObjective {
    const Instance* inst;

    std::vector<double> cumulative_deficits(const std::vector<double>& x) const {
        const std::size_t m = inst->m();
        std::vector<double> s(inst->n * m);
        for (std::size_t i = 0; i < inst->n; ++i) {
            double acc = 0;
            for (std::size_t k = 0; k < m; ++k) {
                acc += 1.0 - x[i * m + inst->prefs[i].at(k)];
                s[i * m + k] = acc;
            }
        }
        return s;
    }

    double value(const std::vector<double>& x) const {
        double v = 0;
        for (double s : cumulative_deficits(x)) v += s * s;
        return v;
    }

    std::vector<double> gradient(const std::vector<double>& x) const {
        const std::size_t m = inst->m();
        const auto s = cumulative_deficits(x);
        std::vector<double> g(x.size());
        for (std::size_t i = 0; i < inst->n; ++i) {
            double tail = 0;
            for (std::size_t k = m; k-- > 0;) {
                tail += s[i * m + k];
                g[i * m + inst->prefs[i].at(k)] = -2.0 * tail;
            }
        }
        return g;
    }

    /// Exact minimiser of the quadratic along x + γd, γ ∈ [0, cap].
    double line_search(const std::vector<double>& x, const std::vector<double>& d, double cap) const {
        const std::size_t m = inst->m();
        const auto s = cumulative_deficits(x);
        double num = 0, den = 0;
        for (std::size_t i = 0; i < inst->n; ++i) {
            double dd = 0;
            for (std::size_t k = 0; k < m; ++k) {
                dd += d[i * m + inst->prefs[i].at(k)];
                num += s[i * m + k] * dd;
                den += dd * dd;
            }
        }
        if (den <= 0) return 0;
        return std::clamp(num / den, 0.0, cap);
    }
};

}  // namespace detail

inline double anonymous_objective(const Instance& inst, const std::vector<double>& x) {
    return detail::AnonymousObjective{&inst}.value(x);
}

/// Pairwise conditional gradient for the strictly convex anonymous objective
/// over P. The objective is decreasing in every coordinate, so the search
/// runs over the hull of inclusion-maximal assignments, which contains a
/// minimiser over P.
inline FrankWolfeResult frank_wolfe_qp(const Instance& inst, const FrankWolfeOptions& options = {}) {
    const std::size_t n = inst.n, m = inst.m();
    const auto vertices = enumerate_assignments(inst, /*maximal_only=*/true);
    auto point = [&](std::size_t v) {
        std::vector<double> p(n * m, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t e : vertices[v].bundles[i].items()) p[i * m + e] = 1.0;
        return p;
    };
    std::vector<std::vector<double>> points;
    points.reserve(vertices.size());
    for (std::size_t v = 0; v < vertices.size(); ++v) points.push_back(point(v));

    const detail::AnonymousObjective f{&inst};
    std::map<std::size_t, double> weights{{0, 1.0}};
    std::vector<double> x = points[0];
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
        return s;
    };

    FrankWolfeResult out;
    out.n = n;
    out.m = m;
    for (std::size_t it = 0;; ++it) {
        const auto g = f.gradient(x);
        std::size_t toward = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < points.size(); ++v) {
            const double val = dot(g, points[v]);
            if (val < best) {
                best = val;
                toward = v;
            }
        }
        const double gap = dot(g, x) - best;
        out.gap = gap;
        out.iterations = it;
        if (gap <= options.tol) break;
        if (it >= options.max_iterations)
            throw MaxIterations("Frank-Wolfe gap " + std::to_string(gap) + " above tolerance");
        std::size_t away = weights.begin()->first;
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& [v, w] : weights) {
            const double val = dot(g, points[v]);
            if (val > worst) {
                worst = val;
                away = v;
            }
        }
        std::vector<double> d(n * m);
        for (std::size_t k = 0; k < d.size(); ++k) d[k] = points[toward][k] - points[away][k];
        const double cap = weights[away];
        const double gamma = f.line_search(x, d, cap);
        if (gamma <= 0) break;
        for (std::size_t k = 0; k < x.size(); ++k) x[k] += gamma * d[k];
        weights[toward] += gamma;
        weights[away] -= gamma;
        if (weights[away] <= 1e-15) weights.erase(away);
    }
    out.x = std::move(x);
    out.objective = f.value(out.x);
    for (const auto& [v, w] : weights) out.active.emplace_back(w, vertices[v]);
    return out;
}

/// Closest fraction p/q with q ≤ max_den.
inline Rational nearest_fraction(double value, long long max_den = 48) {
    Rational best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (long long q = 1; q <= max_den; ++q) {
        const long long p = std::llround(value * static_cast<double>(q));
        const double err = std::abs(value - static_cast<double>(p) / static_cast<double>(q));
        if (err < best_err - 1e-15) {
            best_err = err;
            best = make_rational(p, q);
        }
    }
    return best;
}

/// Rounds each coordinate to its nearest fraction with small denominator.
inline FractionalAssignment snap(const FrankWolfeResult& r, long long max_den = 48) {
    FractionalAssignment pi(r.n, r.m);
    for (std::size_t i = 0; i < r.n; ++i)
        for (std::size_t e = 0; e < r.m; ++e) pi(i, e) = nearest_fraction(r.at(i, e), max_den);
    return pi;
}

}  // namespace fairmat
