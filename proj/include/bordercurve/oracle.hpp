#pragma once

// Brute-force cross-checks that do not go through the principal curve:
// exhaustive Border grids, the constrained slice maximum G(s), and random
// revenue perturbations in delta space.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "environments.hpp"
#include "errors.hpp"
#include "monotone.hpp"
#include "numerics.hpp"
#include "rng.hpp"
#include "transforms.hpp"

namespace bordercurve {

inline constexpr double kGridBudget = 1e7;

struct GridReport {
    std::vector<std::size_t> points;  // per axis
    double max_B = 0.0;
    std::vector<double> argmax;
    double seconds = 0.0;
};

namespace detail {

struct Axis {
    std::vector<double> u;
    std::vector<double> tail;  // int_u^1 x
};

inline Axis make_axis(const MonotoneFn& x, double lo, std::size_t k) {
    Axis a;
    a.u = numerics::linspace(lo, 1.0, std::max<std::size_t>(k, 2));
    for (double kn : x.knots())
        if (kn >= lo && kn <= 1.0) a.u.push_back(kn);
    numerics::sort_unique(a.u, 1e-14);
    for (double u : a.u) a.tail.push_back(x.integral(u, 1.0));
    return a;
}

/// Visits every index vector of the given shape.
template <class F>
void odometer(const std::vector<std::size_t>& shape, F&& visit) {
    std::vector<std::size_t> idx(shape.size(), 0);
    if (shape.empty()) return;
    while (true) {
        visit(idx);
        std::size_t d = 0;
        while (d < shape.size() && ++idx[d] == shape[d]) idx[d++] = 0;
        if (d == shape.size()) break;
    }
}

inline void check_budget(const std::vector<std::size_t>& shape) {
    double total = 1.0;
    for (std::size_t s : shape) total *= static_cast<double>(s);
    if (total > kGridBudget)
        throw TooLarge("grid of " + std::to_string(total) + " points exceeds the budget");
}

}  // namespace detail

/// max of B over the product grid (k uniform points per axis plus breakpoints).
inline GridReport border_grid_max(const ReducedForm& x, std::size_t k) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = x.size();
    std::vector<detail::Axis> axes;
    std::vector<std::size_t> shape;
    for (std::size_t i = 0; i < n; ++i) {
        axes.push_back(detail::make_axis(x[i], 0.0, k));
        shape.push_back(axes.back().u.size());
    }
    detail::check_budget(shape);
    GridReport rep;
    rep.points = shape;
    rep.max_B = -kInf;
    detail::odometer(shape, [&](const std::vector<std::size_t>& idx) {
        double prod = 1.0, sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            prod *= axes[i].u[idx[i]];
            sum += axes[i].tail[idx[i]];
        }
        if (prod + sum > rep.max_B) {
            rep.max_B = prod + sum;
            rep.argmax.resize(n);
            for (std::size_t i = 0; i < n; ++i) rep.argmax[i] = axes[i].u[idx[i]];
        }
    });
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

/// G(s) = s^n + max { sum int_{u_i}^1 x_i : prod u_i = s^n }, searching a grid
/// over the first n-1 coordinates and solving the last one exactly.
inline double g_of_s(const ReducedForm& x, double s, std::size_t k) {
    const std::size_t n = x.size();
    const double target = std::pow(std::clamp(s, 0.0, 1.0), static_cast<double>(n));
    if (n == 1) return target + x[0].integral(std::clamp(s, 0.0, 1.0), 1.0);
    std::vector<detail::Axis> axes;
    std::vector<std::size_t> shape;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        axes.push_back(detail::make_axis(x[i], target, k));
        shape.push_back(axes.back().u.size());
    }
    detail::check_budget(shape);
    const MonotoneFn& last = x[n - 1];
    double best = -kInf;
    detail::odometer(shape, [&](const std::vector<std::size_t>& idx) {
        double prod = 1.0, sum = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            prod *= axes[i].u[idx[i]];
            sum += axes[i].tail[idx[i]];
        }
        double un = 0.0;
        if (target > 0.0) {
            if (prod < target) return;
            un = target / prod;
        }
        best = std::max(best, sum + last.integral(std::min(un, 1.0), 1.0));
    });
    return target + best;
}

struct PerturbationReport {
    bool passed = true;
    std::size_t trials = 0;
    std::size_t effective = 0;  // trials with a nonzero admissible step
    double best_gain = -kInf;
};

namespace detail {

struct SlopeRange {
    double lo = kInf, hi = -kInf;
};

inline SlopeRange slope_range(const DeltaPath& d, double a, double b) {
    std::vector<double> pts = numerics::linspace(a, b, 65);
    for (double t : d.times())
        if (t > a && t < b) pts.push_back(t);
    numerics::sort_unique(pts, 1e-13);
    SlopeRange r;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double s = (d(pts[k + 1]) - d(pts[k])) / (pts[k + 1] - pts[k]);
        r.lo = std::min(r.lo, s);
        r.hi = std::max(r.hi, s);
    }
    return r;
}

/// int_a^b e^{-t} int_{d(t)}^{d(t) + sign h(t)} R_partial(i, tau, t) dtau dt.
inline double tent_gain(const Environment& env, std::size_t i, const DeltaPath& d, double a,
                        double b, double eps, double sign) {
    const double m = 0.5 * (a + b);
    auto h = [&](double t) { return eps * (1.0 - std::abs(t - m) / (m - a)); };
    auto outer = [&](double t) {
        const double lo = std::clamp(d(t), 0.0, t);
        const double hi = std::clamp(lo + sign * h(t), 0.0, t);
        const double inner = numerics::integrate(
            [&](double tau) { return env.R_partial(i, std::clamp(tau, 0.0, t), t); },
            std::min(lo, hi), std::max(lo, hi), 1e-10, 8);
        return std::exp(-t) * (hi >= lo ? inner : -inner);
    };
    return numerics::integrate(outer, a, m, 1e-10, 8) + numerics::integrate(outer, m, b, 1e-10, 8);
}

}  // namespace detail

/// Random tent-shaped mass shifts between two bidders (sum of deltas kept)
/// and removals from one bidder, each scaled so slopes stay in [0,1]. Fails
/// when any of them raises revenue by more than 1e-7.
inline PerturbationReport revenue_perturbation_test(const Environment& env,
                                                    const std::vector<DeltaPath>& paths,
                                                    std::size_t trials, std::uint64_t seed,
                                                    double horizon_cap = 8.0) {
    const std::size_t n = paths.size();
    if (env.size() != n) throw InputError("environment and reduced form sizes differ");
    // Binding stretch: sum delta_i(t) = t.
    double horizon = std::min(horizon_cap, paths.front().t_max());
    for (double t : numerics::linspace(0.0, horizon, 4001)) {
        double s = 0.0;
        for (const auto& p : paths) s += p(t);
        if (s < t - 1e-7) {
            horizon = t;
            break;
        }
    }
    PerturbationReport rep;
    auto gen = rng::substream(seed, 0x9e27ULL, 0);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        ++rep.trials;
        double a = gen.uniform() * horizon, b = gen.uniform() * horizon;
        if (a > b) std::swap(a, b);
        const double eps0 = (0.01 + 0.2 * gen.uniform()) * (b - a);
        const bool removal = n == 1 || gen.uniform() < 1.0 / 3.0;
        const std::size_t i = static_cast<std::size_t>(gen.uniform() * static_cast<double>(n)) % n;
        std::size_t j = i;
        if (n > 1) {
            j = static_cast<std::size_t>(gen.uniform() * static_cast<double>(n - 1)) % (n - 1);
            if (j >= i) ++j;
        }
        if (b - a < 1e-6) continue;
        const double m = 0.5 * (a + b);
        double smax;  // admissible tent slope
        if (removal) {
            const auto r1 = detail::slope_range(paths[i], a, m), r2 = detail::slope_range(paths[i], m, b);
            smax = std::min(r1.lo, 1.0 - r2.hi);
        } else {
            const auto gi1 = detail::slope_range(paths[i], a, m), gi2 = detail::slope_range(paths[i], m, b);
            const auto lj1 = detail::slope_range(paths[j], a, m), lj2 = detail::slope_range(paths[j], m, b);
            smax = std::min({1.0 - gi1.hi, gi2.lo, lj1.lo, 1.0 - lj2.hi});
        }
        smax -= 1e-9;
        const double eps = std::min(eps0, smax * 0.5 * (b - a));
        if (!(eps > 1e-9)) continue;
        ++rep.effective;
        double gain = detail::tent_gain(env, i, paths[i], a, b, eps, removal ? -1.0 : 1.0);
        if (!removal) gain += detail::tent_gain(env, j, paths[j], a, b, eps, -1.0);
        rep.best_gain = std::max(rep.best_gain, gain);
        if (gain > 1e-7) rep.passed = false;
    }
    return rep;
}

inline PerturbationReport revenue_perturbation_test(const Environment& env, const ReducedForm& x,
                                                    std::size_t trials, std::uint64_t seed) {
    std::vector<DeltaPath> paths;
    for (const auto& xi : x) paths.push_back(delta_transform(xi, env.t_max()));
    return revenue_perturbation_test(env, paths, trials, seed);
}

}  // namespace bordercurve
