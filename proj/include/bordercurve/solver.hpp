#pragma once

// Revenue-optimal reduced forms via the delta parametrization: solve the
// marginal-revenue equalization system along the principal curve, locate the
// cutoff time T and continue past it by freezing (extremal optimum) or by
// following the zero-marginal-revenue path (fractional optimum).

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "allocation.hpp"
#include "environments.hpp"
#include "errors.hpp"
#include "monotone.hpp"
#include "numerics.hpp"
#include "transforms.hpp"

namespace bordercurve {

/// Low/High: delta pinned at 0 or t. Kink: delta sits where R_partial jumps
/// (a kink in the value quantile), so the equation only holds one-sidedly.
enum class Clamp : int { Low = -1, Interior = 0, High = 1, Kink = 2 };

struct FocSolution {
    std::vector<double> delta;
    double p = 0.0;
    std::vector<Clamp> clamp;
};

namespace detail {

inline void check_bracket(const Environment& env, std::size_t i, double t, double r0, double rt) {
    const double scale = std::max({1.0, std::abs(r0), std::abs(rt)});
    if (rt > r0 + 1e-12 * scale)
        throw RegularityViolation("marginal revenue of bidder " + std::to_string(i + 1) +
                                  " increases in delta at t = " + std::to_string(t) + " (" +
                                  family_name(env.bidder(i).family) + ")");
}

/// Root of R_partial(i, ., t) = p on [0, t], clamped to the ends.
inline double clamped_root(const Environment& env, std::size_t i, double t, double p, double r0,
                           double rt, double xtol) {
    if (p >= r0) return 0.0;
    if (p <= rt) return t;
    return numerics::bisect_decreasing([&](double d) { return env.R_partial(i, d, t) - p; }, 0.0, t,
                                       xtol);
}

}  // namespace detail

/// Solves R_partial(i, delta_i, t) = p for all interior i with sum delta_i = t.
inline FocSolution solve_foc_at(const Environment& env, double t, double tol = 1e-11) {
    const std::size_t n = env.size();
    FocSolution sol;
    sol.delta.assign(n, 0.0);
    sol.clamp.assign(n, Clamp::Interior);
    t = std::max(t, 0.0);
    std::vector<double> r0(n), rt(n);
    for (std::size_t i = 0; i < n; ++i) {
        r0[i] = env.R_partial(i, 0.0, t);
        rt[i] = env.R_partial(i, t, t);
        detail::check_bracket(env, i, t, r0[i], rt[i]);
    }
    double lo = *std::min_element(rt.begin(), rt.end());
    double hi = *std::max_element(r0.begin(), r0.end());
    if (t == 0.0 || n == 0) {
        sol.p = hi;  // right limit of p_sharp at t = 0
        for (std::size_t i = 0; i < n; ++i)
            if (r0[i] != sol.p) sol.clamp[i] = r0[i] < sol.p ? Clamp::Low : Clamp::High;
        return sol;
    }
    const double xtol = std::min(tol, 1e-13) * std::max(1.0, t);
    auto deltas = [&](double p, std::vector<double>& d) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = detail::clamped_root(env, i, t, p, r0[i], rt[i], xtol);
            s += d[i];
        }
        return s;
    };
    std::vector<double> d_lo(n), d_hi(n), d_mid(n);
    double s_lo = deltas(lo, d_lo);  // >= t
    double s_hi = deltas(hi, d_hi);  // <= t
    const double stop = 1e-13 * std::max(1.0, t);
    for (int it = 0; it < 300 && s_lo - s_hi > stop; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        const double s = deltas(mid, d_mid);
        if (s >= t) {
            lo = mid;
            s_lo = s;
            d_lo.swap(d_mid);
        } else {
            hi = mid;
            s_hi = s;
            d_hi.swap(d_mid);
        }
    }
    // Interpolate between the bracketing solutions so the budget holds exactly;
    // this also resolves coordinates whose marginal revenue is flat in delta.
    const double w = s_lo - s_hi > 0.0 ? (s_lo - t) / (s_lo - s_hi) : 0.5;
    sol.p = lo + w * (hi - lo);
    for (std::size_t i = 0; i < n; ++i) {
        sol.delta[i] = std::clamp(d_lo[i] + w * (d_hi[i] - d_lo[i]), 0.0, t);
        if (sol.p >= r0[i])
            sol.clamp[i] = Clamp::Low;
        else if (sol.p <= rt[i])
            sol.clamp[i] = Clamp::High;
        else if (std::abs(env.R_partial(i, sol.delta[i], t) - sol.p) >
                 1e-6 * std::max(1.0, std::abs(sol.p)))
            sol.clamp[i] = Clamp::Kink;
    }
    if (std::abs(s_lo + w * (s_hi - s_lo) - t) > std::max(tol, 1e-9) * std::max(1.0, t))
        throw InternalInconsistency("solve_foc_at: budget not met at t = " + std::to_string(t));
    return sol;
}

/// delta_i with R_partial(i, delta_i, t) = 0, clamped to [0, t].
inline std::vector<double> zero_revenue_deltas(const Environment& env, double t) {
    std::vector<double> d(env.size());
    const double xtol = 1e-14 * std::max(1.0, t);
    for (std::size_t i = 0; i < env.size(); ++i) {
        const double r0 = env.R_partial(i, 0.0, t), rt = env.R_partial(i, t, t);
        detail::check_bracket(env, i, t, r0, rt);
        d[i] = detail::clamped_root(env, i, t, 0.0, r0, rt, xtol);
    }
    return d;
}

enum class Regime { Extremal, Fractional, Unsupported };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Extremal: return "extremal";
        case Regime::Fractional: return "fractional";
        case Regime::Unsupported: return "unsupported";
    }
    return "?";
}

struct SolverOptions {
    std::size_t base_nodes = 2048;
    double refine_tol = 1e-8;
    std::size_t max_nodes = std::size_t{1} << 17;
    double slope_tol = 1e-8;
    double root_tol = 1e-11;
};

struct SolverPath {
    std::shared_ptr<const Environment> env;
    std::vector<double> t;                        // nodes
    std::vector<double> p_sharp;                  // per node
    std::vector<std::vector<double>> sharp;       // [node][bidder]
    std::vector<std::vector<double>> star;        // [node][bidder]
    std::vector<std::vector<Clamp>> clamp;        // [node][bidder]
    std::vector<DeltaPath> delta_sharp;           // per bidder
    std::vector<DeltaPath> delta_dagger;          // per bidder on [T, t_max]; empty if T infinite
    std::vector<DeltaPath> delta_star;            // per bidder
    std::optional<double> T;                      // nullopt: infinite
    Regime regime = Regime::Extremal;
    std::vector<std::string> warnings;

    std::size_t size() const { return delta_sharp.size(); }
    double t_max() const { return t.back(); }
    bool before_cutoff(double tt) const { return !T || tt < *T; }
};

/// 1 + geometric nodes on [1e-6, 1) + uniform nodes on [1, t_max].
inline std::vector<double> base_time_grid(double t_max, std::size_t nodes) {
    nodes = std::max<std::size_t>(nodes, 16);
    std::vector<double> g{0.0};
    const double split = std::min(1.0, t_max / 4.0);
    const std::size_t geo = nodes / 8, uni = nodes - geo - 1;
    for (std::size_t k = 0; k < geo; ++k)
        g.push_back(1e-6 * split * std::pow(1e6, static_cast<double>(k) / static_cast<double>(geo)));
    for (double x : numerics::linspace(split, t_max, uni)) g.push_back(x);
    numerics::sort_unique(g, 1e-15);
    return g;
}

namespace detail {

struct NodeData {
    FocSolution foc;
    std::vector<double> dagger;  // empty before T
};

inline double max_interp_error(const std::vector<double>& a, const std::vector<double>& m,
                               const std::vector<double>& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(m[i] - 0.5 * (a[i] + b[i])));
    return e;
}

}  // namespace detail

inline SolverPath solve_path(const Environment& env_in, const SolverOptions& opt = {}) {
    auto env = std::make_shared<const Environment>(env_in);
    const Environment& E = *env;
    const std::size_t n = E.size();
    if (n == 0) throw InputError("environment has no bidders");
    const double t_max = E.t_max();
    SolverPath path;
    path.env = env;

    // Cutoff: p_sharp(t) <= 0 exactly when the zero-revenue deltas fit the budget.
    std::vector<double> grid = base_time_grid(t_max, opt.base_nodes);
    auto gap = [&](double t) {
        double s = 0.0;
        for (double d : zero_revenue_deltas(E, t)) s += d;
        return s - t;
    };
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (gap(grid[k]) <= 0.0) {
            double lo = grid[k - 1], hi = grid[k];
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
                const double mid = lo + 0.5 * (hi - lo);
                if (mid <= lo || mid >= hi) break;
                (gap(mid) > 0.0 ? lo : hi) = mid;
            }
            path.T = hi;
            break;
        }
    }
    if (path.T && *path.T >= t_max * (1.0 - 1e-12)) path.T.reset();
    if (path.T) {
        grid.push_back(*path.T);
        numerics::sort_unique(grid, 1e-14);
        // keep T itself as the node value
        const auto it = std::min_element(grid.begin(), grid.end(), [&](double a, double b) {
            return std::abs(a - *path.T) < std::abs(b - *path.T);
        });
        *it = *path.T;
    }

    auto eval = [&](double t) {
        detail::NodeData nd;
        nd.foc = solve_foc_at(E, t, opt.root_tol);
        if (path.T && t >= *path.T) nd.dagger = zero_revenue_deltas(E, t);
        return nd;
    };
    std::vector<detail::NodeData> data;
    data.reserve(grid.size());
    for (double t : grid) data.push_back(eval(t));

    // Regime from the zero-revenue path after T.
    if (path.T) {
        bool decreasing = true, increasing = true;
        const detail::NodeData* prev = nullptr;
        double prev_t = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (data[k].dagger.empty()) continue;
            if (prev)
                for (std::size_t i = 0; i < n; ++i) {
                    const double dd = data[k].dagger[i] - prev->dagger[i];
                    if (dd > opt.slope_tol) decreasing = false;
                    if (dd < -opt.slope_tol || dd > (1.0 + opt.slope_tol) * (grid[k] - prev_t) + 1e-12)
                        increasing = false;
                }
            prev = &data[k];
            prev_t = grid[k];
        }
        path.regime = decreasing ? Regime::Extremal
                                 : (increasing ? Regime::Fractional : Regime::Unsupported);
        if (path.regime == Regime::Unsupported)
            path.warnings.push_back("zero-revenue path after T is neither decreasing nor "
                                    "increasing with slope at most one");
    }

    std::vector<double> frozen;
    if (path.T) frozen = solve_foc_at(E, *path.T, opt.root_tol).delta;
    auto star_of = [&](double t, const detail::NodeData& nd) {
        if (!path.T || t < *path.T) return nd.foc.delta;
        if (path.regime == Regime::Fractional) return nd.dagger;
        return frozen;
    };

    // Adaptive refinement: split any interval whose midpoint deviates from
    // the affine interpolation of delta_sharp or delta_star.
    std::vector<double> T_nodes{grid.front()};
    std::vector<detail::NodeData> T_data{data.front()};
    bool capped = false;
    std::size_t budget = opt.max_nodes;
    struct Frame {
        double a, b;
        detail::NodeData da, db;
        int depth;
    };
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        std::vector<Frame> stack{{grid[k], grid[k + 1], data[k], data[k + 1], 0}};
        while (!stack.empty()) {
            Frame f = std::move(stack.back());
            stack.pop_back();
            const double m = 0.5 * (f.a + f.b);
            bool split = false;
            detail::NodeData dm;
            if (f.depth < 40 && f.b - f.a > 1e-10 && T_nodes.size() + stack.size() < budget) {
                dm = eval(m);
                const double e1 = detail::max_interp_error(f.da.foc.delta, dm.foc.delta, f.db.foc.delta);
                const double e2 = detail::max_interp_error(star_of(f.a, f.da), star_of(m, dm),
                                                           star_of(f.b, f.db));
                split = std::max(e1, e2) > opt.refine_tol;
            } else if (f.depth >= 40 || T_nodes.size() + stack.size() >= budget) {
                capped = true;
            }
            if (split) {
                // Push right half first so the left half is processed next.
                stack.push_back({m, f.b, dm, f.db, f.depth + 1});
                stack.push_back({f.a, m, f.da, dm, f.depth + 1});
            } else {
                T_nodes.push_back(f.b);
                T_data.push_back(std::move(f.db));
            }
        }
    }
    if (capped) path.warnings.push_back("time-grid refinement hit its node cap");

    path.t = std::move(T_nodes);
    const std::size_t K = path.t.size();
    path.p_sharp.resize(K);
    path.sharp.resize(K);
    path.star.resize(K);
    path.clamp.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        path.p_sharp[k] = T_data[k].foc.p;
        path.sharp[k] = T_data[k].foc.delta;
        path.clamp[k] = T_data[k].foc.clamp;
        path.star[k] = star_of(path.t[k], T_data[k]);
    }

    // Monotonicity of the candidate path.
    for (std::size_t k = 1; k < K; ++k) {
        const double scale = std::max(1.0, std::abs(path.p_sharp[k - 1]));
        if (path.p_sharp[k] > path.p_sharp[k - 1] + 1e-10 * scale)
            throw RegularityViolation("common marginal revenue increases at t = " +
                                      std::to_string(path.t[k]));
        for (std::size_t i = 0; i < n; ++i)
            if (path.sharp[k][i] < path.sharp[k - 1][i] - 1e-8)
                throw RegularityViolation("delta of bidder " + std::to_string(i + 1) +
                                          " decreases at t = " + std::to_string(path.t[k]));
    }

    // Per-bidder paths, projected onto nondecreasing slopes in [0, 1].
    auto project = [&](std::vector<double> d, const std::vector<double>& t) {
        d[0] = 0.0;
        for (std::size_t k = 1; k < d.size(); ++k)
            d[k] = std::clamp(d[k], d[k - 1], d[k - 1] + (t[k] - t[k - 1]));
        return d;
    };
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> ds(K), dst(K);
        for (std::size_t k = 0; k < K; ++k) {
            ds[k] = path.sharp[k][i];
            dst[k] = path.star[k][i];
        }
        path.delta_sharp.emplace_back(path.t, project(ds, path.t));
        path.delta_star.emplace_back(path.t, project(dst, path.t));
        if (path.T) {
            std::vector<double> tt, dd;
            for (std::size_t k = 0; k < K; ++k)
                if (path.t[k] >= *path.T) {
                    tt.push_back(path.t[k]);
                    dd.push_back(T_data[k].dagger.empty() ? path.sharp[k][i] : T_data[k].dagger[i]);
                }
            if (tt.size() >= 2) path.delta_dagger.emplace_back(std::move(tt), std::move(dd));
        }
    }
    if (path.delta_dagger.size() != n) path.delta_dagger.clear();
    return path;
}

inline ReducedForm optimal_reduced_form(const SolverPath& path) {
    if (path.regime == Regime::Unsupported)
        throw DomainError("optimal reduced form is not available in the unsupported regime");
    std::vector<MonotoneFn> xs;
    for (const auto& d : path.delta_star) xs.push_back(delta_to_cdf(d));
    return ReducedForm(std::move(xs), false);
}

/// Reduced form of the unconstrained candidate path delta_sharp.
inline ReducedForm sharp_reduced_form(const SolverPath& path) {
    std::vector<MonotoneFn> xs;
    for (const auto& d : path.delta_sharp) xs.push_back(delta_to_cdf(d));
    return ReducedForm(std::move(xs), false);
}

/// Principal virtual value p_sharp((delta_sharp_i)^{-1}(-ln u)).
inline double pvv(const SolverPath& path, std::size_t i, double u) {
    const DeltaPath& d = path.delta_sharp.at(i);
    const double u_min = std::exp(-d.values().back());
    const double p_end = path.p_sharp.back();
    if (u < u_min) return p_end - 1e-6 * (1.0 - u / u_min);
    const double t = d.inverse(u >= 1.0 ? 0.0 : -std::log(u));
    if (!std::isfinite(t)) return p_end;
    return solve_foc_at(*path.env, t).p;
}

/// pvv as a MonotoneFn with knots at the images of the time nodes.
inline MonotoneFn pvv_fn(const SolverPath& path, std::size_t i) {
    const std::shared_ptr<const Environment> E = path.env;  // scores may outlive the path
    const DeltaPath& dp = path.delta_sharp.at(i);
    const auto& t = dp.times();
    const auto& d = dp.values();
    const std::size_t K = t.size();
    const double u_min = std::exp(-d.back());
    const double p_end = path.p_sharp.back();
    // Node prices are exact only to root-finder precision; where the true
    // decrease is below that, nudge them so the score stays strictly increasing.
    std::vector<double> price = path.p_sharp;
    for (std::size_t k = K - 1; k-- > 0;)
        if (!(price[k] > price[k + 1]))
            price[k] = price[k + 1] + 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(price[k + 1]));

    // Build from u = u_min upward, i.e. from the last node backward.
    std::vector<double> knots{0.0};
    std::vector<Piece> pieces;
    if (u_min > 0.0) {
        knots.push_back(u_min);
        pieces.push_back(Piece::affine(p_end - 1e-6, 1e-6 / u_min));
    }
    for (std::size_t k = K - 1; k > 0; --k) {
        const double d0 = d[k - 1], d1 = d[k];
        if (!(d1 > d0)) continue;  // flat segment: jump in the score
        const double ua = std::exp(-d1), ub = std::exp(-d0);
        const double t0 = t[k - 1], t1 = t[k];
        const double p0 = price[k - 1], p1 = price[k];
        if (numerics::same_abscissa(ua, ub)) continue;
        // On interior stretches the marginal revenue along the interpolated
        // path reproduces p_sharp; where it does not match the nodes (kinks
        // of the path) fall back to interpolating p_sharp itself.
        auto along = [E, i, d0, d1, t0, t1](double u) {
            const double dl = std::clamp(-std::log(u), d0, d1);
            const double tt = t0 + (dl - d0) / (d1 - d0) * (t1 - t0);
            return E->R_partial(i, std::clamp(dl, 0.0, tt), tt);
        };
        // Endpoint mismatch must stay small against the price change across the
        // piece, or neighbouring pieces can overlap deep in the tail.
        const double ptol = std::min(1e-9 * std::max({1.0, std::abs(p0), std::abs(p1)}), 1e-3 * std::abs(p0 - p1));
        const bool interior = path.clamp[k - 1][i] == Clamp::Interior &&
                              path.clamp[k][i] == Clamp::Interior &&
                              std::abs(along(ua) - p1) <= ptol && std::abs(along(ub) - p0) <= ptol &&
                              along(0.5 * (ua + ub)) <= along(ub) && along(0.5 * (ua + ub)) >= along(ua);
        Piece piece = interior ? Piece::callable(along)
                               : Piece::callable([d0, d1, p0, p1](double u) {
                                     const double w = (std::clamp(-std::log(u), d0, d1) - d0) / (d1 - d0);
                                     if (p0 > 0.0 && p1 > 0.0) return p0 * std::pow(p1 / p0, w);
                                     return p0 + w * (p1 - p0);
                                 });
        knots.push_back(ub);
        pieces.push_back(std::move(piece));
    }
    if (knots.back() < 1.0) {
        if (pieces.empty()) {
            knots.push_back(1.0);
            pieces.push_back(Piece::affine(p_end - 1e-6, 1e-6));
        } else {
            knots.back() = 1.0;
        }
    }
    knots.back() = 1.0;
    return MonotoneFn(std::move(knots), std::move(pieces), price.front());
}

inline std::vector<MonotoneFn> pvv_scores(const SolverPath& path) {
    std::vector<MonotoneFn> q;
    for (std::size_t i = 0; i < path.size(); ++i) q.push_back(pvv_fn(path, i));
    return q;
}

/// Score rule implementing the optimum. In the fractional regime the scores
/// are shifted by a common constant so the highest-score bidder always wins,
/// and the winner receives r_i = x*_i / x_sharp_i below e^{-delta*_i(T)}.
inline ScoreRule optimal_fractions(const SolverPath& path) {
    std::vector<MonotoneFn> q = pvv_scores(path);
    if (path.regime != Regime::Fractional) return ScoreRule(std::move(q));
    double lowest = 0.0;
    for (const auto& qi : q) lowest = std::min(lowest, qi(0.0));
    std::vector<MonotoneFn> shifted;
    for (const auto& qi : q) {
        std::vector<Piece> ps;
        for (std::size_t k = 0; k < qi.num_pieces(); ++k) {
            const Piece p = qi.piece(k);
            ps.push_back(Piece::callable([p, lowest](double u) { return p(u) - lowest; }));
        }
        shifted.emplace_back(qi.knots(), std::move(ps), qi(1.0) - lowest);
    }
    const ReducedForm xstar = optimal_reduced_form(path);
    const ReducedForm xsharp = sharp_reduced_form(path);
    std::vector<MonotoneFn> r;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double cut = std::exp(-path.delta_star[i](*path.T));
        auto xs = std::make_shared<const MonotoneFn>(xstar[i]);
        auto xh = std::make_shared<const MonotoneFn>(xsharp[i]);
        std::vector<double> knots = xs->knots();
        knots.insert(knots.end(), xh->knots().begin(), xh->knots().end());
        knots.erase(std::remove_if(knots.begin(), knots.end(), [&](double u) { return u >= cut; }),
                    knots.end());
        knots.push_back(cut);
        knots.push_back(1.0);
        knots.push_back(0.0);
        numerics::sort_unique(knots);
        std::vector<Piece> ps;
        for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
            if (knots[k] >= cut - kAbscissaTol) {
                ps.push_back(Piece::constant(1.0));
                continue;
            }
            ps.push_back(Piece::callable([xs, xh](double u) {
                const double den = (*xh)(u);
                if (!(den > 0.0)) return 0.0;
                return std::clamp((*xs)(u) / den, 0.0, 1.0);
            }));
        }
        r.emplace_back(std::move(knots), std::move(ps), 1.0);
    }
    return ScoreRule(std::move(shifted), std::move(r));
}

/// Induced form of the score rule with Myerson virtual values as scores.
inline ReducedForm myerson_reduced_form(const Environment& env) {
    std::vector<MonotoneFn> q;
    for (std::size_t i = 0; i < env.size(); ++i) q.push_back(env.mvv_fn(i));
    return induced_reduced_form_exact(ScoreRule(std::move(q)));
}

/// sup over nodes before T of the spread of marginal revenues among
/// interior bidders, evaluated on delta_star.
inline double mre_residual(const SolverPath& path) {
    const Environment& E = *path.env;
    double worst = 0.0;
    for (std::size_t k = 0; k < path.t.size(); ++k) {
        const double t = path.t[k];
        if (!path.before_cutoff(t) || t <= 0.0) continue;
        // Each interior bidder contributes the range of its one-sided marginal
        // revenues (a point unless delta sits on a kink of a tabulated value);
        // the residual is how far apart those ranges are.
        double max_lo = -kInf, min_hi = kInf;
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (path.clamp[k][i] != Clamp::Interior) continue;
            const double d = std::clamp(path.delta_star[i](t), 0.0, t);
            const double h = 1e-10 * std::max(1.0, t);
            double lo = E.R_partial(i, d, t), hi = lo;
            for (double side : {std::max(0.0, d - h), std::min(t, d + h)}) {
                const double r = E.R_partial(i, side, t);
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
            max_lo = std::max(max_lo, lo);
            min_hi = std::min(min_hi, hi);
        }
        if (max_lo > min_hi) worst = std::max(worst, max_lo - min_hi);
    }
    return worst;
}

/// Regularity margins along delta_sharp up to the cutoff.
inline RegularityReport regularity_report(const SolverPath& path) {
    std::vector<double> t;
    std::vector<std::vector<double>> d;
    for (std::size_t k = 0; k < path.t.size(); ++k) {
        if (!path.before_cutoff(path.t[k]) && !(path.T && path.t[k] == *path.T)) continue;
        t.push_back(path.t[k]);
        d.push_back(path.sharp[k]);
    }
    return regularity_report(*path.env, t, d);
}

inline void write_path_csv(std::ostream& os, const SolverPath& path) {
    const std::size_t n = path.size();
    os << "t,p_sharp";
    for (std::size_t i = 0; i < n; ++i) os << ",delta_sharp_" << i + 1;
    for (std::size_t i = 0; i < n; ++i) os << ",delta_star_" << i + 1;
    os << '\n' << std::setprecision(12);
    for (std::size_t k = 0; k < path.t.size(); ++k) {
        os << path.t[k] << ',' << path.p_sharp[k];
        for (std::size_t i = 0; i < n; ++i) os << ',' << path.delta_sharp[i].values()[k];
        for (std::size_t i = 0; i < n; ++i) os << ',' << path.delta_star[i].values()[k];
        os << '\n';
    }
}

/// Rows bidder,u,x_star,pvv,fraction on a uniform u grid.
inline void write_allocation_csv(std::ostream& os, const SolverPath& path, const ReducedForm& xstar,
                                 const ScoreRule& rule, std::size_t points = 1001) {
    os << "bidder,u,x_star,pvv,fraction\n" << std::setprecision(12);
    const std::vector<MonotoneFn> q = pvv_scores(path);
    for (std::size_t i = 0; i < path.size(); ++i)
        for (double u : numerics::linspace(0.0, 1.0, points))
            os << i + 1 << ',' << u << ',' << xstar[i](u) << ',' << q[i](u) << ','
               << rule.fraction_at(i, u) << '\n';
}

}  // namespace bordercurve
