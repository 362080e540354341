#pragma once

// Random fixtures shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <bordercurve/bordercurve.hpp>

namespace testsupport {

using namespace bordercurve;

/// Piecewise-affine CDF with 1..4 interior knots and occasional jumps.
inline MonotoneFn random_cdf(rng::SplitMix64& g) {
    const std::size_t m = 1 + static_cast<std::size_t>(g.uniform() * 4.0);
    std::vector<double> u{0.0};
    for (std::size_t k = 0; k < m; ++k) u.push_back(0.05 + 0.9 * g.uniform());
    u.push_back(1.0);
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end(), [](double a, double b) { return b - a < 1e-3; }), u.end());
    if (u.back() != 1.0) u.back() = 1.0;
    // 2 values per knot (left, right), nondecreasing, ending at 1.
    std::vector<double> v(2 * u.size());
    for (double& x : v) x = g.uniform();
    std::sort(v.begin(), v.end());
    v.back() = 1.0;
    std::vector<Breakpoint> bps;
    for (std::size_t k = 0; k < u.size(); ++k) {
        double left = v[2 * k], right = v[2 * k + 1];
        if (g.uniform() < 0.5) left = right;  // continuous here
        if (k == 0) left = right;
        bps.push_back({u[k], left, right});
    }
    bps.back().left = std::min(bps.back().left, 1.0);
    bps.back().right = 1.0;
    return MonotoneFn::from_breakpoints(bps);
}

/// Random reduced form whose components are scaled towards feasibility by a
/// random factor, so both verdicts occur.
inline ReducedForm random_form(rng::SplitMix64& g, std::size_t n) {
    std::vector<MonotoneFn> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(random_cdf(g));
    return ReducedForm(std::move(xs));
}

/// Extremal forms from random strict score rules.
inline ReducedForm random_extremal(rng::SplitMix64& g, std::size_t n) {
    std::vector<MonotoneFn> q;
    for (std::size_t i = 0; i < n; ++i) {
        const double shift = 0.6 * g.uniform();
        const double expo = 0.5 + 2.0 * g.uniform();
        q.push_back(MonotoneFn({0.0, 1.0}, {Piece::terms({{-shift, 0.0}, {1.0, expo}})}));
    }
    return induced_reduced_form_exact(ScoreRule(std::move(q)));
}

/// One single-bidder environment per revenue family.
inline std::vector<Environment> family_envs() {
    return {
        Environment({BidderSpec::linear()}),
        Environment({BidderSpec::linear(Dist::power_mvv(0.5))}),
        Environment({BidderSpec::ev_power(0.5)}),
        Environment({BidderSpec::ev_h(2.5, Dist::power_mvv(0.7))}),
        Environment({BidderSpec::cra_quadratic(0.7)}),
        Environment({BidderSpec::cra_gul(1.5)}),
    };
}

/// Largest deviation on a uniform grid, skipping points within `gap` of a knot
/// of either function.
inline double sup_error(const MonotoneFn& a, const MonotoneFn& b, std::size_t points = 10001,
                        double gap = 1e-6) {
    double e = 0.0;
    for (double u : numerics::linspace(0.0, 1.0, points)) {
        bool near = false;
        for (const auto* f : {&a, &b})
            for (double k : f->knots())
                if (std::abs(u - k) < gap && k > 0.0 && k < 1.0) near = true;
        if (!near) e = std::max(e, std::abs(a(u) - b(u)));
    }
    return e;
}

}  // namespace testsupport
