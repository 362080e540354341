#pragma once

// Named reduced forms and environments with known answers, shared by the
// tests, the acceptance suite and the `verify` subcommand.

#include <cmath>
#include <cstddef>
#include <vector>

#include "environments.hpp"
#include "monotone.hpp"

namespace bordercurve::fixtures {

/// 0 on [0,1/4), u on [1/4,1/2), 1/2 on [1/2,3/4), u on [3/4,1].
inline MonotoneFn staircase_form() {
    return MonotoneFn({0.0, 0.25, 0.5, 0.75, 1.0},
                      {Piece::constant(0.0), Piece::affine(0.0, 1.0), Piece::constant(0.5),
                       Piece::affine(0.0, 1.0)},
                      1.0);
}

/// Partner of staircase_form making the pair extremal: max{1/4,u} on
/// [0,1/2), 3/4 on [1/2,3/4), u on [3/4,1].
inline MonotoneFn staircase_partner() {
    return MonotoneFn({0.0, 0.25, 0.5, 0.75, 1.0},
                      {Piece::constant(0.25), Piece::affine(0.0, 1.0), Piece::constant(0.75),
                       Piece::affine(0.0, 1.0)},
                      1.0);
}

inline ReducedForm staircase_pair() { return ReducedForm({staircase_form(), staircase_partner()}); }

/// x_i(u) = u^{1/alpha_i - 1}; feasible iff sum alpha <= 1, extremal iff = 1.
inline ReducedForm power_forms(const std::vector<double>& alphas) {
    std::vector<MonotoneFn> xs;
    for (double a : alphas) xs.push_back(MonotoneFn::power(1.0, 1.0 / a - 1.0));
    return ReducedForm(std::move(xs), false);
}

inline Environment ev_power_env(const std::vector<double>& betas, double t_max = 30.0) {
    std::vector<BidderSpec> bs;
    for (double b : betas) bs.push_back(BidderSpec::ev_power(b));
    return Environment(std::move(bs), t_max);
}

inline Environment linear_uniform_env(std::size_t n) {
    return Environment(std::vector<BidderSpec>(n, BidderSpec::linear()));
}

/// Uniform cra bidders: `neutral` with g(x) = x first, then `averse` with g(x) = x^2.
inline Environment cra_mixed_env(std::size_t neutral, std::size_t averse) {
    std::vector<BidderSpec> bs(neutral, BidderSpec::cra_quadratic(0.0));
    bs.insert(bs.end(), averse, BidderSpec::cra_quadratic(1.0));
    return Environment(std::move(bs));
}

}  // namespace bordercurve::fixtures

namespace bordercurve::reference {

/// kappa = 1 / sum_i (1/beta_i - 1)^{-1} for ev-power bidders.
inline double ev_power_kappa(const std::vector<double>& betas) {
    double s = 0.0;
    for (double b : betas) s += 1.0 / (1.0 / b - 1.0);
    return 1.0 / s;
}
inline double ev_power_delta(const std::vector<double>& betas, std::size_t i, double t) {
    return ev_power_kappa(betas) / (1.0 / betas[i] - 1.0) * t;
}
inline double ev_power_price(const std::vector<double>& betas, double t) {
    return 2.0 * std::exp(-(1.0 + ev_power_kappa(betas)) * t);
}
inline double ev_power_pvv(const std::vector<double>& betas, std::size_t i, double u) {
    const double k = ev_power_kappa(betas);
    return 2.0 * std::pow(u, (1.0 + 1.0 / k) * (1.0 / betas[i] - 1.0));
}

// Two risk-neutral bidders and one with g(x) = x^2, all uniform.
inline double cra_2n1a_cutoff() { return std::log(12.0); }
inline double cra_2n1a_averse(double u) {
    if (u < 1.0 / 3.0) return u / (2.0 * (1.0 - u));
    return (2.0 - u * u - std::sqrt(3.0 - 2.0 * u * u)) / (2.0 * (1.0 - u) * (1.0 - u));
}
inline double cra_2n1a_neutral(double u) {
    return std::max((2.0 * u + 2.0 * u * u - 1.0) / (2.0 * u + 1.0 / u), 0.0) * (u >= 0.5);
}
inline double cra_2n1a_crossing() { return 1.0 / std::sqrt(2.0); }

// One risk-neutral bidder and two with g(x) = x^2, all uniform.
inline double cra_1n2a_averse(double u) { return (u + 1.0) / (2.0 * (1.0 - u) + 2.0 / u); }
inline double cra_1n2a_neutral(double u) {
    if (u < 0.5) return 0.0;
    return (12.0 * u * u - 8.0 * u + std::pow(2.0 * u - 1.0, 1.5) * std::sqrt(10.0 * u - 1.0) + 1.0) /
           (8.0 * u * u);
}

}  // namespace bordercurve::reference
