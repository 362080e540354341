#pragma once

// Score allocations: the highest nonnegative score wins, optionally receiving
// only a type-dependent fraction of the good.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "environments.hpp"
#include "errors.hpp"
#include "feasibility.hpp"
#include "monotone.hpp"
#include "numerics.hpp"
#include "rng.hpp"
#include "transforms.hpp"

namespace bordercurve {

class ScoreRule {
public:
    ScoreRule() = default;
    explicit ScoreRule(std::vector<MonotoneFn> scores, std::vector<MonotoneFn> fractions = {})
        : q_(std::make_shared<const std::vector<MonotoneFn>>(std::move(scores))),
          r_(std::make_shared<const std::vector<MonotoneFn>>(std::move(fractions))) {
        if (q_->empty()) throw InvalidScore("score rule needs at least one bidder");
        for (std::size_t i = 0; i < q_->size(); ++i)
            if (!(*q_)[i].is_strictly_increasing())
                throw InvalidScore("score of bidder " + std::to_string(i + 1) +
                                   " is not strictly increasing");
        if (!r_->empty()) {
            if (r_->size() != q_->size()) throw InvalidScore("one fraction per bidder required");
            for (const auto& r : *r_)
                if (r.min_value() < -1e-12 || r.max_value() > 1.0 + 1e-12)
                    throw InvalidScore("fractions must lie in [0,1]");
        }
    }

    std::size_t size() const { return q_->size(); }
    const MonotoneFn& score(std::size_t i) const { return (*q_)[i]; }
    const std::vector<MonotoneFn>& scores() const { return *q_; }
    bool has_fractions() const { return !r_->empty(); }
    const MonotoneFn& fraction(std::size_t i) const { return (*r_)[i]; }
    double fraction_at(std::size_t i, double u) const { return has_fractions() ? (*r_)[i](u) : 1.0; }

    /// Shared handle to the scores, for callables that outlive the rule.
    std::shared_ptr<const std::vector<MonotoneFn>> shared_scores() const { return q_; }

private:
    std::shared_ptr<const std::vector<MonotoneFn>> q_;
    std::shared_ptr<const std::vector<MonotoneFn>> r_;
};

/// Highest nonnegative score; ties go to the lowest index.
inline std::optional<std::size_t> winner(const ScoreRule& rule, const std::vector<double>& u) {
    std::optional<std::size_t> best;
    double best_v = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double v = rule.score(i)(u[i]);
        if (v >= 0.0 && (!best || v > best_v)) {
            best = i;
            best_v = v;
        }
    }
    return best;
}

/// x_i(u) = [q_i(u) >= 0] prod_{j != i} |{u_j : q_j(u_j) < q_i(u)}| * r_i(u).
inline ReducedForm induced_reduced_form_exact(const ScoreRule& rule) {
    const std::size_t n = rule.size();
    const auto scores = rule.shared_scores();
    std::vector<MonotoneFn> out;
    for (std::size_t i = 0; i < n; ++i) {
        const MonotoneFn& qi = rule.score(i);
        std::vector<double> knots = qi.knots();
        const double zero = qi.lower_inverse(0.0);
        knots.push_back(zero);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const MonotoneFn& qj = rule.score(j);
            for (std::size_t k = 0; k < qj.num_knots(); ++k)
                for (double level : {qj.left(k), qj.right(k)})
                    if (level >= 0.0) knots.push_back(qi.lower_inverse(level));
        }
        if (rule.has_fractions()) {
            const auto& rk = rule.fraction(i).knots();
            knots.insert(knots.end(), rk.begin(), rk.end());
        }
        numerics::sort_unique(knots);
        knots.front() = 0.0;
        if (knots.back() < 1.0 - kAbscissaTol) knots.push_back(1.0);
        knots.back() = 1.0;

        std::vector<Piece> pieces;
        for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
            const double mid = 0.5 * (knots[k] + knots[k + 1]);
            const Piece qp = qi.piece(qi.piece_index(mid));
            if (mid < zero || qp(mid) < 0.0) {
                pieces.push_back(Piece::constant(0.0));
                continue;
            }
            Piece p = Piece::callable([scores, i, qp](double u) {
                const double c = std::max(qp(u), 0.0);
                double prod = 1.0;
                for (std::size_t j = 0; j < scores->size(); ++j)
                    if (j != i) prod *= (*scores)[j].lower_inverse(c);
                return prod;
            });
            if (rule.has_fractions()) {
                const MonotoneFn& r = rule.fraction(i);
                p = Piece::product(p, r.piece(r.piece_index(mid)));
            }
            pieces.push_back(std::move(p));
        }
        out.emplace_back(std::move(knots), std::move(pieces), 1.0);
    }
    return ReducedForm(std::move(out), false);
}

/// Scores u x_i(u) on [psi_i(0), 1] and -1 + 1e-12 u below.
inline ScoreRule canonical_scores(const ReducedForm& x) {
    std::vector<MonotoneFn> q;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const MonotoneFn w = x[i].product_with_identity();
        const double start = w.generalized_inverse(0.0);
        std::vector<double> knots{0.0};
        std::vector<Piece> pieces;
        if (start > 0.0) {
            knots.push_back(start);
            pieces.push_back(Piece::affine(-1.0, 1e-12));
        }
        for (std::size_t k = 0; k < w.num_pieces(); ++k) {
            if (w.knot(k + 1) <= start + numerics::abscissa_radius(start)) continue;
            knots.push_back(w.knot(k + 1));
            pieces.push_back(w.piece(k));
        }
        knots.back() = 1.0;
        MonotoneFn qi(std::move(knots), std::move(pieces), w(1.0));
        if (!qi.is_strictly_increasing())
            throw InvalidScore("u x(u) of bidder " + std::to_string(i + 1) +
                               " has a flat stretch above psi(0)");
        q.push_back(std::move(qi));
    }
    return ScoreRule(std::move(q));
}

inline ScoreRule canonical_scores_from_extremal(const ReducedForm& x, double tol = kDefaultEta) {
    if (!check_extremal(x, tol)) throw NotExtremal("reduced form is not extremal");
    return canonical_scores(x);
}

/// Sup of |a - b| over a grid, skipping points within 1e-9 of a knot of either.
inline double sup_distance(const MonotoneFn& a, const MonotoneFn& b, std::size_t points = 10001) {
    std::vector<double> knots = a.knots();
    knots.insert(knots.end(), b.knots().begin(), b.knots().end());
    numerics::sort_unique(knots);
    double worst = 0.0;
    for (double u : numerics::linspace(0.0, 1.0, points)) {
        const auto it = std::lower_bound(knots.begin(), knots.end(), u);
        const bool near = (it != knots.end() && *it - u < 1e-9) ||
                          (it != knots.begin() && u - *(it - 1) < 1e-9);
        if (near && u > 0.0 && u < 1.0) continue;
        worst = std::max(worst, std::abs(a(u) - b(u)));
    }
    return worst;
}

inline double expected_revenue(const Environment& env, const ReducedForm& x) {
    if (env.size() != x.size()) throw InputError("environment and reduced form sizes differ");
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::vector<double> splits;  // kinks of a tabulated distribution
        if (const auto& tab = env.bidder(i).dist.table) splits = tab->knots();
        total += x[i].integrate_composed([&](double xv, double u) { return env.H(i, xv, u); }, 0.0,
                                         1.0, 1e-12, 1e-11, splits);
    }
    return total;
}

struct McEstimate {
    std::vector<double> u;                  // shared grid
    std::vector<std::vector<double>> mean;  // [bidder][grid]
    std::vector<std::vector<double>> se;    // binomial standard errors
    std::size_t samples = 0;
};

inline constexpr std::size_t kMcBlock = 4096;

/// Winning frequencies against sampled opponent profiles on a uniform grid.
inline McEstimate induced_reduced_form_mc(const ScoreRule& rule, std::size_t samples,
                                          std::uint64_t seed, std::size_t grid = 101) {
    if (samples == 0) throw InputError("need at least one sample");
    const std::size_t n = rule.size();
    McEstimate est;
    est.samples = samples;
    est.u = numerics::linspace(0.0, 1.0, grid);
    const std::size_t blocks = (samples + kMcBlock - 1) / kMcBlock;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> qv(grid);
        for (std::size_t g = 0; g < grid; ++g) qv[g] = rule.score(i)(est.u[g]);
        std::vector<std::vector<std::uint64_t>> counts(blocks, std::vector<std::uint64_t>(grid, 0));
        rng::for_each_block(blocks, [&](std::size_t b) {
            auto gen = rng::substream(seed, i, b);
            const std::size_t lo = b * kMcBlock, hi = std::min(samples, lo + kMcBlock);
            auto& cnt = counts[b];
            for (std::size_t s = lo; s < hi; ++s) {
                double below = -kInf, above = -kInf;  // strict / weak thresholds
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i) continue;
                    const double c = rule.score(j)(gen.uniform());
                    if (j < i)
                        below = std::max(below, c);
                    else
                        above = std::max(above, c);
                }
                for (std::size_t g = 0; g < grid; ++g)
                    if (qv[g] >= 0.0 && qv[g] > below && qv[g] >= above) ++cnt[g];
            }
        });
        std::vector<double> mean(grid), se(grid);
        for (std::size_t g = 0; g < grid; ++g) {
            std::uint64_t c = 0;
            for (const auto& blk : counts) c += blk[g];
            const double p = static_cast<double>(c) / static_cast<double>(samples);
            const double r = rule.fraction_at(i, est.u[g]);
            mean[g] = r * p;
            se[g] = r * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
        }
        est.mean.push_back(std::move(mean));
        est.se.push_back(std::move(se));
    }
    return est;
}

struct RevenueEstimate {
    double mean;
    double se;
};

/// Unbiased Monte Carlo revenue for families quadratic in x: two independent
/// opponent draws per own type give x and x^2 without bias.
inline RevenueEstimate revenue_mc(const Environment& env, const ScoreRule& rule,
                                  std::size_t samples, std::uint64_t seed) {
    const std::size_t n = rule.size();
    if (env.size() != n) throw InputError("environment and rule sizes differ");
    for (std::size_t i = 0; i < n; ++i)
        if (!env.quadratic_in_x(i))
            throw DomainError("Monte Carlo revenue needs H quadratic in x");
    const std::size_t blocks = (samples + kMcBlock - 1) / kMcBlock;
    std::vector<double> sum(blocks, 0.0), sum2(blocks, 0.0);
    rng::for_each_block(blocks, [&](std::size_t b) {
        auto gen = rng::substream(seed, 0x5eedULL, b);
        const std::size_t lo = b * kMcBlock, hi = std::min(samples, lo + kMcBlock);
        std::vector<double> prof(n);
        for (std::size_t s = lo; s < hi; ++s) {
            double y = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double u = gen.uniform();
                double z[2];
                for (double& zk : z) {
                    for (std::size_t j = 0; j < n; ++j) prof[j] = j == i ? u : gen.uniform();
                    const auto w = winner(rule, prof);
                    zk = (w && *w == i) ? rule.fraction_at(i, u) : 0.0;
                }
                const auto [a, bq] = env.quadratic_coeffs(i, u);
                y += a * 0.5 * (z[0] + z[1]) + bq * z[0] * z[1];
            }
            sum[b] += y;
            sum2[b] += y * y;
        }
    });
    double s = 0.0, s2 = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        s += sum[b];
        s2 += sum2[b];
    }
    const double N = static_cast<double>(samples);
    const double mean = s / N;
    const double var = std::max(0.0, s2 / N - mean * mean);
    return {mean, std::sqrt(var / N)};
}

using AllocationRule = std::function<std::optional<std::size_t>(const std::vector<double>&)>;

inline AllocationRule as_rule(const ScoreRule& r) {
    return [r](const std::vector<double>& u) { return winner(r, u); };
}

struct AxiomReport {
    bool deterministic = true;
    bool monotone = true;
    bool nonbossy = true;
    std::size_t checks = 0;
    std::size_t monotone_violations = 0;
    std::size_t nonbossy_violations = 0;
};

/// Samples profiles and single-bidder type changes.
inline AxiomReport axiom_check(const AllocationRule& z, std::size_t n, std::size_t profiles,
                               std::uint64_t seed) {
    AxiomReport rep;
    auto gen = rng::substream(seed, 0xa110cULL, 0);
    std::vector<double> u(n), v(n);
    for (std::size_t p = 0; p < profiles; ++p) {
        for (auto& x : u) x = gen.uniform();
        const auto w = z(u);
        if (w != z(u) || (w && *w >= n)) rep.deterministic = false;
        for (std::size_t i = 0; i < n; ++i) {
            v = u;
            v[i] = gen.uniform();
            const auto w2 = z(v);
            ++rep.checks;
            const bool won = w && *w == i, won2 = w2 && *w2 == i;
            if (won && !won2 && v[i] > u[i]) ++rep.monotone_violations;
            if (won2 && !won && u[i] > v[i]) ++rep.monotone_violations;
            if (won == won2 && w != w2) ++rep.nonbossy_violations;
        }
    }
    rep.monotone = rep.monotone_violations == 0;
    rep.nonbossy = rep.nonbossy_violations == 0;
    return rep;
}

inline AxiomReport axiom_check(const ScoreRule& rule, std::size_t profiles, std::uint64_t seed) {
    return axiom_check(as_rule(rule), rule.size(), profiles, seed);
}

/// Rows bidder,u,x_exact,x_mc,stderr with 1-based bidder numbers.
inline void write_simulate_csv(std::ostream& os, const ReducedForm& exact, const McEstimate& mc) {
    os << "bidder,u,x_exact,x_mc,stderr\n" << std::setprecision(12);
    for (std::size_t i = 0; i < mc.mean.size(); ++i)
        for (std::size_t g = 0; g < mc.u.size(); ++g)
            os << i + 1 << ',' << mc.u[g] << ',' << exact[i](mc.u[g]) << ',' << mc.mean[i][g] << ','
               << mc.se[i][g] << '\n';
}

}  // namespace bordercurve
