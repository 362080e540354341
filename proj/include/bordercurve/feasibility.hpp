#pragma once

// Principal curve nu(s) = psi(psibar^{-1}(s)) and the one-dimensional Border
// and extremality tests built on it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "monotone.hpp"
#include "numerics.hpp"
#include "transforms.hpp"

namespace bordercurve {

inline constexpr double kDefaultEta = 1e-7;

/// B(u) = prod u_i + sum_i int_{u_i}^1 x_i.
inline double border_at(const ReducedForm& x, const std::vector<double>& u) {
    if (u.size() != x.size()) throw InputError("border_at: cutoff vector has wrong length");
    double prod = 1.0, sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        prod *= u[i];
        sum += x[i].integral(u[i], 1.0);
    }
    return prod + sum;
}

class PrincipalCurve {
public:
    explicit PrincipalCurve(ReducedForm x) : x_(std::move(x)) {
        for (const auto& xi : x_) psi_.push_back(psi_transform(xi));
        bar_ = geometric_mean_psi(psi_);
        bar0_ = bar_(0.0);
    }

    std::size_t size() const { return x_.size(); }
    const ReducedForm& source() const { return x_; }
    const std::vector<PsiFn>& psis() const { return psi_; }
    const PsiFn& psi_bar() const { return bar_; }
    double psi_bar_zero() const { return bar0_; }

    /// iota = psibar^{-1}(s); 0 below psibar(0).
    double level(double s) const { return bar_.inverse(s); }

    std::vector<double> at_level(double iota) const {
        std::vector<double> u(psi_.size());
        for (std::size_t i = 0; i < psi_.size(); ++i) u[i] = psi_[i](iota);
        return u;
    }

    std::vector<double> nu(double s) const { return at_level(level(s)); }

    /// B at the curve point indexed by level iota (avoids inverting psibar).
    double border_at_level(double iota) const { return border_at(x_, at_level(iota)); }

    /// Closed form (max{psibar(0), s})^n + n int iota d ln psibar at level iota.
    double border_closed_at_level(double iota) const {
        const double n = static_cast<double>(psi_.size());
        double s = 0.0;
        for (const auto& p : psi_) s += psi_stieltjes(p, iota);
        return std::pow(std::max(bar0_, bar_(iota)), n) + s;
    }

    /// Candidate levels: psi knots, a uniform iota grid and the images of a
    /// uniform s grid.
    std::vector<double> level_grid(std::size_t uniform = 4096) const {
        std::vector<double> g = numerics::linspace(0.0, 1.0, uniform + 1);
        for (const auto& p : psi_) g.insert(g.end(), p.fn().knots().begin(), p.fn().knots().end());
        for (double s : numerics::linspace(0.0, 1.0, uniform + 1)) g.push_back(level(s));
        numerics::sort_unique(g, 1e-14);
        return g;
    }

private:
    ReducedForm x_;
    std::vector<PsiFn> psi_;
    PsiFn bar_;
    double bar0_ = 0.0;
};

struct CurveBorder {
    double direct;
    double closed;
};

inline CurveBorder border_along_curve(const PrincipalCurve& c, double s) {
    const double iota = c.level(s);
    CurveBorder b{c.border_at_level(iota), c.border_closed_at_level(iota)};
    if (!(std::abs(b.direct - b.closed) <= 1e-6))
        throw InternalInconsistency("border along curve: direct " + std::to_string(b.direct) +
                                    " vs closed form " + std::to_string(b.closed));
    return b;
}

inline CurveBorder border_along_curve(const ReducedForm& x, double s) {
    return border_along_curve(PrincipalCurve(x), s);
}

enum class FeasibilityStatus { Feasible, Infeasible, BoundaryExtremal };

inline const char* status_name(FeasibilityStatus s) {
    switch (s) {
        case FeasibilityStatus::Feasible: return "feasible";
        case FeasibilityStatus::Infeasible: return "infeasible";
        case FeasibilityStatus::BoundaryExtremal: return "boundary-extremal";
    }
    return "?";
}

struct FeasibilityVerdict {
    FeasibilityStatus status = FeasibilityStatus::Feasible;
    double witness_s = 1.0;
    double witness_B = 1.0;
    double sup_B = 1.0;
    double extremality_gap = 0.0;  // sup |psibar - max{psibar(0), iota^{1/n}}|
    double max_abs_dev = 0.0;      // sup |B - 1| over the grid
    std::size_t grid_points = 0;
};

/// sup over the level grid of |psibar(iota) - max{psibar(0), iota^{1/n}}|.
inline double extremality_gap(const PrincipalCurve& c, const std::vector<double>& grid) {
    const double inv_n = 1.0 / static_cast<double>(c.size());
    double gap = 0.0;
    for (double iota : grid)
        gap = std::max(gap, std::abs(c.psi_bar()(iota) -
                                     std::max(c.psi_bar_zero(), std::pow(iota, inv_n))));
    return gap;
}

inline FeasibilityVerdict check_feasible(const PrincipalCurve& c, double eta = kDefaultEta,
                                         std::size_t uniform = 4096) {
    const std::vector<double> grid = c.level_grid(uniform);
    std::vector<double> B(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) B[k] = c.border_at_level(grid[k]);

    FeasibilityVerdict v;
    v.grid_points = grid.size();
    std::size_t best = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        v.max_abs_dev = std::max(v.max_abs_dev, std::abs(B[k] - 1.0));
        if (B[k] > B[best]) best = k;
    }
    double best_iota = grid[best], best_B = B[best];

    // Golden-section refinement around the eight largest local grid maxima.
    std::vector<std::size_t> peaks;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const bool left_ok = k == 0 || B[k] >= B[k - 1];
        const bool right_ok = k + 1 == grid.size() || B[k] >= B[k + 1];
        if (left_ok && right_ok) peaks.push_back(k);
    }
    std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return B[a] > B[b]; });
    if (peaks.size() > 8) peaks.resize(8);
    for (std::size_t k : peaks) {
        const double lo = grid[k == 0 ? 0 : k - 1];
        const double hi = grid[std::min(k + 1, grid.size() - 1)];
        if (!(hi > lo)) continue;
        auto [iota, val] = numerics::golden_max([&](double i) { return c.border_at_level(i); }, lo, hi);
        if (val > best_B) {
            best_B = val;
            best_iota = iota;
        }
    }
    v.sup_B = best_B;
    v.witness_B = best_B;
    v.witness_s = std::max(c.psi_bar_zero(), c.psi_bar()(best_iota));
    v.extremality_gap = extremality_gap(c, grid);

    if (v.sup_B > 1.0 + eta)
        v.status = FeasibilityStatus::Infeasible;
    else if (v.sup_B >= 1.0 - eta && v.extremality_gap <= eta && v.max_abs_dev <= eta)
        v.status = FeasibilityStatus::BoundaryExtremal;
    else
        v.status = FeasibilityStatus::Feasible;
    return v;
}

inline FeasibilityVerdict check_feasible(const ReducedForm& x, double eta = kDefaultEta) {
    return check_feasible(PrincipalCurve(x), eta);
}

inline bool check_extremal(const PrincipalCurve& c, double tol = kDefaultEta) {
    const auto v = check_feasible(c, tol);
    if (v.status == FeasibilityStatus::Infeasible)
        throw NotFeasible("reduced form violates the Border constraint (B = " +
                          std::to_string(v.sup_B) + ")");
    return v.extremality_gap <= tol;
}

inline bool check_extremal(const ReducedForm& x, double tol = kDefaultEta) {
    return check_extremal(PrincipalCurve(x), tol);
}

/// int_0^t e^{-tau} sum delta_i' <= 1 - e^{-sum delta_i(t)} at every node.
inline bool check_feasible_delta(const std::vector<DeltaPath>& paths, double tol = 1e-9) {
    if (paths.empty()) return true;
    const std::vector<double> t = merged_times(paths);
    double lhs = 0.0, prev = 0.0;
    for (const auto& p : paths) prev += p(t[0]);
    for (std::size_t k = 1; k < t.size(); ++k) {
        double sum = 0.0;
        for (const auto& p : paths) sum += p(t[k]);
        const double slope = (sum - prev) / (t[k] - t[k - 1]);
        lhs += slope * (std::exp(-t[k - 1]) - std::exp(-t[k]));
        if (lhs > 1.0 - std::exp(-sum) + tol) return false;
        prev = sum;
    }
    return true;
}

/// Rows s, nu_1..nu_n, B on a uniform s grid.
inline void write_curve_csv(std::ostream& os, const PrincipalCurve& c, std::size_t points = 1001) {
    os << "s";
    for (std::size_t i = 0; i < c.size(); ++i) os << ",nu_" << i + 1;
    os << ",B\n" << std::setprecision(12);
    for (double s : numerics::linspace(0.0, 1.0, points)) {
        const double iota = c.level(s);
        os << s;
        for (double u : c.at_level(iota)) os << ',' << u;
        os << ',' << c.border_at_level(iota) << '\n';
    }
}

}  // namespace bordercurve
