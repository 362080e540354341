#pragma once

// Revenue families H_i(x, u) in quantile space, their marginals, virtual
// values and semi-elasticities.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "monotone.hpp"
#include "numerics.hpp"

namespace bordercurve {

enum class Family { Linear, EvPower, EvH, Cra };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Linear: return "linear";
        case Family::EvPower: return "ev-power";
        case Family::EvH: return "ev-h";
        case Family::Cra: return "cra";
    }
    return "?";
}

/// Type distribution. For linear and ev-h bidders it fixes the virtual value
/// zeta; for cra bidders it fixes the quantile function v.
struct Dist {
    enum class Kind { Uniform, PowerMvv, Tabulated };
    Kind kind = Kind::Uniform;
    double beta = 1.0;
    std::shared_ptr<const MonotoneFn> table;

    static Dist uniform() { return {}; }
    static Dist power_mvv(double beta) { return {Kind::PowerMvv, beta, nullptr}; }
    static Dist tabulated(MonotoneFn f) {
        return {Kind::Tabulated, 1.0, std::make_shared<const MonotoneFn>(std::move(f))};
    }
};

/// Certainty equivalent for cra bidders.
struct CertaintyEquivalent {
    enum class Kind { Quadratic, Gul };
    Kind kind = Kind::Quadratic;
    double alpha = 1.0;

    double g(double x) const {
        if (kind == Kind::Quadratic) return alpha * x * x + (1.0 - alpha) * x;
        return x / (1.0 + alpha * (1.0 - x));
    }
    double g1(double x) const {
        if (kind == Kind::Quadratic) return 2.0 * alpha * x + 1.0 - alpha;
        const double d = 1.0 + alpha * (1.0 - x);
        return (1.0 + alpha) / (d * d);
    }
    double g2(double x) const {
        if (kind == Kind::Quadratic) return 2.0 * alpha;
        const double d = 1.0 + alpha * (1.0 - x);
        return 2.0 * alpha * (1.0 + alpha) / (d * d * d);
    }
};

struct BidderSpec {
    Family family = Family::Linear;
    Dist dist;
    double beta = 1.0;   // ev-power
    double gamma = 2.0;  // ev-h exponent, h(x) = x^gamma
    CertaintyEquivalent ce;

    static BidderSpec linear(Dist d = Dist::uniform()) {
        BidderSpec b;
        b.dist = std::move(d);
        return b;
    }
    static BidderSpec ev_power(double beta) {
        BidderSpec b;
        b.family = Family::EvPower;
        b.beta = beta;
        return b;
    }
    static BidderSpec ev_h(double gamma, Dist d = Dist::uniform()) {
        BidderSpec b;
        b.family = Family::EvH;
        b.gamma = gamma;
        b.dist = std::move(d);
        return b;
    }
    static BidderSpec cra(CertaintyEquivalent g, Dist v = Dist::uniform()) {
        BidderSpec b;
        b.family = Family::Cra;
        b.ce = g;
        b.dist = std::move(v);
        return b;
    }
    static BidderSpec cra_quadratic(double alpha, Dist v = Dist::uniform()) {
        return cra({CertaintyEquivalent::Kind::Quadratic, alpha}, std::move(v));
    }
    static BidderSpec cra_gul(double alpha, Dist v = Dist::uniform()) {
        return cra({CertaintyEquivalent::Kind::Gul, alpha}, std::move(v));
    }
};

struct Tolerances {
    double eta = 1e-7;
    double quadrature = 1e-9;
    double root = 1e-11;
};

struct SemiElasticities {
    double x;  // x * dm/dx
    double u;  // u * dm/du
};

class Environment {
public:
    Environment() = default;
    explicit Environment(std::vector<BidderSpec> bidders, double t_max = 30.0, Tolerances tol = {})
        : bidders_(std::move(bidders)), t_max_(t_max), tol_(tol) {
        validate();
    }

    std::size_t size() const { return bidders_.size(); }
    const BidderSpec& bidder(std::size_t i) const { return bidders_[i]; }
    const std::vector<BidderSpec>& bidders() const { return bidders_; }
    double t_max() const { return t_max_; }
    const Tolerances& tolerances() const { return tol_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    double H(std::size_t i, double x, double u) const {
        const auto& b = bidders_[i];
        switch (b.family) {
            case Family::Linear: return zeta(b, u) * x;
            case Family::EvPower: return std::pow(u, 1.0 / b.beta) * x * x;
            case Family::EvH: return zeta(b, u) * std::pow(x, b.gamma);
            case Family::Cra: return v(b, u) * x - (1.0 - u) * v1(b, u) * b.ce.g(x);
        }
        return 0.0;
    }

    /// dH/dx
    double marginal(std::size_t i, double x, double u) const {
        const auto& b = bidders_[i];
        switch (b.family) {
            case Family::Linear: return zeta(b, u);
            case Family::EvPower: return 2.0 * std::pow(u, 1.0 / b.beta) * x;
            case Family::EvH: return b.gamma * zeta(b, u) * std::pow(x, b.gamma - 1.0);
            case Family::Cra: return v(b, u) - (1.0 - u) * v1(b, u) * b.ce.g1(x);
        }
        return 0.0;
    }

    SemiElasticities semi_elasticities(std::size_t i, double x, double u) const {
        const auto& b = bidders_[i];
        switch (b.family) {
            case Family::Linear: return {0.0, u * zeta1(b, u)};
            case Family::EvPower: {
                const double m = 2.0 * std::pow(u, 1.0 / b.beta) * x;
                return {m, m / b.beta};
            }
            case Family::EvH: {
                const double xg = std::pow(x, b.gamma - 1.0);
                return {(b.gamma - 1.0) * b.gamma * zeta(b, u) * xg, u * b.gamma * zeta1(b, u) * xg};
            }
            case Family::Cra: {
                const double vp = v1(b, u);
                const double mx = -(1.0 - u) * vp * b.ce.g2(x);
                const double mu = vp + vp * b.ce.g1(x) - (1.0 - u) * v2(b, u) * b.ce.g1(x);
                return {x * mx, u * mu};
            }
        }
        return {0.0, 0.0};
    }

    /// dR/d(delta) = dH/dx at x = e^{delta - t}, u = e^{-delta}.
    double R_partial(std::size_t i, double delta, double t) const {
        if (delta < -1e-12 || delta > t + 1e-12 * std::max(1.0, t))
            throw DomainError("R_partial: delta outside [0, t]");
        delta = std::clamp(delta, 0.0, t);
        return marginal(i, std::exp(delta - t), std::exp(-delta));
    }

    /// R(delta, t) as the integral of R_partial from 0.
    double R(std::size_t i, double delta, double t) const {
        if (!(delta > 0.0)) return 0.0;
        return numerics::integrate([&](double d) { return R_partial(i, d, t); }, 0.0, delta, 1e-12);
    }

    /// Myerson virtual value in quantile space.
    double mvv(std::size_t i, double u) const {
        const auto& b = bidders_[i];
        switch (b.family) {
            case Family::Linear:
            case Family::EvH: return zeta(b, u);
            case Family::EvPower: return std::pow(u, 1.0 / b.beta);
            case Family::Cra: return v(b, u) - (1.0 - u) * v1(b, u);
        }
        return 0.0;
    }

    /// Virtual value as a function on [0,1]; closed form where possible.
    MonotoneFn mvv_fn(std::size_t i) const {
        const auto& b = bidders_[i];
        const bool zeta_family = b.family == Family::Linear || b.family == Family::EvH;
        if (b.family == Family::EvPower) return MonotoneFn::power(1.0, 1.0 / b.beta);
        if (b.dist.kind == Dist::Kind::Uniform) return MonotoneFn({0.0, 1.0}, {Piece::affine(-1.0, 2.0)});
        if (zeta_family && b.dist.kind == Dist::Kind::PowerMvv)
            return MonotoneFn::power(1.0, 1.0 / b.dist.beta);
        if (zeta_family) return *b.dist.table;
        // cra with a tabulated v: v - (1-u) v' piecewise.
        const MonotoneFn& vt = *b.dist.table;
        std::vector<Piece> ps;
        for (std::size_t k = 0; k < vt.num_pieces(); ++k) {
            const Piece vp = vt.piece(k);
            const double a = vt.knot(k), c = vt.knot(k + 1);
            ps.push_back(Piece::callable([vp, a, c](double u) {
                return vp(u) - (1.0 - u) * vp.derivative(u, a, c);
            }));
        }
        return MonotoneFn(vt.knots(), std::move(ps), vt(1.0));
    }

    /// Type at quantile u: v itself for cra bidders, otherwise recovered
    /// from the virtual value via (1-u) v(u) = int_u^1 zeta.
    double value(std::size_t i, double u) const {
        const auto& b = bidders_[i];
        if (b.family == Family::Cra) return v(b, u);
        if (u >= 1.0 - 1e-12) return mvv(i, 1.0);
        if (b.family == Family::EvPower || b.dist.kind == Dist::Kind::PowerMvv) {
            const double beta = b.family == Family::EvPower ? b.beta : b.dist.beta;
            const double p = 1.0 / beta + 1.0;
            return (1.0 - std::pow(u, p)) / (p * (1.0 - u));
        }
        if (b.dist.kind == Dist::Kind::Uniform) return u;
        return b.dist.table->integral(u, 1.0) / (1.0 - u);
    }

    /// (a, b) with H(x, u) = a x + b x^2 when the family is quadratic in x.
    bool quadratic_in_x(std::size_t i) const {
        const auto& b = bidders_[i];
        if (b.family == Family::Linear || b.family == Family::EvPower) return true;
        if (b.family == Family::EvH) return b.gamma == 1.0 || b.gamma == 2.0;
        return b.ce.kind == CertaintyEquivalent::Kind::Quadratic || b.ce.alpha == 0.0;
    }
    std::pair<double, double> quadratic_coeffs(std::size_t i, double u) const {
        const double h1 = H(i, 1.0, u), hh = H(i, 0.5, u);
        const double bq = 2.0 * h1 - 4.0 * hh;
        return {h1 - bq, bq};
    }

private:
    static double zeta(const BidderSpec& b, double u) {
        switch (b.dist.kind) {
            case Dist::Kind::Uniform: return 2.0 * u - 1.0;
            case Dist::Kind::PowerMvv: return std::pow(u, 1.0 / b.dist.beta);
            case Dist::Kind::Tabulated: return (*b.dist.table)(u);
        }
        return 0.0;
    }
    static double zeta1(const BidderSpec& b, double u) {
        switch (b.dist.kind) {
            case Dist::Kind::Uniform: return 2.0;
            case Dist::Kind::PowerMvv: return std::pow(u, 1.0 / b.dist.beta - 1.0) / b.dist.beta;
            case Dist::Kind::Tabulated: return b.dist.table->derivative(u);
        }
        return 0.0;
    }
    static double v(const BidderSpec& b, double u) {
        return b.dist.kind == Dist::Kind::Tabulated ? (*b.dist.table)(u) : u;
    }
    static double v1(const BidderSpec& b, double u) {
        return b.dist.kind == Dist::Kind::Tabulated ? b.dist.table->derivative(u) : 1.0;
    }
    static double v2(const BidderSpec&, double) { return 0.0; }

    void validate() {
        if (bidders_.empty()) throw InputError("environment needs at least one bidder");
        if (!(t_max_ > 0.0)) throw InputError("t_max must be positive");
        if (!(tol_.eta > 0.0 && tol_.quadrature > 0.0 && tol_.root > 0.0))
            throw InputError("tolerances must be positive");
        for (std::size_t i = 0; i < bidders_.size(); ++i) {
            const auto& b = bidders_[i];
            const std::string who = "bidder " + std::to_string(i + 1) + ": ";
            if (b.dist.kind == Dist::Kind::Tabulated && !b.dist.table)
                throw InputError(who + "tabulated distribution without a table");
            if (b.dist.kind == Dist::Kind::PowerMvv && !(b.dist.beta > 0.0))
                throw InputError(who + "power-mvv needs beta > 0");
            switch (b.family) {
                case Family::EvPower:
                    if (!(b.beta > 0.0 && b.beta <= 1.0))
                        throw InputError(who + "ev-power needs beta in (0,1]");
                    if (b.beta == 1.0)
                        warnings_.push_back(who + "beta = 1 is the linear boundary case; R is not strictly concave");
                    break;
                case Family::EvH:
                    if (!(b.gamma > 1.0)) throw InputError(who + "ev-h needs gamma > 1");
                    [[fallthrough]];
                case Family::Linear:
                    if (b.dist.kind == Dist::Kind::Tabulated && !b.dist.table->is_strictly_increasing())
                        throw InputError(who + "virtual value must be strictly increasing");
                    break;
                case Family::Cra:
                    if (b.dist.kind == Dist::Kind::PowerMvv)
                        throw InputError(who + "cra bidders take a uniform or tabulated v");
                    if (b.ce.kind == CertaintyEquivalent::Kind::Quadratic &&
                        !(b.ce.alpha >= 0.0 && b.ce.alpha <= 1.0))
                        throw InputError(who + "quadratic certainty equivalent needs alpha in [0,1]");
                    if (b.ce.kind == CertaintyEquivalent::Kind::Gul && !(b.ce.alpha >= 0.0))
                        throw InputError(who + "gul certainty equivalent needs alpha >= 0");
                    if (b.dist.kind == Dist::Kind::Tabulated) {
                        const auto& t = *b.dist.table;
                        for (std::size_t k = 0; k < t.num_pieces(); ++k) {
                            const double mid = 0.5 * (t.knot(k) + t.knot(k + 1));
                            if (!(t.derivative(mid) > 0.0))
                                throw InputError(who + "tabulated v needs v' > 0 everywhere");
                        }
                    }
                    break;
            }
        }
    }

    std::vector<BidderSpec> bidders_;
    double t_max_ = 30.0;
    Tolerances tol_;
    std::vector<std::string> warnings_;
};

struct RegularityReport {
    // min of (xi^u - xi^x) / (|xi^u| + |xi^x|); scale-free so deep tails do not underflow
    double worst_concavity = std::numeric_limits<double>::infinity();
    double worst_uniqueness = std::numeric_limits<double>::infinity(); // min of 1 - sum
    double t_concavity = 0.0;
    double t_uniqueness = 0.0;
    bool concavity_ok() const { return worst_concavity > 1e-9; }
    bool uniqueness_ok() const { return worst_uniqueness > 0.0; }
    bool ok() const { return concavity_ok() && uniqueness_ok(); }
};

/// Conditions (A) and (B) along a path: delta[k][i] at time t[k].
inline RegularityReport regularity_report(const Environment& env, const std::vector<double>& t,
                                          const std::vector<std::vector<double>>& delta) {
    RegularityReport rep;
    const std::size_t n = env.size();
    std::vector<SemiElasticities> xi(n);
    for (std::size_t k = 0; k < t.size(); ++k) {
        double max_x = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = delta[k][i];
            xi[i] = env.semi_elasticities(i, std::exp(d - t[k]), std::exp(-d));
            max_x = std::max(max_x, xi[i].x);
            const double scale = std::abs(xi[i].u) + std::abs(xi[i].x);
            if (scale == 0.0) continue;
            const double a = (xi[i].u - xi[i].x) / scale;
            if (a < rep.worst_concavity) {
                rep.worst_concavity = a;
                rep.t_concavity = t[k];
            }
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double den = xi[i].x - xi[i].u;
            if (den != 0.0) sum += (xi[i].x - max_x) / den;
        }
        const double margin = 1.0 - sum;
        if (margin < rep.worst_uniqueness) {
            rep.worst_uniqueness = margin;
            rep.t_uniqueness = t[k];
        }
    }
    return rep;
}

}  // namespace bordercurve
