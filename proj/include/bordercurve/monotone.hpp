#pragma once

// Weakly increasing right-continuous functions on [0,1] stored as a knot list
// with left/right values plus one continuous piece per interval.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <iomanip>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"

namespace bordercurve {

struct PowerTerm {
    double coef;
    double expo;
};

/// One continuous piece on a closed interval. Either a finite sum of power
/// terms c*u^k (k > -1) or an opaque callable.
class Piece {
public:
    using Fn = std::function<double(double)>;

    Piece() = default;

    static Piece constant(double c) { return terms({{c, 0.0}}); }
    static Piece affine(double c0, double c1) { return terms({{c0, 0.0}, {c1, 1.0}}); }
    static Piece quadratic(double c0, double c1, double c2) {
        return terms({{c0, 0.0}, {c1, 1.0}, {c2, 2.0}});
    }
    static Piece power(double c, double k) { return terms({{c, k}}); }

    static Piece terms(std::vector<PowerTerm> t) {
        Piece p;
        std::sort(t.begin(), t.end(),
                  [](const PowerTerm& a, const PowerTerm& b) { return a.expo < b.expo; });
        for (const auto& term : t) {
            if (term.coef == 0.0) continue;
            if (!p.terms_.empty() && std::abs(p.terms_.back().expo - term.expo) < 1e-15)
                p.terms_.back().coef += term.coef;
            else
                p.terms_.push_back(term);
        }
        return p;
    }

    /// Callable piece; `inverse` is reused when the piece gets inverted.
    static Piece callable(Fn f, std::optional<Piece> inverse = std::nullopt) {
        Piece p;
        p.fn_ = std::make_shared<const Fn>(std::move(f));
        if (inverse) p.hint_ = std::make_shared<const Piece>(std::move(*inverse));
        return p;
    }

    bool is_callable() const { return static_cast<bool>(fn_); }
    const std::vector<PowerTerm>& power_terms() const { return terms_; }

    /// True when the piece is a constant (or zero).
    bool is_constant() const {
        return !fn_ && (terms_.empty() || (terms_.size() == 1 && terms_[0].expo == 0.0));
    }

    double operator()(double u) const {
        if (fn_) return (*fn_)(u);
        double s = 0.0;
        for (const auto& t : terms_) s += t.coef * ipow(u, t.expo);
        return s;
    }

    double integral(double a, double b) const {
        if (!(b > a)) return 0.0;
        if (fn_) return numerics::integrate(*fn_, a, b, 1e-11, 8, 1e-14 * (b - a));
        double s = 0.0;
        for (const auto& t : terms_) {
            const double e = t.expo + 1.0;
            s += t.coef * (ipow(b, e) - ipow(a, e)) / e;
        }
        return s;
    }

    /// Integral of ln p over [a, b]; the piece must be positive inside.
    double log_integral(double a, double b) const {
        if (!(b > a)) return 0.0;
        if (!fn_ && terms_.size() == 1 && terms_[0].coef > 0.0) {
            const double c = terms_[0].coef, k = terms_[0].expo;
            auto ulogu = [](double u) { return u > 0.0 ? u * std::log(u) - u : 0.0; };
            return std::log(c) * (b - a) + k * (ulogu(b) - ulogu(a));
        }
        auto f = [this](double u) { return std::log((*this)(u)); };
        return numerics::integrate(f, a, b, 1e-11, 10);
    }

    /// sup{u in [a,b] : p(u) <= level}, p nondecreasing on [a,b], p(a) <= level.
    double sup_le(double level, double a, double b) const {
        if (auto r = closed_root(level, a, b)) return *r;
        auto& self = *this;
        return numerics::sup_sublevel([&](double u) { return self(u); }, level, a, b);
    }

    /// inf{u in [a,b] : p(u) >= level}, p nondecreasing on [a,b].
    double inf_ge(double level, double a, double b) const {
        if (auto r = closed_root(level, a, b)) return *r;
        auto& self = *this;
        return numerics::inf_superlevel([&](double u) { return self(u); }, level, a, b);
    }

    /// Derivative; callable pieces use a central difference kept inside [a, b].
    double derivative(double u, double a = 0.0, double b = 1.0) const {
        if (!fn_) {
            double s = 0.0;
            for (const auto& t : terms_)
                if (t.expo != 0.0) s += t.coef * t.expo * ipow(u, t.expo - 1.0);
            return s;
        }
        const double h = 1e-6 * std::max(1e-3, b - a);
        const double lo = std::max(a, u - h), hi = std::min(b, u + h);
        return ((*fn_)(hi) - (*fn_)(lo)) / (hi - lo);
    }

    Piece times_u() const {
        if (fn_) {
            auto f = fn_;
            return callable([f](double u) { return u * (*f)(u); });
        }
        std::vector<PowerTerm> t = terms_;
        for (auto& term : t) term.expo += 1.0;
        return terms(std::move(t));
    }

    /// p(u)/u; the value at u = 0 is taken as a right limit on [a, b].
    Piece divided_by_u(double a, double b) const {
        if (!fn_) {
            bool ok = true;
            for (const auto& term : terms_) ok = ok && term.expo - 1.0 > -1.0 + 1e-15;
            if (ok) {
                std::vector<PowerTerm> t = terms_;
                for (auto& term : t) term.expo -= 1.0;
                return terms(std::move(t));
            }
        }
        const Piece self = *this;
        const double h = std::max(1e-13, 1e-9 * (b - a));
        return callable([self, a, h](double u) {
            const double v = std::max(u, a + h);
            return v > 0.0 ? self(v) / v : 0.0;
        });
    }

    /// Inverse of a strictly increasing piece on [a, b], as a piece on [p(a), p(b)].
    Piece inverse(double a, double b) const {
        if (hint_) return *hint_;
        if (!fn_) {
            const auto& t = terms_;
            if (t.size() == 1 && t[0].expo > 0.0 && t[0].coef > 0.0) {
                const double c = t[0].coef, k = t[0].expo;
                return power(std::pow(c, -1.0 / k), 1.0 / k);
            }
        }
        const Piece self = *this;
        return callable(
            [self, a, b](double y) {
                if (y <= self(a)) return a;
                return self.sup_le(y, a, b);
            },
            self);
    }

    static Piece product(const Piece& p, const Piece& q) {
        if (!p.fn_ && !q.fn_) {
            std::vector<PowerTerm> t;
            for (const auto& x : p.terms_)
                for (const auto& y : q.terms_) t.push_back({x.coef * y.coef, x.expo + y.expo});
            return terms(std::move(t));
        }
        return callable([p, q](double u) { return p(u) * q(u); });
    }

    Piece scaled(double k) const {
        if (fn_) {
            auto f = fn_;
            return callable([f, k](double u) { return k * (*f)(u); });
        }
        std::vector<PowerTerm> t = terms_;
        for (auto& term : t) term.coef *= k;
        return terms(std::move(t));
    }

    /// Affine segments only: constant and linear terms.
    bool is_affine() const {
        if (fn_) return false;
        for (const auto& t : terms_)
            if (t.expo != 0.0 && t.expo != 1.0) return false;
        return true;
    }

private:
    static double ipow(double u, double k) {
        if (k == 0.0) return 1.0;
        if (k == 1.0) return u;
        if (k == 2.0) return u * u;
        return std::pow(u, k);
    }

    std::optional<double> closed_root(double level, double a, double b) const {
        if (fn_) return std::nullopt;
        double c0 = 0.0;
        const PowerTerm* single = nullptr;
        int nonconst = 0;
        bool quad = true;
        double c1 = 0.0, c2 = 0.0;
        for (const auto& t : terms_) {
            if (t.expo == 0.0) {
                c0 += t.coef;
                continue;
            }
            ++nonconst;
            single = &t;
            if (t.expo == 1.0)
                c1 += t.coef;
            else if (t.expo == 2.0)
                c2 += t.coef;
            else
                quad = false;
        }
        double r;
        if (nonconst == 1 && single->coef > 0.0) {
            const double z = (level - c0) / single->coef;
            r = z <= 0.0 ? 0.0 : std::pow(z, 1.0 / single->expo);
        } else if (nonconst == 2 && quad && c2 != 0.0) {
            const double cc = c0 - level;
            const double disc = std::max(0.0, c1 * c1 - 4.0 * c2 * cc);
            const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
            const double r1 = q / c2;
            const double r2 = q != 0.0 ? cc / q : r1;
            const double mid = 0.5 * (a + b);
            r = std::abs(r1 - mid) <= std::abs(r2 - mid) ? r1 : r2;
        } else {
            return std::nullopt;
        }
        if (!std::isfinite(r)) return std::nullopt;
        return std::clamp(r, a, b);
    }

    std::vector<PowerTerm> terms_;
    std::shared_ptr<const Fn> fn_;
    std::shared_ptr<const Piece> hint_;
};

struct Breakpoint {
    double u;
    double left;
    double right;
};

/// Weakly increasing, right-continuous function on [0,1].
class MonotoneFn {
public:
    MonotoneFn() : MonotoneFn(std::vector<double>{0.0, 1.0}, {Piece::constant(0.0)}) {}

    /// Knots 0 = k_0 < ... < k_m = 1 with one piece per interval. Jumps are
    /// read off from the piece endpoint values. The value at 1 defaults to the
    /// left limit of the last piece.
    MonotoneFn(std::vector<double> knots, std::vector<Piece> pieces,
               std::optional<double> value_at_one = std::nullopt) {
        if (knots.size() < 2 || pieces.size() + 1 != knots.size())
            throw InputError("MonotoneFn: need k+1 knots for k pieces");
        if (std::abs(knots.front()) > kAbscissaTol || std::abs(knots.back() - 1.0) > kAbscissaTol)
            throw InputError("MonotoneFn: knots must span [0,1]");
        knots.front() = 0.0;
        knots.back() = 1.0;
        // Drop pieces on intervals shorter than the abscissa tolerance.
        u_.push_back(0.0);
        for (std::size_t k = 0; k < pieces.size(); ++k) {
            const double a = knots[k], b = knots[k + 1];
            if (!(b >= a)) throw InputError("MonotoneFn: knots must increase");
            if (numerics::same_abscissa(a, b) && !(k + 1 == pieces.size() && pieces_.empty())) continue;
            pieces_.push_back(std::move(pieces[k]));
            u_.push_back(b);
        }
        u_.back() = 1.0;
        finish(value_at_one);
    }

    /// Piecewise-affine interchange form: affine between knots.
    static MonotoneFn from_breakpoints(const std::vector<Breakpoint>& bps) {
        if (bps.size() < 2) throw InputError("need at least two breakpoints");
        std::vector<double> knots;
        std::vector<Piece> pieces;
        knots.push_back(bps.front().u);
        for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
            const auto& a = bps[k];
            const auto& b = bps[k + 1];
            if (!(b.u > a.u)) throw InputError("breakpoints must be strictly increasing in u");
            const double slope = (b.left - a.right) / (b.u - a.u);
            pieces.push_back(Piece::affine(a.right - slope * a.u, slope));
            knots.push_back(b.u);
        }
        MonotoneFn f(std::move(knots), std::move(pieces), bps.back().right);
        // Keep the tabulated values verbatim at the knots.
        if (f.u_.size() == bps.size()) {
            for (std::size_t k = 0; k < bps.size(); ++k) {
                f.left_[k] = k == 0 ? bps[k].right : bps[k].left;
                f.right_[k] = bps[k].right;
            }
            f.rebuild_levels();
        }
        return f;
    }

    static MonotoneFn constant(double c) {
        return MonotoneFn({0.0, 1.0}, {Piece::constant(c)}, c);
    }
    static MonotoneFn identity() { return MonotoneFn({0.0, 1.0}, {Piece::power(1.0, 1.0)}); }
    /// c * u^k on [0,1].
    static MonotoneFn power(double c, double k) {
        return MonotoneFn({0.0, 1.0}, {Piece::power(c, k)});
    }

    std::size_t num_knots() const { return u_.size(); }
    std::size_t num_pieces() const { return pieces_.size(); }
    const std::vector<double>& knots() const { return u_; }
    double knot(std::size_t k) const { return u_[k]; }
    double left(std::size_t k) const { return left_[k]; }
    double right(std::size_t k) const { return right_[k]; }
    const Piece& piece(std::size_t k) const { return pieces_[k]; }
    std::vector<Breakpoint> breakpoints() const {
        std::vector<Breakpoint> out;
        for (std::size_t k = 0; k < u_.size(); ++k) out.push_back({u_[k], left_[k], right_[k]});
        return out;
    }

    /// Index of the piece whose interval contains u (right-continuous convention).
    std::size_t piece_index(double u) const {
        auto it = std::upper_bound(u_.begin(), u_.end(), u + numerics::abscissa_radius(u));
        std::size_t k = it == u_.begin() ? 0 : static_cast<std::size_t>(it - u_.begin()) - 1;
        return std::min(k, pieces_.size() - 1);
    }

    double operator()(double u) const { return eval(u); }

    double eval(double u) const {
        u = std::clamp(u, 0.0, 1.0);
        const double r = numerics::abscissa_radius(u);
        auto it = std::upper_bound(u_.begin(), u_.end(), u + r);
        const std::size_t k = static_cast<std::size_t>(it - u_.begin()) - 1;
        if (u - u_[k] <= r && (k > 0 || u == 0.0)) return right_[k];
        return pieces_[std::min(k, pieces_.size() - 1)](u);
    }

    double eval_left(double u) const {
        u = std::clamp(u, 0.0, 1.0);
        const double r = numerics::abscissa_radius(u);
        auto it = std::lower_bound(u_.begin(), u_.end(), u - r);
        const std::size_t k = static_cast<std::size_t>(it - u_.begin());
        if (k < u_.size() && u_[k] - u <= r) return left_[k];
        return pieces_[k - 1](u);
    }

    /// Derivative of the piece active at u (right derivative at knots).
    double derivative(double u) const {
        u = std::clamp(u, 0.0, 1.0);
        const std::size_t k = piece_index(u);
        return pieces_[k].derivative(u, u_[k], u_[k + 1]);
    }

    /// sup{u in [0,1] : f(u) <= level}, with sup of the empty set taken as 0.
    double generalized_inverse(double level) const {
        const auto it = std::upper_bound(levels_.begin(), levels_.end(), level);
        const std::size_t idx = static_cast<std::size_t>(it - levels_.begin());
        if (idx >= levels_.size()) return 1.0;
        const std::size_t k = idx / 2;
        if (idx % 2 == 0) return u_[k];
        return pieces_[k].sup_le(level, u_[k], u_[k + 1]);
    }

    /// inf{u in [0,1] : f(u) >= level}, i.e. the length of {u : f(u) < level}.
    double lower_inverse(double level) const {
        const auto it = std::lower_bound(levels_.begin(), levels_.end(), level);
        const std::size_t idx = static_cast<std::size_t>(it - levels_.begin());
        if (idx >= levels_.size()) return 1.0;
        const std::size_t k = idx / 2;
        if (idx % 2 == 0) return u_[k];
        return pieces_[k].inf_ge(level, u_[k], u_[k + 1]);
    }

    /// Integral over [a, b]; jumps carry no mass.
    double integral(double a, double b) const {
        a = std::clamp(a, 0.0, 1.0);
        b = std::clamp(b, 0.0, 1.0);
        if (!(b > a)) return 0.0;
        return primitive(b) - primitive(a);
    }

    /// Integral of ln f over [a, b]; f must be positive on (a, b).
    double integral_log(double a, double b) const {
        a = std::clamp(a, 0.0, 1.0);
        b = std::clamp(b, 0.0, 1.0);
        double s = 0.0;
        for (std::size_t k = 0; k < pieces_.size(); ++k) {
            const double lo = std::max(a, u_[k]), hi = std::min(b, u_[k + 1]);
            if (hi > lo) s += pieces_[k].log_integral(lo, hi);
        }
        return s;
    }

    /// Integral of F(f(u), u) over [a, b], split at the knots.
    template <class F>
    double integrate_composed(F&& fn, double a = 0.0, double b = 1.0, double rel_tol = 1e-12,
                              double abs_tol = 0.0, const std::vector<double>& splits = {}) const {
        double s = 0.0;
        for (std::size_t k = 0; k < pieces_.size(); ++k) {
            const double lo = std::max(a, u_[k]), hi = std::min(b, u_[k + 1]);
            if (!(hi > lo)) continue;
            const Piece& p = pieces_[k];
            auto g = [&](double u) { return fn(p(u), u); };
            double x0 = lo;
            auto it = std::upper_bound(splits.begin(), splits.end(), lo);
            for (; it != splits.end() && *it < hi; ++it) {
                s += numerics::integrate(g, x0, *it, rel_tol, 12, abs_tol * (*it - x0));
                x0 = *it;
            }
            s += numerics::integrate(g, x0, hi, rel_tol, 12, abs_tol * (hi - x0));
        }
        return s;
    }

    /// The map u -> u f(u).
    MonotoneFn product_with_identity() const {
        std::vector<Piece> ps;
        ps.reserve(pieces_.size());
        for (const auto& p : pieces_) ps.push_back(p.times_u());
        MonotoneFn g(u_, std::move(ps), right_.back());
        for (std::size_t k = 0; k < u_.size(); ++k) {
            g.left_[k] = u_[k] * left_[k];
            g.right_[k] = u_[k] * right_[k];
        }
        g.rebuild_levels();
        return g;
    }

    /// Pointwise product with another function on the union of knots.
    MonotoneFn times(const MonotoneFn& other) const {
        std::vector<double> knots = u_;
        knots.insert(knots.end(), other.u_.begin(), other.u_.end());
        numerics::sort_unique(knots);
        std::vector<Piece> ps;
        for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
            const double mid = 0.5 * (knots[k] + knots[k + 1]);
            ps.push_back(Piece::product(pieces_[piece_index(mid)],
                                        other.pieces_[other.piece_index(mid)]));
        }
        return MonotoneFn(std::move(knots), std::move(ps), eval(1.0) * other.eval(1.0));
    }

    /// Smallest and largest values (left/right at the knots).
    double min_value() const { return levels_.front(); }
    double max_value() const { return levels_.back(); }

    /// Checks knot values and a few interior samples per piece.
    bool is_monotone(double tol = 1e-9) const {
        for (std::size_t i = 1; i < levels_.size(); ++i)
            if (levels_[i] < levels_[i - 1] - tol) return false;
        for (std::size_t k = 0; k < pieces_.size(); ++k) {
            double prev = right_[k];
            for (int j = 1; j <= 8; ++j) {
                const double u = u_[k] + (u_[k + 1] - u_[k]) * j / 9.0;
                const double v = pieces_[k](u);
                if (v < prev - tol) return false;
                prev = v;
            }
            if (left_[k + 1] < prev - tol) return false;
        }
        return true;
    }

    /// Strictly increasing: positive increments between knots and samples.
    bool is_strictly_increasing() const {
        // Interior samples may tie in floating point on very gentle pieces,
        // so only the piece as a whole must rise strictly.
        for (std::size_t k = 0; k < pieces_.size(); ++k) {
            if (!(left_[k + 1] > right_[k])) return false;
            double prev = right_[k];
            for (int j = 1; j <= 9; ++j) {
                const double u = u_[k] + (u_[k + 1] - u_[k]) * j / 9.0;
                const double v = j == 9 ? left_[k + 1] : pieces_[k](u);
                if (!(v >= prev - 1e-14 * std::max(1.0, std::abs(prev)))) return false;
                prev = v;
            }
            if (right_[k + 1] < left_[k + 1] - 1e-12 * std::max(1.0, std::abs(left_[k + 1])))
                return false;
        }
        return true;
    }

    bool is_cdf(double tol = 1e-9) const {
        return is_monotone(tol) && min_value() >= -tol && max_value() <= 1.0 + tol &&
               std::abs(right_.back() - 1.0) <= tol;
    }

    /// Piecewise-affine table, refining every non-affine piece into `refine`
    /// equal sub-intervals.
    std::vector<Breakpoint> to_table(std::size_t refine = 16) const {
        std::vector<Breakpoint> out;
        for (std::size_t k = 0; k < pieces_.size(); ++k) {
            out.push_back({u_[k], left_[k], right_[k]});
            if (!pieces_[k].is_affine()) {
                for (std::size_t j = 1; j < refine; ++j) {
                    const double u = u_[k] + (u_[k + 1] - u_[k]) * static_cast<double>(j) /
                                                 static_cast<double>(refine);
                    const double v = pieces_[k](u);
                    out.push_back({u, v, v});
                }
            }
        }
        out.push_back({1.0, left_.back(), right_.back()});
        return out;
    }

    void write_csv(std::ostream& os, std::size_t refine = 16) const {
        os << "u,left,right\n" << std::setprecision(12);
        for (const auto& b : to_table(refine)) os << b.u << ',' << b.left << ',' << b.right << '\n';
    }

    void write_csv(const std::string& path, std::size_t refine = 16) const {
        std::ofstream os(path);
        if (!os) throw InputError("cannot write " + path);
        write_csv(os, refine);
    }

    static MonotoneFn read_csv(std::istream& is, const std::string& what = "table") {
        std::string line;
        if (!std::getline(is, line)) throw InputError(what + ": empty");
        if (trim(line) != "u,left,right") throw InputError(what + ": expected header u,left,right");
        std::vector<Breakpoint> bps;
        std::size_t lineno = 1;
        while (std::getline(is, line)) {
            ++lineno;
            if (trim(line).empty()) continue;
            std::stringstream ss(line);
            std::string cell;
            double v[3];
            for (int c = 0; c < 3; ++c) {
                if (!std::getline(ss, cell, ','))
                    throw InputError(what + ": line " + std::to_string(lineno) + " needs 3 columns");
                try {
                    std::size_t used = 0;
                    v[c] = std::stod(cell, &used);
                    if (trim(cell.substr(used)).size()) throw std::invalid_argument(cell);
                } catch (const std::exception&) {
                    throw InputError(what + ": bad number '" + cell + "' on line " +
                                     std::to_string(lineno));
                }
            }
            if (std::getline(ss, cell, ','))
                throw InputError(what + ": extra column on line " + std::to_string(lineno));
            bps.push_back({v[0], v[1], v[2]});
        }
        if (bps.size() < 2) throw InputError(what + ": need at least two rows");
        if (bps.front().u != 0.0 || bps.back().u != 1.0)
            throw InputError(what + ": first row must be u=0 and last u=1");
        for (std::size_t k = 0; k < bps.size(); ++k) {
            if (k && !(bps[k].u > bps[k - 1].u))
                throw InputError(what + ": rows must be sorted by u");
            if (bps[k].left > bps[k].right + 1e-12)
                throw InputError(what + ": left value exceeds right value");
        }
        auto f = from_breakpoints(bps);
        if (!f.is_monotone()) throw InputError(what + ": values are not weakly increasing");
        return f;
    }

    static MonotoneFn read_csv(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw InputError("cannot open " + path);
        return read_csv(is, path);
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    void finish(std::optional<double> value_at_one) {
        const std::size_t m = u_.size();
        left_.assign(m, 0.0);
        right_.assign(m, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            if (k > 0) left_[k] = pieces_[k - 1](u_[k]);
            if (k + 1 < m) right_[k] = pieces_[k](u_[k]);
        }
        left_[0] = right_[0];
        right_[m - 1] = value_at_one.value_or(left_[m - 1]);
        rebuild_levels();
    }

    void rebuild_levels() {
        const std::size_t m = u_.size();
        levels_.clear();
        levels_.reserve(2 * m);
        levels_.push_back(right_[0]);
        for (std::size_t k = 1; k < m; ++k) {
            levels_.push_back(left_[k]);
            levels_.push_back(right_[k]);
        }
        // Guard binary searches against rounding-level decreases.
        for (std::size_t i = 1; i < levels_.size(); ++i)
            levels_[i] = std::max(levels_[i], levels_[i - 1]);
        cum_ = std::make_shared<CumCache>();
    }

    // Cumulative integrals at the knots, built on first use: many functions
    // (scores, fractions) are never integrated.
    const std::vector<double>& cumulative() const {
        std::call_once(cum_->once, [this] {
            auto& c = cum_->values;
            c.assign(u_.size(), 0.0);
            for (std::size_t k = 0; k + 1 < u_.size(); ++k)
                c[k + 1] = c[k] + pieces_[k].integral(u_[k], u_[k + 1]);
        });
        return cum_->values;
    }

    double primitive(double u) const {
        const auto& cum = cumulative();
        if (u >= 1.0) return cum.back();
        auto it = std::upper_bound(u_.begin(), u_.end(), u);
        const std::size_t k = static_cast<std::size_t>(it - u_.begin()) - 1;
        return cum[k] + pieces_[k].integral(u_[k], u);
    }

    struct CumCache {
        std::once_flag once;
        std::vector<double> values;
    };

    std::vector<double> u_, left_, right_;
    std::vector<Piece> pieces_;
    std::shared_ptr<CumCache> cum_ = std::make_shared<CumCache>();
    std::vector<double> levels_;
};

/// Tuple of interim winning probabilities, one CDF per bidder.
class ReducedForm {
public:
    ReducedForm() = default;
    explicit ReducedForm(std::vector<MonotoneFn> comps, bool validate = true)
        : x_(std::move(comps)) {
        if (x_.empty()) throw InputError("reduced form needs at least one bidder");
        if (validate)
            for (std::size_t i = 0; i < x_.size(); ++i)
                if (!x_[i].is_cdf(1e-8))
                    throw InputError("component " + std::to_string(i + 1) + " is not a CDF");
    }

    std::size_t size() const { return x_.size(); }
    const MonotoneFn& operator[](std::size_t i) const { return x_[i]; }
    const std::vector<MonotoneFn>& components() const { return x_; }
    auto begin() const { return x_.begin(); }
    auto end() const { return x_.end(); }

private:
    std::vector<MonotoneFn> x_;
};

}  // namespace bordercurve
