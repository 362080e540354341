#pragma once

// psi-transform (inverse of u -> u x(u)), its log-time reparameterization
// delta(t) = -ln psi(e^{-t}), the inverses of both, and the geometric mean.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "monotone.hpp"
#include "numerics.hpp"

namespace bordercurve {

inline constexpr double kDefaultTmax = 30.0;

/// Right-continuous generalized inverse of a nondecreasing f whose values lie
/// in [0,1], returned as a function on [0,1]. Values of the inverse below
/// f(0) are 0 (sup of the empty set).
inline MonotoneFn invert(const MonotoneFn& f, double tol = 1e-14) {
    std::vector<double> knots{0.0};
    std::vector<Piece> pieces;
    // Level stretches narrower than the abscissa tolerance cannot be knots; the
    // piece that absorbs them evaluates the inverse of f directly instead.
    const auto whole = std::make_shared<const MonotoneFn>(f);
    bool absorbed = false;
    auto push = [&](double hi, Piece p) {
        if (numerics::same_abscissa(knots.back(), hi)) {
            absorbed = true;
            return;
        }
        if (absorbed)
            p = Piece::callable([whole](double level) { return whole->generalized_inverse(level); });
        absorbed = false;
        pieces.push_back(std::move(p));
        knots.push_back(hi);
    };
    const std::size_t m = f.num_knots();
    if (f.right(0) > tol) push(std::min(1.0, f.right(0)), Piece::constant(0.0));
    for (std::size_t k = 0; k + 1 < m; ++k) {
        if (k > 0 && f.right(k) - f.left(k) > tol)
            push(std::min(1.0, f.right(k)), Piece::constant(f.knot(k)));
        const double lo = f.right(k), hi = f.left(k + 1);
        if (hi - lo > tol) {
            const double a = f.knot(k), b = f.knot(k + 1);
            push(std::min(1.0, hi), f.piece(k).inverse(a, b));
        }
    }
    if (1.0 - f.left(m - 1) > tol) push(1.0, Piece::constant(1.0));
    if (knots.size() == 1) {
        knots.push_back(1.0);
        pieces.push_back(Piece::constant(1.0));
    }
    knots.back() = 1.0;
    return MonotoneFn(std::move(knots), std::move(pieces), 1.0);
}

/// f(u)/u, with the value at 0 taken as the right limit.
inline MonotoneFn divide_by_identity(const MonotoneFn& f) {
    std::vector<double> knots = f.knots();
    std::vector<Piece> pieces;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k)
        pieces.push_back(f.piece(k).divided_by_u(knots[k], knots[k + 1]));
    return MonotoneFn(std::move(knots), std::move(pieces), f.right(f.num_knots() - 1));
}

/// Continuous, nondecreasing map on [0,1] with psi(1) = 1 and iota/psi(iota)
/// nondecreasing.
class PsiFn {
public:
    PsiFn() = default;
    explicit PsiFn(MonotoneFn f, bool validate = true) : f_(std::move(f)) {
        if (validate) check();
    }

    double operator()(double iota) const { return f_(iota); }
    const MonotoneFn& fn() const { return f_; }
    double at_zero() const { return f_(0.0); }

    /// sup{iota : psi(iota) <= s}
    double inverse(double s) const { return f_.generalized_inverse(s); }

    /// Largest decrease of iota/psi(iota) seen on knots and interior samples.
    double ratio_violation() const {
        double worst = 0.0, prev = 0.0;
        auto visit = [&](double iota) {
            const double p = f_(iota);
            const double r = p > 0.0 ? iota / p : 0.0;
            worst = std::max(worst, prev - r);
            prev = std::max(prev, r);
        };
        std::vector<double> pts = numerics::linspace(0.0, 1.0, 1025);
        for (std::size_t k = 0; k + 1 < f_.num_knots(); ++k)
            for (int j = 0; j < 8; ++j)
                pts.push_back(f_.knot(k) + (f_.knot(k + 1) - f_.knot(k)) * j / 8.0);
        numerics::sort_unique(pts, 0.0);
        for (double iota : pts) visit(iota);
        return worst;
    }

private:
    void check() const {
        if (std::abs(f_(1.0) - 1.0) > 1e-9) throw InvalidPsi("psi(1) must equal 1");
        if (!f_.is_monotone(1e-9)) throw InvalidPsi("psi must be nondecreasing");
        if (ratio_violation() > 1e-9) throw InvalidPsi("iota/psi(iota) must be nondecreasing");
    }

    MonotoneFn f_;
};

inline PsiFn psi_transform(const MonotoneFn& x) {
    return PsiFn(invert(x.product_with_identity()), false);
}

/// x(u) = psi^{-1}(u)/u.
inline MonotoneFn psi_to_cdf(const PsiFn& psi) {
    if (psi.ratio_violation() > 1e-9) throw InvalidPsi("iota/psi(iota) must be nondecreasing");
    if (std::abs(psi(1.0) - 1.0) > 1e-9) throw InvalidPsi("psi(1) must equal 1");
    return divide_by_identity(invert(psi.fn()));
}

/// Geometric mean of psi-transforms, evaluated on the union of knots.
inline PsiFn geometric_mean_psi(const std::vector<PsiFn>& psis) {
    if (psis.empty()) throw InputError("geometric_mean_psi: empty list");
    if (psis.size() == 1) return psis.front();
    const double n = static_cast<double>(psis.size());
    std::vector<double> knots;
    for (const auto& p : psis) knots.insert(knots.end(), p.fn().knots().begin(), p.fn().knots().end());
    numerics::sort_unique(knots);
    std::vector<Piece> pieces;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const double mid = 0.5 * (knots[k] + knots[k + 1]);
        std::vector<Piece> fac;
        bool closed = true;
        double c = 1.0, e = 0.0;
        for (const auto& p : psis) {
            const Piece& q = p.fn().piece(p.fn().piece_index(mid));
            fac.push_back(q);
            const auto& t = q.power_terms();
            if (q.is_callable() || t.size() != 1 || t[0].coef <= 0.0) {
                closed = false;
            } else {
                c *= std::pow(t[0].coef, 1.0 / n);
                e += t[0].expo / n;
            }
        }
        if (closed) {
            pieces.push_back(Piece::power(c, e));
        } else {
            pieces.push_back(Piece::callable([fac, n](double iota) {
                double s = 0.0;
                for (const auto& q : fac) s += std::log(q(iota));
                return std::exp(s / n);
            }));
        }
    }
    return PsiFn(MonotoneFn(std::move(knots), std::move(pieces), 1.0), false);
}

/// Stieltjes integral of iota d ln psi over [a, 1], by parts.
inline double psi_stieltjes(const PsiFn& psi, double a) {
    const double pa = psi(a);
    const double boundary = a > 0.0 ? -a * std::log(pa) : 0.0;
    return boundary - psi.fn().integral_log(a, 1.0);
}

/// Nondecreasing path on [0, t_max] with slopes in [0,1], affine between
/// nodes. An optional exact evaluator overrides the interpolation.
class DeltaPath {
public:
    using Fn = std::function<double(double)>;

    DeltaPath() : DeltaPath({0.0, kDefaultTmax}, {0.0, 0.0}) {}
    DeltaPath(std::vector<double> t, std::vector<double> d, Fn exact = {})
        : t_(std::move(t)), d_(std::move(d)), exact_(std::move(exact)) {
        if (t_.size() < 2 || t_.size() != d_.size()) throw InputError("DeltaPath: bad node arrays");
        for (std::size_t k = 1; k < t_.size(); ++k)
            if (!(t_[k] > t_[k - 1])) throw InputError("DeltaPath: times must increase");
    }

    /// delta(t) = slope * t sampled on a uniform grid.
    static DeltaPath linear(double slope, double t_max = kDefaultTmax) {
        return DeltaPath({0.0, t_max}, {0.0, slope * t_max});
    }

    double t_max() const { return t_.back(); }
    const std::vector<double>& times() const { return t_; }
    const std::vector<double>& values() const { return d_; }
    bool has_exact() const { return static_cast<bool>(exact_); }
    const Fn& exact() const { return exact_; }

    double operator()(double t) const {
        if (t >= t_max()) return exact_ ? exact_(t_max()) : d_.back();
        if (exact_) return exact_(std::max(t, 0.0));
        return interp(t);
    }

    /// Affine interpolation between nodes, flat beyond t_max.
    double interp(double t) const {
        if (t <= t_.front()) return d_.front();
        if (t >= t_.back()) return d_.back();
        const auto it = std::upper_bound(t_.begin(), t_.end(), t);
        const std::size_t k = static_cast<std::size_t>(it - t_.begin()) - 1;
        const double w = (t - t_[k]) / (t_[k + 1] - t_[k]);
        return d_[k] + w * (d_[k + 1] - d_[k]);
    }

    std::vector<double> slopes() const {
        std::vector<double> s(t_.size() - 1);
        for (std::size_t k = 0; k + 1 < t_.size(); ++k)
            s[k] = (d_[k + 1] - d_[k]) / (t_[k + 1] - t_[k]);
        return s;
    }

    /// inf{t in [0, t_max] : delta(t) >= y}; +inf when y exceeds delta(t_max).
    double inverse(double y) const {
        if (y <= d_.front()) return 0.0;
        if (y > d_.back() + 1e-15) return kInf;
        const auto it = std::lower_bound(d_.begin(), d_.end(), y);
        const std::size_t k = static_cast<std::size_t>(it - d_.begin());
        if (k == 0) return t_.front();
        if (k >= d_.size()) return t_.back();
        if (exact_) {
            auto f = exact_;
            return numerics::inf_superlevel([&](double t) { return f(t); }, y, t_[k - 1], t_[k]);
        }
        const double w = (y - d_[k - 1]) / (d_[k] - d_[k - 1]);
        return t_[k - 1] + w * (t_[k] - t_[k - 1]);
    }

    /// delta(0) = 0, nondecreasing, slopes within [0,1].
    bool is_valid(double tol = 1e-9) const {
        if (std::abs(d_.front()) > tol) return false;
        for (double s : slopes())
            if (s < -tol || s > 1.0 + tol) return false;
        return true;
    }

    void write_csv(std::ostream& os) const {
        os << "t,delta\n" << std::setprecision(12);
        for (std::size_t k = 0; k < t_.size(); ++k) os << t_[k] << ',' << d_[k] << '\n';
    }

    static DeltaPath read_csv(std::istream& is, const std::string& what = "path") {
        std::string line;
        if (!std::getline(is, line) || line.rfind("t,delta", 0) != 0)
            throw InputError(what + ": expected header t,delta");
        std::vector<double> t, d;
        while (std::getline(is, line)) {
            if (line.find_first_not_of(" \r\n\t") == std::string::npos) continue;
            std::stringstream ss(line);
            std::string a, b;
            if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
                throw InputError(what + ": need two columns");
            try {
                t.push_back(std::stod(a));
                d.push_back(std::stod(b));
            } catch (const std::exception&) {
                throw InputError(what + ": bad number in '" + line + "'");
            }
        }
        DeltaPath p(std::move(t), std::move(d));
        if (!p.is_valid()) throw InputError(what + ": slopes must lie in [0,1] with delta(0)=0");
        return p;
    }

private:
    std::vector<double> t_, d_;
    Fn exact_;
};

/// Node grid for delta paths: images of psi knots plus a uniform grid.
inline std::vector<double> delta_grid(const PsiFn& psi, double t_max, std::size_t uniform = 4096) {
    std::vector<double> t = numerics::linspace(0.0, t_max, uniform + 1);
    const double floor_iota = std::exp(-t_max);
    for (double iota : psi.fn().knots())
        if (iota > floor_iota && iota < 1.0) t.push_back(-std::log(iota));
    numerics::sort_unique(t, 1e-12);
    return t;
}

inline DeltaPath delta_from_psi(const PsiFn& psi, double t_max = kDefaultTmax,
                                std::size_t uniform = 4096) {
    auto exact = [psi](double t) { return -std::log(psi(std::exp(-t))); };
    std::vector<double> t = delta_grid(psi, t_max, uniform);
    std::vector<double> d(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) d[k] = exact(t[k]);
    d[0] = 0.0;
    // Rounding can leave tiny decreases next to flat stretches.
    for (std::size_t k = 1; k < d.size(); ++k) d[k] = std::max(d[k], d[k - 1]);
    return DeltaPath(std::move(t), std::move(d), exact);
}

inline DeltaPath delta_transform(const MonotoneFn& x, double t_max = kDefaultTmax,
                                 std::size_t uniform = 4096) {
    return delta_from_psi(psi_transform(x), t_max, uniform);
}

/// x(u) = e^{delta(t) - t} at t = delta^{-1}(-ln u). Below e^{-delta(t_max)}
/// x is zero after a flat end and the last segment extended otherwise.
inline MonotoneFn delta_to_cdf(const DeltaPath& path) {
    const auto& t = path.times();
    const auto& d = path.values();
    const std::size_t N = t.size();
    constexpr double flat = 1e-15;
    // Walk nodes from the end (small u) to the start (u = 1).
    std::vector<double> knots{0.0};
    std::vector<Piece> pieces;
    auto push = [&](double hi, Piece p) {
        if (numerics::same_abscissa(knots.back(), hi)) return;
        pieces.push_back(std::move(p));
        knots.push_back(hi);
    };
    // A path still rising at the horizon continues its last segment down to
    // u = 0; a path that went flat leaves x = 0 below its final level.
    const bool rising_at_end = N >= 2 && d[N - 1] - d[N - 2] > flat;
    if (!rising_at_end) push(std::exp(-d[N - 1]), Piece::constant(0.0));
    for (std::size_t k = N - 1; k-- > 0;) {
        const double dk = d[k], dk1 = d[k + 1];
        if (dk1 - dk <= flat) continue;
        const double tk = t[k], tk1 = t[k + 1];
        const double hi = std::exp(-dk);
        const double tm = 0.5 * (tk + tk1);
        const bool affine =
            !path.has_exact() || std::abs(path(tm) - 0.5 * (dk + dk1)) <= 1e-13 * (1.0 + dk1);
        if (!affine) {
            auto f = path.exact();
            push(hi, Piece::callable([f, tk, tk1](double u) {
                     const double y = -std::log(u);
                     const double s = numerics::inf_superlevel([&](double tt) { return f(tt); }, y,
                                                               tk, tk1);
                     return std::exp(f(s) - s);
                 }));
            continue;
        }
        const double s = (dk1 - dk) / (tk1 - tk);
        const double expo = 1.0 / s - 1.0;
        const double top = std::exp(dk - tk);
        const double logc = (dk - tk) + expo * dk;
        if (expo < 1e-14) {
            push(hi, Piece::constant(top));
        } else if (std::abs(logc) < 600.0) {
            push(hi, Piece::power(std::exp(logc), expo));
        } else {
            push(hi, Piece::callable([top, hi, expo](double u) {
                     return top * std::pow(u / hi, expo);
                 }));
        }
    }
    if (knots.size() == 1) {
        knots.push_back(1.0);
        pieces.push_back(Piece::constant(0.0));
    }
    knots.back() = 1.0;
    return MonotoneFn(std::move(knots), std::move(pieces), 1.0);
}

/// Nodes shared by several paths (union of their grids).
inline std::vector<double> merged_times(const std::vector<DeltaPath>& paths) {
    std::vector<double> t;
    for (const auto& p : paths) t.insert(t.end(), p.times().begin(), p.times().end());
    numerics::sort_unique(t, 1e-12);
    return t;
}

}  // namespace bordercurve
