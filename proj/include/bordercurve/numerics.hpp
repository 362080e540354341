#pragma once

// Scalar building blocks shared by every module: bracketing root finders,
// golden-section search and piecewise quadrature.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace bordercurve {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Abscissae closer than this are treated as the same point.
inline constexpr double kAbscissaTol = 1e-12;

namespace numerics {

/// Radius within which two abscissae near u count as one point. Shrinks below 1
/// so that closely spaced knots deep in a tail stay distinct.
inline double abscissa_radius(double u) { return kAbscissaTol * std::min(1.0, std::abs(u)); }

inline bool same_abscissa(double a, double b) {
    return std::abs(b - a) <= abscissa_radius(std::max(std::abs(a), std::abs(b)));
}

namespace detail {

/// Shrinks a bracket with g(lo) <= 0 < g(hi) (or g(lo) < 0 <= g(hi) when
/// `closed_hi`) for a nondecreasing g. Illinois steps with a bisection every
/// fourth step; the invariant alone fixes which end of a flat stretch is found.
template <class G>
std::pair<double, double> illinois_bracket(G&& g, double lo, double hi, double glo, double ghi,
                                           bool closed_hi, double xtol) {
    int side = 0;
    for (int it = 0; it < 200; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi || hi - lo <= xtol) break;
        double x = mid;
        if (it % 4 != 3 && ghi > glo) {
            x = lo + (hi - lo) * (-glo / (ghi - glo));
            if (!(x > lo && x < hi)) x = mid;
        }
        const double gx = g(x);
        if (closed_hi ? gx < 0.0 : gx <= 0.0) {
            lo = x;
            glo = gx;
            if (side == -1) ghi *= 0.5;
            side = -1;
        } else {
            hi = x;
            ghi = gx;
            if (side == 1) glo *= 0.5;
            side = 1;
        }
    }
    return {lo, hi};
}

}  // namespace detail

/// sup{x in [lo, hi] : f(x) <= level} for a nondecreasing f.
/// Assumes f(lo) <= level; returns hi when f(hi) <= level.
template <class F>
double sup_sublevel(F&& f, double level, double lo, double hi, double xtol = 0.0) {
    const double fhi = f(hi);
    if (fhi <= level) return hi;
    const double flo = std::min(f(lo) - level, 0.0);
    auto [a, b] = detail::illinois_bracket([&](double x) { return f(x) - level; }, lo, hi, flo,
                                           fhi - level, false, xtol);
    return a + 0.5 * (b - a);
}

/// inf{x in [lo, hi] : f(x) >= level} for a nondecreasing f.
template <class F>
double inf_superlevel(F&& f, double level, double lo, double hi, double xtol = 0.0) {
    const double flo = f(lo);
    if (flo >= level) return lo;
    const double fhi = std::max(f(hi) - level, 0.0);
    auto [a, b] = detail::illinois_bracket([&](double x) { return f(x) - level; }, lo, hi,
                                           flo - level, fhi, true, xtol);
    return a + 0.5 * (b - a);
}

/// Root of a nonincreasing g on [lo, hi] with g(lo) >= 0 >= g(hi).
template <class G>
double bisect_decreasing(G&& g, double lo, double hi, double xtol) {
    for (int it = 0; it < 300 && hi - lo > xtol; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (g(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return lo + 0.5 * (hi - lo);
}

/// Golden-section search for a maximum of f on [a, b].
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double xtol = 1e-10) {
    constexpr double invphi = 0.6180339887498949;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > xtol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    const double fx = f(x);
    if (fc > fx && fc >= fd) return {c, fc};
    if (fd > fx) return {d, fd};
    return {x, fx};
}

namespace detail {

// One Gauss-Kronrod 15/31 estimate per call; the recursion lives here so the
// stopping rule can mix relative, absolute and round-off criteria.
template <class F>
double gk_adaptive(F& f, double a, double b, double rel_tol, double abs_tol, unsigned depth) {
    using boost::math::quadrature::gauss_kronrod;
    const double w = b - a;
    auto g = [&](double s) { return w * f(a + w * s); };
    double err = 0.0, l1 = 0.0;
    const double est = gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, 0, 0.0, &err, &l1);
    err *= 0.5;  // reported on the reference interval [-1, 1]
    if (depth == 0 || !(err > abs_tol) || !(err > rel_tol * std::abs(est)) || !(err > 1e-14 * l1))
        return est;
    const double m = a + 0.5 * w;
    return gk_adaptive(f, a, m, rel_tol, 0.5 * abs_tol, depth - 1) +
           gk_adaptive(f, m, b, rel_tol, 0.5 * abs_tol, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (15/31) on a smooth interval. Stops when the error
/// estimate meets the relative or the absolute tolerance.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12, unsigned max_depth = 12,
                 double abs_tol = 0.0) {
    if (!(b > a)) return 0.0;
    return detail::gk_adaptive(f, a, b, rel_tol, abs_tol, max_depth);
}

/// Integral over [a, b] split at the given interior points.
template <class F>
double integrate_split(F&& f, double a, double b, const std::vector<double>& splits,
                       double rel_tol = 1e-12) {
    if (!(b > a)) return 0.0;
    double total = 0.0;
    double lo = a;
    for (double s : splits) {
        if (s <= lo + kAbscissaTol) continue;
        if (s >= b - kAbscissaTol) break;
        total += integrate(f, lo, s, rel_tol);
        lo = s;
    }
    total += integrate(f, lo, b, rel_tol);
    return total;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    v.back() = hi;
    return v;
}

/// Sorts and removes entries closer than tol to their predecessor.
inline void sort_unique(std::vector<double>& v, double tol = kAbscissaTol) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    out.reserve(v.size());
    for (double x : v)
        if (out.empty() || x - out.back() > std::min(tol, abscissa_radius(x))) out.push_back(x);
    v = std::move(out);
}

}  // namespace numerics
}  // namespace bordercurve
