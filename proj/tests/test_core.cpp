// Monotone functions, transforms and the principal-curve feasibility test.

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"

using namespace bordercurve;
using testsupport::random_cdf;

namespace {

const MonotoneFn kStair = fixtures::staircase_form();

// x1 of the two-bidder extremal pair: 0 below 1/4, u on [1/4,1/2), 1/2 on
// [1/2,3/4), u above. Same as the staircase.
const MonotoneFn& pair_first() { return kStair; }

}  // namespace

// ---------------------------------------------------------------- monotone

TEST(Monotone, EvalStaircase) {
    EXPECT_DOUBLE_EQ(kStair(0.6), 0.5);
    EXPECT_DOUBLE_EQ(kStair(0.25), 0.25);
    EXPECT_DOUBLE_EQ(kStair(0.2), 0.0);
    EXPECT_DOUBLE_EQ(kStair(1.0), 1.0);
    EXPECT_DOUBLE_EQ(MonotoneFn::identity()(0.37), 0.37);
}

TEST(Monotone, GeneralizedInverse) {
    const MonotoneFn ux = kStair.product_with_identity();
    EXPECT_NEAR(ux.generalized_inverse(1.0 / 32.0), 0.25, 1e-12);
    EXPECT_NEAR(MonotoneFn::identity().generalized_inverse(0.42), 0.42, 1e-12);
    EXPECT_NEAR(pair_first().generalized_inverse(0.6), 0.75, 1e-12);
    // sup of the empty set is 0; the whole interval gives 1.
    EXPECT_EQ(MonotoneFn::constant(0.5).generalized_inverse(0.4), 0.0);
    EXPECT_EQ(MonotoneFn::constant(0.5).generalized_inverse(0.6), 1.0);
}

TEST(Monotone, Integral) {
    EXPECT_NEAR(kStair.integral(0.75, 1.0), 7.0 / 32.0, 1e-15);
    EXPECT_NEAR(kStair.integral(0.0, 1.0), 7.0 / 16.0, 1e-15);
    EXPECT_EQ(kStair.integral(0.3, 0.3), 0.0);
}

TEST(Monotone, ProductWithIdentity) {
    const MonotoneFn ux = kStair.product_with_identity();
    EXPECT_NEAR(ux(0.25), 1.0 / 16.0, 1e-15);
    EXPECT_NEAR(ux(0.5), 0.25, 1e-15);
    EXPECT_NEAR(ux.eval_left(0.75), 3.0 / 8.0, 1e-15);
    EXPECT_NEAR(ux(0.75), 9.0 / 16.0, 1e-15);
    const MonotoneFn id = MonotoneFn::constant(1.0).product_with_identity();
    const MonotoneFn sq = MonotoneFn::identity().product_with_identity();
    for (double u : numerics::linspace(0.0, 1.0, 11)) {
        EXPECT_NEAR(id(u), u, 1e-15);
        EXPECT_NEAR(sq(u), u * u, 1e-15);
    }
}

TEST(Monotone, CsvRoundTrip) {
    std::stringstream ss;
    kStair.write_csv(ss);
    const MonotoneFn back = MonotoneFn::read_csv(ss);
    EXPECT_LT(testsupport::sup_error(back, kStair), 1e-12);
}

TEST(Monotone, CsvRejectsBadTables) {
    std::stringstream no_header("0,0,0\n1,1,1\n");
    EXPECT_THROW(MonotoneFn::read_csv(no_header), InputError);
    std::stringstream unsorted("u,left,right\n0,0,0\n0.7,0.5,0.5\n0.3,0.6,0.6\n1,1,1\n");
    EXPECT_THROW(MonotoneFn::read_csv(unsorted), InputError);
}

TEST(MonotoneProperty, InverseSublevelAndAdditivity) {
    auto g = rng::substream(11, 0, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const MonotoneFn f = random_cdf(g);
        ASSERT_TRUE(f.is_monotone());
        for (int k = 0; k < 20; ++k) {
            const double level = g.uniform();
            const double u = f.generalized_inverse(level);
            if (u > 0.0) EXPECT_LE(f.eval_left(u), level + 1e-12);
            for (double du : {1e-9, 1e-4, 0.1})
                if (u + du <= 1.0) EXPECT_GT(f(u + du), level - 1e-12);
        }
        double a = g.uniform(), b = g.uniform(), c = g.uniform();
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        EXPECT_NEAR(f.integral(a, c), f.integral(a, b) + f.integral(b, c), 1e-12);
        const MonotoneFn ux = f.product_with_identity();
        EXPECT_TRUE(ux.is_monotone());
        EXPECT_NEAR(ux(0.0), 0.0, 1e-15);
        EXPECT_NEAR(ux(1.0), f(1.0), 1e-15);
    }
}

// -------------------------------------------------------------- transforms

TEST(Transforms, PsiOfStaircase) {
    const PsiFn psi = psi_transform(kStair);
    EXPECT_NEAR(psi(0.0), 0.25, 1e-9);
    EXPECT_NEAR(psi(1.0 / 16.0), 0.25, 1e-9);
    EXPECT_NEAR(psi(0.25), 0.5, 1e-9);
    EXPECT_NEAR(psi(3.0 / 8.0), 0.75, 1e-9);
    EXPECT_NEAR(psi(9.0 / 16.0), 0.75, 1e-9);
    EXPECT_NEAR(psi(1.0), 1.0, 1e-12);
}

TEST(Transforms, PsiClosedForms) {
    const PsiFn half = psi_transform(MonotoneFn::identity());  // alpha = 1/2
    const PsiFn one = psi_transform(MonotoneFn::constant(1.0));
    for (double iota : numerics::linspace(0.0, 1.0, 21)) {
        EXPECT_NEAR(half(iota), std::sqrt(iota), 1e-12);
        EXPECT_NEAR(one(iota), iota, 1e-12);
    }
}

TEST(Transforms, PsiToCdf) {
    const MonotoneFn x = psi_to_cdf(PsiFn(MonotoneFn::power(1.0, 0.5)));
    const MonotoneFn ones = psi_to_cdf(PsiFn(MonotoneFn::identity()));
    for (double u : numerics::linspace(0.01, 1.0, 25)) {
        EXPECT_NEAR(x(u), u, 1e-12);
        EXPECT_NEAR(ones(u), 1.0, 1e-12);
    }
    EXPECT_LT(testsupport::sup_error(psi_to_cdf(psi_transform(kStair)), kStair), 1e-12);
}

TEST(Transforms, MalformedPsiRejected) {
    // iota/psi(iota) decreasing near 1: psi = iota^2.
    EXPECT_THROW(PsiFn(MonotoneFn::power(1.0, 2.0)), InvalidPsi);
}

TEST(Transforms, DeltaClosedForms) {
    const DeltaPath id = delta_transform(MonotoneFn::constant(1.0));
    const DeltaPath half = delta_transform(MonotoneFn::identity());
    for (double t : numerics::linspace(0.0, 30.0, 61)) {
        EXPECT_NEAR(id(t), t, 1e-12);
        EXPECT_NEAR(half(t), t / 2.0, 1e-12);
    }
    const MonotoneFn x_id = delta_to_cdf(DeltaPath::linear(1.0));
    const MonotoneFn x_half = delta_to_cdf(DeltaPath::linear(0.5));
    for (double u : numerics::linspace(0.01, 1.0, 25)) {
        EXPECT_NEAR(x_id(u), 1.0, 1e-9);
        EXPECT_NEAR(x_half(u), u, 1e-9);
    }
}

TEST(Transforms, DeltaGeometryOfStaircase) {
    const DeltaPath d = delta_transform(kStair);
    const auto& t = d.times();
    const auto s = d.slopes();
    const double a = 2.0 * std::log(4.0 / 3.0), b = std::log(8.0 / 3.0), c = 2.0 * std::log(2.0),
                 e = 2.0 * std::log(4.0);
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double lo = t[k], hi = t[k + 1];
        double want;
        if (lo >= a - 1e-12 && hi <= b + 1e-12) want = 0.0;
        else if (lo >= e - 1e-12) want = 0.0;
        else if (lo >= b - 1e-12 && hi <= c + 1e-12) want = 1.0;
        else if (hi <= a + 1e-12 || (lo >= c - 1e-12 && hi <= e + 1e-12)) want = 0.5;
        else continue;  // segment straddles a corner
        EXPECT_NEAR(s[k], want, 1e-12) << "segment [" << lo << ", " << hi << "]";
    }
}

TEST(Transforms, DeltaCsvRoundTrip) {
    const DeltaPath d = delta_transform(kStair);
    std::stringstream ss;
    d.write_csv(ss);
    const DeltaPath back = DeltaPath::read_csv(ss);
    for (double t : numerics::linspace(0.0, 30.0, 301)) EXPECT_NEAR(back(t), d(t), 1e-10);  // 12 digits
}

TEST(Transforms, GeometricMean) {
    const PsiFn a = psi_transform(MonotoneFn::power(1.0, 1.0 / 0.3 - 1.0));
    const PsiFn b = psi_transform(MonotoneFn::power(1.0, 1.0 / 0.5 - 1.0));
    const PsiFn bar = geometric_mean_psi({a, b});
    const PsiFn same = geometric_mean_psi({a, a});
    for (double iota : numerics::linspace(0.0, 1.0, 21)) {
        EXPECT_NEAR(bar(iota), std::pow(iota, 0.4), 1e-9);
        EXPECT_NEAR(same(iota), a(iota), 1e-12);
    }
    const PrincipalCurve pair(fixtures::staircase_pair());
    for (double iota : numerics::linspace(pair.psi_bar_zero() * pair.psi_bar_zero(), 1.0, 41))
        EXPECT_NEAR(pair.psi_bar()(iota), std::sqrt(iota), 1e-12);
}

TEST(TransformsProperty, RoundTripsAndRatio) {
    auto g = rng::substream(12, 0, 0);
    for (int rep = 0; rep < 60; ++rep) {
        const MonotoneFn x = random_cdf(g);
        const PsiFn psi = psi_transform(x);
        EXPECT_LE(psi.ratio_violation(), 1e-12);
        EXPECT_LT(testsupport::sup_error(psi_to_cdf(psi), x), 1e-8);
        const DeltaPath d = delta_transform(x);
        EXPECT_TRUE(d.is_valid());
        for (double sl : d.slopes()) {
            EXPECT_GE(sl, -1e-9);
            EXPECT_LE(sl, 1.0 + 1e-9);
        }
        // x vanishes below e^{-delta(t_max)} by construction, so compare above it.
        const MonotoneFn back = delta_to_cdf(d);
        double err = 0.0;
        for (double u : numerics::linspace(1e-3, 1.0, 10000)) {
            bool near = false;
            for (double k : x.knots()) near = near || std::abs(u - k) < 1e-6;
            if (!near) err = std::max(err, std::abs(back(u) - x(u)));
        }
        EXPECT_LT(err, 1e-8);
    }
}

TEST(TransformsProperty, PsiIntegralIdentity) {
    auto g = rng::substream(13, 0, 0);
    for (int rep = 0; rep < 30; ++rep) {
        const MonotoneFn x = random_cdf(g);
        const PsiFn psi = psi_transform(x);
        for (int k = 0; k < 20; ++k) {
            const double iota = 0.02 + 0.98 * g.uniform();
            const double lhs = x.integral(psi(iota), 1.0);
            // Riemann-Stieltjes sum of s d ln psi with midpoint tags.
            const std::size_t N = 20000;
            double rs = 0.0, prev = std::log(psi(iota));
            for (std::size_t j = 1; j <= N; ++j) {
                const double s0 = iota + (1.0 - iota) * (j - 1) / N, s1 = iota + (1.0 - iota) * j / N;
                const double cur = std::log(psi(s1));
                rs += 0.5 * (s0 + s1) * (cur - prev);
                prev = cur;
            }
            EXPECT_NEAR(lhs, rs, 1e-7);
            EXPECT_NEAR(lhs, psi_stieltjes(psi, iota), 1e-9);
        }
    }
}

// ------------------------------------------------------------- feasibility

TEST(Feasibility, PrincipalCurve) {
    const PrincipalCurve power(fixtures::power_forms({0.5, 0.5}));
    for (double s : numerics::linspace(0.0, 1.0, 21)) {
        const auto nu = power.nu(s);
        EXPECT_NEAR(nu[0], s, 1e-9);
        EXPECT_NEAR(nu[1], s, 1e-9);
    }
    const PrincipalCurve single(ReducedForm({kStair}));
    for (double s : numerics::linspace(0.25, 1.0, 13)) EXPECT_NEAR(single.nu(s)[0], s, 1e-9);
    // The extremal pair passes through (1/2,1/2) and (3/4,3/4).
    const PrincipalCurve pair(fixtures::staircase_pair());
    for (double s : {0.5, 0.75}) {
        const auto nu = pair.nu(s);
        EXPECT_NEAR(nu[0], s, 1e-12);
        EXPECT_NEAR(nu[1], s, 1e-12);
    }
}

TEST(Feasibility, BorderAt) {
    EXPECT_DOUBLE_EQ(border_at(fixtures::staircase_pair(), {0.75, 0.75}), 1.0);
    auto g = rng::substream(21, 0, 0);
    EXPECT_DOUBLE_EQ(border_at(testsupport::random_form(g, 3), {1.0, 1.0, 1.0}), 1.0);
    // On the curve (s,s): s^2 + (1 - s^{2/1.2}) 1.2 > 1 for small s.
    const ReducedForm p = fixtures::power_forms({0.6, 0.6});
    EXPECT_NEAR(border_at(p, {0.3, 0.3}), 0.09 + (1.0 - std::pow(0.3, 2.0 / 1.2)) * 1.2, 1e-12);
    EXPECT_GT(border_at(p, {0.3, 0.3}), 1.0);
}

TEST(Feasibility, BorderAlongCurvePower) {
    for (const std::vector<double>& al : {std::vector<double>{0.5, 0.3}, {0.6, 0.6}, {0.2, 0.3, 0.4}}) {
        const ReducedForm x = fixtures::power_forms(al);
        double sum = 0.0;
        for (double a : al) sum += a;
        const double n = static_cast<double>(al.size());
        for (double s : numerics::linspace(0.0, 1.0, 21)) {
            const auto b = border_along_curve(x, s);
            EXPECT_NEAR(b.direct, std::pow(s, n) + (1.0 - std::pow(s, n / sum)) * sum, 1e-9);
            EXPECT_NEAR(b.direct, b.closed, 1e-9);
        }
    }
    EXPECT_NEAR(border_along_curve(fixtures::staircase_pair(), 0.6).direct, 1.0, 1e-12);
    EXPECT_NEAR(border_along_curve(fixtures::staircase_pair(), 1.0).direct, 1.0, 1e-12);
}

TEST(Feasibility, Verdicts) {
    EXPECT_EQ(check_feasible(fixtures::power_forms({0.5, 0.3})).status, FeasibilityStatus::Feasible);
    const auto bad = check_feasible(fixtures::power_forms({0.6, 0.6}));
    EXPECT_EQ(bad.status, FeasibilityStatus::Infeasible);
    EXPECT_GT(bad.witness_B, 1.0 + kDefaultEta);
    EXPECT_NEAR(bad.sup_B, 1.2, 1e-9);  // the power family peaks at s = 0
    EXPECT_EQ(check_feasible(fixtures::power_forms({0.5, 0.5})).status,
              FeasibilityStatus::BoundaryExtremal);
    EXPECT_EQ(check_feasible(fixtures::staircase_pair()).status, FeasibilityStatus::BoundaryExtremal);
}

TEST(Feasibility, Extremality) {
    EXPECT_TRUE(check_extremal(fixtures::power_forms({0.5, 0.5})));
    EXPECT_FALSE(check_extremal(fixtures::power_forms({0.4, 0.4})));
    EXPECT_TRUE(check_extremal(fixtures::staircase_pair()));
    EXPECT_THROW(check_extremal(fixtures::power_forms({0.6, 0.6})), NotFeasible);
}

TEST(Feasibility, DeltaFeasibility) {
    EXPECT_TRUE(check_feasible_delta({DeltaPath::linear(0.5), DeltaPath::linear(0.5)}));
    EXPECT_TRUE(check_feasible_delta({DeltaPath::linear(0.0), DeltaPath::linear(0.0)}));
    const ReducedForm bad = fixtures::power_forms({0.6, 0.6});
    EXPECT_FALSE(check_feasible_delta({delta_transform(bad[0]), delta_transform(bad[1])}));
    const ReducedForm ok = fixtures::power_forms({0.5, 0.3});
    EXPECT_TRUE(check_feasible_delta({delta_transform(ok[0]), delta_transform(ok[1])}));
}

TEST(FeasibilityProperty, CurveStructureAndClosedForm) {
    auto g = rng::substream(22, 0, 0);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 2 + rep % 2;
        const ReducedForm x = testsupport::random_form(g, n);
        const PrincipalCurve c(x);
        std::vector<double> prev(n, 0.0);
        for (double s : numerics::linspace(0.0, 1.0, 201)) {
            const auto nu = c.nu(s);
            double prod = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                EXPECT_GE(nu[i], prev[i] - 1e-12);
                prod *= nu[i];
            }
            prev = nu;
            EXPECT_NEAR(prod, std::pow(std::max(s, c.psi_bar_zero()), static_cast<double>(n)), 1e-9);
            const auto b = border_along_curve(c, s);
            EXPECT_NEAR(b.direct, b.closed, 1e-6);
        }
        for (double u : c.nu(1.0)) EXPECT_NEAR(u, 1.0, 1e-12);
    }
}

TEST(FeasibilityProperty, ExtremalIffBindingAlongCurve) {
    auto g = rng::substream(23, 0, 0);
    const double tol = kDefaultEta;
    for (int rep = 0; rep < 24; ++rep) {
        const ReducedForm x =
            rep % 2 ? testsupport::random_extremal(g, 2 + rep % 4 / 2) : testsupport::random_form(g, 2);
        const PrincipalCurve c(x);
        const auto v = check_feasible(c, tol);
        if (v.status == FeasibilityStatus::Infeasible) continue;
        double dev = 0.0;
        for (double s : numerics::linspace(0.0, 1.0, 401))
            dev = std::max(dev, std::abs(border_along_curve(c, s).direct - 1.0));
        // check_extremal is the gap test on the verdict just computed.
        EXPECT_EQ(v.extremality_gap <= tol, dev <= 1e-6) << "dev " << dev;
    }
}
