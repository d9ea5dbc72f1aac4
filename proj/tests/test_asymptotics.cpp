#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "locsym/asymptotics.hpp"
#include "oracles.hpp"

using namespace locsym;

namespace {

GroupSpec spec_of(std::vector<int> ns, Arithmetic a = Arithmetic::Float) {
    GroupSpec s;
    for (int n : ns) s.factors.push_back({"sl", n});
    s.arithmetic = a;
    return s;
}

ChamberVector cv(std::vector<double> h, std::vector<int> sizes) { return ChamberVector(std::move(h), std::move(sizes)); }

double rank_one_volume(double r) { return (std::cosh(std::sqrt(2.0) * r) - 1) / std::sqrt(2.0); }

// SL(3) volumes in simple-root coordinates (a, b) = (H1 - H2, H2 - H3),
// dH = da db / sqrt 3. The inner b-integral is closed form, the outer one Simpson.
double sl3_volume_oracle(BallKind kind, double r) {
    auto inner = [](double a, double c) {
        // int_0^c sinh b sinh(a + b) db
        return 0.5 * ((std::sinh(a + 2 * c) - std::sinh(a)) / 2 - c * std::cosh(a));
    };
    const double T = std::sqrt(2.0) * r;
    const double amax = kind == BallKind::Polyhedral ? T : r * std::sqrt(1.5);
    auto f = [&](double a) {
        const double c = kind == BallKind::Polyhedral ? T - a : 0.5 * (-a + std::sqrt(std::max(0.0, 6 * r * r - 3 * a * a)));
        return std::sinh(a) * inner(a, c);
    };
    const int n = 20000;
    const double h = amax / n;
    double s = f(0) + f(amax);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(i * h);
    return s * h / 3 / std::sqrt(3.0);
}

OrbitBall sanov_ball(int L) {
    const auto spec = spec_of({2}, Arithmetic::ExactInt);
    auto g = [&](long a, long b, long c, long d) {
        return GroupElement(spec, GroupElement::ExactBlocks{ExactBlock(2, {Rational(a), Rational(b), Rational(c), Rational(d)})});
    };
    return enumerate(GeneratorSet(spec, {g(1, 2, 0, 1), g(1, 0, 2, 1)}), L);
}

} // namespace

TEST_CASE("density omega") {
    const auto r2 = build_root_system(spec_of({2}));
    CHECK(density_omega(r2, cv({1, -1}, {2})) == doctest::Approx(std::sinh(2.0)));
    CHECK(density_omega(r2, cv({1, -1}, {2})) == doctest::Approx(3.62686).epsilon(1e-5));
    CHECK(density_omega(r2, cv({0, 0}, {2})) == 0.0);
    const auto r3 = build_root_system(spec_of({3}));
    CHECK(density_omega(r3, cv({1, 0, -1}, {3})) == doctest::Approx(5.00905).epsilon(1e-5));
    CHECK(density_omega(r3, cv({0, 0, 0}, {3})) == 0.0);
    const auto rp = build_root_system(spec_of({2, 2}));
    CHECK(density_omega(rp, cv({1, -1, 0.5, -0.5}, {2, 2})) == doctest::Approx(std::sinh(2.0) * std::sinh(1.0)));
}

TEST_CASE("rank-one volumes match the closed form") {
    const auto rs = build_root_system(spec_of({2}));
    for (double r : {0.05, 0.3, 1.0, 4.0, 10.0, 15.0}) {
        CHECK(polyhedral_ball_volume(rs, r) == doctest::Approx(rank_one_volume(r)).epsilon(1e-6));
        CHECK(classical_ball_volume(rs, r) == doctest::Approx(rank_one_volume(r)).epsilon(1e-6));
    }
}

TEST_CASE("SL(3) volumes against simple-root oracle") {
    const auto rs = build_root_system(spec_of({3}));
    for (double r : {0.3, 1.0, 2.5, 6.0}) {
        CHECK(polyhedral_ball_volume(rs, r) == doctest::Approx(sl3_volume_oracle(BallKind::Polyhedral, r)).epsilon(1e-4));
        CHECK(classical_ball_volume(rs, r) == doctest::Approx(sl3_volume_oracle(BallKind::Classical, r)).epsilon(1e-4));
    }
}

TEST_CASE("volumes positive, increasing, polyhedral ball larger") {
    for (auto ns : {std::vector<int>{3}, std::vector<int>{2, 2}, std::vector<int>{4}}) {
        const auto rs = build_root_system(spec_of(ns));
        double prev_p = 0, prev_c = 0;
        for (double r = 0.5; r <= 6.0; r += 0.5) {
            const double p = polyhedral_ball_volume(rs, r), c = classical_ball_volume(rs, r);
            CHECK(p > prev_p);
            CHECK(c > prev_c);
            // d' <= d, so the classical ball sits inside the polyhedral one
            CHECK(c <= p * (1 + 1e-4));
            prev_p = p;
            prev_c = c;
        }
    }
}

TEST_CASE("small-r volume degree equals dim X") {
    for (auto ns : {std::vector<int>{3}, std::vector<int>{2, 2}, std::vector<int>{2}}) {
        const auto rs = build_root_system(spec_of(ns));
        for (auto kind : {BallKind::Polyhedral, BallKind::Classical}) {
            const auto fit = fit_ball_volume(rs, kind, VolumeRegime::Small);
            CHECK(fit.fitted_polynomial_degree == doctest::Approx(rs.dim_x).epsilon(0.3 / rs.dim_x));
            CHECK(fit.fitted_exponential_rate == 0.0);
        }
    }
}

TEST_CASE("SL(3) large-r volume growth") {
    const auto rs = build_root_system(spec_of({3}));
    const auto p = fit_ball_volume(rs, BallKind::Polyhedral, VolumeRegime::Large);
    const auto c = fit_ball_volume(rs, BallKind::Classical, VolumeRegime::Large);
    CHECK(std::abs(p.fitted_exponential_rate - 2 * std::sqrt(2.0)) < 0.05);
    CHECK(std::abs(c.fitted_exponential_rate - 2 * std::sqrt(2.0)) < 0.05);
    CHECK(std::abs(p.fitted_polynomial_degree - 1.0) < 0.3);
    CHECK(std::abs(c.fitted_polynomial_degree - 0.5) < 0.3);
    CHECK(p.fitted_polynomial_degree > c.fitted_polynomial_degree + 0.2);
    CHECK(p.radii.size() == p.volumes.size());
    CHECK(p.log_volumes.front() == doctest::Approx(std::log(p.volumes.front())));
}

TEST_CASE("volume errors") {
    const auto r5 = build_root_system(spec_of({5}));
    CHECK_THROWS_AS(polyhedral_ball_volume(r5, 1.0), UnsupportedGroupError);
    const auto r3 = build_root_system(spec_of({3}));
    CHECK_THROWS_AS(polyhedral_ball_volume(r3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(polyhedral_ball_volume(r3, 5.0, {1e-4, 50}), NumericalError);
    CHECK_THROWS_AS(fit_ball_volume(r3, BallKind::Classical, VolumeRegime::Large, {5, 6, 7}), std::invalid_argument);
}

TEST_CASE("green asymptotic") {
    const auto r3 = build_root_system(spec_of({3}));
    const double zeta = 0.4;
    auto log_g = [&](double t) {
        const double u = t / std::sqrt(2.0);
        return std::log(green_asymptotic(r3, zeta, cv({u, 0, -u}, {3})));
    };
    const double slope = (log_g(400) - log_g(200)) / 200;
    CHECK(slope == doctest::Approx(-(std::sqrt(2.0) + zeta)).epsilon(1e-2));

    const auto r2 = build_root_system(spec_of({2}));
    const double u = 0.1 / std::sqrt(2.0);
    CHECK(green_asymptotic(r2, 1.0, cv({u, -u}, {2})) == doctest::Approx(std::log(10.0)));
    CHECK(green_asymptotic(r3, 1.0, cv({u, 0, -u}, {3})) == doctest::Approx(1000.0));

    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        auto h = oracle::random_chamber_vector(r3, rng);
        const ChamberVector H(h, {3});
        if (H.norm() < 1e-9) continue;
        CHECK(green_asymptotic(r3, 0.3, H) >= green_asymptotic(r3, 0.6, H));
    }
    CHECK_THROWS_AS(green_asymptotic(r3, 0.0, cv({1, 0, -1}, {3})), std::invalid_argument);
    CHECK_THROWS_AS(green_asymptotic(r3, 1.0, cv({0, 0, 0}, {3})), std::invalid_argument);
}

TEST_CASE("green series: trivial group is a single converging term") {
    const auto spec = spec_of({2});
    const auto ball = enumerate(GeneratorSet(spec, {}), 3);
    const auto rs = build_root_system(spec);
    const auto e = GroupElement::identity(spec);
    const auto y = GroupElement::exp_diagonal(spec, {0.5, -0.5});
    const auto gd = green_series_diagnostic(ball, rs, 0.5, e, y);
    CHECK(gd.terms == 1);
    CHECK(gd.verdict == SeriesVerdict::Converging);
    const auto self = green_series_diagnostic(ball, rs, 0.5, e, e);
    CHECK(self.terms == 0);
    CHECK(self.skipped == 1);
}

TEST_CASE("green series dichotomy for the Sanov subgroup") {
    const auto ball = sanov_ball(12);
    const auto rs = build_root_system(ball.spec());
    OrbitGeometry geom(ball, rs);
    const auto conv = green_series_diagnostic(geom, 1.0);
    const auto div = green_series_diagnostic(geom, 0.3);
    CHECK(conv.verdict == SeriesVerdict::Converging);
    CHECK(div.verdict == SeriesVerdict::Diverging);
    for (const auto* g : {&conv, &div}) {
        REQUIRE(g->partial_sums.size() == 13);
        for (std::size_t i = 1; i < g->partial_sums.size(); ++i) CHECK(g->partial_sums[i] >= g->partial_sums[i - 1]);
    }
    CHECK_THROWS_AS(green_series_diagnostic(geom, 0.0), std::invalid_argument);
}

TEST_CASE("green summands against the Poincare summands") {
    const auto spec = spec_of({3});
    const auto rs = build_root_system(spec);
    std::mt19937_64 rng(17);
    std::vector<GroupElement> gens;
    for (int i = 0; i < 2; ++i) gens.push_back(oracle::random_sl3_word(spec, rng, 10));
    gens.push_back(GroupElement::exp_diagonal(spec, {1.2, 0.2, -1.4}));
    const auto ball = enumerate(GeneratorSet(spec, gens), 5);
    OrbitGeometry geom(ball, rs);
    const double zeta = 0.3, eps = 1.0;
    const double C = std::pow(1 + std::sqrt(2.0), 3); // sup over d >= 1 of prod(1 + <alpha, H>) d^{-7/2}
    int upper = 0, lower = 0;
    for (std::size_t i = 0; i < geom.size(); ++i) {
        const double d = geom.d(i), dp = geom.dprime(i);
        if (d < 1.0) continue;
        const double g = green_series_term(rs, zeta, d, dp, geom.root_weight(i));
        CHECK(g <= C * std::exp(-(rs.rho_norm + zeta) * dp) * (1 + 1e-12));
        ++upper;
        if (d >= 7.0) {
            CHECK(g >= std::exp(-(rs.rho_norm + zeta + eps) * d));
            ++lower;
        }
    }
    CHECK(upper > 100);
    CHECK(lower > 10);
}

TEST_CASE("heat bounds") {
    const auto spec = spec_of({2});
    const auto rs = build_root_system(spec);
    const double rho = rs.rho_norm;
    const auto trivial = enumerate(GeneratorSet(spec, {}), 2);
    OrbitGeometry tg(trivial, rs);

    HeatBoundParams p;
    p.which = HeatCase::I;
    p.t = 1.0;
    p.s = 0.3;
    p.D = rs.dim_x;
    const auto tm = heat_bound_terms(p, 0.0, tg);
    CHECK(tm.p_xy == doctest::Approx(1.0));
    CHECK(tm.quotient_distance == 0.0);
    CHECK(heat_bound(p, tm, heat_default_D(rs)) == doctest::Approx(std::exp(-rho * rho)));
    CHECK(heat_default_D(rs) == 3.0);
    p.D.reset();
    CHECK(heat_bound(p, tm, heat_default_D(rs)) == doctest::Approx(std::pow(2.0, -0.5) * std::exp(-rho * rho)));

    // synthetic terms for delta'' in [|rho|, 2|rho|)
    HeatBoundTerms st{rho, 2, 1.0, 0.7, 3.0, 2.0, 5.0};
    HeatBoundParams q;
    q.which = HeatCase::II;
    q.s1 = 0.35;
    q.s2 = 0.6;
    auto slope = [&](HeatBoundParams hp, double t) {
        hp.t = t;
        const double a = log_heat_bound(hp, st, 3.0);
        hp.t = 2 * t;
        return (log_heat_bound(hp, st, 3.0) - a) / t;
    };
    CHECK(slope(q, 1e5) == doctest::Approx(-(rho * rho - q.s2 * q.s2)).epsilon(1e-3));

    HeatBoundParams c;
    c.which = HeatCase::III;
    c.s = 1.1;
    c.eps = 1e-7;
    const double lambda0 = rho * rho - (1.0 - rho) * (1.0 - rho);
    CHECK(slope(c, 1e5) == doctest::Approx(-lambda0).epsilon(1e-3));

    // parameter orders
    HeatBoundParams bad = q;
    bad.s1 = 0.6;
    bad.s2 = 0.35;
    CHECK_THROWS_AS(heat_bound(bad, st, 3.0), std::invalid_argument);
    bad = q;
    bad.s1 = 0.2; // below delta'' - |rho|
    CHECK_THROWS_AS(heat_bound(bad, st, 3.0), std::invalid_argument);
    bad = c;
    bad.s = 0.9;
    CHECK_THROWS_AS(heat_bound(bad, st, 3.0), std::invalid_argument);
    bad = c;
    bad.eps = 0.0;
    CHECK_THROWS_AS(heat_bound(bad, st, 3.0), std::invalid_argument);
    bad = p;
    bad.s = 0.8; // case (i) needs s < |rho|
    CHECK_THROWS_AS(heat_bound(bad, tm, 3.0), std::invalid_argument);
    bad = p;
    bad.t = 0.0;
    CHECK_THROWS_AS(heat_bound(bad, tm, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(parse_heat_case("iv"), ConfigError);
}
