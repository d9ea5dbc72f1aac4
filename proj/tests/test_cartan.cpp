#include "doctest.h"

#include <cmath>
#include <random>

#include "locsym/cartan.hpp"
#include "oracles.hpp"

using namespace locsym;

namespace {

GroupSpec sl(std::vector<int> ns, Arithmetic a = Arithmetic::Float) {
    GroupSpec s;
    for (int n : ns) s.factors.push_back({"sl", n});
    s.arithmetic = a;
    return s;
}

GroupElement int2x2(long a, long b, long c, long d) {
    return GroupElement(sl({2}, Arithmetic::ExactInt),
                        GroupElement::ExactBlocks{ExactBlock(2, {Rational(a), Rational(b), Rational(c), Rational(d)})});
}

std::vector<double> vec(const ChamberVector& v) { return {v.coords().begin(), v.coords().end()}; }

} // namespace

TEST_CASE("cartan projection examples") {
    const auto e = GroupElement::identity(sl({3}));
    for (double h : vec(cartan_projection(e))) CHECK(h == 0.0);

    const auto a = GroupElement::exp_diagonal(sl({2}), {1, -1});
    const auto pa = vec(cartan_projection(a));
    const auto oa = oracle::cartan(a);
    CHECK(pa[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(pa[1] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(oa[0] == doctest::Approx(1.0).epsilon(1e-12));

    const auto m = int2x2(2, 1, 1, 1);
    const double expect = std::log((3 + std::sqrt(5.0)) / 2);
    const auto pm = vec(cartan_projection(m));
    CHECK(pm[0] == doctest::Approx(expect).epsilon(1e-13));
    CHECK(pm[1] == doctest::Approx(-expect).epsilon(1e-13));
    CHECK(oracle::cartan(m)[0] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(expect == doctest::Approx(0.96242).epsilon(1e-5));
}

TEST_CASE("cartan projection agrees with the eigen-solver oracle on random SL(3)") {
    std::mt19937_64 rng(11);
    const auto spec = sl({3});
    for (int k = 0; k < 500; ++k) {
        const auto g = oracle::random_sl3_word(spec, rng, 8);
        const auto p = vec(cartan_projection(g));
        const auto o = oracle::cartan(g);
        double sum = 0;
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(p[i] - o[i]) <= 1e-9);
            sum += p[i];
        }
        CHECK(std::abs(sum) <= 1e-12);
        CHECK(p[0] >= p[1]);
        CHECK(p[1] >= p[2]);
    }
}

TEST_CASE("distances d, d', d'' on diagonal elements") {
    const auto rs2 = build_root_system(sl({2}));
    const auto rs3 = build_root_system(sl({3}));
    const auto e2 = GroupElement::identity(sl({2}));
    const auto e3 = GroupElement::identity(sl({3}));
    const auto a = GroupElement::exp_diagonal(sl({2}), {1, -1});
    const auto x = GroupElement::exp_diagonal(sl({3}), {2, 1, -3});

    CHECK(distance_d(a, a) == doctest::Approx(0.0));
    CHECK(distance_d(a, e2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    CHECK(distance_d(x, e3) == doctest::Approx(std::sqrt(14.0)).epsilon(1e-13));
    CHECK(distance_dprime(rs2, a, e2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    CHECK(distance_dprime(rs3, x, e3) == doctest::Approx(5 / std::sqrt(2.0)).epsilon(1e-13));
    CHECK(distance_dprime(rs3, x, e3) == doctest::Approx(distance_dprime(rs3, x.inverse(), e3)).epsilon(1e-13));

    CHECK(distance_dsecond(rs3, 1.0, x, e3) == doctest::Approx(5 / std::sqrt(2.0)).epsilon(1e-13));
    const double second = std::sqrt(2.0) * 5 / std::sqrt(2.0) + (2 - std::sqrt(2.0)) * std::sqrt(14.0);
    CHECK(distance_dsecond(rs3, 2.0, x, e3) == doctest::Approx(second).epsilon(1e-13));
    CHECK(second == doctest::Approx(7.19185).epsilon(1e-5));
    CHECK(distance_dsecond(rs3, rs3.rho_norm, x, e3) ==
          doctest::Approx(rs3.rho_norm * distance_dprime(rs3, x, e3)).epsilon(1e-13));
    CHECK_THROWS_AS(distance_dsecond(rs3, 0.0, x, e3), std::invalid_argument);
    CHECK_THROWS_AS(distance_d(a, e3), std::invalid_argument);
}

TEST_CASE("distance properties on random SL(3) triples") {
    std::mt19937_64 rng(3);
    const auto spec = sl({3});
    const auto rs = build_root_system(spec);
    const double ratio = rs.rho_min / rs.rho_norm;
    for (int k = 0; k < 3000; ++k) {
        const auto x = oracle::random_sl3_word(spec, rng, 6);
        const auto y = oracle::random_sl3_word(spec, rng, 6);
        const auto z = oracle::random_sl3_word(spec, rng, 6);
        const auto g = oracle::random_sl3_word(spec, rng, 4);
        const double d = distance_d(x, y);
        const double dp = distance_dprime(rs, x, y);
        CHECK(std::abs(dp - distance_dprime(rs, y, x)) <= 1e-9);
        CHECK(dp <= distance_dprime(rs, x, z) + distance_dprime(rs, z, y) + 1e-9);
        CHECK(ratio * d <= dp + 1e-9);
        CHECK(dp <= d + 1e-9);
        for (double s : {0.3, rs.rho_norm, 1.7, 2 * rs.rho_norm}) {
            const double ds = distance_dsecond(rs, s, x, y);
            CHECK(s * dp <= ds + 1e-9);
            CHECK(ds <= s * d + 1e-9);
        }
        CHECK(std::abs(distance_d(g * x, g * y) - d) <= 1e-9);
        CHECK(std::abs(distance_dprime(rs, g * x, g * y) - dp) <= 1e-9);
        CHECK(std::abs(distance_dsecond(rs, 1.7, g * x, g * y) - distance_dsecond(rs, 1.7, x, y)) <= 1e-9);

        // x^+ + y^+ - (xy)^+ lies in the positive-root cone: simple-root
        // coordinates of a trace-free vector v are the partial sums of v.
        const auto px = vec(cartan_projection(x)), py = vec(cartan_projection(y)), pxy = vec(cartan_projection(x * y));
        double partial = 0;
        for (int i = 0; i < 2; ++i) {
            partial += px[i] + py[i] - pxy[i];
            CHECK(partial >= -1e-9);
        }
        for (const auto& w : rs.chamber_rays) {
            CHECK(dot(w, pxy) <= dot(w, px) + dot(w, py) + 1e-9);
        }
    }
}

TEST_CASE("cartan projection rejects bad matrices") {
    const auto spec = sl({2});
    GroupElement huge(spec, GroupElement::FloatBlocks{FloatBlock(2, {1e16, 0, 0, 1e-16})});
    CHECK_THROWS_AS(cartan_projection(huge), NumericalError);
    GroupElement nan(spec, GroupElement::FloatBlocks{FloatBlock(2, {NAN, 0, 0, 1})});
    CHECK_THROWS_AS(cartan_projection(nan), NumericalError);
    GroupElement singular(sl({3}), GroupElement::FloatBlocks{FloatBlock(3, {1, 0, 0, 0, 1, 0, 0, 0, 0})});
    CHECK_THROWS_AS(cartan_projection(singular), NumericalError);
}
