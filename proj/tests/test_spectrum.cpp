#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "locsym/spectrum.hpp"

using namespace locsym;

namespace {
double classical_rank_one(double rho, double delta) {
    // lambda0 = delta (2 rho - delta) beyond rho, rho^2 below
    return delta <= rho ? rho * rho : delta * (2 * rho - delta);
}
} // namespace

TEST_CASE("characterization endpoints") {
    const double rho = 1 / std::sqrt(2.0);
    CHECK(lambda0_characterization(rho, 0.0) == doctest::Approx(0.5));
    CHECK(lambda0_characterization(rho, 2 * rho) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(lambda0_characterization(1.0, 1 + 1 / std::sqrt(2.0)) == doctest::Approx(0.5));
}

TEST_CASE("characterization clips with warning") {
    std::vector<std::string> w;
    CHECK(lambda0_characterization(1.0, 2.03, &w) == 0.0);
    REQUIRE(w.size() == 1);
    w.clear();
    CHECK(lambda0_characterization(1.0, -0.01, &w) == 1.0);
    CHECK(w.size() == 1);
    w.clear();
    lambda0_characterization(1.0, 1.3, &w);
    CHECK(w.empty());
}

TEST_CASE("characterization dense monotone and continuous") {
    for (double rho : {1 / std::sqrt(2.0), 1.0, std::sqrt(2.0)}) {
        double prev = lambda0_characterization(rho, 0.0);
        const int n = 20000;
        for (int i = 1; i <= n; ++i) {
            const double d = 2 * rho * i / n;
            const double v = lambda0_characterization(rho, d);
            CHECK(v <= prev + 1e-15);
            CHECK(prev - v < 4 * rho * rho / n + 1e-12);
            CHECK(v >= 0.0);
            CHECK(v <= rho * rho);
            prev = v;
        }
    }
}

TEST_CASE("rank one reproduces classical formula") {
    const double rho = 1 / std::sqrt(2.0);
    for (int i = 0; i <= 100; ++i) {
        const double d = 2 * rho * i / 100;
        CHECK(lambda0_characterization(rho, d) == doctest::Approx(classical_rank_one(rho, d)).epsilon(1e-13));
    }
}

TEST_CASE("riemannian bounds cases") {
    const double rmin = 1 / std::sqrt(2.0);
    auto a = lambda0_bounds_riemannian(1.0, rmin, 0.5);
    CHECK(a.lower == 1.0);
    CHECK(a.upper == 1.0);
    auto b = lambda0_bounds_riemannian(1.0, rmin, std::sqrt(2.0));
    CHECK(b.lower == doctest::Approx(0.5));
    CHECK(b.upper == doctest::Approx(2 * std::sqrt(2.0) - 2));
    auto c = lambda0_bounds_riemannian(1.0, rmin, 2.0);
    CHECK(c.lower == 0.0);
    CHECK(c.upper == doctest::Approx(0.0).epsilon(1e-14));
    // rho_min < delta < |rho|: upper still maximal
    auto e = lambda0_bounds_riemannian(1.0, rmin, 0.9);
    CHECK(e.upper == 1.0);
    CHECK(e.lower == doctest::Approx(1 - std::pow(0.9 - rmin, 2)));
    CHECK_THROWS_AS(lambda0_bounds_riemannian(1.0, 1.5, 1.0), std::invalid_argument);
}

TEST_CASE("polyhedral lower bound") {
    CHECK(lambda0_lower_first_improvement(1.0, 0.7) == 1.0);
    CHECK(lambda0_lower_first_improvement(1.0, 2.0) == 0.0);
    CHECK(lambda0_lower_first_improvement(1.0, 1.5) == doctest::Approx(0.75));
    auto c = lambda0_combined_bounds(1.0, std::sqrt(2.0), 2.0);
    CHECK(c.lower == 0.0);
    CHECK(c.upper == doctest::Approx(0.828427).epsilon(1e-5));
}

TEST_CASE("consistency: rank one coincides") {
    const double rho = 1 / std::sqrt(2.0);
    for (double d : {0.3, 0.8, 1.2, std::sqrt(2.0)}) {
        auto r = consistency_check({rho, rho, d, d, d});
        CHECK(r.consistent);
        CHECK(r.riemannian_bounds.lower == doctest::Approx(*r.lambda0_exact));
        CHECK(r.riemannian_bounds.upper == doctest::Approx(*r.lambda0_exact));
        CHECK(r.polyhedral_lower == doctest::Approx(*r.lambda0_exact));
    }
}

TEST_CASE("consistency: product example and lattice") {
    auto r = consistency_check({1.0, 1 / std::sqrt(2.0), std::sqrt(2.0), 2.0, 1 + 1 / std::sqrt(2.0)});
    CHECK(r.consistent);
    CHECK(*r.lambda0_exact == doctest::Approx(0.5));
    CHECK(r.riemannian_bounds.lower == doctest::Approx(0.5));
    CHECK(r.riemannian_bounds.upper == doctest::Approx(0.828427).epsilon(1e-5));
    CHECK(r.polyhedral_lower == 0.0);
    CHECK(r.lambda0_interval.contains(*r.lambda0_exact, 1e-12));

    const double rho = std::sqrt(2.0);
    auto l = consistency_check({rho, std::sqrt(6.0) / 2, 2 * rho, 2 * rho, 2 * rho});
    CHECK(l.consistent);
    CHECK(*l.lambda0_exact == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(l.lambda0_interval.upper == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("consistency flags bad triples") {
    // delta'' far below delta: exact value above every upper bound
    auto r = consistency_check({1.0, 1 / std::sqrt(2.0), 1.8, 1.9, 0.5});
    CHECK_FALSE(r.consistent);
    CHECK_FALSE(r.violations.empty());
}

TEST_CASE("exact value in intersection over admissible grid") {
    std::mt19937_64 rng(11);
    for (double rho : {1.0, std::sqrt(2.0)}) {
        const double rmin = rho == 1.0 ? 1 / std::sqrt(2.0) : std::sqrt(6.0) / 2;
        const int n = 24;
        for (int i = 0; i <= n; ++i)
            for (int j = i; j <= n; ++j)
                for (int k = j; k <= n; ++k) {
                    const double d = 2 * rho * i / n, d2 = 2 * rho * j / n, d1 = 2 * rho * k / n;
                    // d' >= (rho_min/|rho|) d bounds how far d'' and d' can exceed d
                    if (d2 > d + rho - rmin + 1e-12 || d1 > d * rho / rmin + 1e-12) continue;
                    auto rep = consistency_check({rho, rmin, d, d1, d2, 0.0});
                    auto lo = std::max(lambda0_bounds_riemannian(rho, rmin, d).lower, lambda0_lower_first_improvement(rho, d1));
                    auto up = lambda0_bounds_riemannian(rho, rmin, d).upper;
                    CHECK(rep.lambda0_interval.lower == doctest::Approx(lo));
                    CHECK(rep.lambda0_interval.upper == doctest::Approx(up));
                    CHECK(rep.lambda0_interval.upper <= rho * rho + 1e-12);
                    CHECK(rep.lambda0_interval.lower >= 0.0);
                    CHECK(rep.lambda0_interval.contains(*rep.lambda0_exact, 1e-12));
                    CHECK(rep.consistent);
                }
    }
}
