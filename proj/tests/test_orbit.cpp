#include "doctest.h"

#include <cmath>
#include <set>

#include "locsym/cartan.hpp"
#include "locsym/orbit.hpp"

using namespace locsym;

namespace {

GroupSpec sl2(Arithmetic a) {
    GroupSpec s;
    s.factors.push_back({"sl", 2});
    s.arithmetic = a;
    return s;
}

GroupElement exact2(const GroupSpec& spec, Rational a, Rational b, Rational c, Rational d) {
    return GroupElement(spec, GroupElement::ExactBlocks{ExactBlock(2, {a, b, c, d})});
}

GeneratorSet sanov() {
    const auto spec = sl2(Arithmetic::ExactInt);
    return GeneratorSet(spec, {exact2(spec, 1, 2, 0, 1), exact2(spec, 1, 0, 2, 1)});
}

GeneratorSet cyclic() {
    const auto spec = sl2(Arithmetic::Float);
    return GeneratorSet(spec, {GroupElement::exp_diagonal(spec, {1, -1})});
}

} // namespace

TEST_CASE("cyclic hyperbolic group") {
    const auto ball = enumerate(cyclic(), 3);
    CHECK(ball.size() == 7);
    CHECK(ball.growth_per_level() == std::vector<std::size_t>{1, 2, 2, 2});
    CHECK(ball.word_length(0) == 0);
    CHECK(ball.element(0).is_identity());
    CHECK(trust_radius(ball) == doctest::Approx(3 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::string(ball.storage_name()) == "float");
}

TEST_CASE("Sanov subgroup is free of rank two") {
    const auto ball = enumerate(sanov(), 2);
    CHECK(ball.size() == 17);
    CHECK(ball.growth_per_level() == std::vector<std::size_t>{1, 4, 12});
    const auto big = enumerate(sanov(), 7);
    for (int w = 0; w <= 7; ++w) {
        CHECK(static_cast<double>(big.growth_per_level()[w]) == free_group_level_bound(4, w));
    }
    CHECK(std::string(big.storage_name()) == "int64");
}

TEST_CASE("torsion collapses under dedup") {
    const auto spec = sl2(Arithmetic::ExactInt);
    // [[0,1],[-1,0]] has order 4 in SL(2, Z): {e, a, a^-1, a^2 = -e}.
    const auto rot = enumerate(GeneratorSet(spec, {exact2(spec, 0, 1, -1, 0)}), 4);
    CHECK(rot.size() == 4);
    for (std::size_t i = 0; i < rot.size(); ++i) CHECK(rot.in_compact(i));
    const auto minus = enumerate(GeneratorSet(spec, {exact2(spec, -1, 0, 0, -1)}), 4);
    CHECK(minus.size() == 2);
    CHECK(!minus.frontier_min_d().has_value());
    CHECK_THROWS_AS(trust_radius(minus), std::invalid_argument);
}

TEST_CASE("trust radius") {
    CHECK_THROWS_AS(trust_radius(enumerate(cyclic(), 0)), std::invalid_argument);
    const double r6 = trust_radius(enumerate(sanov(), 6));
    const double r7 = trust_radius(enumerate(sanov(), 7));
    CHECK(r6 > 0.0);
    CHECK(r7 >= r6);
    // the frontier minimum is attained by the parabolic words A^6
    CHECK(r6 == doctest::Approx(norm(cartan_projection(exact2(sl2(Arithmetic::ExactInt), 1, 12, 0, 1)).coords())));
}

TEST_CASE("dedup idempotence, inverse closure and word closure") {
    const auto gens = sanov();
    const auto b5 = enumerate(gens, 5);
    const auto b4 = enumerate(gens, 4);
    REQUIRE(b5.level_end(4) == b4.size());
    for (std::size_t i = 0; i < b4.size(); ++i) {
        CHECK(b5.element(i) == b4.element(i));
        CHECK(b5.word_length(i) == b4.word_length(i));
    }
    for (std::size_t i = 0; i < b4.size(); ++i) {
        const auto j = b4.find(b4.element(i).inverse());
        REQUIRE(j.has_value());
        CHECK(b4.word_length(*j) == b4.word_length(i));
    }
    for (std::size_t i = b4.level_begin(3); i < b4.level_end(3); ++i) {
        for (const auto& g : gens.closure()) {
            const auto j = b4.find(b4.element(i) * g);
            REQUIRE(j.has_value());
            CHECK(b4.word_length(*j) <= 4);
        }
    }
}

TEST_CASE("level-parallel enumeration matches sequential") {
    EnumerateOptions par;
    par.threads = 4;
    const auto a = enumerate(sanov(), 8);
    const auto b = enumerate(sanov(), 8, par);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); i += 97) CHECK(a.element(i) == b.element(i));
}

TEST_CASE("promotion to arbitrary precision") {
    const auto spec = sl2(Arithmetic::ExactInt);
    const auto m = exact2(spec, 2, 1, 1, 1);
    const auto ball = enumerate(GeneratorSet(spec, {m}), 60);
    CHECK(ball.promoted_to_bigint());
    CHECK(ball.size() == 121);
    GroupElement power = GroupElement::identity(spec);
    for (int i = 0; i < 60; ++i) power = power * m;
    const auto idx = ball.find(power);
    REQUIRE(idx.has_value());
    CHECK(ball.word_length(*idx) == 60);
    CHECK(power.exact_blocks()[0](0, 0) > Rational(BigInt("1000000000000000000000")));
}

TEST_CASE("exact rational groups") {
    auto spec = sl2(Arithmetic::ExactRational);
    const auto g = exact2(spec, Rational(2), Rational(0), Rational(0), Rational(1, 2));
    const auto u = exact2(spec, Rational(1), Rational(1, 3), Rational(0), Rational(1));
    const auto ball = enumerate(GeneratorSet(spec, {g, u}), 3);
    CHECK(std::string(ball.storage_name()) == "rational");
    CHECK(ball.size() > 1);
    for (std::size_t i = 0; i < ball.size(); ++i) CHECK(ball.find(ball.element(i).inverse()).has_value());
    CHECK_THROWS_AS(GeneratorSet(sl2(Arithmetic::ExactInt), {exact2(sl2(Arithmetic::ExactInt), Rational(2), 0, 0, Rational(1, 2))}),
                    ConfigError);
}

TEST_CASE("enumeration errors") {
    EnumerateOptions cap;
    cap.max_elements = 100;
    CHECK_THROWS_AS(enumerate(sanov(), 10, cap), ResourceCapError);
    const auto spec = sl2(Arithmetic::Float);
    CHECK_THROWS_AS(enumerate(GeneratorSet(spec, {GroupElement::exp_diagonal(spec, {10, -10})}), 5), NumericalError);
    const auto ispec = sl2(Arithmetic::ExactInt);
    CHECK_THROWS_AS(GeneratorSet(ispec, {exact2(ispec, 2, 0, 0, 1)}), ConfigError);
    CHECK_THROWS_AS(GeneratorSet(ispec, {exact2(ispec, 1, 0, 0, 1)}), ConfigError);
}
