#include <doctest.h>

#include <cmath>
#include <random>

#include "orlicz_lab/luxemburg.hpp"

using namespace olab;

namespace {

double lp(const FiniteVector& x, double p) {
    double s = 0;
    for (double v : x) s += std::pow(std::fabs(v), p);
    return std::pow(s, 1 / p);
}

FiniteVector random_vector(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g;
    FiniteVector x(n);
    for (auto& v : x) v = g(rng);
    return x;
}

}  // namespace

TEST_CASE("luxemburg norm of t^p is the l_p norm") {
    std::mt19937_64 rng(1);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
        auto S = MusielakSection::uniform(OrliczFunction::power(p), 64);
        for (std::size_t n : {1, 2, 7, 64}) {
            auto x = random_vector(rng, n);
            CHECK(lux_norm(S, x) == doctest::Approx(lp(x, p)).epsilon(1e-10));
        }
    }
}

TEST_CASE("small exact norms") {
    auto S2 = MusielakSection::uniform(OrliczFunction::power(2), 3);
    CHECK(lux_norm(S2, {3, 4}) == doctest::Approx(5).epsilon(1e-12));
    auto S1 = MusielakSection::uniform(OrliczFunction::power(1), 3);
    CHECK(lux_norm(S1, {1, 1, 1}) == doctest::Approx(3).epsilon(1e-12));
    auto S3 = MusielakSection::uniform(OrliczFunction::power(3), 3);
    CHECK(lux_norm(S3, {1, 1}) == doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));
    CHECK(lux_norm(S3, {0, 0}) == 0);
}

TEST_CASE("norm is homogeneous and subadditive") {
    std::mt19937_64 rng(2);
    auto S = MusielakSection::uniform(OrliczFunction::power_log(1), 16);
    for (int i = 0; i < 50; ++i) {
        auto x = random_vector(rng, 16), y = random_vector(rng, 16);
        FiniteVector z(16), ax(16);
        for (int k = 0; k < 16; ++k) {
            z[k] = x[k] + y[k];
            ax[k] = -2.5 * x[k];
        }
        CHECK(lux_norm(S, ax) == doctest::Approx(2.5 * lux_norm(S, x)).epsilon(1e-11));
        CHECK(lux_norm(S, z) <= lux_norm(S, x) + lux_norm(S, y) + 1e-12);
    }
}

TEST_CASE("modular equals one at the norm") {
    std::mt19937_64 rng(3);
    auto S = MusielakSection(
        {{OrliczFunction::power(2), 3}, {OrliczFunction::power_log(-1), 2}, {OrliczFunction::power(3), 5}});
    for (int i = 0; i < 20; ++i) {
        auto x = random_vector(rng, 10);
        double r = lux_norm(S, x);
        CHECK(modular(S, x, r) == doctest::Approx(1).epsilon(1e-10));
    }
}

TEST_CASE("sections index coordinates by cumulative multiplicity") {
    auto a = OrliczFunction::power(1), b = OrliczFunction::power(2);
    MusielakSection S({{a, 2}, {b, 3}});
    CHECK(S.total_dim() == 5);
    CHECK(S.function_at(1).same(a));
    CHECK(S.function_at(2).same(b));
    CHECK_FALSE(S.identical());
    auto T = S.tail_from(1);
    CHECK(T.total_dim() == 4);
    CHECK(T.function_at(0).same(a));
    CHECK(T.function_at(1).same(b));
    CHECK_THROWS_AS(S.function_at(5), DomainError);
}

TEST_CASE("tail norm ignores leading coordinates") {
    auto S = MusielakSection::uniform(OrliczFunction::power(2), 4);
    CHECK(tail_norm(S, {100, 3, 4, 0}, 2) == doctest::Approx(5).epsilon(1e-12));
    CHECK(tail_norm(S, {3, 4}, 1) == doctest::Approx(5).epsilon(1e-12));
}

TEST_CASE("unit modular check on normalized vectors") {
    std::mt19937_64 rng(4);
    auto S = MusielakSection::uniform(OrliczFunction::power(1.5), 8, true);
    for (int i = 0; i < 20; ++i) {
        auto x = random_vector(rng, 8);
        double r = lux_norm(S, x);
        for (auto& v : x) v /= r;
        auto c = unit_modular_check(S, x);
        CHECK(c.applicable);
        CHECK(c.passed);
    }
    auto U = MusielakSection::uniform(OrliczFunction::power(2), 2);
    CHECK_FALSE(unit_modular_check(U, {1, 0}).applicable);
    CHECK_THROWS_AS(MusielakSection::uniform(OrliczFunction::power(2).with_normalization(0.5), 2, true), DomainError);
}

TEST_CASE("vector lists parse") {
    auto v = parse_vector_list("3, 4 -1.5e0");
    REQUIRE(v.size() == 3);
    CHECK(v[2] == -1.5);
    CHECK_THROWS(parse_vector_list("1,x"));
}
