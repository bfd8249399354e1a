#include <doctest.h>

#include <cmath>
#include <random>

#include "orlicz_lab/geometry.hpp"

using namespace olab;

TEST_CASE("constant profile of t^p") {
    for (double p : {1.0, 3.0}) {
        auto f = constant_profile(OrliczFunction::power(p), 20);
        for (std::size_t k = 1; k <= 20; ++k)
            CHECK(f[k - 1] == doctest::Approx(std::sqrt(double(k)) * std::pow(double(k), -1 / p)).epsilon(1e-12));
    }
}

TEST_CASE("symmetric distance of l_p^n is n^|1/2 - 1/p|") {
    for (double p : {1.0, 2.0, 4.0}) {
        auto S = MusielakSection::uniform(OrliczFunction::power(p), 16);
        for (std::size_t n : {2, 4, 8, 16}) {
            auto d = bm_distance_symmetric(S, n);
            double expect = std::pow(double(n), std::fabs(0.5 - 1 / p));
            CHECK(d.upper == doctest::Approx(expect).epsilon(1e-6));
            CHECK(d.lower == d.upper);
        }
    }
}

TEST_CASE("max ratios of l_1^n against l_2^n") {
    auto S = MusielakSection::uniform(OrliczFunction::power(1), 8);
    auto a = max_ratio(S, 8, RatioDirection::NormOverEuclid);
    auto b = max_ratio(S, 8, RatioDirection::EuclidOverNorm);
    CHECK(a.value == doctest::Approx(std::sqrt(8.0)).epsilon(1e-9));
    CHECK(b.value == doctest::Approx(1).epsilon(1e-9));
    CHECK_FALSE(a.refined_better);
}

TEST_CASE("powerlog distances grow with n") {
    auto S = MusielakSection::uniform(OrliczFunction::power_log(2), 256);
    double prev = 1;
    for (std::size_t n = 2; n <= 256; n *= 2) {
        double d = bm_distance_symmetric(S, n).upper;
        CHECK(d >= prev - 1e-12);
        CHECK(d >= 1);
        prev = d;
    }
}

TEST_CASE("brute force agrees with the formula at n = 2") {
    auto S = MusielakSection::uniform(OrliczFunction::power(1), 2);
    auto b = brute_force_distance(S, 2, 10);
    CHECK(b.upper == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
    CHECK_THROWS_AS(brute_force_distance(MusielakSection::uniform(OrliczFunction::power(1), 5), 5), DomainError);
}

TEST_CASE("diagonal bounds bracket the symmetric value") {
    auto S = MusielakSection::uniform(OrliczFunction::power(3), 4);
    auto sym = bm_distance_symmetric(S, 4);
    auto dia = bm_distance_diagonal(S, 4);
    CHECK(dia.lower <= dia.upper + 1e-12);
    CHECK(dia.lower <= sym.upper + 1e-6);
    CHECK(dia.upper >= sym.upper - 1e-6);

    MusielakSection mixed({{OrliczFunction::power(2), 2}, {OrliczFunction::power(1), 2}});
    auto d = bm_distance(mixed, 4);
    CHECK(d.lower >= 1);
    CHECK(d.lower <= d.upper + 1e-12);
}

TEST_CASE("norming vectors attain the dual norm") {
    FiniteVector f{0.3, -1.2, 0.5};
    double v = 0;
    auto S2 = MusielakSection::uniform(OrliczFunction::power(2), 3);
    auto y = norming_vector(S2, f, &v);
    CHECK(v == doctest::Approx(std::sqrt(0.09 + 1.44 + 0.25)).epsilon(1e-9));
    CHECK(lux_norm(S2, y) == doctest::Approx(1).epsilon(1e-9));

    // Dual of l_4 is l_{4/3}.
    auto S4 = MusielakSection::uniform(OrliczFunction::power(4), 3);
    y = norming_vector(S4, f, &v);
    double dual = 0;
    for (double a : f) dual += std::pow(std::fabs(a), 4.0 / 3);
    CHECK(v == doctest::Approx(std::pow(dual, 0.75)).epsilon(1e-8));
    double pairing = 0;
    for (int i = 0; i < 3; ++i) pairing += f[i] * y[i];
    CHECK(pairing == doctest::Approx(v).epsilon(1e-8));
}

TEST_CASE("auerbach basis is normalized and biorthogonal") {
    auto S = MusielakSection::uniform(OrliczFunction::power(3), 4);
    auto B = auerbach_basis(S, 4);
    REQUIRE(B.vectors.size() == 4);
    for (const auto& v : B.vectors) CHECK(lux_norm(S, v) == doctest::Approx(1).epsilon(1e-8));
    CHECK(B.coefficient_bound <= 1 + 1e-6);
    CHECK(std::fabs(B.det) > 0);
}

TEST_CASE("subspace bound and its verification on l_2") {
    CHECK_THROWS_AS(lemma32_bound(1, 0), DomainError);
    CHECK(lemma32_bound(1.5, 0.25) == doctest::Approx(std::sqrt(1.5 * (1.5 + 0.0625) / 0.75)));
    auto S = MusielakSection::uniform(OrliczFunction::power(2), 12, true);
    auto c = verify_lemma32(S, 4, 1.5, 0.25, 1, 42, 200);
    CHECK(c.applicable);
    CHECK(c.passed);
    CHECK_THROWS_AS(verify_lemma32(S, 5, 1.5, 0.25), DomainError);
}

TEST_CASE("distance table csv") {
    BMDistanceEstimate d;
    d.lower = d.upper = 2;
    d.method_lower = d.method_upper = "symmetric-formula";
    auto s = distance_csv({{4, d}});
    CHECK(s == "n,lower,upper,method_lower,method_upper\n4,2,2,symmetric-formula,symmetric-formula\n");
}
