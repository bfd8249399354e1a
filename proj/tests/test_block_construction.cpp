#include <doctest.h>

#include <cmath>

#include "orlicz_lab/block_construction.hpp"

using namespace olab;

TEST_CASE("default kappa lies strictly inside (1/(1+eta), 1)") {
    for (double eta : {1.0, 0.2, 0.01, 1e-4, 1.0 / 1024}) {
        double k = default_kappa(eta).get_d();
        CHECK(k > 1 / (1 + eta));
        CHECK(k < 1);
    }
}

TEST_CASE("step 1 on powerlog passes the per-step band") {
    for (double a : {-2.0, -1.0, 1.0, 2.0}) {
        auto M = OrliczFunction::power_log(a);
        auto r = choose_step1(M, mpq_class(1, 2), default_kappa(0.2), 0.2);
        CHECK(r.R >= 1);
        CHECK(r.p > 2);
        CHECK(r.q < 2);
        auto c = verify_dilation_band(r.N, 0.2, 0.5, BandMode::PerStep);
        CHECK(c.passed);
    }
}

TEST_CASE("per-step band composes over l steps") {
    auto r = choose_step1(OrliczFunction::power_log(1), mpq_class(1, 2), default_kappa(0.2), 0.2);
    const double l1e = std::log1p(0.2), lt = std::log(0.5);
    for (double ll : GridSpec{1e-8, 1, 40}.log_points())
        for (int l = 1; l <= 6; ++l) {
            double lr = r.N.log_eval(ll + l * lt) - r.N.log_eval(ll);
            CHECK(lr <= 2 * l * lt + l * l1e + 1e-12);
            CHECK(lr >= 2 * l * lt - l * l1e - 1e-12);
        }
}

TEST_CASE("step 2 on t^2 keeps the ratio exactly t^2") {
    auto r = build_step2(OrliczFunction::power(2), 0.5, 0.25);
    for (const auto& c : r.certificates) CHECK(c.passed);
    auto c = verify_dilation_band(r.N, 0.5, 0.25, BandMode::FullBand);
    CHECK(c.passed);
    // Margins are (1 - 1/1.5) t^2 and 0.5 t^2, smallest at t = 0.25.
    CHECK(c.worst_margin == doctest::Approx(0.0625 / 3).epsilon(1e-9));
    CHECK(r.log_N1 >= 0);
}

TEST_CASE("step 2 contracts on powerlog") {
    auto r = build_step2(OrliczFunction::power_log(-1), 1.0, 0.5);
    CHECK(r.weights->all_integral());
    CHECK(r.log_N1 >= 0);
    CHECK(verify_dilation_band(r.N, 1.0, 0.5, BandMode::FullBand).passed);
    CHECK(exact_weight_identity(r).passed);

    auto s = build_step2(OrliczFunction::power_log(1), 0.5, 0.25);
    CHECK(verify_dilation_band(s.N, 0.5, 0.25, BandMode::FullBand).passed);
    auto id = exact_weight_identity(s);
    CHECK(id.passed);
}

TEST_CASE("a non-Hilbertian power leaves the band") {
    auto c = verify_dilation_band(OrliczFunction::power(3), 0.1, 0.25, BandMode::FullBand);
    CHECK_FALSE(c.passed);
    CHECK_FALSE(c.witness.empty());
    CHECK_THROWS_AS(require_near_hilbert(OrliczFunction::power(3)), DomainError);
    CHECK_NOTHROW(require_near_hilbert(OrliczFunction::power_log(2)));
}

TEST_CASE("assemble_ah validates its targets") {
    auto M = OrliczFunction::power_log(2);
    CHECK_THROWS_AS(assemble_ah(M, 2, {1.05}), DomainError);
    CHECK_THROWS_AS(assemble_ah(M, 2, {1.1, 1.05}), DomainError);
    CHECK_THROWS_AS(assemble_ah(M, 1, {0.9}), DomainError);
}

TEST_CASE("the Hilbert case never reaches a target above 1") {
    try {
        assemble_ah(OrliczFunction::power(2), 1, {1.1});
        FAIL("expected target-unreachable");
    } catch (const TargetUnreachable& e) {
        CHECK(e.level == 1);
        CHECK(e.achieved == doctest::Approx(1).epsilon(1e-6));
        CHECK(e.n_cap == (1u << 14));
    }
}

TEST_CASE("one level: blocks induce the level function") {
    auto M = OrliczFunction::power_log(2);
    auto con = assemble_ah(M, 1, {1.00001});
    REQUIRE(con.levels.size() == 1);
    const auto& L = con.levels[0];
    CHECK(con.all_passed());
    CHECK(L.s >= 1);
    CHECK(L.distance.upper >= 1.00001);
    auto induced = induce_block_function(M, L.block);
    for (double s : {-30.0, -5.0, -1.0, 0.0})
        CHECK(induced.log_eval(s) == doctest::Approx(L.N.log_eval(s)).epsilon(1e-12));
    CHECK(L.surrogate.eval(1.0) == doctest::Approx(1).epsilon(1e-9));
    auto spec = con.blocks();
    CHECK(spec.to_csv().rfind("block,level,repeat,value,value_exact,count", 0) == 0);
}

TEST_CASE("constant blocks in the special case") {
    auto raw = OrliczFunction::power_log(2);
    CHECK_THROWS_AS(special_case_blocks(raw, 1, {1}), DomainError);
    auto M = raw.with_normalization(2 / raw(1.0));
    auto con = special_case_blocks(M, 3, {2, 2, 4});
    CHECK(con.special_case);
    REQUIRE(con.levels.size() == 3);
    for (int k = 1; k <= 3; ++k) {
        const auto& L = con.levels[k - 1];
        CHECK(L.N.eval(1.0) == doctest::Approx(1).epsilon(1e-10));
        CHECK(L.s == (k == 3 ? 4u : 2u));
    }
}
