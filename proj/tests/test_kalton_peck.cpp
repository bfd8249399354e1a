#include <doctest.h>

#include <cmath>
#include <random>

#include "orlicz_lab/kalton_peck.hpp"

using namespace olab;

namespace {

// Composite Simpson for the bump mean, independent of the library's quadrature.
double bump_mean_simpson(int n) {
    auto f = [](double y) { return y <= 0 || y >= 1 ? 0.0 : std::exp(-1 / (y * (1 - y))); };
    double z = 0, m = 0, h = 1.0 / n;
    for (int i = 0; i <= n; ++i) {
        double y = i * h, w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        z += w * f(y);
        m += w * y * f(y);
    }
    return m / z;
}

}  // namespace

TEST_CASE("omega on basis vectors and the two-point vector") {
    auto id = LipschitzFunction::identity();
    auto w = omega_phi(id, {1, 0, 0});
    for (double v : w) CHECK(v == 0);
    auto c = LipschitzFunction::constant(2.5);
    w = omega_phi(c, {1, 0});
    CHECK(w[0] == doctest::Approx(2.5));
    CHECK(w[1] == 0);

    const double r = 1 / std::sqrt(2.0);
    w = omega_phi(id, {r, r});
    CHECK(w[0] == doctest::Approx(std::log(2.0) / (2 * std::sqrt(2.0))).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(w[0]).epsilon(1e-15));
    CHECK(omega_phi(id, {0, 0}) == FiniteVector{0, 0});
}

TEST_CASE("omega is homogeneous") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    auto phi = LipschitzFunction::clamp(-1, 3);
    for (int i = 0; i < 20; ++i) {
        FiniteVector x(12);
        for (auto& v : x) v = g(rng);
        auto a = omega_phi(phi, x);
        for (auto& v : x) v *= 7.25;
        auto b = omega_phi(phi, x);
        for (std::size_t k = 0; k < a.size(); ++k) CHECK(b[k] == doctest::Approx(7.25 * a[k]).epsilon(1e-13));
    }
}

TEST_CASE("quasinorm examples") {
    auto id = LipschitzFunction::identity();
    CHECK(kp_quasinorm(id, {{0, 0}, {1, 0}}) == doctest::Approx(1));
    CHECK(kp_quasinorm(LipschitzFunction::constant(4), {{3, 4}, {0, 0}}) == doctest::Approx(5));
    const double r = 1 / std::sqrt(2.0);
    double q = kp_quasinorm(id, {{0, 0}, {r, r}});
    CHECK(q == doctest::Approx(1 + std::log(2.0) / 2).epsilon(1e-14));
    CHECK(q == doctest::Approx(1.346574).epsilon(1e-6));
    double q3 = kp_quasinorm(id, {{0, 0}, {-3 * r, -3 * r}});
    CHECK(q3 == doctest::Approx(3 * q).epsilon(1e-14));
}

TEST_CASE("expr_51 examples") {
    auto id = LipschitzFunction::identity();
    CHECK(expr_51(id, {1, 0, 0}) == doctest::Approx(1));
    const double r = 1 / std::sqrt(2.0);
    CHECK(expr_51(id, {r, r}) == doctest::Approx(1 + std::log(2.0) / 2).epsilon(1e-14));
    CHECK(expr_51(LipschitzFunction::constant(3), {1, 2, 2}) == doctest::Approx(3));
    CHECK_THROWS_AS(expr_51(id, {0, 0}), DomainError);
}

TEST_CASE("quasi-triangle probes") {
    CHECK(quasi_triangle_probe(LipschitzFunction::constant(0), 500, 16, 1) <= 1 + 1e-12);
    double q = quasi_triangle_probe(LipschitzFunction::identity(), 2000, 32, 1);
    CHECK(q >= 1);
    CHECK(std::isfinite(q));
    CHECK(q == quasi_triangle_probe(LipschitzFunction::identity(), 2000, 32, 1));
}

TEST_CASE("inequality (1+u^2)/(1+v^2) <= 2(1+(u-v)^2)") {
    auto c = inequality_53_check(10000, 3);
    CHECK(c.passed);
    CHECK(c.worst_margin >= 0);
}

TEST_CASE("phi from power functions is linear") {
    auto p2 = phi_from_orlicz(OrliczFunction::power(2));
    auto p4 = phi_from_orlicz(OrliczFunction::power(4));
    CHECK(p2.L() == 2);
    for (double x : {-5.0, 0.0, 1.5, 20.0}) {
        CHECK(p2(x) == doctest::Approx(0).epsilon(1e-10).scale(1));
        CHECK(p4(x) == doctest::Approx(x).epsilon(1e-10).scale(1));
    }
    auto pl = phi_from_orlicz(OrliczFunction::power_log(1));
    REQUIRE(pl.slope_check.has_value());
    CHECK(pl.slope_check->passed);
}

TEST_CASE("literal round trip for phi") {
    CHECK(parse_phi_literal("identity").kind() == PhiKind::Identity);
    CHECK(parse_phi_literal("zero")(3.0) == 0);
    CHECK(parse_phi_literal("constant:c=1.5")(-9.0) == 1.5);
    auto c = parse_phi_literal("clamp:lo=0,hi=2");
    CHECK(c(-1.0) == 0);
    CHECK(c(1.0) == 1);
    CHECK(c(5.0) == 2);
    CHECK(parse_phi_literal(c.literal())(1.25) == 1.25);
    CHECK_THROWS_AS(parse_phi_literal("sine"), ParseError);
}

TEST_CASE("partial sums against the comparison expression") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    FiniteVector t(64);
    for (auto& v : t) v = g(rng);
    auto c = partial_sum_bound_check(LipschitzFunction::identity(), t, {4, 16, 64});
    CHECK(c.passed);
    const auto& rows = c.params["rows"];
    CHECK(std::fabs(rows.back()["diff"].get<double>()) <= 1e-8);

    auto k = partial_sum_bound_check(LipschitzFunction::constant(2), t, {4, 16, 64});
    for (const auto& r : k.params["rows"]) CHECK(std::fabs(r["diff"].get<double>()) <= 1e-12);

    t[3] = 0;
    CHECK_THROWS_AS(partial_sum_bound_check(LipschitzFunction::identity(), t, {8}), DomainError);
}

TEST_CASE("bump integrates to one and has mean one half") {
    Bump b;
    CHECK(b.mean == doctest::Approx(bump_mean_simpson(20000)).epsilon(1e-10));
    CHECK(b.mean == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b.f(0.0) == 0);
    CHECK(b.f(1.0) == 0);
    // f' changes sign at the midpoint.
    CHECK(b.f1(0.3) > 0);
    CHECK(b.f1(0.7) < 0);
    CHECK(b.f1(0.5) == doctest::Approx(0).scale(1));
}

TEST_CASE("mollifying constants and the identity") {
    auto z = mollify(LipschitzFunction::constant(0));
    CHECK(z.A == doctest::Approx(0).scale(1));
    CHECK(z.b == doctest::Approx(0).scale(1));
    CHECK(z.K == 1);
    CHECK(z.claim.passed);

    auto c = mollify(LipschitzFunction::constant(3));
    CHECK(c.A == doctest::Approx(0).epsilon(1e-9).scale(1));
    for (double x : {-10.0, 0.0, 10.0}) CHECK(c.table->value(x) == doctest::Approx(3).epsilon(1e-9));

    auto m = mollify(LipschitzFunction::identity());
    const double mf = bump_mean_simpson(20000);
    CHECK(m.A == doctest::Approx(mf).epsilon(1e-8));
    CHECK(m.b == doctest::Approx(-3).epsilon(1e-8));
    CHECK(m.K == 3);
    CHECK(m.claim.passed);
    for (double x : {-20.0, -1.3, 0.0, 7.7, 25.0}) {
        CHECK(m.table->value(x) == doctest::Approx(x - mf).epsilon(1e-8).scale(1));
        CHECK(m.table->deriv(x) == doctest::Approx(1).epsilon(1e-8));
        CHECK(m.table->deriv2(x) == doctest::Approx(0).epsilon(1e-7).scale(1));
    }
}

TEST_CASE("synthesis from the zero function gives K t^2") {
    auto s = synthesize_orlicz(mollify(LipschitzFunction::constant(0)));
    CHECK(s.K == 1);
    CHECK(s.c == doctest::Approx(0.5));
    CHECK(s.C == doctest::Approx(2));
    CHECK(s.certificate.all_passed());
    for (double t : {1e-9, 0.01, 0.5}) CHECK(s.M(t) == doctest::Approx(t * t).epsilon(1e-9));
}

TEST_CASE("synthesis from the identity is a convex powerlog-type function") {
    auto m = mollify(LipschitzFunction::identity());
    auto s = synthesize_orlicz(m);
    CHECK(s.certificate.all_passed());
    CHECK(s.K == 3);
    CHECK(s.shift == 0);
    CHECK(check_convexity(s.M).passed);
    for (double t : {1e-10, 1e-4, 0.2}) {
        double x = -std::log(t);
        CHECK(s.M(t) == doctest::Approx(t * t * (3 + (x - m.mean) * (x - m.mean))).epsilon(1e-7));
    }
    auto e = estimate_indices(s.M);
    CHECK(e.alpha_lo >= 1.8);
    CHECK(e.beta_hi <= 2.1);
    auto r = equivalence_report(LipschitzFunction::identity(), s.M, 50, 64, 7);
    CHECK(r.growth > 10);
    CHECK(std::isfinite(r.spread));
    CHECK(r.min_ratio > 0);
}

TEST_CASE("bounded phi gives an Orlicz function equivalent to t^2") {
    auto phi = LipschitzFunction::clamp(0, 5);
    auto s = synthesize_orlicz(mollify(phi));
    CHECK(s.certificate.all_passed());
    CHECK(check_equivalence(s.M, OrliczFunction::power(2)).passed);
}

TEST_CASE("centralizer probe is finite and vanishes for constants") {
    CHECK(centralizer_probe(LipschitzFunction::constant(2), 50, 16, 1) == doctest::Approx(0).scale(1));
    double c = centralizer_probe(LipschitzFunction::identity(), 200, 16, 1);
    CHECK(std::isfinite(c));
    CHECK(c > 0);
}
