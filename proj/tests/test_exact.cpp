#include <doctest.h>

#include <cmath>

#include "orlicz_lab/exact.hpp"

using namespace olab;

namespace {

// Smallest q with an integer p and lo < p/q < hi, scanning denominators.
mpq_class min_denominator(double lo, double hi) {
    for (long q = 1;; ++q) {
        long p = static_cast<long>(std::floor(lo * q)) + 1;
        mpq_class r(p, q);
        r.canonicalize();
        if (r.get_d() > lo && r.get_d() < hi) return r;
    }
}

bool all_integral(const mpz_class& K, const mpq_class& tau, const mpq_class& kappa, long R) {
    for (long r = 0; r <= 2 * R; ++r) {
        mpq_class w = K;
        for (long j = 0; j < std::labs(r - R); ++j) w *= kappa;
        for (long j = 0; j < 2 * r; ++j) w /= tau;
        w.canonicalize();
        if (w.get_den() != 1) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("stern-brocot returns the smallest denominator in the interval") {
    const double cases[][2] = {{std::sqrt(1 / 1.5), 1}, {std::sqrt(1 / 1.25), 1}, {0.3, 0.34}, {0.0, 0.01},
                               {1 / 1.2, 1}, {0.61, 0.62}};
    for (auto& c : cases) {
        auto q = stern_brocot(c[0], c[1]);
        auto o = min_denominator(c[0], c[1]);
        CHECK(q.get_den() == o.get_den());
        CHECK(q.get_d() > c[0]);
        CHECK(q.get_d() < c[1]);
    }
    CHECK(stern_brocot(std::sqrt(1 / 1.5), 1) == mpq_class(5, 6));
    CHECK_THROWS_AS(stern_brocot(0.5, 0.4), DomainError);
}

TEST_CASE("factorization and formatting") {
    auto f = factorize(360);
    CHECK(f.size() == 3);
    CHECK(f[2] == 3);
    CHECK(f[3] == 2);
    CHECK(f[5] == 1);
    CHECK(factored_string(f) == "2^3*3^2*5");
    CHECK(factored_string({}) == "1");
    CHECK(format_log10(std::log10(314.159), 3) == "3.14e+2");
    CHECK(format_log10(-6861 + std::log10(3.14), 3) == "3.14e-6861");
}

TEST_CASE("exact weights are integers and K is minimal") {
    const mpq_class tau(5, 6), kappa(7, 8);
    const long R = 4;
    ExactWeights w(tau, kappa, R);
    CHECK(w.all_integral());
    mpz_class K = w.K();
    CHECK(all_integral(K, tau, kappa, R));
    for (auto [p, e] : factorize(K)) {
        (void)e;
        CHECK_FALSE(all_integral(K / p, tau, kappa, R));
    }
    for (long r = 0; r <= 2 * R; ++r) {
        mpq_class q = w.weight_rational(r);
        CHECK(q.get_den() == 1);
        CHECK(q.get_num() == w.weight(r));
        CHECK(w.log_weight(r) == doctest::Approx(w.log_weight_factored(r)).epsilon(1e-14));
        CHECK(w.log_weight(r) == doctest::Approx(std::log(w.weight(r).get_d())).epsilon(1e-13));
    }
}

TEST_CASE("sigma is the sum of the weights") {
    ExactWeights w(mpq_class(9, 10), mpq_class(13, 14), 6);
    w.scale_K(3);
    mpz_class s;
    REQUIRE(w.sigma_exact(s));
    mpz_class expect = 0;
    for (long r = 0; r <= 12; ++r) expect += w.weight(r);
    CHECK(s == expect);
    CHECK(w.log_sigma() == doctest::Approx(std::log(s.get_d())).epsilon(1e-13));
    CHECK(w.K() % 3 == 0);
}

TEST_CASE("long weights print in factored form") {
    ExactWeights w(mpq_class(9, 10), mpq_class(13, 14), 2000);
    auto s = w.weight_string(0, 50);
    CHECK(s.find('^') != std::string::npos);
    auto short_form = w.weight_string(2000, 100000);
    CHECK(short_form == w.weight(2000).get_str());
}
