#include "orlicz_lab/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "orlicz_lab/numerics.hpp"

namespace olab {

mpq_class stern_brocot(double lo, double hi) {
    if (!(lo >= 0 && lo < hi && hi <= 1)) throw DomainError("stern_brocot needs 0 <= lo < hi <= 1");
    // Left bound a/b, right bound c/d; mediants walk down the tree.
    mpz_class a = 0, b = 1, c = 1, d = 1;
    for (long guard = 0; guard < 100000000; ++guard) {
        mpz_class n = a + c, m = b + d;
        double v = mpq_class(n, m).get_d();
        if (v <= lo) {
            a = n;
            b = m;
        } else if (v >= hi) {
            c = n;
            d = m;
        } else {
            mpq_class q(n, m);
            q.canonicalize();
            return q;
        }
    }
    throw NumericError("stern_brocot did not terminate");
}

std::map<std::uint64_t, long> factorize(const mpz_class& n) {
    if (n <= 0) throw DomainError("factorize needs a positive integer");
    if (!n.fits_ulong_p()) throw DomainError("factorize is limited to 64-bit integers");
    std::uint64_t v = n.get_ui();
    std::map<std::uint64_t, long> out;
    for (std::uint64_t p = 2; p * p <= v; ++p)
        while (v % p == 0) {
            ++out[p];
            v /= p;
        }
    if (v > 1) ++out[v];
    return out;
}

std::string factored_string(const std::map<std::uint64_t, long>& f) {
    std::ostringstream os;
    bool first = true;
    for (auto [p, e] : f) {
        if (e == 0) continue;
        if (!first) os << '*';
        first = false;
        os << p;
        if (e != 1) os << '^' << e;
    }
    return first ? "1" : os.str();
}

std::string format_log10(double log10v, int digits) {
    if (!std::isfinite(log10v)) throw DomainError("format_log10 needs a finite exponent");
    double e = std::floor(log10v);
    double mant = std::pow(10.0, log10v - e);
    if (mant >= 10.0) {
        mant /= 10.0;
        e += 1;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*fe%+.0f", digits - 1, mant, e);
    return buf;
}

ExactWeights::ExactWeights(const mpq_class& tau, const mpq_class& kappa, long R)
    : tau_(tau), kappa_(kappa), R_(R) {
    tau_.canonicalize();
    kappa_.canonicalize();
    if (!(tau_ > 0 && tau_ < 1 && kappa_ > 0 && kappa_ < 1))
        throw DomainError("tau and kappa must lie in (0,1)");
    if (R < 1) throw DomainError("R must be positive");
    a_ = factorize(tau_.get_num());
    b_ = factorize(tau_.get_den());
    c_ = factorize(kappa_.get_num());
    d_ = factorize(kappa_.get_den());
    std::set<std::uint64_t> ps;
    for (auto* m : {&a_, &b_, &c_, &d_})
        for (auto& [p, e] : *m) ps.insert(p);
    primes_.assign(ps.begin(), ps.end());
    for (auto p : primes_) {
        long worst = 0;
        for (long r : {0L, R_, 2 * R_}) worst = std::min(worst, prime_exp_at(p, r));
        if (worst < 0) k_exp_[p] = -worst;
    }
}

long ExactWeights::prime_exp_at(std::uint64_t p, long r) const {
    auto get = [p](const std::map<std::uint64_t, long>& m) {
        auto it = m.find(p);
        return it == m.end() ? 0L : it->second;
    };
    long j = std::labs(r - R_);
    return j * (get(c_) - get(d_)) + 2 * r * (get(b_) - get(a_));
}

void ExactWeights::scale_K(const mpz_class& extra) {
    if (extra < 1) throw DomainError("K scale must be a positive integer");
    k_extra_ *= extra;
}

double ExactWeights::log_K() const {
    double s = 0;
    for (auto [p, e] : k_exp_) s += e * std::log(double(p));
    long ex = 0;
    double m = mpz_get_d_2exp(&ex, k_extra_.get_mpz_t());
    return s + std::log(m) + ex * std::log(2.0);
}

double ExactWeights::log_weight(long r) const {
    if (r < 0 || r > 2 * R_) throw DomainError("weight index out of range");
    long j = std::labs(r - R_);
    return log_K() + j * std::log(kappa_.get_d()) - 2.0 * r * std::log(tau_.get_d());
}

double ExactWeights::log_weight_factored(long r) const {
    if (r < 0 || r > 2 * R_) throw DomainError("weight index out of range");
    CompensatedSum s;
    for (auto [p, e] : weight_exponents(r)) s.add(e * std::log(double(p)));
    long ex = 0;
    double m = mpz_get_d_2exp(&ex, k_extra_.get_mpz_t());
    s.add(std::log(m) + ex * std::log(2.0));
    return s.value();
}

std::map<std::uint64_t, long> ExactWeights::weight_exponents(long r) const {
    std::map<std::uint64_t, long> out;
    for (auto p : primes_) {
        auto it = k_exp_.find(p);
        long e = (it == k_exp_.end() ? 0 : it->second) + prime_exp_at(p, r);
        if (e != 0) out[p] = e;
    }
    return out;
}

bool ExactWeights::all_integral() const {
    for (long r : {0L, R_, 2 * R_})
        for (auto [p, e] : weight_exponents(r))
            if (e < 0) return false;
    return true;
}

double ExactWeights::weight_bits(long r) const { return log_weight(r) / std::log(2.0); }

mpz_class ExactWeights::K(double max_bits) const {
    if (log_K() / std::log(2.0) > max_bits) throw NumericError("K exceeds the materialization cap");
    mpz_class k = k_extra_;
    for (auto [p, e] : k_exp_) {
        mpz_class f;
        mpz_ui_pow_ui(f.get_mpz_t(), p, e);
        k *= f;
    }
    return k;
}

mpz_class ExactWeights::weight(long r) const {
    mpz_class w = k_extra_;
    for (auto [p, e] : weight_exponents(r)) {
        if (e < 0) throw NumericError("weight is not integral");
        mpz_class f;
        mpz_ui_pow_ui(f.get_mpz_t(), p, e);
        w *= f;
    }
    return w;
}

mpq_class ExactWeights::weight_rational(long r) const {
    if (r < 0 || r > 2 * R_) throw DomainError("weight index out of range");
    unsigned long j = std::labs(r - R_);
    mpz_class kn, kd, tn, td;
    mpz_pow_ui(kn.get_mpz_t(), kappa_.get_num_mpz_t(), j);
    mpz_pow_ui(kd.get_mpz_t(), kappa_.get_den_mpz_t(), j);
    mpz_pow_ui(tn.get_mpz_t(), tau_.get_num_mpz_t(), 2UL * r);
    mpz_pow_ui(td.get_mpz_t(), tau_.get_den_mpz_t(), 2UL * r);
    mpq_class w(K(1e9) * kn * td, kd * tn);
    w.canonicalize();
    return w;
}

std::string ExactWeights::weight_string(long r, std::size_t max_digits) const {
    if (log_weight(r) / std::log(10.0) < double(max_digits)) return weight(r).get_str();
    auto f = weight_exponents(r);
    std::string s = factored_string(f);
    if (k_extra_ != 1) s = k_extra_.get_str() + "*" + s;
    return s;
}

std::string ExactWeights::K_string(std::size_t max_digits) const {
    if (log_K() / std::log(10.0) < double(max_digits)) return K().get_str();
    std::string s = factored_string(k_exp_);
    if (k_extra_ != 1) s = k_extra_.get_str() + "*" + s;
    return s;
}

double ExactWeights::log_sigma() const {
    std::vector<double> lw(2 * R_ + 1);
    for (long r = 0; r <= 2 * R_; ++r) lw[r] = log_weight(r);
    return log_sum_exp(lw);
}

bool ExactWeights::sigma_exact(mpz_class& out, double max_total_bits) const {
    double bits = 0;
    for (long r = 0; r <= 2 * R_; ++r) bits += std::max(1.0, weight_bits(r));
    if (bits > max_total_bits) return false;
    out = 0;
    for (long r = 0; r <= 2 * R_; ++r) out += weight(r);
    return true;
}

}  // namespace olab
