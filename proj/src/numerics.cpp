#include "orlicz_lab/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace olab {

double log_sum_exp(const std::vector<double>& v) {
    double m = kNegInf;
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    CompensatedSum s;
    for (double x : v) s.add(std::exp(x - m));
    return m + std::log(s.value());
}

std::vector<double> GridSpec::log_points() const {
    if (n < 2 || !(lo > 0) || !(hi > lo))
        throw DomainError("grid needs n >= 2 and 0 < lo < hi");
    std::vector<double> out(n);
    double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
    out.back() = b;
    return out;
}

std::vector<double> GridSpec::points() const {
    auto lp = log_points();
    for (auto& x : lp) x = std::exp(x);
    lp.front() = lo;
    lp.back() = hi;
    return lp;
}

std::string GridSpec::describe() const {
    std::ostringstream os;
    os.precision(6);
    os << "log-grid [" << lo << ", " << hi << "] n=" << n;
    return os.str();
}

unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ORLICZ_LAB_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    unsigned workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto run = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
                next = n;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace olab
