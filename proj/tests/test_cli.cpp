#include <doctest.h>

#include <cstdio>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#ifndef ORLICZ_LAB_BIN
#error "ORLICZ_LAB_BIN must point at the orlicz-lab executable"
#endif

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    Run r;
    std::string cmd = std::string(ORLICZ_LAB_BIN) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

}  // namespace

TEST_CASE("cli: norm of (3,4) in l_2") {
    auto r = run("norm --space power:p=2 --vec 3,4");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["result"]["norm"].get<double>() == doctest::Approx(5).epsilon(1e-12));
    CHECK(j["seed"] == "42");
}

TEST_CASE("cli: kp quasinorm of (0, e1)") {
    auto r = run("kp quasinorm --phi identity --f 0 --g 1");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["result"]["quasinorm"].get<double>() == doctest::Approx(1));
}

TEST_CASE("cli: bm table as csv") {
    auto r = run("bm --space power:p=1 --n-min 2 --n-max 4 --format csv");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("n,lower,upper", 0) == 0);
    CHECK(r.out.find("\n4,2,2,") != std::string::npos);
}

TEST_CASE("cli: exit codes") {
    CHECK(run("eval --fn power:q=2").code == 2);
    CHECK(run("nonsense").code == 2);
    CHECK(run("verify --suite lemma42 --family power:p=3").code == 1);
    CHECK(run("verify --suite ineq53 --samples 1000").code == 0);
}

TEST_CASE("cli: reports are reproducible apart from timing") {
    auto a = nlohmann::json::parse(run("verify --suite prop54 --trials 10 --seed 9").out);
    auto b = nlohmann::json::parse(run("verify --suite prop54 --trials 10 --seed 9").out);
    a.erase("wall_time_s");
    b.erase("wall_time_s");
    CHECK(a == b);
}
