#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <string>

#include "doctest.h"
#include "ibexp/io.hpp"

using namespace ibexp;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(IBEXP_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t k;
    while ((k = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, k);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::vector<std::vector<std::string>> rows(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::size_t a = 0;
    while (a < text.size()) {
        std::size_t b = text.find('\n', a);
        if (b == std::string::npos) b = text.size();
        if (b > a) out.push_back(io::split_csv(text.substr(a, b - a)));
        a = b + 1;
    }
    return out;
}

const std::string kFair = R"('{"alphabet_sizes":[2,2],"probs":[0.5,0,0,0.5]}')";
const std::string kNoisy = R"('{"alphabet_sizes":[2,2],"probs":[0.54,0.04,0.06,0.36]}')";

}  // namespace

TEST_CASE("rd sweep on a fair lossless source") {
    auto r = run("rd --model " + kFair + " --grid 0.1,0.2,0.3,0.4,0.5,0.6");
    REQUIRE(r.code == 0);
    auto t = rows(r.out);
    REQUIRE(t.size() == 7);
    CHECK(t[0] == std::vector<std::string>{"Delta", "value_nats", "witness_hash", "diagnostics"});
    for (std::size_t i = 1; i < t.size(); ++i) {
        double d = io::parse_double(t[i][0]);
        CHECK(io::parse_double(t[i][1]) == doctest::Approx(std::max(std::log(2.0) - d, 0.0)).epsilon(1e-6));
    }
}

TEST_CASE("bits flag converts output only") {
    auto a = run("rd --model " + kFair + " --grid 0.2");
    auto b = run("rd --model " + kFair + " --grid 0.2 --bits");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    double na = io::parse_double(rows(a.out)[1][1]), nb = io::parse_double(rows(b.out)[1][1]);
    CHECK(nb == doctest::Approx(na / std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("exponent sweep over R carries the phase boundary") {
    auto r = run("exponent --model " + kFair + " --delta 0.2 --grid 0.1,0.3,0.6");
    REQUIRE(r.code == 0);
    auto t = rows(r.out);
    REQUIRE(t.size() == 4);
    CHECK(t[0].back() == "R_of_Delta");
    for (std::size_t i = 1; i < t.size(); ++i)
        CHECK(io::parse_double(t[i][4]) == doctest::Approx(std::log(2.0) - 0.2).epsilon(1e-6));
    CHECK(io::parse_double(t[1][1]) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::isinf(io::parse_double(t[3][1])));
}

TEST_CASE("json output fields") {
    auto r = run("sc-exponent --model " + kNoisy + " --rate 0.3 --delta 0.4 --format json");
    REQUIRE(r.code == 0);
    auto j = io::Json::parse(r.out);
    CHECK(j.contains("value_nats"));
    CHECK(j.contains("witness"));
    CHECK(j.contains("diagnostics"));
}

TEST_CASE("determinism") {
    auto a = run("simulate --model " + kNoisy + " --rate 0.3 --delta 0.45 --epsilon 0.05 --n 6,8 --samples 20000 --seed 5");
    auto b = run("simulate --model " + kNoisy + " --rate 0.3 --delta 0.45 --epsilon 0.05 --n 6,8 --samples 20000 --seed 5");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(rows(a.out)[0] == std::vector<std::string>{"n", "p_e", "stderr", "minus_log_pe_over_n"});
}

TEST_CASE("exit codes") {
    CHECK(run("rd --model " + kFair + " --grid ''").code == 2);
    CHECK(run("rd --model " + kFair + " --grid 0.3,0.2").code == 2);
    CHECK(run("rd --model '{\"alphabet_sizes\":[2,2],\"probs\":[1,1]}' --delta 0.1").code == 2);
    CHECK(run("rd --model '{broken' --delta 0.1").code == 2);
    CHECK(run("exponent --model " + kFair + " --rate -1 --delta 0.1").code == 2);
    CHECK(run("nosuchcommand").code == 2);
    CHECK(run("simulate --model " + kNoisy + " --rate 0.3 --delta 0.4 --n 2000").code == 3);
    CHECK(run("simulate --model " + kNoisy + " --rate 0.3 --delta 0.4 --n 30").code == 3);
    CHECK(run("oracle --model " + kNoisy + " --kind E --rate 0.1 --delta 0.4 --u-size 3").code == 3);
}

TEST_CASE("identity check") {
    auto r = run("identity-check --model " + kNoisy + " --n 4 --trials 100");
    REQUIRE(r.code == 0);
    auto t = rows(r.out);
    REQUIRE(t.size() == 101);
    double worst = 0;
    for (std::size_t i = 1; i < t.size(); ++i) worst = std::max(worst, io::parse_double(t[i][3]));
    CHECK(worst <= 1e-10);
}

TEST_CASE("wak check") {
    auto r = run("wak-check --model " + kNoisy + " --n 1 --rate 0.6931471805599453 --helper-rate 0.6931471805599453");
    REQUIRE(r.code == 0);
    auto t = rows(r.out);
    CHECK(t[1][4] == "1");
    CHECK(t[1][5] == "1");
}

TEST_CASE("oracle and cover") {
    auto r = run("oracle --model " + kNoisy + " --kind RD --delta 0.4 --k 100 --check");
    CHECK(r.code == 0);
    auto c = run("cover --y-type 4,4 --u-given-y 3,1,1,3 --format json");
    REQUIRE(c.code == 0);
    auto j = io::Json::parse(c.out);
    CHECK(j["universe"] == "70");
    CHECK(j["codewords"].size() >= 1);
}
