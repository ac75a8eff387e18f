#include <cmath>
#include <random>

#include "doctest.h"
#include "ibexp/prob.hpp"

using namespace ibexp;

namespace {

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t k) {
    std::exponential_distribution<double> ex(1.0);
    std::vector<double> v(k);
    double s = 0;
    for (auto& x : v) s += (x = ex(rng));
    for (auto& x : v) x /= s;
    return v;
}

JointXYU random_xyu(std::mt19937_64& rng, std::size_t nx, std::size_t ny, std::size_t nu) {
    return JointXYU(nx, ny, nu, random_simplex(rng, nx * ny * nu));
}

double bern_h(double p) { return -p * std::log(p) - (1 - p) * std::log(1 - p); }

}  // namespace

TEST_SUITE("prob") {

TEST_CASE("entropy examples") {
    CHECK(entropy(Pmf::uniform(2)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(entropy(Pmf::point(3, 1)) == 0.0);
    CHECK(entropy(Pmf({0.1, 0.9})) == doctest::Approx(0.325083).epsilon(1e-6));
    CHECK(entropy(Pmf({0.1, 0.9})) == doctest::Approx(bern_h(0.1)).epsilon(1e-14));
}

TEST_CASE("kl examples") {
    Pmf p({0.3, 0.7});
    CHECK(kl(p, p) == 0.0);
    double want = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
    CHECK(kl(Pmf({0.5, 0.5}), Pmf({0.25, 0.75})) == doctest::Approx(want).epsilon(1e-14));
    CHECK(kl(Pmf({0.5, 0.5}), Pmf({0.25, 0.75})) == doctest::Approx(0.143841).epsilon(1e-6));
    CHECK(std::isinf(kl(Pmf::point(2, 0), Pmf({0.0, 1.0}))));
}

TEST_CASE("kl is nonnegative and vanishes only at equality") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        auto a = random_simplex(rng, 2 + t % 5), b = random_simplex(rng, 2 + t % 5);
        CHECK(kl(a, b) > 0.0);
        CHECK(kl(a, a) == doctest::Approx(0.0).epsilon(1e-10));
    }
}

TEST_CASE("construction renormalizes small deviations only") {
    Pmf p({0.5, 0.5 + 5e-10});
    CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(Pmf({0.5, 0.6}), InvalidInput);
    CHECK_THROWS_AS(Pmf({-0.1, 1.1}), InvalidInput);
}

TEST_CASE("joint divergence vanishes on P_XY Q_{U|Y}") {
    JointXY p(2, 2, {0.4, 0.1, 0.2, 0.3});
    CondPmf qu(2, 2, {0.3, 0.7, 0.8, 0.2});
    JointXYU q = JointXYU::from_factors(p.p_y(), qu, CondPmf(std::vector<Pmf>{
                                                          p.p_x_given_y().row(0), p.p_x_given_y().row(0),
                                                          p.p_x_given_y().row(1), p.p_x_given_y().row(1)}));
    CHECK(joint_divergence(q, p) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("joint divergence decomposition on random instances") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        JointXY p(2, 2, random_simplex(rng, 4));
        JointXYU q = random_xyu(rng, 2, 2, 2);
        double direct = joint_divergence(q, p);
        double decomposed = kl(q.q_xy().flat(), p.flat()) + cond_mutual_info_xu_given_y(q);
        CHECK(direct == doctest::Approx(decomposed).epsilon(1e-10));
        CHECK(joint_divergence_decomposed(q, p) == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("Q_XY = P_XY leaves only the conditional mutual information") {
    std::mt19937_64 rng(8);
    JointXY p(2, 2, random_simplex(rng, 4));
    // Q_{X|YU} depends on U, so X - Y - U is broken while Q_XY stays P_XY
    CondPmf pxy = p.p_x_given_y();
    std::vector<Pmf> rows;
    for (int y = 0; y < 2; ++y) {
        double a = pxy(y, 0);
        double d = 0.5 * std::min(a, 1 - a);
        rows.push_back(Pmf({a + d, 1 - a - d}));
        rows.push_back(Pmf({a - d, 1 - a + d}));
    }
    JointXYU q = JointXYU::from_factors(p.p_y(), CondPmf(2, 2, {0.5, 0.5, 0.5, 0.5}), CondPmf(rows));
    CHECK(kl(q.q_xy().flat(), p.flat()) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cond_mutual_info_xu_given_y(q) > 0.0);
    CHECK(joint_divergence(q, p) == doctest::Approx(cond_mutual_info_xu_given_y(q)).epsilon(1e-10));
}

TEST_CASE("Q_{X|YU} = P_{X|Y} gives D(Q_Y || P_Y)") {
    JointXY p(2, 2, {0.4, 0.1, 0.2, 0.3});
    Pmf qy({0.8, 0.2});
    CondPmf px = p.p_x_given_y();
    JointXYU q = JointXYU::from_factors(qy, CondPmf(2, 2, {0.9, 0.1, 0.4, 0.6}),
                                        CondPmf(std::vector<Pmf>{px.row(0), px.row(0), px.row(1), px.row(1)}));
    CHECK(joint_divergence(q, p) == doctest::Approx(kl(qy, p.p_y())).epsilon(1e-10));
}

TEST_CASE("information quantities") {
    std::mt19937_64 rng(3);
    SUBCASE("independent Y and U") {
        Pmf qy({0.3, 0.7});
        CondPmf qu(2, 3, {0.2, 0.3, 0.5, 0.2, 0.3, 0.5});
        JointXYU q = JointXYU::from_factors(
            qy, qu, CondPmf(6, 2, {0.1, 0.9, 0.5, 0.5, 0.3, 0.7, 0.6, 0.4, 0.2, 0.8, 0.9, 0.1}));
        CHECK(mutual_info_yu(q) == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("copy channel with X = Y") {
        JointXYU q = JointXYU::from_factors(Pmf({0.3, 0.7}), CondPmf(2, 2, {1, 0, 0, 1}),
                                            CondPmf(4, 2, {1, 0, 1, 0, 0, 1, 0, 1}));
        CHECK(cond_entropy_x_given_u(q) == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("chain rule and I(Y;U) <= H(Y)") {
        for (int t = 0; t < 100; ++t) {
            JointXYU q = random_xyu(rng, 2, 2, 2);
            CHECK(mutual_info_x_yu(q) ==
                  doctest::Approx(mutual_info_xy(q.q_xy()) + cond_mutual_info_xu_given_y(q)).epsilon(1e-10));
            CHECK(mutual_info_yu(q) <= entropy_y(q) + 1e-12);
        }
    }
}

TEST_CASE("expected log rank") {
    CHECK(expected_log_rank(Pmf::point(4, 2)) == 0.0);
    double want = 0.25 * (std::log(1.0) + std::log(2.0) + std::log(3.0) + std::log(4.0));
    CHECK(expected_log_rank(Pmf::uniform(4)) == doctest::Approx(want).epsilon(1e-14));
    auto r = probability_rank(Pmf({0.25, 0.5, 0.25}));
    CHECK(r == std::vector<std::size_t>{2, 1, 3});
    std::mt19937_64 rng(17);
    for (int t = 0; t < 500; ++t) {
        std::size_t k = 2 + rng() % 63;
        Pmf p(random_simplex(rng, k));
        double h = entropy(p), v = expected_log_rank(p);
        CHECK(v <= h + 1e-12);
        CHECK(v >= h - std::log(1 + std::log(static_cast<double>(k))) - 1e-12);
    }
}

TEST_CASE("reverse Markov on empirical samples") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 200; ++t) {
        double d = 1.0 + rng() % 10;
        std::vector<double> s(1 + rng() % 50);
        for (auto& v : s) v = d * static_cast<double>(rng() % 1001) / 1000.0;
        double a = d * static_cast<double>(rng() % 1000) / 1000.0;
        auto r = reverse_markov(s, a, d);
        CHECK(r.tail >= r.bound - 1e-12);
    }
    CHECK_THROWS_AS(reverse_markov({}, 0.0, 1.0), InvalidInput);
}

}  // TEST_SUITE
