#include <cmath>

#include "doctest.h"
#include "ibexp/exponents.hpp"

using namespace ibexp;

namespace {

const double kLn2 = std::log(2.0);

double h2(double q) { return q <= 0 || q >= 1 ? 0.0 : -q * std::log(q) - (1 - q) * std::log(1 - q); }
double d2(double q, double p) {
    double v = 0;
    if (q > 0) v += q * std::log(q / p);
    if (q < 1) v += (1 - q) * std::log((1 - q) / (1 - p));
    return v;
}

// min d(q||p) over h(q) >= level, p < 1/2, by bisection on the binary entropy
double lossless_E_bisect(double p, double level) {
    if (h2(p) >= level) return 0.0;
    if (level > kLn2) return kInf;
    double lo = p, hi = 0.5;
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (lo + hi);
        (h2(m) < level ? lo : hi) = m;
    }
    return d2(hi, p);
}

double lossless_F_scan(double p, double level, int res) {
    double best = kInf;
    for (int i = 0; i <= res; ++i) {
        double q = static_cast<double>(i) / res;
        best = std::min(best, d2(q, p) + std::max(h2(q) - level, 0.0));
    }
    return best;
}

SourceModel lossless(double p) { return SourceModel(JointXY(2, 2, {1 - p, 0, 0, p})); }
// P_Y = (0.6, 0.4) through a BSC(0.1)
SourceModel noisy() { return SourceModel(JointXY(2, 2, {0.54, 0.04, 0.06, 0.36})); }

}  // namespace

TEST_SUITE("exponents") {

TEST_CASE("rate distortion") {
    SourceModel m = noisy();
    double hx = entropy(m.p_x());
    CHECK(rate_distortion(m, hx).value == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rate_distortion(m, hx + 0.1).value == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rate_distortion(lossless(0.5), 0.2).value == doctest::Approx(kLn2 - 0.2).epsilon(1e-6));
    CHECK(rate_distortion(lossless(0.5), 0.2).value == doctest::Approx(0.493147).epsilon(1e-6));
    auto o = brute_force_exponent_oracle(lossless(0.5), {0.0, 0.2, 0}, OracleKind::RD, 200);
    CHECK(std::fabs(o.value - rate_distortion(lossless(0.5), 0.2).value) <= std::max(5e-3, o.granularity));
    CHECK(rate_distortion(m, m.delta_min()).value == doctest::Approx(entropy(m.p_y())).epsilon(1e-6));
    auto below = rate_distortion(m, m.delta_min() - 0.01);
    CHECK(std::isinf(below.value));
    CHECK_FALSE(below.diag.feasible);
    double prev = kInf;
    for (double d = m.delta_min(); d <= hx; d += 0.05) {
        double v = rate_distortion(m, d).value;
        CHECK(v <= prev + 1e-9);
        prev = v;
    }
}

TEST_CASE("helper rate") {
    SourceModel m = noisy();
    CHECK(wak_helper_rate(m, 0.0).value == doctest::Approx(entropy(m.p_x())).epsilon(1e-9));
    CHECK(wak_helper_rate(m, entropy(m.p_y())).value == doctest::Approx(m.delta_min()).epsilon(1e-6));
    auto o = brute_force_exponent_oracle(m, {0.3, 0.0, 0}, OracleKind::RH, 200);
    CHECK(std::fabs(wak_helper_rate(m, 0.3).value - o.value) <= 5e-3);
    for (double d : {0.4, 0.5, 0.6}) {
        double r = rate_distortion(m, d).value;
        CHECK(wak_helper_rate(m, r).value <= d + 1e-6);
    }
}

TEST_CASE("inner minimization") {
    SourceModel m = noisy();
    Pmf qy({0.3, 0.7});
    CondPmf qu(2, 2, {0.8, 0.2, 0.25, 0.75});
    SUBCASE("vacuous constraint") {
        auto r = inner_min_E(qy, qu, 0.0, m);
        CHECK(r.value == doctest::Approx(kl(qy, m.p_y())).epsilon(1e-12));
        for (int y = 0; y < 2; ++y)
            for (int u = 0; u < 2; ++u)
                for (int x = 0; x < 2; ++x)
                    CHECK(r.q_x_given_yu(y * 2 + u, x) == doctest::Approx(m.p_x_given_y()(y, x)).epsilon(1e-12));
    }
    SUBCASE("maximal level forces the uniform conditional under a copy channel") {
        CondPmf copy(2, 2, {1, 0, 0, 1});
        auto r = inner_min_E(qy, copy, kLn2, m);
        double want = kl(qy, m.p_y());
        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 2; ++x) want += qy[y] * 0.5 * std::log(0.5 / m.p_x_given_y()(y, x));
        CHECK(r.value == doctest::Approx(want).epsilon(1e-6));
    }
    SUBCASE("grid oracle over Q_{X|YU}") {
        const double Delta = 0.55;
        auto r = inner_min_E(qy, qu, Delta, m);
        const int K = 60;
        double best = kInf;
        double w[4];
        for (int i = 0; i < 4; ++i) w[i] = qy[i / 2] * qu(i / 2, i % 2);
        for (int a = 0; a <= K; ++a)
            for (int b = 0; b <= K; ++b)
                for (int c = 0; c <= K; ++c)
                    for (int d = 0; d <= K; ++d) {
                        double q0[4] = {a / double(K), b / double(K), c / double(K), d / double(K)};
                        double xu[2][2] = {{0, 0}, {0, 0}};
                        double D = kl(qy, m.p_y());
                        for (int i = 0; i < 4; ++i) {
                            int y = i / 2, u = i % 2;
                            xu[u][0] += w[i] * q0[i];
                            xu[u][1] += w[i] * (1 - q0[i]);
                            D += w[i] * d2(q0[i], m.p_x_given_y()(y, 0));
                        }
                        double H = 0;
                        for (int u = 0; u < 2; ++u) {
                            double t = xu[u][0] + xu[u][1];
                            if (t > 0) H += t * h2(xu[u][0] / t);
                        }
                        if (H >= Delta && D < best) best = D;
                    }
        CHECK(std::fabs(r.value - best) <= 2e-3);
        CHECK(r.value <= best + 1e-12);
        auto pg = inner_min_E(qy, qu, Delta, m, {}, InnerMethod::ProjectedGradient);
        CHECK(pg.value == doctest::Approx(r.value).epsilon(1e-6));
    }
}

TEST_CASE("lossless closed forms") {
    double want = lossless_E_bisect(0.1, 0.5);
    CHECK(want == doctest::Approx(0.0441680).epsilon(1e-6));
    CHECK(error_exponent_lossless(Pmf({0.9, 0.1}), 0.2, 0.3) == doctest::Approx(want).epsilon(1e-8));
    CHECK(error_exponent_lossless(Pmf({0.9, 0.1}), 0.1, 0.1) == 0.0);
    CHECK(std::isinf(error_exponent_lossless(Pmf({0.9, 0.1}), 0.4, 0.4)));
    // ternary against a simplex grid
    Pmf p3({0.7, 0.2, 0.1});
    const int K = 600;
    double best = kInf;
    for (int i = 0; i <= K; ++i)
        for (int j = 0; i + j <= K; ++j) {
            Pmf q({i / double(K), j / double(K), (K - i - j) / double(K)});
            if (entropy(q) >= 1.0) best = std::min(best, kl(q, p3));
        }
    double v = error_exponent_lossless(p3, 0.6, 0.4);
    CHECK(v <= best + 1e-9);
    CHECK(v >= best - 2e-3);

    CHECK(sc_exponent_lossless(Pmf({0.5, 0.5}), 0.2, 0.2) ==
          doctest::Approx(lossless_F_scan(0.5, 0.4, 100000)).epsilon(1e-4));
    CHECK(sc_exponent_lossless(Pmf::point(2, 0), 0.0, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sc_exponent_lossless(Pmf({0.9, 0.1}), 0.4, 0.4) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("error exponent") {
    SUBCASE("lossless Bern(0.1)") {
        auto r = error_exponent(lossless(0.1), {0.2, 0.3, 0});
        CHECK(r.value == doctest::Approx(lossless_E_bisect(0.1, 0.5)).epsilon(2e-3));
        REQUIRE(r.has_witness);
        CHECK(joint_divergence(r.witness, lossless(0.1).p_xy()) == doctest::Approx(r.value).epsilon(1e-8));
        CHECK(cond_entropy_x_given_u(r.witness) >= 0.3 - 1e-8);
        CHECK(mutual_info_yu(r.witness) <= 0.2 + 1e-8);
    }
    SUBCASE("lossless Bern(0.5)") {
        CHECK(error_exponent(lossless(0.5), {0.2, 0.3, 0}).value == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(std::isinf(error_exponent(lossless(0.5), {0.4, 0.4, 0}).value));
    }
    SUBCASE("phase boundary on a noisy model") {
        SourceModel m = noisy();
        ExponentSolver s(m);
        double Delta = 0.4;
        double th = positivity_threshold(m, Delta);
        CHECK(th == doctest::Approx(s.rate_distortion(Delta).value).epsilon(1e-12));
        CHECK(s.error_exponent({th - 0.1, Delta, 0}).value <= 1e-4);
        CHECK(s.error_exponent({th + 0.1, Delta, 0}).value > 1e-3);
    }
}

TEST_CASE("positivity threshold") {
    CHECK(positivity_threshold(lossless(0.5), 0.2) == doctest::Approx(0.493147).epsilon(1e-6));
    CHECK(positivity_threshold(lossless(0.3), entropy(Pmf({0.7, 0.3}))) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("strong converse exponent") {
    SUBCASE("lossless matches the scan") {
        for (double R : {0.05, 0.1}) {
            auto r = strong_converse_exponent(lossless(0.1), {R, 0.1, 0});
            CHECK(r.value == doctest::Approx(lossless_F_scan(0.1, R + 0.1, 10000)).epsilon(2e-3));
            REQUIRE(r.has_witness);
            CHECK(sc_objective(r.witness, lossless(0.1), R) == doctest::Approx(r.value).epsilon(1e-8));
            CHECK(cond_entropy_x_given_u(r.witness) <= 0.1 + 1e-8);
        }
    }
    SUBCASE("zero above the boundary, positive below") {
        SourceModel m = noisy();
        ExponentSolver s(m);
        double th = s.rate_distortion(0.4).value;
        CHECK(s.strong_converse_exponent({th + 0.05, 0.4, 0}).value <= 1e-4);
        CHECK(s.strong_converse_exponent({th - 0.1, 0.4, 0}).value > 1e-3);
    }
    SUBCASE("vacuous constraint") {
        CHECK(strong_converse_exponent(noisy(), {0.0, kLn2, 0}).value == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("monotone in R") {
        ExponentSolver s(lossless(0.2));
        double prev = kInf;
        for (double R = 0.0; R <= 0.3; R += 0.05) {
            double v = s.strong_converse_exponent({R, 0.1, 0}).value;
            CHECK(v <= prev + 1e-6);
            prev = v;
        }
    }
}

TEST_CASE("grid oracles") {
    CHECK(brute_force_exponent_oracle(noisy(), {0.0, 0.7, 0}, OracleKind::RD, 20).value ==
          doctest::Approx(0.0).epsilon(1e-12));
    double o = brute_force_exponent_oracle(lossless(0.1), {0.05, 0.1, 2}, OracleKind::F, 60).value;
    CHECK(std::fabs(o - sc_exponent_lossless(Pmf({0.9, 0.1}), 0.05, 0.1)) <= 5e-3);
    CHECK_THROWS_AS(brute_force_exponent_oracle(noisy(), {0.1, 0.4, 3}, OracleKind::E, 20), SizeCapExceeded);
    CHECK_THROWS_AS(brute_force_exponent_oracle(noisy(), {0.1, 0.4, 2}, OracleKind::E, 201), SizeCapExceeded);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(error_exponent(noisy(), {-0.1, 0.3, 0}), InvalidInput);
    CHECK_THROWS_AS(strong_converse_exponent(noisy(), {0.1, -0.3, 0}), InvalidInput);
    SolverConfig cfg;
    cfg.outer_grid_resolution = 1;
    CHECK_THROWS_AS(cfg.validate(), InvalidInput);
}

}  // TEST_SUITE
