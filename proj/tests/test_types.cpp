#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "ibexp/coding_sim.hpp"
#include "ibexp/types.hpp"

using namespace ibexp;

namespace {

// x and u sequences realizing the joint counts n_xu (x-major)
void pair_sequences(int nx, int nu, const std::vector<int>& n_xu, Seq& x, Seq& u) {
    x.clear();
    u.clear();
    for (int a = 0; a < nx; ++a)
        for (int b = 0; b < nu; ++b)
            for (int k = 0; k < n_xu[a * nu + b]; ++k) x.push_back(a), u.push_back(b);
}

}  // namespace

TEST_SUITE("types") {

TEST_CASE("type_of and cond_type_of") {
    CHECK(type_of({0, 1, 0, 1}, 2).counts == std::vector<int>{2, 2});
    CondTypeMatrix c = cond_type_of({0, 0, 1, 1}, 2, {0, 1, 1, 1}, 2);
    CHECK(c.counts == std::vector<int>{1, 1, 0, 2});
    Seq s{2, 0, 1, 1, 2, 2};
    auto t = type_of(s, 3);
    std::sort(s.begin(), s.end());
    CHECK(type_of(s, 3) == t);
    CHECK_THROWS_AS(cond_type_of({0, 1}, 2, {0}, 2), InvalidInput);
    CHECK_THROWS_AS(type_of({0, 3}, 2), InvalidInput);
}

TEST_CASE("class sizes") {
    CHECK(type_class_size(TypeVector({2, 2})) == 6);
    CHECK(type_class_size(TypeVector({6, 0})) == 1);
    CHECK(type_class_size(TypeVector({4, 4, 4})) == 34650);
    CHECK(cond_type_class_size(CondTypeMatrix(2, 2, {1, 1, 0, 2})) == 2);
}

TEST_CASE("enumeration") {
    auto t = enumerate_types(2, 2);
    REQUIRE(t.size() == 3);
    CHECK(t[0].counts == std::vector<int>{2, 0});
    CHECK(t[1].counts == std::vector<int>{1, 1});
    CHECK(t[2].counts == std::vector<int>{0, 2});
    CHECK(enumerate_types(3, 3).size() == 10);
    CHECK(enumerate_cond_types(TypeVector({2, 2}), 2).size() == 9);
    for (int n = 1; n <= 8; ++n)
        for (int k = 2; k <= 4; ++k) {
            auto all = enumerate_types(n, k);
            CHECK(BigInt(all.size()) == binomial(n + k - 1, k - 1));
            std::vector<std::vector<int>> seen;
            for (auto& v : all) seen.push_back(v.counts);
            std::sort(seen.begin(), seen.end());
            CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
        }
}

TEST_CASE("sequence log probabilities") {
    CHECK(seq_log_prob(TypeVector({2, 2}), Pmf::uniform(2)) == doctest::Approx(4 * std::log(0.5)).epsilon(1e-14));
    CHECK(seq_log_prob(TypeVector({2, 2}), Pmf::uniform(2)) == doctest::Approx(-2.772589).epsilon(1e-6));
    CHECK(std::isinf(seq_log_prob(TypeVector({1, 0}), Pmf::point(2, 1))));
    CHECK(seq_log_prob(TypeVector({3, 1}), Pmf({0.75, 0.25})) == doctest::Approx(-2.249341).epsilon(1e-6));
    CHECK(seq_log_prob(TypeVector({3, 1}), Pmf({0.75, 0.25})) ==
          doctest::Approx(3 * std::log(0.75) + std::log(0.25)).epsilon(1e-14));
}

TEST_CASE("intersection of conditional classes") {
    SUBCASE("identical copy classes") {
        // x = u = (0,0,1,1,1); both conditional types are the copy
        std::vector<int> n_xu{2, 0, 0, 3};
        auto r = intersection_class_log_size(2, 2, 2, n_xu, {2, 0, 0, 3}, {2, 0, 0, 3});
        CHECK(r.size == cond_type_class_size(CondTypeMatrix(2, 2, {2, 0, 0, 3})));
    }
    SUBCASE("incompatible marginals") {
        auto r = intersection_class_log_size(2, 2, 2, {2, 0, 0, 3}, {2, 0, 0, 3}, {0, 2, 3, 0});
        CHECK(std::isinf(r.log_size));
        CHECK(r.log_size < 0);
    }
    SUBCASE("n = 8 against enumeration") {
        std::mt19937_64 rng(31);
        for (int t = 0; t < 10; ++t) {
            Seq x(8), u(8), y(8);
            for (int i = 0; i < 8; ++i) x[i] = rng() % 2, u[i] = rng() % 2, y[i] = rng() % 2;
            auto cxu = cond_type_of(x, 2, u, 2);
            auto cxy = cond_type_of(x, 2, y, 2);
            auto cuy = cond_type_of(u, 2, y, 2);
            BigInt count = 0;
            for (std::uint64_t i = 0; i < 256; ++i) {
                Seq z = seq_from_index(i, 8, 2);
                if (cond_type_of(x, 2, z, 2) == cxy && cond_type_of(u, 2, z, 2) == cuy) ++count;
            }
            auto r = intersection_class_log_size(2, 2, 2, cxu.counts, cxy.counts, cuy.counts);
            CHECK(r.size == count);
            CHECK(r.log_size == doctest::Approx(std::log(to_double(count))).epsilon(1e-12));
        }
    }
}

TEST_CASE("conditional class probability") {
    SUBCASE("copy channel") {
        CondPmf copy(2, 2, {1, 0, 0, 1});
        // x = u, y must equal x under the copy channel
        auto r = cond_class_log_prob(2, 2, 2, {3, 0, 0, 2}, {3, 0, 0, 2}, copy);
        CHECK(r.log_prob == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("n = 10 against enumeration") {
        std::mt19937_64 rng(41);
        CondPmf ch(2, 2, {0.8, 0.2, 0.35, 0.65});
        for (int t = 0; t < 5; ++t) {
            Seq x(10), u(10), y(10);
            for (int i = 0; i < 10; ++i) x[i] = rng() % 2, u[i] = rng() % 2, y[i] = rng() % 2;
            auto cxu = cond_type_of(x, 2, u, 2);
            auto cuy = cond_type_of(u, 2, y, 2);
            double p = 0.0;
            for (std::uint64_t i = 0; i < 1024; ++i) {
                Seq z = seq_from_index(i, 10, 2);
                if (!(cond_type_of(u, 2, z, 2) == cuy)) continue;
                double q = 1.0;
                for (int k = 0; k < 10; ++k) q *= ch(x[k], z[k]);
                p += q;
            }
            auto r = cond_class_log_prob(2, 2, 2, cxu.counts, cuy.counts, ch);
            CHECK(r.log_prob == doctest::Approx(std::log(p)).epsilon(1e-10));
        }
    }
    SUBCASE("single-letter gap within polynomial slack") {
        std::mt19937_64 rng(43);
        CondPmf ch(2, 2, {0.7, 0.3, 0.1, 0.9});
        for (int n = 8; n <= 16; n += 4) {
            Seq x(n), u(n), y(n);
            for (int i = 0; i < n; ++i) x[i] = rng() % 2, u[i] = rng() % 2, y[i] = rng() % 2;
            auto r = cond_class_log_prob(2, 2, 2, cond_type_of(x, 2, u, 2).counts, cond_type_of(u, 2, y, 2).counts, ch);
            CHECK(std::fabs(r.exponent() - r.single_letter) <= 10 * std::log(n + 1.0) / n);
        }
    }
}

TEST_CASE("greedy type cover") {
    SUBCASE("constant column") {
        auto r = greedy_type_cover(TypeVector({3, 3}), CondTypeMatrix(2, 2, {3, 0, 3, 0}));
        CHECK(r.codewords.size() == 1);
        CHECK(verify_cover(TypeVector({3, 3}), CondTypeMatrix(2, 2, {3, 0, 3, 0}), r.codewords));
    }
    SUBCASE("copy") {
        auto r = greedy_type_cover(TypeVector({3, 2}), CondTypeMatrix(2, 2, {3, 0, 0, 2}));
        CHECK(BigInt(r.codewords.size()) == type_class_size(TypeVector({3, 2})));
    }
    SUBCASE("n = 8 BSC-like conditional type") {
        TypeVector qy({4, 4});
        CondTypeMatrix qu(2, 2, {3, 1, 1, 3});
        auto r = greedy_type_cover(qy, qu);
        CHECK(r.universe == 70);
        CHECK(verify_cover(qy, qu, r.codewords));
        CHECK(std::log(static_cast<double>(r.codewords.size())) <= r.log_bound);
        for (auto& w : r.codewords) CHECK(type_of(w, 2).counts == std::vector<int>{4, 4});
    }
}

TEST_CASE("counting bounds") {
    for (int k = 2; k <= 3; ++k)
        for (int n = 1; n <= 40; n += 3)
            for (auto& t : enumerate_types(n, k)) {
                double h = entropy(Pmf(t.freqs()));
                double ls = log_big(type_class_size(t));
                CHECK(ls <= n * h + 1e-9);
                CHECK(ls >= n * h - k * std::log(n + 1.0) - 1e-9);
            }
}

}  // TEST_SUITE
