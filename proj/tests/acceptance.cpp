#include <boost/multiprecision/cpp_int.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ibexp/coding_sim.hpp"
#include "ibexp/exponents.hpp"
#include "ibexp/types.hpp"
#include "ibexp/wak_bridge.hpp"

using namespace ibexp;
using boost::multiprecision::cpp_rational;

namespace {

const double kLn2 = std::log(2.0);

struct Outcome {
    bool pass = true;
    std::string detail;
};

SourceModel lossless(double p) { return SourceModel(JointXY(2, 2, {1 - p, 0, 0, p})); }

std::vector<SourceModel> noisy_models() {
    return {SourceModel(JointXY(2, 2, {0.54, 0.04, 0.06, 0.36})),
            SourceModel(JointXY(2, 2, {0.30, 0.10, 0.15, 0.45})),
            SourceModel(JointXY(2, 2, {0.45, 0.05, 0.20, 0.30}))};
}

bool same_or_close(double a, double b, double tol) {
    if (std::isinf(a) || std::isinf(b)) return std::isinf(a) && std::isinf(b);
    return std::fabs(a - b) <= tol;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Outcome lossless_closed_forms() {
    Outcome o;
    double worst_e = 0, worst_f = 0;
    int cells = 0;
    for (double p : {0.05, 0.1, 0.2, 0.3, 0.4}) {
        SourceModel m = lossless(p);
        ExponentSolver s(m);
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) {
                double R = 0.02 + 0.07 * i, D = 0.02 + 0.07 * j;
                double e = s.error_exponent({R, D, 0}).value, ew = error_exponent_lossless(m.p_x(), R, D);
                double f = s.strong_converse_exponent({R, D, 0}).value, fw = sc_exponent_lossless(m.p_x(), R, D);
                if (!same_or_close(e, ew, 2e-3)) {
                    o.pass = false;
                    o.detail += " E(p=" + num(p) + ",R=" + num(R) + ",D=" + num(D) + ")=" + num(e) + " vs " + num(ew);
                }
                if (!same_or_close(f, fw, 2e-3)) {
                    o.pass = false;
                    o.detail += " F(p=" + num(p) + ",R=" + num(R) + ",D=" + num(D) + ")=" + num(f) + " vs " + num(fw);
                }
                if (std::isfinite(e) && std::isfinite(ew)) worst_e = std::max(worst_e, std::fabs(e - ew));
                if (std::isfinite(f) && std::isfinite(fw)) worst_f = std::max(worst_f, std::fabs(f - fw));
                ++cells;
            }
    }
    o.detail = std::to_string(cells) + " cells, max |dE|=" + num(worst_e) + " max |dF|=" + num(worst_f) + o.detail;
    return o;
}

// moderate-noise channels; Delta spread over the interior of [H(X|Y), H(X)]
std::vector<SourceModel> boundary_models() {
    return {SourceModel(JointXY(2, 2, {0.54, 0.04, 0.06, 0.36})),
            SourceModel(JointXY(2, 2, {0.475, 0.025, 0.025, 0.475})),
            SourceModel(JointXY(2, 2, {0.665, 0.015, 0.035, 0.285}))};
}

Outcome phase_boundaries() {
    Outcome o;
    int checks = 0;
    double worst_low_e = 0, worst_high_e = kInf, worst_low_f = kInf, worst_high_f = 0;
    for (auto& m : boundary_models()) {
        ExponentSolver s(m);
        double lo = m.delta_min(), hx = entropy(m.p_x());
        for (int k = 0; k < 8; ++k) {
            double D = lo + (hx - lo) * (0.2 + 0.0875 * k);
            double rd = s.rate_distortion(D).value;
            if (!(rd > 0.05)) {
                o.pass = false;
                o.detail += " R(" + num(D) + ")=" + num(rd) + " too small";
                continue;
            }
            double e_lo = s.error_exponent({rd - 0.05, D, 0}).value;
            double e_hi = s.error_exponent({rd + 0.1, D, 0}).value;
            double f_lo = s.strong_converse_exponent({rd - 0.05, D, 0}).value;
            double f_hi = s.strong_converse_exponent({rd + 0.1, D, 0}).value;
            worst_low_e = std::max(worst_low_e, e_lo);
            worst_high_e = std::min(worst_high_e, e_hi);
            worst_low_f = std::min(worst_low_f, f_lo);
            worst_high_f = std::max(worst_high_f, f_hi);
            bool ok = e_lo <= 1e-4 && e_hi >= 1e-3 && f_lo >= 1e-3 && f_hi <= 1e-4;
            if (!ok) {
                o.pass = false;
                o.detail += " D=" + num(D) + ": E " + num(e_lo) + "/" + num(e_hi) + " F " + num(f_lo) + "/" + num(f_hi);
            }
            ++checks;
        }
    }
    o.detail = std::to_string(checks) + " (model, Delta) pairs; max E below=" + num(worst_low_e) +
               " min E above=" + num(worst_high_e) + " min F below=" + num(worst_low_f) +
               " max F above=" + num(worst_high_f) + o.detail;
    return o;
}

Outcome oracle_certification() {
    Outcome o;
    int checks = 0;
    double worst_ratio = 0;
    for (auto& m : noisy_models()) {
        ExponentSolver s(m);
        double lo = m.delta_min(), hx = entropy(m.p_x());
        for (double frac : {0.3, 0.6}) {
            double D = lo + (hx - lo) * frac;
            double rd = s.rate_distortion(D).value;
            struct Case {
                OracleKind kind;
                double R;
            };
            for (Case c : {Case{OracleKind::E, rd + 0.1}, Case{OracleKind::F, std::max(rd - 0.1, 0.0)}}) {
                ProblemSpec spec{c.R, D, 2};
                double v = c.kind == OracleKind::E ? s.error_exponent(spec).value
                                                   : s.strong_converse_exponent(spec).value;
                auto orc = brute_force_exponent_oracle(m, spec, c.kind, 100);
                double tol = std::max(5e-3, orc.granularity);
                double gap = std::fabs(v - orc.value);
                worst_ratio = std::max(worst_ratio, gap / tol);
                if (!(gap <= tol)) {
                    o.pass = false;
                    o.detail += std::string(" ") + (c.kind == OracleKind::E ? "E" : "F") + "(R=" + num(c.R) +
                                ",D=" + num(D) + ") solver " + num(v) + " oracle " + num(orc.value);
                }
                ++checks;
            }
        }
    }
    o.detail = std::to_string(checks) + " instances, max gap/tolerance=" + num(worst_ratio) + o.detail;
    return o;
}

Outcome single_letter_identity() {
    Outcome o;
    double worst = 0;
    int bounds_failed = 0;
    auto models = noisy_models();
    for (int t = 0; t < 100; ++t) {
        const SourceModel& m = models[t % models.size()];
        auto f = random_identity_fixture(m, 4, 2 + t % 3, 1000 + t);
        auto r = verify_single_letter_identity(f.q_joint, f.encoder, m, 4);
        worst = std::max(worst, r.diff);
        if (!r.bound_plain || !r.bound_rate) ++bounds_failed;
    }
    o.pass = worst <= 1e-10 && bounds_failed == 0;
    o.detail = "100 fixtures, max |lhs-rhs|=" + num(worst) + ", bound failures=" + std::to_string(bounds_failed);
    return o;
}

Outcome code_equivalence() {
    Outcome o;
    double worst = 0;
    long long codes = 0;
    std::uint64_t seed = 7;
    for (auto& m : noisy_models()) {
        auto full = verify_equivalence(m, 1, kLn2, kLn2, 0, seed++);
        auto rnd = verify_equivalence(m, 2, kLn2, kLn2, 200, seed++);
        o.pass = o.pass && full.ok && full.exhaustive && rnd.ok;
        worst = std::max({worst, full.max_discrepancy, rnd.max_discrepancy});
        codes += full.codes_checked + rnd.codes_checked;
    }
    o.detail = std::to_string(codes) + " codes, max discrepancy=" + num(worst);
    return o;
}

cpp_rational rational_pow(const cpp_rational& b, int e) {
    cpp_rational r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

Outcome types_exactness() {
    Outcome o;
    std::vector<std::vector<cpp_rational>> pmfs{
        {cpp_rational(3, 10), cpp_rational(7, 10)},
        {cpp_rational(1, 6), cpp_rational(1, 3), cpp_rational(1, 2)},
    };
    int sums = 0;
    for (auto& p : pmfs)
        for (int n = 1; n <= 20; ++n) {
            cpp_rational total = 0;
            for (auto& t : enumerate_types(n, static_cast<int>(p.size()))) {
                cpp_rational term = cpp_rational(type_class_size(t));
                for (std::size_t a = 0; a < p.size(); ++a) term *= rational_pow(p[a], t.counts[a]);
                total += term;
            }
            ++sums;
            if (total != 1) {
                o.pass = false;
                o.detail += " sum != 1 at n=" + std::to_string(n) + " k=" + std::to_string(p.size());
            }
        }
    long long bounds = 0;
    for (int k : {2, 3})
        for (int n = 1; n <= 40; ++n)
            for (auto& t : enumerate_types(n, k)) {
                double ls = log_big(type_class_size(t)), nh = n * entropy(Pmf(t.freqs()));
                double slack = 1e-9 * std::max(1.0, nh);
                if (ls > nh + slack || ls < nh - k * std::log(n + 1.0) - slack) {
                    o.pass = false;
                    o.detail += " bound fails at n=" + std::to_string(n);
                }
                ++bounds;
            }
    o.detail = std::to_string(sums) + " exact sums, " + std::to_string(bounds) + " types bounded" + o.detail;
    return o;
}

Outcome cond_class_exponents() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    double worst_ratio = 0;
    for (int t = 0; t < 50; ++t) {
        const int n = 8 + t % 9;
        std::vector<int> n_xu(4, 0);
        for (int i = 0; i < n; ++i) ++n_xu[rng() % 4];
        std::vector<int> n_uy(4, 0);
        for (int u = 0; u < 2; ++u) {
            int nu = n_xu[0 * 2 + u] + n_xu[1 * 2 + u];
            int a = nu == 0 ? 0 : static_cast<int>(rng() % (nu + 1));
            n_uy[u * 2 + 0] = a;
            n_uy[u * 2 + 1] = nu - a;
        }
        double c0 = unif(rng), c1 = unif(rng);
        CondPmf ch(2, 2, {c0, 1 - c0, c1, 1 - c1});
        auto r = cond_class_log_prob(2, 2, 2, n_xu, n_uy, ch);
        double tol = (2 * 2 * 2 + 2) * std::log(n + 1.0) / n;
        double gap = std::fabs(r.exponent() - r.single_letter);
        worst_ratio = std::max(worst_ratio, gap / tol);
        if (!(gap <= tol)) {
            o.pass = false;
            o.detail += " n=" + std::to_string(n) + " gap " + num(gap) + " > " + num(tol);
        }
    }
    o.detail = "50 instances, max gap/tolerance=" + num(worst_ratio) + o.detail;
    return o;
}

Outcome achievability_slope() {
    Outcome o;
    const double target = error_exponent_lossless(Pmf({0.9, 0.1}), 0.0, 0.5);
    std::vector<int> ns;
    for (int n = 10; n <= 40; ++n) ns.push_back(n);
    auto r = empirical_exponent_slope(lossless(0.1), 0.0, 0.5, 0.0, ns, 1000000, 11, SchemeVariant::Error, 1);
    double rel = (r.slope - target) / target;
    o.pass = std::fabs(rel) <= 0.25;
    o.detail = "slope " + num(r.slope) + " +/- " + num(r.slope_stderr) + " vs " + num(target) + " (" +
               num(100 * rel) + "%), tolerance 25%";
    return o;
}

Outcome brute_force_optimality() {
    Outcome o;
    std::mt19937_64 rng(99);
    double worst = -kInf;
    int schemes = 0, instances = 0;
    auto models = noisy_models();
    struct Inst {
        int n, M;
        double Delta;
    };
    for (auto& m : models)
        for (Inst in : {Inst{1, 2, 0.0}, Inst{2, 2, 0.0}, Inst{2, 3, 0.35}, Inst{2, 4, 0.0}, Inst{2, 4, 0.35}}) {
            double R = std::log(static_cast<double>(in.M)) / in.n;
            double bf = brute_force_optimal_pe(m, in.n, R, in.Delta);
            std::uint64_t N = 1ULL << in.n;
            for (int t = 0; t < 1000; ++t) {
                std::vector<int> enc(N);
                for (auto& e : enc) e = static_cast<int>(rng() % in.M);
                double pe = optimal_decoder_excess_prob(enc, m, in.n, in.Delta).p_e;
                worst = std::max(worst, bf - pe);
                if (bf > pe + 1e-15) o.pass = false;
                ++schemes;
            }
            ++instances;
        }
    o.detail = std::to_string(instances) + " instances, " + std::to_string(schemes) +
               " schemes, max (brute force - random)=" + num(worst);
    return o;
}

Outcome reverse_inequalities() {
    Outcome o;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int markov_fail = 0, rank_fail = 0;
    for (int t = 0; t < 10000; ++t) {
        double d = 0.5 + 9.5 * unif(rng);
        int len = 1 + static_cast<int>(rng() % 50), levels = 2 + static_cast<int>(rng() % 10);
        std::vector<double> sample(len);
        for (auto& v : sample) v = std::min(d, d * static_cast<double>(rng() % (levels + 1)) / levels);
        double a = d * unif(rng) * 0.999;
        auto r = reverse_markov(sample, a, d);
        if (r.tail < r.bound - 1e-12) ++markov_fail;
    }
    for (int t = 0; t < 10000; ++t) {
        std::size_t k = 2 + rng() % 63;
        std::vector<double> w(k);
        double alpha = 0.05 + 3.0 * unif(rng);
        std::gamma_distribution<double> g(alpha, 1.0);
        double tot = 0;
        for (auto& v : w) tot += (v = g(rng));
        if (tot <= 0) w[0] = tot = 1;
        for (auto& v : w) v /= tot;
        Pmf p(w);
        double h = entropy(p), r = expected_log_rank(p);
        if (r < h - std::log(1 + std::log(static_cast<double>(k))) - 1e-12 || r > h + 1e-12) ++rank_fail;
    }
    o.pass = markov_fail == 0 && rank_fail == 0;
    o.detail = "10000 tail fixtures (" + std::to_string(markov_fail) + " failures), 10000 rank fixtures (" +
               std::to_string(rank_fail) + " failures)";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> all{
        {1, "lossless closed-form agreement", 300, lossless_closed_forms},
        {2, "phase boundaries", 600, phase_boundaries},
        {3, "grid-oracle certification", 1200, oracle_certification},
        {4, "single-letter identity", 60, single_letter_identity},
        {5, "helper/list code equivalence", 120, code_equivalence},
        {6, "method-of-types exactness", 60, types_exactness},
        {7, "conditional class exponents", 300, cond_class_exponents},
        {8, "achievability slope", 900, achievability_slope},
        {9, "brute-force optimality", 120, brute_force_optimality},
        {10, "reverse inequalities", 30, reverse_inequalities},
    };
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    int failed = 0;
    for (auto& c : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = secs <= c.budget_s;
        bool ok = o.pass && in_time;
        if (!ok) ++failed;
        std::printf("[%s] %2d %s: %s; %.1fs of %.0fs%s\n", ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    c.budget_s, in_time ? "" : " (over budget)");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
