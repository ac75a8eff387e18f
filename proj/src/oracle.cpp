#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ibexp/errors.hpp"
#include "ibexp/exponents.hpp"
#include "ibexp/types.hpp"
#include "internal.hpp"

namespace ibexp {

using namespace detail;

namespace {

std::vector<std::vector<Vec>> channel_grid(int ny, int us, int k) {
    auto rows = simplex_grid(us, k);
    std::vector<std::vector<Vec>> out;
    std::vector<std::size_t> idx(ny, 0);
    while (true) {
        std::vector<Vec> ch(ny);
        for (int y = 0; y < ny; ++y) ch[y] = rows[idx[y]];
        out.push_back(std::move(ch));
        int y = 0;
        while (y < ny && ++idx[y] == rows.size()) idx[y++] = 0;
        if (y == ny) break;
    }
    return out;
}

CondPmf to_cond(const std::vector<Vec>& ch) {
    std::vector<double> flat;
    for (auto& r : ch) flat.insert(flat.end(), r.begin(), r.end());
    return CondPmf(ch.size(), ch[0].size(), flat);
}

double info_yu(const Vec& q, const std::vector<Vec>& ch) {
    int us = static_cast<int>(ch[0].size());
    Vec qu(us, 0.0);
    for (std::size_t y = 0; y < q.size(); ++y)
        for (int u = 0; u < us; ++u) qu[u] += q[y] * ch[y][u];
    double I = 0.0;
    for (std::size_t y = 0; y < q.size(); ++y)
        for (int u = 0; u < us; ++u)
            if (q[y] * ch[y][u] > 0) I += q[y] * ch[y][u] * std::log(ch[y][u] / qu[u]);
    return std::max(I, 0.0);
}

bool in_support(const Vec& q, const Vec& py) {
    for (std::size_t y = 0; y < q.size(); ++y)
        if (q[y] > 0 && py[y] <= 0) return false;
    return true;
}

std::vector<Vec> grid_neighbors(const Vec& v, double step) {
    std::vector<Vec> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (i == j || v[j] < step - 1e-12) continue;
            Vec w = v;
            w[i] += step;
            w[j] = std::max(w[j] - step, 0.0);
            out.push_back(w);
        }
    return out;
}

struct EOracle {
    const SourceModel& model;
    const ProblemSpec& spec;
    int k, us;
    std::vector<std::vector<Vec>> chans;
    long long evals = 0;

    double inner(const Vec& q, const std::vector<Vec>& ch) {
        ++evals;
        return inner_min_E(Pmf(q), to_cond(ch), spec.Delta, model).value;
    }

    // max over the channel grid; stops once the running max reaches stop
    double middle(const Vec& q, double stop, std::vector<Vec>* arg) {
        double best = -kInf;
        for (auto& ch : chans) {
            if (info_yu(q, ch) > spec.R + 1e-12) continue;
            double v = inner(q, ch);
            if (v > best) {
                best = v;
                if (arg) *arg = ch;
            }
            if (best >= stop) break;
        }
        return best;
    }
};

OracleResult oracle_E(const SourceModel& model, const ProblemSpec& spec, int k, double hint) {
    const int ny = static_cast<int>(model.ny());
    EOracle o{model, spec, k, spec.u_size ? spec.u_size : 2, {}};
    for (auto& ch : channel_grid(ny, o.us, k)) {
        // relabelling U leaves the value unchanged
        if (o.us == 2 && ch[0][0] < 0.5 - 1e-12) continue;
        o.chans.push_back(std::move(ch));
    }
    Vec py = model.p_y().probs();
    std::vector<std::pair<double, Vec>> qs;
    for (auto& q : simplex_grid(ny, k))
        if (in_support(q, py)) qs.push_back({kl(Pmf(q), model.p_y()), q});
    std::sort(qs.begin(), qs.end(), [](auto& a, auto& b) { return a.first < b.first; });

    OracleResult res;
    auto run = [&](double start) {
        double best = start;
        Vec arg;
        for (auto& [d, q] : qs) {
            if (d >= best) break;
            double m = o.middle(q, best, nullptr);
            if (m < best) best = m, arg = q;
        }
        return std::make_pair(best, arg);
    };
    auto [best, arg] = run(std::isfinite(hint) ? hint + 1e-9 : kInf);
    res.used_hint = std::isfinite(hint);
    if (arg.empty()) {
        std::tie(best, arg) = run(kInf);
        res.used_hint = false;
    }
    res.value = best;
    if (arg.empty() || !std::isfinite(best)) {
        res.evaluations = o.evals;
        return res;
    }
    std::vector<Vec> ch;
    o.middle(arg, kInf, &ch);
    double g = 0.0;
    for (auto& q : grid_neighbors(arg, 1.0 / k)) {
        if (!in_support(q, py)) continue;
        double v = o.middle(q, kInf, nullptr);
        if (std::isfinite(v)) g = std::max(g, std::fabs(v - best));
    }
    for (int y = 0; y < ny; ++y)
        for (auto& row : grid_neighbors(ch[y], 1.0 / k)) {
            auto c2 = ch;
            c2[y] = row;
            if (info_yu(arg, c2) > spec.R + 1e-12) continue;
            double v = o.inner(arg, c2);
            if (std::isfinite(v)) g = std::max(g, std::fabs(v - best));
        }
    res.granularity = g;
    res.evaluations = o.evals;
    return res;
}

struct FOracle {
    const SourceModel& model;
    const ProblemSpec& spec;
    int k, us, nx, ny;
    Rows p;
    std::vector<Vec> tgrid;
    std::map<std::vector<int>, std::vector<std::pair<double, double>>> cache;  // pareto (h, c) per posterior
    long long evals = 0;

    const std::vector<std::pair<double, double>>& columns(const std::vector<int>& n) {
        std::vector<int> key = n;
        int g = 0;
        for (int v : key) g = std::gcd(g, v);
        for (int& v : key) v /= g;
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        int tot = 0;
        for (int v : key) tot += v;
        Vec a(ny);
        for (int y = 0; y < ny; ++y) a[y] = static_cast<double>(key[y]) / tot;
        std::vector<std::pair<double, double>> pts;
        auto add = [&](const Vec& t) {
            TiltColumn c = tilt_to_target(a, t, p);
            if (c.ok) pts.push_back({ent(t), c.cost});
        };
        for (auto& t : tgrid) add(t);
        Vec m(nx, 0.0);
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) m[x] += a[y] * p[y][x];
        add(m);
        std::sort(pts.begin(), pts.end());
        std::vector<std::pair<double, double>> par;
        for (auto& pt : pts)
            if (par.empty() || pt.second < par.back().second - 1e-15) par.push_back(pt);
        return cache.emplace(key, std::move(par)).first->second;
    }

    // value at a grid point of the joint Q_YU (counts over cells y*us+u)
    double value(const std::vector<int>& n, double stop) {
        ++evals;
        Vec q(ny, 0.0), w(us, 0.0);
        for (int y = 0; y < ny; ++y)
            for (int u = 0; u < us; ++u) {
                q[y] += static_cast<double>(n[y * us + u]) / k;
                w[u] += static_cast<double>(n[y * us + u]) / k;
            }
        double d = kl(Pmf(q), model.p_y());
        if (!std::isfinite(d)) return kInf;
        double I = 0.0;
        for (int y = 0; y < ny; ++y)
            for (int u = 0; u < us; ++u) {
                double j = static_cast<double>(n[y * us + u]) / k;
                if (j > 0) I += j * std::log(j / (q[y] * w[u]));
            }
        double base = d + std::max(0.0, I - spec.R);
        if (base >= stop) return kInf;
        std::vector<const std::vector<std::pair<double, double>>*> cols;
        std::vector<double> ww;
        for (int u = 0; u < us; ++u) {
            if (w[u] <= 0) continue;
            std::vector<int> cnt(ny);
            for (int y = 0; y < ny; ++y) cnt[y] = n[y * us + u];
            cols.push_back(&columns(cnt));
            ww.push_back(w[u]);
        }
        double best = kInf;
        if (cols.size() == 1) {
            for (auto& [h, c] : *cols[0])
                if (h <= spec.Delta + 1e-12) best = std::min(best, c);
        } else {
            const auto &A = *cols[0], &B = *cols[1];
            std::ptrdiff_t k2 = static_cast<std::ptrdiff_t>(B.size()) - 1;
            for (auto& [h1, c1] : A) {
                double thr = (spec.Delta - ww[0] * h1) / ww[1];
                while (k2 >= 0 && B[k2].first > thr + 1e-12) --k2;
                if (k2 < 0) break;
                best = std::min(best, ww[0] * c1 + ww[1] * B[k2].second);
            }
        }
        return base + best;
    }
};

OracleResult oracle_F(const SourceModel& model, const ProblemSpec& spec, int k, double hint) {
    const int us = spec.u_size ? spec.u_size : 2;
    FOracle o{model, spec, k, us, static_cast<int>(model.nx()), static_cast<int>(model.ny()),
              channel_rows(model.p_x_given_y()), simplex_grid(static_cast<int>(model.nx()), k), {}, 0};
    OracleResult res;
    double best = std::isfinite(hint) ? hint + 1e-9 : kInf;
    res.used_hint = std::isfinite(hint);
    std::vector<int> arg;
    auto sweep = [&] {
        TypeEnumerator en(k, o.ny * us);
        TypeVector tv;
        while (en.next(tv)) {
            double v = o.value(tv.counts, best);
            if (v < best) best = v, arg = tv.counts;
        }
    };
    sweep();
    if (arg.empty() && res.used_hint) {
        best = kInf;
        res.used_hint = false;
        sweep();
    }
    res.value = best;
    if (!arg.empty() && std::isfinite(best)) {
        double g = 0.0;
        for (std::size_t i = 0; i < arg.size(); ++i)
            for (std::size_t j = 0; j < arg.size(); ++j) {
                if (i == j || arg[j] == 0) continue;
                auto n2 = arg;
                ++n2[i];
                --n2[j];
                double v = o.value(n2, kInf);
                if (std::isfinite(v)) g = std::max(g, std::fabs(v - best));
            }
        res.granularity = g;
    }
    res.evaluations = o.evals;
    return res;
}

OracleResult oracle_rate(const SourceModel& model, const ProblemSpec& spec, bool rd, int k) {
    const int ny = static_cast<int>(model.ny()), nx = static_cast<int>(model.nx());
    const int us = spec.u_size ? spec.u_size : 2;
    double count = std::pow(static_cast<double>(simplex_grid(us, k).size()), ny);
    if (count > 1e7) throw SizeCapExceeded("oracle grid exceeds 1e7 channels");
    Vec py = model.p_y().probs();
    Rows p = channel_rows(model.p_x_given_y());
    auto eval = [&](const std::vector<Vec>& ch, double& I, double& H) {
        I = info_yu(py, ch);
        H = 0.0;
        for (int u = 0; u < us; ++u) {
            Vec m(nx, 0.0);
            double w = 0.0;
            for (int y = 0; y < ny; ++y) {
                w += py[y] * ch[y][u];
                for (int x = 0; x < nx; ++x) m[x] += py[y] * ch[y][u] * p[y][x];
            }
            if (w <= 0) continue;
            for (double& v : m) v /= w;
            H += w * ent(m);
        }
    };
    auto objective = [&](const std::vector<Vec>& ch) {
        double I, H;
        eval(ch, I, H);
        if (rd) return H <= spec.Delta + 1e-12 ? I : kInf;
        return I <= spec.R + 1e-12 ? H : kInf;
    };
    OracleResult res;
    std::vector<Vec> arg;
    for (auto& ch : channel_grid(ny, us, k)) {
        ++res.evaluations;
        double v = objective(ch);
        if (v < res.value) res.value = v, arg = ch;
    }
    if (!arg.empty()) {
        for (int y = 0; y < ny; ++y)
            for (auto& row : grid_neighbors(arg[y], 1.0 / k)) {
                auto c2 = arg;
                c2[y] = row;
                double v = objective(c2);
                if (std::isfinite(v)) res.granularity = std::max(res.granularity, std::fabs(v - res.value));
            }
    }
    return res;
}

}  // namespace

OracleResult brute_force_exponent_oracle(const SourceModel& model, const ProblemSpec& spec, OracleKind kind,
                                         int grid_k, double upper_hint) {
    spec.validate();
    if (grid_k < 1) throw InvalidInput("grid_k must be >= 1");
    if (grid_k > 200) throw SizeCapExceeded("grid_k must be <= 200");
    const int us = spec.u_size ? spec.u_size : 2;
    if (kind == OracleKind::E || kind == OracleKind::F) {
        if (model.nx() > 2 || model.ny() > 2 || us > 2)
            throw SizeCapExceeded("oracle supports |X|,|Y| <= 2 and u_size <= 2 for E and F");
    }
    switch (kind) {
        case OracleKind::E: return oracle_E(model, spec, grid_k, upper_hint);
        case OracleKind::F: return oracle_F(model, spec, grid_k, upper_hint);
        case OracleKind::RD: return oracle_rate(model, spec, true, grid_k);
        case OracleKind::RH: return oracle_rate(model, spec, false, grid_k);
    }
    return {};
}

}  // namespace ibexp
