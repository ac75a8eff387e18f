#include "ibexp/coding_sim.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "ibexp/errors.hpp"
#include "internal.hpp"

namespace ibexp {

using namespace detail;

std::uint64_t seq_index(const Seq& s, int k) {
    std::uint64_t v = 0;
    for (int c : s) v = v * k + c;
    return v;
}

Seq seq_from_index(std::uint64_t idx, int n, int k) {
    Seq s(n);
    for (int i = n - 1; i >= 0; --i) {
        s[i] = static_cast<int>(idx % k);
        idx /= k;
    }
    return s;
}

std::uint64_t checked_pow(int base, int n, std::uint64_t cap) {
    std::uint64_t v = 1;
    for (int i = 0; i < n; ++i) {
        v *= base;
        if (v > cap) throw SizeCapExceeded(std::to_string(base) + "^" + std::to_string(n) + " exceeds " + std::to_string(cap));
    }
    return v;
}

BigInt list_cap(int n, double Delta) {
    using boost::multiprecision::cpp_bin_float_50;
    cpp_bin_float_50 e = boost::multiprecision::exp(cpp_bin_float_50(n) * cpp_bin_float_50(Delta));
    // relative slack so that e.g. Delta = log(2) in double precision still yields 2
    return static_cast<BigInt>(boost::multiprecision::floor(e * cpp_bin_float_50(1 + 1e-12)));
}

double log_loss(const Seq& x, const std::vector<Seq>& list) {
    bool member = std::find(list.begin(), list.end(), x) != list.end();
    return log_loss(member, BigInt(list.size()), static_cast<int>(x.size()));
}

double log_loss(bool member, const BigInt& list_size, int n) {
    if (!member || list_size == 0) return kInf;
    return log_big(list_size) / n;
}

namespace {

// H(x | u) of the pair types, nats per symbol
double cond_entropy_counts(const Seq& u, int nu, const Seq& x, int nx) {
    const int n = static_cast<int>(u.size());
    std::vector<int> cu(nu, 0), cux(nu * nx, 0);
    for (int i = 0; i < n; ++i) {
        ++cu[u[i]];
        ++cux[u[i] * nx + x[i]];
    }
    double h = 0.0;
    for (int c : cu)
        if (c > 0) h += c * std::log(static_cast<double>(c));
    for (int c : cux)
        if (c > 0) h -= c * std::log(static_cast<double>(c));
    return std::max(h / n, 0.0);
}

double cond_entropy_type(const CondTypeMatrix& c) {
    double h = 0.0;
    for (int a = 0; a < c.n_in; ++a) {
        int row = 0;
        for (int b = 0; b < c.n_out; ++b) row += c(a, b);
        if (row > 0) h += row * std::log(static_cast<double>(row));
        for (int b = 0; b < c.n_out; ++b)
            if (c(a, b) > 0) h -= c(a, b) * std::log(static_cast<double>(c(a, b)));
    }
    return std::max(h / c.n(), 0.0);
}

bool passes(double h, double level, SchemeVariant v) {
    return v == SchemeVariant::Error ? h < level - 1e-12 : h <= level + 1e-12;
}

Pmf pmf_of(const TypeVector& t) { return Pmf(t.freqs()); }

CondPmf channel_of(const CondTypeMatrix& c) {
    std::vector<double> flat(c.n_in * c.n_out);
    for (int a = 0; a < c.n_in; ++a) {
        int row = 0;
        for (int b = 0; b < c.n_out; ++b) row += c(a, b);
        for (int b = 0; b < c.n_out; ++b)
            flat[a * c.n_out + b] = row > 0 ? static_cast<double>(c(a, b)) / row : (b == 0 ? 1.0 : 0.0);
    }
    return CondPmf(c.n_in, c.n_out, flat);
}

double info_of(const TypeVector& qy, const CondTypeMatrix& c) {
    const double n = qy.n;
    std::vector<double> qu(c.n_out, 0.0);
    for (int a = 0; a < c.n_in; ++a)
        for (int b = 0; b < c.n_out; ++b) qu[b] += c(a, b) / n;
    double I = 0.0;
    for (int a = 0; a < c.n_in; ++a)
        for (int b = 0; b < c.n_out; ++b)
            if (c(a, b) > 0) I += c(a, b) / n * std::log((c(a, b) / n) / (qy.counts[a] / n * qu[b]));
    return std::max(I, 0.0);
}

// min over tilted reconstructions with sum_u w_u h_u <= level, plus the rate hinge
double sc_cost(const TypeVector& qy, const CondTypeMatrix& c, const Rows& p, double R, double level) {
    const int ny = c.n_in, nu = c.n_out, nx = static_cast<int>(p[0].size());
    auto rs = simplex_grid(nx, nx == 2 ? 100 : 20);
    std::vector<double> w;
    std::vector<std::vector<std::pair<double, double>>> cols;
    for (int u = 0; u < nu; ++u) {
        Vec a(ny, 0.0);
        double wu = 0.0;
        for (int y = 0; y < ny; ++y) wu += c(y, u);
        if (wu <= 0) continue;
        for (int y = 0; y < ny; ++y) a[y] = c(y, u) / wu;
        std::vector<std::pair<double, double>> pts;
        for (auto& r : rs) {
            TiltColumn t = tilt_by(a, r, p);
            if (t.ok) pts.push_back({t.ent, t.cost});
        }
        if (pts.empty()) return kInf;
        w.push_back(wu / qy.n);
        cols.push_back(std::move(pts));
    }
    auto pick = [&](double nu_, double& hs) {
        double cs = 0.0;
        hs = 0.0;
        for (std::size_t u = 0; u < cols.size(); ++u) {
            auto b = std::min_element(cols[u].begin(), cols[u].end(), [&](auto& x, auto& y) {
                return x.second + nu_ * x.first < y.second + nu_ * y.first;
            });
            cs += w[u] * b->second;
            hs += w[u] * b->first;
        }
        return cs;
    };
    double hs;
    double cost = pick(0.0, hs);
    if (hs > level + 1e-12) {
        double lo = 0.0, hi = 1.0;
        while (pick(hi, hs), hs > level + 1e-12) {
            hi *= 4;
            if (hi > 1e9) return kInf;
        }
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            pick(mid, hs);
            (hs > level + 1e-12 ? lo : hi) = mid;
        }
        cost = pick(hi, hs);
    }
    return cost + std::max(0.0, info_of(qy, c) - R);
}

bool same_pair_type(const Seq& y, const Seq& u, const CondTypeMatrix& target) {
    std::vector<int> cnt(target.counts.size(), 0);
    for (std::size_t i = 0; i < y.size(); ++i) ++cnt[y[i] * target.n_out + u[i]];
    return cnt == target.counts;
}

std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

int CodingScheme::encode(const Seq& y) const {
    if (!table.empty()) return table[seq_index(y, ny)];
    auto it = block_of.find(type_of(y, ny).counts);
    if (it == block_of.end()) return 0;
    const TypeBlock& b = blocks[it->second];
    for (std::size_t j = 0; j < b.codewords.size(); ++j)
        if (same_pair_type(y, b.codewords[j], b.q_u_given_y)) return b.message[j];
    return 0;
}

const TypeBlock* CodingScheme::block_for_message(int m, int* codeword) const {
    if (m <= 0) return nullptr;
    auto it = std::upper_bound(blocks.begin(), blocks.end(), m,
                               [](int v, const TypeBlock& b) { return v < b.first_message; });
    if (it == blocks.begin()) return nullptr;
    --it;
    int j = m - it->first_message;
    if (j < 0 || j >= static_cast<int>(it->codewords.size()) || it->message[j] != m) return nullptr;
    if (codeword) *codeword = j;
    return &*it;
}

bool CodingScheme::in_list(int m, const Seq& x) const {
    int j;
    const TypeBlock* b = block_for_message(m, &j);
    if (!b) return false;
    return passes(cond_entropy_counts(b->codewords[j], nu, x, nx), delta - epsilon, variant);
}

BigInt CodingScheme::max_list_size() const {
    BigInt m = 0;
    for (auto& b : blocks) m = std::max(m, b.list_size);
    return m;
}

CodingScheme build_achievability_scheme(const SourceModel& model, int n, double R, double Delta,
                                        std::optional<double> epsilon, SchemeVariant variant, int u_size) {
    require(n >= 1, "n must be >= 1");
    require(R >= 0 && std::isfinite(R), "R must be finite and >= 0");
    require(Delta >= 0 && std::isfinite(Delta), "Delta must be finite and >= 0");
    require(u_size >= 1, "u_size must be >= 1");
    if (n > 1000) throw SizeCapExceeded("n exceeds 1000");
    CodingScheme s;
    s.n = n;
    s.nx = static_cast<int>(model.nx());
    s.ny = static_cast<int>(model.ny());
    s.nu = u_size;
    s.rate_R = R;
    s.delta = Delta;
    s.variant = variant;
    s.epsilon = epsilon ? *epsilon : 2.0 * (s.nx * u_size + 1) * std::log(n + 1.0) / n;
    require(s.epsilon >= 0 && std::isfinite(s.epsilon), "epsilon must be finite and >= 0");
    if (u_size > 1 || variant == SchemeVariant::StrongConverse) checked_pow(s.ny, n, 10000000);
    const double level = Delta - s.epsilon;
    const BigInt cap = list_cap(n, Delta);
    const Rows p = channel_rows(model.p_x_given_y());
    SolverConfig cfg;

    std::map<std::vector<int>, BigInt> sizes;
    auto list_size_of = [&](const TypeVector& ut) -> const BigInt& {
        auto it = sizes.find(ut.counts);
        if (it != sizes.end()) return it->second;
        BigInt sz = 0;
        for (auto& cx : enumerate_cond_types(ut, s.nx))
            if (passes(cond_entropy_type(cx), level, variant)) sz += cond_type_class_size(cx);
        return sizes.emplace(ut.counts, sz).first->second;
    };

    int next = 1;
    for (auto& t : enumerate_types(n, s.ny)) {
        TypeBlock b;
        b.q_y = t;
        bool have = false;
        for (auto& c : enumerate_cond_types(t, u_size)) {
            if (list_size_of(c.out_type()) > cap) continue;
            double v;
            if (variant == SchemeVariant::Error) {
                if (info_of(t, c) > R + 1e-12) continue;
                v = level <= 0 ? 0.0 : inner_min_E(pmf_of(t), channel_of(c), level, model, cfg).value;
                if (!have || v > b.objective) b.objective = v, b.q_u_given_y = c, have = true;
            } else {
                v = sc_cost(t, c, p, R, level);
                if (!have || v < b.objective) b.objective = v, b.q_u_given_y = c, have = true;
            }
        }
        if (!have) {
            std::string ty;
            for (int c : t.counts) ty += (ty.empty() ? "" : ",") + std::to_string(c);
            throw InvalidInput("every list for y type (" + ty + ") exceeds floor(e^{n Delta}); increase epsilon");
        }
        CoverResult cover = greedy_type_cover(t, b.q_u_given_y);
        b.codewords = std::move(cover.codewords);
        b.first_message = next;
        for (std::size_t j = 0; j < b.codewords.size(); ++j) b.message.push_back(next++);
        b.list_size = list_size_of(b.q_u_given_y.out_type());
        s.block_of[t.counts] = static_cast<int>(s.blocks.size());
        s.blocks.push_back(std::move(b));
    }
    s.messages = next - 1;

    if (variant == SchemeVariant::StrongConverse) {
        // keep the floor(e^{nR}) heaviest cells
        std::vector<std::pair<double, int>> mass;
        std::vector<double> cell(next, 0.0);
        for (auto& b : s.blocks) {
            double lp = seq_log_prob(b.q_y, model.p_y());
            for (auto& y : type_class_members(b.q_y, 10000000)) {
                int m = s.encode(y);
                if (m > 0) cell[m] += std::exp(lp);
            }
        }
        for (int m = 1; m < next; ++m) mass.push_back({-cell[m], m});
        std::sort(mass.begin(), mass.end());
        BigInt keep = list_cap(n, R);
        std::vector<char> kept(next, 0);
        for (std::size_t i = 0; i < mass.size() && BigInt(i) < keep; ++i) kept[mass[i].second] = 1;
        for (auto& b : s.blocks)
            for (auto& m : b.message)
                if (!kept[m]) m = 0;
    }

    std::uint64_t total = 1;
    bool small = true;
    for (int i = 0; i < n && small; ++i) {
        total *= s.ny;
        small = total <= (1u << 20);
    }
    if (small) {
        std::vector<int> table(total);
        for (std::uint64_t i = 0; i < total; ++i) table[i] = s.encode(seq_from_index(i, n, s.ny));
        s.table = std::move(table);
    }
    if (s.max_list_size() > cap) throw AssertionFailure("scheme list exceeds floor(e^{n Delta})");
    return s;
}

SimReport exact_excess_prob(const CodingScheme& s, const SourceModel& model) {
    const std::uint64_t NY = checked_pow(s.ny, s.n, 10000000);
    const std::uint64_t NX = checked_pow(s.nx, s.n, 10000000);
    if (static_cast<double>(NX) * static_cast<double>(NY) > 1e7) throw SizeCapExceeded("|X|^n |Y|^n exceeds 1e7");
    const JointXY& pxy = model.p_xy();
    SimReport rep;
    std::map<std::vector<int>, std::size_t> slot;
    std::vector<Seq> xs(NX);
    for (std::uint64_t i = 0; i < NX; ++i) xs[i] = seq_from_index(i, s.n, s.nx);
    double err = 0.0;
    for (std::uint64_t yi = 0; yi < NY; ++yi) {
        Seq y = seq_from_index(yi, s.n, s.ny);
        int m = s.encode(y);
        double mass = 0.0, e = 0.0;
        for (std::uint64_t xi = 0; xi < NX; ++xi) {
            double pr = 1.0;
            for (int i = 0; i < s.n && pr > 0; ++i) pr *= pxy(xs[xi][i], y[i]);
            if (pr <= 0) continue;
            mass += pr;
            if (!s.in_list(m, xs[xi])) e += pr;
        }
        auto t = type_of(y, s.ny).counts;
        auto [it, fresh] = slot.emplace(t, rep.per_type.size());
        if (fresh) rep.per_type.push_back({t, 0.0, 0.0});
        rep.per_type[it->second].mass += mass;
        rep.per_type[it->second].error_mass += e;
        err += e;
    }
    rep.p_e = std::clamp(err, 0.0, 1.0);
    return rep;
}

SimReport mc_excess_prob(const CodingScheme& s, const SourceModel& model, long long samples, std::uint64_t seed) {
    require(samples >= 1, "samples must be >= 1");
    const JointXY& pxy = model.p_xy();
    std::vector<double> cdf;
    std::vector<std::pair<int, int>> cell;
    double acc = 0.0;
    for (int x = 0; x < s.nx; ++x)
        for (int y = 0; y < s.ny; ++y)
            if (pxy(x, y) > 0) {
                acc += pxy(x, y);
                cdf.push_back(acc);
                cell.push_back({x, y});
            }
    cdf.back() = 1.0;
    long long fails = 0;
    Seq x(s.n), y(s.n);
    for (long long k = 0; k < samples; ++k) {
        std::uint64_t st = seed * 0xD1B54A32D192ED03ULL ^ static_cast<std::uint64_t>(k) * 0x9E3779B97F4A7C15ULL;
        for (int i = 0; i < s.n; ++i) {
            double r = (splitmix64(st) >> 11) * 0x1.0p-53;
            auto j = std::upper_bound(cdf.begin(), cdf.end(), r) - cdf.begin();
            if (j >= static_cast<long>(cell.size())) j = cell.size() - 1;
            x[i] = cell[j].first;
            y[i] = cell[j].second;
        }
        if (!s.in_list(s.encode(y), x)) ++fails;
    }
    SimReport rep;
    rep.exact = false;
    rep.samples = samples;
    rep.p_e = static_cast<double>(fails) / samples;
    rep.stderr_ = std::sqrt(rep.p_e * (1 - rep.p_e) / samples);
    return rep;
}

OptimalDecoder optimal_decoder(const std::vector<int>& encoder, const SourceModel& model, int n, double Delta) {
    const int nx = static_cast<int>(model.nx()), ny = static_cast<int>(model.ny());
    const std::uint64_t NX = checked_pow(nx, n, 1000000);
    const std::uint64_t NY = checked_pow(ny, n, 100000000);
    require(encoder.size() == NY, "encoder table must have |Y|^n entries");
    if (static_cast<double>(NX) * static_cast<double>(NY) > 1e8) throw SizeCapExceeded("|X|^n |Y|^n exceeds 1e8");
    int M = 0;
    for (int m : encoder) {
        require(m >= 0, "encoder labels must be >= 0");
        M = std::max(M, m + 1);
    }
    std::vector<std::vector<std::uint64_t>> inv(M);
    for (std::uint64_t yi = 0; yi < NY; ++yi) inv[encoder[yi]].push_back(yi);
    BigInt capb = list_cap(n, Delta);
    std::uint64_t L = capb >= BigInt(NX) ? NX : static_cast<std::uint64_t>(capb);
    const JointXY& pxy = model.p_xy();
    std::vector<Seq> ys(NY), xs(NX);
    for (std::uint64_t i = 0; i < NY; ++i) ys[i] = seq_from_index(i, n, ny);
    for (std::uint64_t i = 0; i < NX; ++i) xs[i] = seq_from_index(i, n, nx);
    OptimalDecoder out;
    out.lists.resize(M);
    double covered = 0.0;
    std::vector<double> post(NX);
    std::vector<std::uint64_t> order(NX);
    for (int m = 0; m < M; ++m) {
        if (inv[m].empty() || L == 0) continue;
        std::fill(post.begin(), post.end(), 0.0);
        for (auto yi : inv[m])
            for (std::uint64_t xi = 0; xi < NX; ++xi) {
                double pr = 1.0;
                for (int i = 0; i < n && pr > 0; ++i) pr *= pxy(xs[xi][i], ys[yi][i]);
                post[xi] += pr;
            }
        std::iota(order.begin(), order.end(), 0);
        std::partial_sort(order.begin(), order.begin() + L, order.end(), [&](auto a, auto b) {
            return post[a] > post[b] || (post[a] == post[b] && a < b);
        });
        out.lists[m].assign(order.begin(), order.begin() + L);
        std::sort(out.lists[m].begin(), out.lists[m].end());
        for (std::uint64_t i = 0; i < L; ++i) covered += post[order[i]];
    }
    out.p_e = std::clamp(1.0 - covered, 0.0, 1.0);
    return out;
}

SimReport optimal_decoder_excess_prob(const std::vector<int>& encoder, const SourceModel& model, int n, double Delta) {
    SimReport rep;
    rep.p_e = optimal_decoder(encoder, model, n, Delta).p_e;
    return rep;
}

double brute_force_optimal_pe(const SourceModel& model, int n, double R, double Delta) {
    require(n >= 1, "n must be >= 1");
    const int N = static_cast<int>(checked_pow(static_cast<int>(model.ny()), n, 8));
    BigInt Mb = list_cap(n, R);
    if (Mb > 4) throw SizeCapExceeded("floor(e^{nR}) exceeds 4");
    const int M = std::max(1, static_cast<int>(Mb));
    // restricted growth strings enumerate set partitions into at most M cells
    std::vector<int> a(N, 0), mx(N, 0);
    double best = 1.0;
    while (true) {
        best = std::min(best, optimal_decoder(a, model, n, Delta).p_e);
        int i = N - 1;
        while (i > 0 && (a[i] == M - 1 || a[i] > mx[i - 1])) --i;
        if (i <= 0) break;
        ++a[i];
        mx[i] = std::max(mx[i - 1], a[i]);
        for (int j = i + 1; j < N; ++j) a[j] = 0, mx[j] = mx[i];
    }
    return best;
}

void fit_exponent_slope(SimReport& rep) {
    std::vector<double> ns, ys, vs;
    for (auto& pt : rep.slope_data) {
        if (pt.dropped) continue;
        ns.push_back(pt.n);
        ys.push_back(-std::log(pt.p_e));
        vs.push_back(pt.p_e < 1 ? std::pow(pt.stderr_ / pt.p_e, 2) : 0.0);
    }
    if (ns.size() < 2) {
        rep.flags.push_back("fewer than two usable n values");
        return;
    }
    double nb = std::accumulate(ns.begin(), ns.end(), 0.0) / ns.size();
    double yb = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        sxx += (ns[i] - nb) * (ns[i] - nb);
        sxy += (ns[i] - nb) * (ys[i] - yb);
    }
    rep.slope = sxy / sxx;
    double var = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) var += std::pow((ns[i] - nb) / sxx, 2) * vs[i];
    rep.slope_stderr = std::sqrt(var);
}

SimReport empirical_exponent_slope(const SourceModel& model, double R, double Delta, std::optional<double> epsilon,
                                   const std::vector<int>& n_list, long long samples, std::uint64_t seed,
                                   SchemeVariant variant, int u_size) {
    require(!n_list.empty(), "n_list must be non-empty");
    SimReport rep;
    rep.exact = samples <= 0;
    rep.samples = samples;
    for (int n : n_list) {
        CodingScheme s = build_achievability_scheme(model, n, R, Delta, epsilon, variant, u_size);
        SimReport r = samples <= 0 ? exact_excess_prob(s, model)
                                   : mc_excess_prob(s, model, samples, seed + 0x632BE59BD9B4E019ULL * n);
        SlopePoint pt{n, r.p_e, r.stderr_, r.p_e > 0 ? -std::log(r.p_e) / n : kInf, r.p_e <= 0};
        rep.slope_data.push_back(pt);
        rep.p_e = r.p_e;
        rep.stderr_ = r.stderr_;
        if (pt.dropped) rep.flags.push_back("n=" + std::to_string(n) + " dropped: no excess events");
    }
    fit_exponent_slope(rep);
    return rep;
}

IdentityReport verify_single_letter_identity(const std::vector<double>& q, const std::vector<int>& encoder,
                                             const SourceModel& model, int n) {
    const int nx = static_cast<int>(model.nx()), ny = static_cast<int>(model.ny());
    const std::uint64_t NX = checked_pow(nx, n, 1000000), NY = checked_pow(ny, n, 1000000);
    if (static_cast<double>(NX) * static_cast<double>(NY) > 1e6) throw SizeCapExceeded("|X|^n |Y|^n exceeds 1e6");
    require(q.size() == NX * NY, "q must have |X|^n |Y|^n entries");
    require(encoder.size() == NY, "encoder table must have |Y|^n entries");
    double tot = 0.0;
    for (double v : q) {
        require(v >= 0 && std::isfinite(v), "q entries must be finite and >= 0");
        tot += v;
    }
    require(std::fabs(tot - 1.0) <= 1e-9, "q must sum to 1");
    int M = 0;
    for (int m : encoder) M = std::max(M, m + 1);
    const JointXY& pxy = model.p_xy();

    IdentityReport r;
    std::vector<double> qm(M, 0.0);
    // V = (J, M, x^{J-1}, y^{J-1}); keys pack (i, m, x prefix, y prefix)
    std::unordered_map<std::uint64_t, double> qxyv, qyv, qv;
    std::vector<double> qy(ny, 0.0);
    auto vkey = [&](int i, int m, std::uint64_t xp, std::uint64_t yp) {
        return ((static_cast<std::uint64_t>(i) * M + m) * NX + xp) * NY + yp;
    };
    for (std::uint64_t xi = 0; xi < NX; ++xi) {
        Seq x = seq_from_index(xi, n, nx);
        for (std::uint64_t yi = 0; yi < NY; ++yi) {
            double w = q[xi * NY + yi];
            if (w <= 0) continue;
            Seq y = seq_from_index(yi, n, ny);
            double pn = 1.0;
            for (int i = 0; i < n; ++i) pn *= pxy(x[i], y[i]);
            r.lhs += pn > 0 ? w * std::log(w / pn) : kInf;
            int m = encoder[yi];
            qm[m] += w;
            std::uint64_t xp = 0, yp = 0;
            for (int i = 0; i < n; ++i) {
                std::uint64_t v = vkey(i, m, xp, yp);
                double wn = w / n;
                qxyv[(v * nx + x[i]) * ny + y[i]] += wn;
                qyv[v * ny + y[i]] += wn;
                qv[v] += wn;
                qy[y[i]] += wn;
                xp = xp * nx + x[i];
                yp = yp * ny + y[i];
            }
        }
    }
    r.lhs /= n;
    for (auto& [k, w] : qxyv) {
        int y = static_cast<int>(k % ny);
        int x = static_cast<int>((k / ny) % nx);
        std::uint64_t v = k / ny / nx;
        double cond = qyv[v * ny + y] / qy[y];
        r.divergence += pxy(x, y) > 0 ? w * std::log(w / (pxy(x, y) * cond)) : kInf;
    }
    for (auto& [k, w] : qyv) {
        int y = static_cast<int>(k % ny);
        std::uint64_t v = k / ny;
        r.info += w * std::log(w / (qy[y] * qv[v]));
    }
    double hm = 0.0;
    for (double v : qm) hm -= xlogx(v);
    r.msg_entropy = hm / n;
    r.rate = std::log(static_cast<double>(std::max(M, 1))) / n;
    r.rhs = r.divergence + r.info - r.msg_entropy;
    r.diff = std::fabs(r.lhs - r.rhs);
    r.bound_plain = r.lhs >= r.divergence - 1e-10;
    r.bound_rate = r.lhs >= r.divergence + std::max(0.0, r.info - r.rate) - 1e-10;
    return r;
}

IdentityFixture random_identity_fixture(const SourceModel& model, int n, int labels, std::uint64_t seed) {
    require(labels >= 1, "labels must be >= 1");
    const std::uint64_t NX = checked_pow(static_cast<int>(model.nx()), n, 1000000);
    const std::uint64_t NY = checked_pow(static_cast<int>(model.ny()), n, 1000000);
    if (static_cast<double>(NX) * static_cast<double>(NY) > 1e6) throw SizeCapExceeded("|X|^n |Y|^n exceeds 1e6");
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> ex(1.0);
    IdentityFixture f;
    f.q_joint.resize(NX * NY);
    double tot = 0.0;
    for (auto& v : f.q_joint) tot += (v = ex(rng));
    for (auto& v : f.q_joint) v /= tot;
    std::uniform_int_distribution<int> lab(0, labels - 1);
    for (std::uint64_t i = 0; i < NY; ++i) f.encoder.push_back(lab(rng));
    return f;
}

}  // namespace ibexp
