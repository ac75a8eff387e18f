#include "ibexp/types.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

namespace ibexp {

namespace {

const BigInt& factorial(int n) {
    static std::vector<BigInt> table{BigInt(1)};
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    while (static_cast<int>(table.size()) <= n) {
        BigInt next = table.back() * static_cast<unsigned>(table.size());
        table.push_back(next);
    }
    return table[n];
}

double log_multinomial(int n, const int* parts, int k) {
    double v = std::lgamma(n + 1.0);
    for (int i = 0; i < k; ++i) v -= std::lgamma(parts[i] + 1.0);
    return v;
}

double logsumexp_add(double acc, double term) {
    if (term == -kInf) return acc;
    if (acc == -kInf) return term;
    double m = std::max(acc, term);
    return m + std::log(std::exp(acc - m) + std::exp(term - m));
}

}  // namespace

double log_big(const BigInt& v) {
    if (v <= 0) return -kInf;
    unsigned bits = boost::multiprecision::msb(v) + 1;
    if (bits <= 60) return std::log(v.convert_to<double>());
    unsigned shift = bits - 60;
    BigInt top = v >> shift;
    return std::log(top.convert_to<double>()) + shift * std::log(2.0);
}

double to_double(const BigInt& v) { return v.convert_to<double>(); }

TypeVector::TypeVector(std::vector<int> c) : counts(std::move(c)) {
    require(!counts.empty(), "TypeVector: empty alphabet");
    n = 0;
    for (int v : counts) {
        require(v >= 0, "TypeVector: negative count");
        n += v;
    }
}

std::vector<double> TypeVector::freqs() const {
    std::vector<double> f(counts.size(), 0.0);
    for (std::size_t i = 0; i < counts.size(); ++i) f[i] = n > 0 ? static_cast<double>(counts[i]) / n : 0.0;
    return f;
}

CondTypeMatrix::CondTypeMatrix(int nin, int nout, std::vector<int> c) : n_in(nin), n_out(nout), counts(std::move(c)) {
    require(n_in > 0 && n_out > 0, "CondTypeMatrix: empty alphabet");
    require(static_cast<int>(counts.size()) == n_in * n_out, "CondTypeMatrix: size mismatch");
    for (int v : counts) require(v >= 0, "CondTypeMatrix: negative count");
}

TypeVector CondTypeMatrix::base() const {
    std::vector<int> b(n_in, 0);
    for (int a = 0; a < n_in; ++a)
        for (int o = 0; o < n_out; ++o) b[a] += (*this)(a, o);
    return TypeVector(std::move(b));
}

TypeVector CondTypeMatrix::out_type() const {
    std::vector<int> b(n_out, 0);
    for (int a = 0; a < n_in; ++a)
        for (int o = 0; o < n_out; ++o) b[o] += (*this)(a, o);
    return TypeVector(std::move(b));
}

int CondTypeMatrix::n() const { return std::accumulate(counts.begin(), counts.end(), 0); }

TypeVector type_of(const Seq& seq, int alphabet) {
    require(alphabet > 0, "type_of: empty alphabet");
    std::vector<int> c(alphabet, 0);
    for (int s : seq) {
        require(s >= 0 && s < alphabet, "type_of: symbol out of range");
        ++c[s];
    }
    return TypeVector(std::move(c));
}

CondTypeMatrix cond_type_of(const Seq& a, int ka, const Seq& b, int kb) {
    require(a.size() == b.size(), "cond_type_of: length mismatch");
    std::vector<int> c(ka * kb, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        require(a[i] >= 0 && a[i] < ka && b[i] >= 0 && b[i] < kb, "cond_type_of: symbol out of range");
        ++c[a[i] * kb + b[i]];
    }
    return CondTypeMatrix(ka, kb, std::move(c));
}

BigInt multinomial(const std::vector<int>& parts) {
    int n = 0;
    for (int p : parts) n += p;
    BigInt num = factorial(n);
    for (int p : parts) num /= factorial(p);
    return num;
}

BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    return multinomial({k, n - k});
}

BigInt type_class_size(const TypeVector& t) { return multinomial(t.counts); }

BigInt cond_type_class_size(const CondTypeMatrix& c) {
    BigInt r = 1;
    for (int a = 0; a < c.n_in; ++a) {
        std::vector<int> row(c.counts.begin() + a * c.n_out, c.counts.begin() + (a + 1) * c.n_out);
        r *= multinomial(row);
    }
    return r;
}

TypeEnumerator::TypeEnumerator(int n, int k) : n_(n), k_(k) {
    require(n >= 0 && k >= 1, "TypeEnumerator: need n >= 0 and k >= 1");
    reset();
}

void TypeEnumerator::reset() {
    cur_.assign(k_, 0);
    cur_[0] = n_;
    started_ = false;
    done_ = false;
}

bool TypeEnumerator::next(TypeVector& out) {
    if (done_) return false;
    if (started_) {
        int i = k_ - 2;
        while (i >= 0 && cur_[i] == 0) --i;
        if (i < 0) {
            done_ = true;
            return false;
        }
        int tail = 0;
        for (int j = i + 1; j < k_; ++j) tail += cur_[j];
        --cur_[i];
        cur_[i + 1] = tail + 1;
        for (int j = i + 2; j < k_; ++j) cur_[j] = 0;
    }
    started_ = true;
    out = TypeVector(cur_);
    return true;
}

CondTypeEnumerator::CondTypeEnumerator(const TypeVector& base, int out_k) : base_(base), out_k_(out_k) {
    require(out_k >= 1, "CondTypeEnumerator: empty output alphabet");
    reset();
}

void CondTypeEnumerator::reset() {
    rows_.clear();
    cur_.clear();
    for (int c : base_.counts) rows_.emplace_back(c, out_k_);
    cur_.resize(rows_.size());
    started_ = false;
    done_ = false;
}

bool CondTypeEnumerator::next(CondTypeMatrix& out) {
    if (done_) return false;
    if (!started_) {
        for (std::size_t r = 0; r < rows_.size(); ++r) rows_[r].next(cur_[r]);
        started_ = true;
    } else {
        int r = static_cast<int>(rows_.size()) - 1;
        for (; r >= 0; --r) {
            if (rows_[r].next(cur_[r])) break;
            rows_[r].reset();
            rows_[r].next(cur_[r]);
        }
        if (r < 0) {
            done_ = true;
            return false;
        }
    }
    std::vector<int> flat;
    for (const auto& t : cur_) flat.insert(flat.end(), t.counts.begin(), t.counts.end());
    out = CondTypeMatrix(static_cast<int>(rows_.size()), out_k_, std::move(flat));
    return true;
}

std::vector<TypeVector> enumerate_types(int n, int k) {
    require(n >= 1, "enumerate_types: n must be positive");
    std::vector<TypeVector> v;
    TypeEnumerator e(n, k);
    TypeVector t;
    while (e.next(t)) v.push_back(t);
    return v;
}

std::vector<CondTypeMatrix> enumerate_cond_types(const TypeVector& base, int out_k) {
    std::vector<CondTypeMatrix> v;
    CondTypeEnumerator e(base, out_k);
    CondTypeMatrix c;
    while (e.next(c)) v.push_back(c);
    return v;
}

double seq_log_prob(const TypeVector& t, const Pmf& model) {
    require(t.k() == model.size(), "seq_log_prob: alphabet mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < t.k(); ++i) {
        if (t.counts[i] == 0) continue;
        if (model[i] <= 0.0) return -kInf;
        s += t.counts[i] * std::log(model[i]);
    }
    return s;
}

double seq_log_prob(const CondTypeMatrix& c, const CondPmf& model) {
    require(static_cast<std::size_t>(c.n_in) == model.n_in() && static_cast<std::size_t>(c.n_out) == model.n_out(),
            "seq_log_prob: alphabet mismatch");
    double s = 0.0;
    for (int a = 0; a < c.n_in; ++a)
        for (int b = 0; b < c.n_out; ++b) {
            int k = c(a, b);
            if (k == 0) continue;
            if (model(a, b) <= 0.0) return -kInf;
            s += k * std::log(model(a, b));
        }
    return s;
}

std::vector<Seq> type_class_members(const TypeVector& t, std::size_t cap) {
    BigInt sz = type_class_size(t);
    if (sz > cap) throw SizeCapExceeded("type class has more than " + std::to_string(cap) + " members");
    Seq s;
    for (std::size_t i = 0; i < t.k(); ++i) s.insert(s.end(), t.counts[i], static_cast<int>(i));
    std::vector<Seq> out;
    out.reserve(sz.convert_to<std::size_t>());
    do {
        out.push_back(s);
    } while (std::next_permutation(s.begin(), s.end()));
    return out;
}

namespace {

// depth-first walk over integer arrays N_xuy with fixed (x,u) row sums
struct JointWalker {
    int nx, ny, nu;
    const std::vector<int>& n_xu;
    std::vector<int> rem_xy;  // may be empty when unconstrained
    std::vector<int> rem_uy;
    std::vector<int> cur;
    std::vector<int> parts;

    JointWalker(int nx_, int ny_, int nu_, const std::vector<int>& nxu, std::vector<int> rxy, std::vector<int> ruy)
        : nx(nx_), ny(ny_), nu(nu_), n_xu(nxu), rem_xy(std::move(rxy)), rem_uy(std::move(ruy)),
          cur(nx_ * ny_ * nu_, 0), parts(ny_, 0) {}

    template <class Leaf>
    void walk(int cell, Leaf& leaf) {
        if (cell == nx * nu) {
            for (int v : rem_uy)
                if (v != 0) return;
            for (int v : rem_xy)
                if (v != 0) return;
            leaf(cur);
            return;
        }
        int x = cell / nu, u = cell % nu;
        split(cell, x, u, 0, n_xu[x * nu + u], leaf);
    }

    template <class Leaf>
    void split(int cell, int x, int u, int y, int left, Leaf& leaf) {
        if (y == ny - 1) {
            if (!take(x, u, y, left)) return;
            walk(cell + 1, leaf);
            give(x, u, y, left);
            return;
        }
        int hi = std::min(left, rem_uy[u * ny + y]);
        if (!rem_xy.empty()) hi = std::min(hi, rem_xy[x * ny + y]);
        for (int k = 0; k <= hi; ++k) {
            take(x, u, y, k);
            split(cell, x, u, y + 1, left - k, leaf);
            give(x, u, y, k);
        }
    }

    bool take(int x, int u, int y, int k) {
        if (rem_uy[u * ny + y] < k) return false;
        if (!rem_xy.empty() && rem_xy[x * ny + y] < k) return false;
        rem_uy[u * ny + y] -= k;
        if (!rem_xy.empty()) rem_xy[x * ny + y] -= k;
        cur[(x * ny + y) * nu + u] = k;
        return true;
    }
    void give(int x, int u, int y, int k) {
        rem_uy[u * ny + y] += k;
        if (!rem_xy.empty()) rem_xy[x * ny + y] += k;
        cur[(x * ny + y) * nu + u] = 0;
    }
};

}  // namespace

IntersectionResult intersection_class_log_size(int nx, int ny, int nu, const std::vector<int>& n_xu,
                                               const std::vector<int>& n_xy, const std::vector<int>& n_uy) {
    require(static_cast<int>(n_xu.size()) == nx * nu, "intersection: N_xu size mismatch");
    require(static_cast<int>(n_xy.size()) == nx * ny, "intersection: N_xy size mismatch");
    require(static_cast<int>(n_uy.size()) == nu * ny, "intersection: N_uy size mismatch");
    IntersectionResult res;
    // marginal consistency; disagreement means the intersection is empty
    for (int x = 0; x < nx; ++x) {
        int a = 0, b = 0;
        for (int u = 0; u < nu; ++u) a += n_xu[x * nu + u];
        for (int y = 0; y < ny; ++y) b += n_xy[x * ny + y];
        if (a != b) return res;
    }
    for (int u = 0; u < nu; ++u) {
        int a = 0, b = 0;
        for (int x = 0; x < nx; ++x) a += n_xu[x * nu + u];
        for (int y = 0; y < ny; ++y) b += n_uy[u * ny + y];
        if (a != b) return res;
    }
    for (int y = 0; y < ny; ++y) {
        int a = 0, b = 0;
        for (int x = 0; x < nx; ++x) a += n_xy[x * ny + y];
        for (int u = 0; u < nu; ++u) b += n_uy[u * ny + y];
        if (a != b) return res;
    }
    JointWalker w(nx, ny, nu, n_xu, n_xy, n_uy);
    auto leaf = [&](const std::vector<int>& cur) {
        BigInt term = 1;
        double ent = 0.0;
        std::vector<int> row(ny);
        for (int x = 0; x < nx; ++x)
            for (int u = 0; u < nu; ++u) {
                int tot = n_xu[x * nu + u];
                for (int y = 0; y < ny; ++y) {
                    row[y] = cur[(x * ny + y) * nu + u];
                    if (row[y] > 0) ent -= row[y] * std::log(static_cast<double>(row[y]) / tot);
                }
                term *= multinomial(row);
            }
        res.size += term;
        ++res.joint_types;
        double lt = log_big(term);
        if (lt > res.max_term_log) {
            res.max_term_log = lt;
            res.witness = JointType3{nx, ny, nu, cur};
        }
        res.max_entropy_log = std::max(res.max_entropy_log, ent);
    };
    w.walk(0, leaf);
    res.log_size = log_big(res.size);
    return res;
}

CondClassProb cond_class_log_prob(int nx, int ny, int nu, const std::vector<int>& n_xu, const std::vector<int>& n_uy,
                                  const CondPmf& ch) {
    require(static_cast<int>(n_xu.size()) == nx * nu, "cond_class_log_prob: N_xu size mismatch");
    require(static_cast<int>(n_uy.size()) == nu * ny, "cond_class_log_prob: N_uy size mismatch");
    require(static_cast<int>(ch.n_in()) == nx && static_cast<int>(ch.n_out()) == ny,
            "cond_class_log_prob: channel alphabet mismatch");
    CondClassProb res;
    int n = 0;
    for (int v : n_xu) n += v;
    res.n = n;
    for (int u = 0; u < nu; ++u) {
        int a = 0, b = 0;
        for (int x = 0; x < nx; ++x) a += n_xu[x * nu + u];
        for (int y = 0; y < ny; ++y) b += n_uy[u * ny + y];
        if (a != b) return res;
    }
    JointWalker w(nx, ny, nu, n_xu, {}, n_uy);
    std::vector<int> row(ny);
    auto leaf = [&](const std::vector<int>& cur) {
        double lt = 0.0;
        for (int x = 0; x < nx; ++x)
            for (int u = 0; u < nu; ++u) {
                for (int y = 0; y < ny; ++y) {
                    row[y] = cur[(x * ny + y) * nu + u];
                    if (row[y] > 0) {
                        if (ch(x, y) <= 0.0) return;
                        lt += row[y] * std::log(ch(x, y));
                    }
                }
                lt += log_multinomial(n_xu[x * nu + u], row.data(), ny);
            }
        res.log_prob = logsumexp_add(res.log_prob, lt);
        ++res.joint_types;
    };
    w.walk(0, leaf);

    // I-projection of P̂_xu P_{Y|X} onto the (x,u) and (u,y) marginals
    std::vector<double> ref(nx * ny * nu, 0.0), q;
    auto at = [&](int x, int y, int u) { return (x * ny + y) * nu + u; };
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            for (int u = 0; u < nu; ++u) ref[at(x, y, u)] = static_cast<double>(n_xu[x * nu + u]) / n * ch(x, y);
    q = ref;
    bool feasible = true;
    for (int it = 0; it < 20000; ++it) {
        double change = 0.0;
        for (int u = 0; u < nu; ++u)
            for (int y = 0; y < ny; ++y) {
                double cur = 0.0, target = static_cast<double>(n_uy[u * ny + y]) / n;
                for (int x = 0; x < nx; ++x) cur += q[at(x, y, u)];
                if (cur <= 0.0) {
                    if (target > 0.0) feasible = false;
                    continue;
                }
                double s = target / cur;
                change = std::max(change, std::fabs(s - 1.0));
                for (int x = 0; x < nx; ++x) q[at(x, y, u)] *= s;
            }
        if (!feasible) break;
        for (int x = 0; x < nx; ++x)
            for (int u = 0; u < nu; ++u) {
                double cur = 0.0, target = static_cast<double>(n_xu[x * nu + u]) / n;
                for (int y = 0; y < ny; ++y) cur += q[at(x, y, u)];
                if (cur <= 0.0) {
                    if (target > 0.0) feasible = false;
                    continue;
                }
                double s = target / cur;
                change = std::max(change, std::fabs(s - 1.0));
                for (int y = 0; y < ny; ++y) q[at(x, y, u)] *= s;
            }
        if (!feasible || change < 1e-14) break;
    }
    if (feasible && res.log_prob > -kInf) {
        double d = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i)
            if (q[i] > 0.0) d += q[i] * std::log(q[i] / ref[i]);
        res.single_letter = std::max(d, 0.0);
    }
    return res;
}

CoverResult greedy_type_cover(const TypeVector& q_y, const CondTypeMatrix& c, std::size_t cap) {
    require(c.n_in == static_cast<int>(q_y.k()), "greedy_type_cover: alphabet mismatch");
    require(c.base() == q_y, "greedy_type_cover: conditional type rows must sum to the y type");
    int n = q_y.n, ny = c.n_in, nu = c.n_out;
    TypeVector q_u = c.out_type();
    CoverResult res;
    res.universe = type_class_size(q_y);

    std::vector<double> joint(ny * nu);
    for (int i = 0; i < ny * nu; ++i) joint[i] = static_cast<double>(c.counts[i]) / n;
    res.mutual_info = std::max(0.0, entropy(q_y.freqs()) + entropy(q_u.freqs()) - entropy(joint));
    int expo = ny * nu + ny + nu;
    res.log_bound = expo * std::log(n + 1.0) + n * res.mutual_info;

    int used = 0, sym = 0;
    for (int u = 0; u < nu; ++u)
        if (q_u.counts[u] > 0) {
            ++used;
            sym = u;
        }
    if (used == 1) {
        res.codewords.push_back(Seq(n, sym));
        res.degenerate = true;
        return res;
    }

    BigInt pairs = res.universe * type_class_size(q_u);
    if (pairs > cap) throw SizeCapExceeded("greedy_type_cover: candidate x universe exceeds cap");
    auto ys = type_class_members(q_y, cap);
    auto us = type_class_members(q_u, cap);
    std::vector<std::vector<std::uint32_t>> covers(us.size()), covered_by(ys.size());
    std::vector<int> jt(ny * nu);
    for (std::size_t j = 0; j < us.size(); ++j)
        for (std::size_t i = 0; i < ys.size(); ++i) {
            std::fill(jt.begin(), jt.end(), 0);
            for (int t = 0; t < n; ++t) ++jt[ys[i][t] * nu + us[j][t]];
            if (jt == c.counts) {
                covers[j].push_back(static_cast<std::uint32_t>(i));
                covered_by[i].push_back(static_cast<std::uint32_t>(j));
            }
        }
    std::vector<std::size_t> gain(us.size());
    for (std::size_t j = 0; j < us.size(); ++j) gain[j] = covers[j].size();
    std::vector<char> done(ys.size(), 0);
    std::size_t left = ys.size();
    while (left > 0) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < us.size(); ++j)
            if (gain[j] > gain[best]) best = j;
        if (gain[best] == 0) throw AssertionFailure("greedy_type_cover: uncoverable sequence");
        res.codewords.push_back(us[best]);
        for (auto i : covers[best]) {
            if (done[i]) continue;
            done[i] = 1;
            --left;
            for (auto j : covered_by[i]) --gain[j];
        }
    }
    return res;
}

bool verify_cover(const TypeVector& q_y, const CondTypeMatrix& c, const std::vector<Seq>& codewords, std::size_t cap) {
    auto ys = type_class_members(q_y, cap);
    int ny = c.n_in, nu = c.n_out;
    std::vector<int> jt(ny * nu);
    for (const auto& y : ys) {
        bool ok = false;
        for (const auto& u : codewords) {
            if (u.size() != y.size()) return false;
            std::fill(jt.begin(), jt.end(), 0);
            for (std::size_t t = 0; t < y.size(); ++t) ++jt[y[t] * nu + u[t]];
            if (jt == c.counts) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

}  // namespace ibexp
