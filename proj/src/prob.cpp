#include "ibexp/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ibexp {

namespace {

void normalize_checked(std::vector<double>& v, const char* what) {
    if (v.empty()) throw InvalidInput(std::string(what) + ": empty distribution");
    double s = 0.0;
    for (double x : v) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw InvalidInput(std::string(what) + ": negative or non-finite probability");
        s += x;
    }
    if (std::fabs(s - 1.0) > 1e-9)
        throw InvalidInput(std::string(what) + ": total mass " + std::to_string(s) + " is not 1");
    for (double& x : v) x /= s;
}

}  // namespace

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

Pmf::Pmf(std::vector<double> probs) : p_(std::move(probs)) { normalize_checked(p_, "Pmf"); }

Pmf Pmf::uniform(std::size_t k) {
    require(k > 0, "Pmf::uniform: empty alphabet");
    return Pmf(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Pmf Pmf::point(std::size_t k, std::size_t at) {
    require(at < k, "Pmf::point: symbol out of range");
    std::vector<double> v(k, 0.0);
    v[at] = 1.0;
    return Pmf(std::move(v));
}

CondPmf::CondPmf(std::size_t n_in, std::size_t n_out, std::vector<double> flat)
    : nin_(n_in), nout_(n_out), m_(std::move(flat)) {
    require(nin_ > 0 && nout_ > 0, "CondPmf: empty alphabet");
    require(m_.size() == nin_ * nout_, "CondPmf: size mismatch");
    for (std::size_t i = 0; i < nin_; ++i) {
        std::vector<double> r(m_.begin() + i * nout_, m_.begin() + (i + 1) * nout_);
        normalize_checked(r, "CondPmf row");
        std::copy(r.begin(), r.end(), m_.begin() + i * nout_);
    }
}

CondPmf::CondPmf(const std::vector<Pmf>& rows) {
    require(!rows.empty(), "CondPmf: no rows");
    nin_ = rows.size();
    nout_ = rows[0].size();
    for (const auto& r : rows) {
        require(r.size() == nout_, "CondPmf: ragged rows");
        m_.insert(m_.end(), r.probs().begin(), r.probs().end());
    }
}

Pmf CondPmf::row(std::size_t in) const {
    return Pmf(std::vector<double>(m_.begin() + in * nout_, m_.begin() + (in + 1) * nout_));
}

JointXY::JointXY(std::size_t nx, std::size_t ny, std::vector<double> flat)
    : nx_(nx), ny_(ny), p_(std::move(flat)) {
    require(nx_ > 0 && ny_ > 0, "JointXY: empty alphabet");
    require(p_.size() == nx_ * ny_, "JointXY: size mismatch");
    normalize_checked(p_, "JointXY");
}

JointXY JointXY::from_factors(const Pmf& p_y, const CondPmf& p_x_given_y) {
    require(p_x_given_y.n_in() == p_y.size(), "JointXY::from_factors: alphabet mismatch");
    std::size_t nx = p_x_given_y.n_out(), ny = p_y.size();
    std::vector<double> v(nx * ny);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) v[x * ny + y] = p_y[y] * p_x_given_y(y, x);
    return JointXY(nx, ny, std::move(v));
}

Pmf JointXY::p_x() const {
    std::vector<double> v(nx_, 0.0);
    for (std::size_t x = 0; x < nx_; ++x)
        for (std::size_t y = 0; y < ny_; ++y) v[x] += (*this)(x, y);
    return Pmf(std::move(v));
}

Pmf JointXY::p_y() const {
    std::vector<double> v(ny_, 0.0);
    for (std::size_t x = 0; x < nx_; ++x)
        for (std::size_t y = 0; y < ny_; ++y) v[y] += (*this)(x, y);
    return Pmf(std::move(v));
}

CondPmf JointXY::p_x_given_y() const {
    Pmf py = p_y();
    std::vector<double> v(ny_ * nx_);
    for (std::size_t y = 0; y < ny_; ++y)
        for (std::size_t x = 0; x < nx_; ++x)
            v[y * nx_ + x] = py[y] > 0 ? (*this)(x, y) / py[y] : 1.0 / nx_;
    return CondPmf(ny_, nx_, std::move(v));
}

CondPmf JointXY::p_y_given_x() const {
    Pmf px = p_x();
    std::vector<double> v(nx_ * ny_);
    for (std::size_t x = 0; x < nx_; ++x)
        for (std::size_t y = 0; y < ny_; ++y)
            v[x * ny_ + y] = px[x] > 0 ? (*this)(x, y) / px[x] : 1.0 / ny_;
    return CondPmf(nx_, ny_, std::move(v));
}

JointXYU::JointXYU(std::size_t nx, std::size_t ny, std::size_t nu, std::vector<double> flat)
    : nx_(nx), ny_(ny), nu_(nu), p_(std::move(flat)) {
    require(nx_ > 0 && ny_ > 0 && nu_ > 0, "JointXYU: empty alphabet");
    require(p_.size() == nx_ * ny_ * nu_, "JointXYU: size mismatch");
    normalize_checked(p_, "JointXYU");
}

JointXYU JointXYU::from_factors(const Pmf& q_y, const CondPmf& q_u_given_y, const CondPmf& q_x_given_yu) {
    std::size_t ny = q_y.size(), nu = q_u_given_y.n_out(), nx = q_x_given_yu.n_out();
    require(q_u_given_y.n_in() == ny, "JointXYU::from_factors: Q_{U|Y} alphabet mismatch");
    require(q_x_given_yu.n_in() == ny * nu, "JointXYU::from_factors: Q_{X|YU} alphabet mismatch");
    std::vector<double> v(nx * ny * nu);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y)
            for (std::size_t u = 0; u < nu; ++u)
                v[(x * ny + y) * nu + u] = q_y[y] * q_u_given_y(y, u) * q_x_given_yu(y * nu + u, x);
    return JointXYU(nx, ny, nu, std::move(v));
}

Pmf JointXYU::q_y() const {
    std::vector<double> v(ny_, 0.0);
    for (std::size_t i = 0; i < p_.size(); ++i) v[(i / nu_) % ny_] += p_[i];
    return Pmf(std::move(v));
}

Pmf JointXYU::q_u() const {
    std::vector<double> v(nu_, 0.0);
    for (std::size_t i = 0; i < p_.size(); ++i) v[i % nu_] += p_[i];
    return Pmf(std::move(v));
}

JointXY JointXYU::q_xy() const {
    std::vector<double> v(nx_ * ny_, 0.0);
    for (std::size_t i = 0; i < p_.size(); ++i) v[i / nu_] += p_[i];
    return JointXY(nx_, ny_, std::move(v));
}

std::vector<double> JointXYU::q_yu() const {
    std::vector<double> v(ny_ * nu_, 0.0);
    for (std::size_t i = 0; i < p_.size(); ++i) v[i % (ny_ * nu_)] += p_[i];
    return v;
}

std::vector<double> JointXYU::q_xu() const {
    std::vector<double> v(nx_ * nu_, 0.0);
    for (std::size_t x = 0; x < nx_; ++x)
        for (std::size_t y = 0; y < ny_; ++y)
            for (std::size_t u = 0; u < nu_; ++u) v[x * nu_ + u] += (*this)(x, y, u);
    return v;
}

CondPmf JointXYU::q_u_given_y() const {
    Pmf qy = q_y();
    auto yu = q_yu();
    std::vector<double> v(ny_ * nu_);
    for (std::size_t y = 0; y < ny_; ++y)
        for (std::size_t u = 0; u < nu_; ++u)
            v[y * nu_ + u] = qy[y] > 0 ? yu[y * nu_ + u] / qy[y] : 1.0 / nu_;
    return CondPmf(ny_, nu_, std::move(v));
}

CondPmf JointXYU::q_x_given_yu() const {
    auto yu = q_yu();
    std::vector<double> v(ny_ * nu_ * nx_);
    for (std::size_t y = 0; y < ny_; ++y)
        for (std::size_t u = 0; u < nu_; ++u)
            for (std::size_t x = 0; x < nx_; ++x) {
                double m = yu[y * nu_ + u];
                v[(y * nu_ + u) * nx_ + x] = m > 0 ? (*this)(x, y, u) / m : 1.0 / nx_;
            }
    return CondPmf(ny_ * nu_, nx_, std::move(v));
}

double entropy(const std::vector<double>& masses) {
    double h = 0.0;
    for (double p : masses) h -= xlogx(p);
    return h;
}

double entropy(const Pmf& p) { return entropy(p.probs()); }

double kl(const std::vector<double>& q, const std::vector<double>& p) {
    require(q.size() == p.size(), "kl: alphabet mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] <= 0.0) continue;
        if (p[i] <= 0.0) return kInf;
        d += q[i] * std::log(q[i] / p[i]);
    }
    return std::max(d, 0.0);
}

double kl(const Pmf& q, const Pmf& p) { return kl(q.probs(), p.probs()); }

double joint_divergence(const JointXYU& q, const JointXY& p_xy) {
    require(q.nx() == p_xy.nx() && q.ny() == p_xy.ny(), "joint_divergence: alphabet mismatch");
    auto yu = q.q_yu();
    Pmf qy = q.q_y();
    double d = 0.0;
    for (std::size_t x = 0; x < q.nx(); ++x)
        for (std::size_t y = 0; y < q.ny(); ++y)
            for (std::size_t u = 0; u < q.nu(); ++u) {
                double v = q(x, y, u);
                if (v <= 0.0) continue;
                double ref = p_xy(x, y) * yu[y * q.nu() + u] / qy[y];
                if (ref <= 0.0) return kInf;
                d += v * std::log(v / ref);
            }
    return std::max(d, 0.0);
}

double cond_mutual_info_xu_given_y(const JointXYU& q) {
    auto yu = q.q_yu();
    JointXY xy = q.q_xy();
    Pmf qy = q.q_y();
    double s = 0.0;
    for (std::size_t x = 0; x < q.nx(); ++x)
        for (std::size_t y = 0; y < q.ny(); ++y)
            for (std::size_t u = 0; u < q.nu(); ++u) {
                double v = q(x, y, u);
                if (v <= 0.0) continue;
                s += v * std::log(v * qy[y] / (xy(x, y) * yu[y * q.nu() + u]));
            }
    return std::max(s, 0.0);
}

double joint_divergence_decomposed(const JointXYU& q, const JointXY& p_xy) {
    double d = kl(q.q_xy().flat(), p_xy.flat());
    if (!std::isfinite(d)) return d;
    return d + cond_mutual_info_xu_given_y(q);
}

double entropy_y(const JointXYU& q) { return entropy(q.q_y()); }

double mutual_info_yu(const JointXYU& q) {
    double v = entropy(q.q_y()) + entropy(q.q_u()) - entropy(q.q_yu());
    return std::max(v, 0.0);
}

double cond_entropy_x_given_u(const JointXYU& q) {
    double v = entropy(q.q_xu()) - entropy(q.q_u());
    return std::max(v, 0.0);
}

double mutual_info_x_yu(const JointXYU& q) {
    double v = entropy(q.q_xy().p_x()) + entropy(q.q_yu()) - entropy(q.flat());
    return std::max(v, 0.0);
}

double mutual_info_xy(const JointXY& p) {
    return std::max(entropy(p.p_x()) + entropy(p.p_y()) - entropy(p.flat()), 0.0);
}

double cond_entropy_x_given_y(const JointXY& p) {
    return std::max(entropy(p.flat()) - entropy(p.p_y()), 0.0);
}

std::vector<std::size_t> probability_rank(const Pmf& p) {
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
    std::vector<std::size_t> rank(p.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;
    return rank;
}

double expected_log_rank(const Pmf& p) {
    auto rank = probability_rank(p);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * std::log(static_cast<double>(rank[i]));
    return s;
}

ReverseMarkov reverse_markov(const std::vector<double>& sample, double a, double d) {
    require(!sample.empty(), "reverse_markov: empty sample");
    require(a < d, "reverse_markov: need a < d");
    double mean = 0.0, tail = 0.0;
    for (double v : sample) {
        require(v >= 0.0 && v <= d, "reverse_markov: sample outside [0, d]");
        mean += v;
        if (v > a) tail += 1.0;
    }
    mean /= static_cast<double>(sample.size());
    tail /= static_cast<double>(sample.size());
    return {tail, (mean - a) / (d - a)};
}

}  // namespace ibexp
