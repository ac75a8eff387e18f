#include "ibexp/exponents.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>

#include "ibexp/lp.hpp"
#include "ibexp/types.hpp"
#include "internal.hpp"

namespace ibexp {

namespace detail {

std::vector<Vec> simplex_grid(int k, int r) {
    std::vector<Vec> out;
    TypeEnumerator e(r, k);
    TypeVector t;
    while (e.next(t)) {
        Vec v(k);
        for (int i = 0; i < k; ++i) v[i] = static_cast<double>(t.counts[i]) / r;
        out.push_back(std::move(v));
    }
    return out;
}

double ent(const Vec& p) {
    double h = 0.0;
    for (double v : p) h -= xlogx(v);
    return std::max(h, 0.0);
}

double binary_entropy(double q) { return -xlogx(q) - xlogx(1.0 - q); }

double binary_kl(double q, double p) {
    double d = 0.0;
    if (q > 0) d += p > 0 ? q * std::log(q / p) : kInf;
    if (q < 1) d += p < 1 ? (1 - q) * std::log((1 - q) / (1 - p)) : kInf;
    return std::max(d, 0.0);
}

Rows channel_rows(const CondPmf& c) {
    Rows r(c.n_in(), Vec(c.n_out()));
    for (std::size_t y = 0; y < c.n_in(); ++y)
        for (std::size_t x = 0; x < c.n_out(); ++x) r[y][x] = c(y, x);
    return r;
}

namespace {

Vec mixture(const Vec& a, const Rows& p) {
    Vec m(p[0].size(), 0.0);
    for (std::size_t y = 0; y < a.size(); ++y)
        if (a[y] > 0)
            for (std::size_t x = 0; x < m.size(); ++x) m[x] += a[y] * p[y][x];
    return m;
}

}  // namespace

Psi psi_dual(const Vec& a, double rho, const Rows& p) {
    const int ny = static_cast<int>(a.size()), nx = static_cast<int>(p[0].size());
    Psi out;
    std::vector<int> reach;
    for (int x = 0; x < nx; ++x) {
        bool r = false;
        for (int y = 0; y < ny; ++y)
            if (a[y] > 0 && p[y][x] > 0) r = true;
        if (r) reach.push_back(x);
    }
    out.theta.assign(nx, 0.0);
    if (rho <= 0.0 || reach.size() <= 1) {
        out.t = mixture(a, p);
        out.ent = ent(out.t);
        out.cost = 0.0;
        out.value = -rho * out.ent;
        return out;
    }
    const int d = static_cast<int>(reach.size()) - 1;
    Vec th(nx, 0.0), t(nx, 0.0), lam(ny, 0.0);
    {
        Vec m0 = mixture(a, p);
        double g0 = -rho * std::log(m0[reach[0]]);
        for (int x : reach) th[x] = -rho * std::log(m0[x]) - g0;
    }
    std::vector<Vec> q(ny, Vec(nx, 0.0));
    auto eval = [&](const Vec& theta, Vec& tt, std::vector<Vec>& qq, Vec& ll) {
        double mx = -kInf;
        for (int x : reach) mx = std::max(mx, -theta[x] / rho);
        double z = 0.0;
        for (int x : reach) z += std::exp(-theta[x] / rho - mx);
        double logz = std::log(z) + mx;
        double f = -rho * logz;
        std::fill(tt.begin(), tt.end(), 0.0);
        for (int x : reach) tt[x] = std::exp(-theta[x] / rho - logz);
        for (int y = 0; y < ny; ++y) {
            std::fill(qq[y].begin(), qq[y].end(), 0.0);
            if (a[y] <= 0) continue;
            double m2 = -kInf;
            for (int x : reach)
                if (p[y][x] > 0) m2 = std::max(m2, theta[x]);
            double s = 0.0;
            for (int x : reach)
                if (p[y][x] > 0) s += p[y][x] * std::exp(theta[x] - m2);
            ll[y] = std::log(s) + m2;
            for (int x : reach)
                if (p[y][x] > 0) qq[y][x] = p[y][x] * std::exp(theta[x] - ll[y]);
            f -= a[y] * ll[y];
        }
        return f;
    };
    double f = eval(th, t, q, lam);
    Vec th2(nx), t2(nx), lam2(ny);
    std::vector<Vec> q2(ny, Vec(nx));
    Eigen::VectorXd g(d);
    Eigen::MatrixXd Hm(d, d);
    for (int it = 0; it < 200; ++it) {
        double gmax = 0.0;
        for (int i = 0; i < d; ++i) {
            int x = reach[i + 1];
            double m = 0.0;
            for (int y = 0; y < ny; ++y) m += a[y] * q[y][x];
            g[i] = t[x] - m;
            gmax = std::max(gmax, std::fabs(g[i]));
        }
        if (gmax < 1e-14) break;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                int x = reach[i + 1], z = reach[j + 1];
                double v = (t[x] * (x == z) - t[x] * t[z]) / rho;
                for (int y = 0; y < ny; ++y) v += a[y] * (q[y][x] * (x == z) - q[y][x] * q[y][z]);
                Hm(i, j) = v + (i == j ? 1e-300 : 0.0);
            }
        Eigen::VectorXd step = Hm.ldlt().solve(g);
        if (!step.allFinite()) break;
        double gd = g.dot(step), s = 1.0;
        if (gd < 1e-24 || gd < 1e-15 * std::fabs(f)) break;
        bool moved = false;
        while (s > 1e-10) {
            th2 = th;
            for (int i = 0; i < d; ++i) th2[reach[i + 1]] += s * step[i];
            double f2 = eval(th2, t2, q2, lam2);
            if (f2 >= f + 1e-4 * s * gd) {
                th.swap(th2);
                t.swap(t2);
                q.swap(q2);
                lam.swap(lam2);
                f = f2;
                moved = true;
                break;
            }
            s *= 0.5;
        }
        if (!moved) break;
    }
    Vec m(nx, 0.0);
    double cost = 0.0;
    for (int y = 0; y < ny; ++y) {
        if (a[y] <= 0) continue;
        double c = 0.0;
        for (int x : reach)
            if (q[y][x] > 0) {
                c += q[y][x] * std::log(q[y][x] / p[y][x]);
                m[x] += a[y] * q[y][x];
            }
        cost += a[y] * std::max(c, 0.0);
    }
    out.t = m;
    out.ent = ent(m);
    out.cost = cost;
    out.value = cost - rho * out.ent;
    out.theta = th;
    return out;
}

double hmax_posterior(const Vec& a, const Rows& p) {
    const int ny = static_cast<int>(a.size()), nx = static_cast<int>(p[0].size());
    bool full = true;
    for (int y = 0; y < ny; ++y)
        if (a[y] > 0)
            for (int x = 0; x < nx; ++x)
                if (p[y][x] <= 0) full = false;
    if (full) return std::log(static_cast<double>(nx));
    std::vector<Vec> q(ny, Vec(nx, 0.0));
    for (int y = 0; y < ny; ++y) {
        int s = 0;
        for (int x = 0; x < nx; ++x) s += p[y][x] > 0;
        for (int x = 0; x < nx; ++x) q[y][x] = p[y][x] > 0 ? 1.0 / s : 0.0;
    }
    double last = -1.0;
    Vec t(nx);
    for (int it = 0; it < 20000; ++it) {
        std::fill(t.begin(), t.end(), 0.0);
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) t[x] += a[y] * q[y][x];
        double h = ent(t);
        if (std::fabs(h - last) < 1e-15) break;
        last = h;
        for (int y = 0; y < ny; ++y) {
            if (a[y] <= 0) continue;
            double z = 0.0;
            for (int x = 0; x < nx; ++x) {
                if (q[y][x] > 0) q[y][x] /= t[x];
                z += q[y][x];
            }
            for (int x = 0; x < nx; ++x) q[y][x] /= z;
        }
    }
    std::fill(t.begin(), t.end(), 0.0);
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) t[x] += a[y] * q[y][x];
    return ent(t);
}

TiltColumn tilt_by(const Vec& a, const Vec& r, const Rows& p) {
    const int ny = static_cast<int>(a.size()), nx = static_cast<int>(p[0].size());
    TiltColumn c;
    c.q.assign(ny, Vec(nx, 0.0));
    c.t.assign(nx, 0.0);
    for (int y = 0; y < ny; ++y) {
        double z = 0.0;
        for (int x = 0; x < nx; ++x) z += p[y][x] * r[x];
        if (z <= 0.0) {
            if (a[y] > 0) return c;
            c.q[y] = p[y];
            continue;
        }
        double d = 0.0;
        for (int x = 0; x < nx; ++x) {
            double v = p[y][x] * r[x] / z;
            c.q[y][x] = v;
            if (v > 0) d += v * std::log(v / p[y][x]);
            c.t[x] += a[y] * v;
        }
        c.cost += a[y] * std::max(d, 0.0);
    }
    c.ent = ent(c.t);
    c.ok = true;
    return c;
}

TiltColumn tilt_to_target(const Vec& a, const Vec& target, const Rows& p) {
    const int ny = static_cast<int>(a.size()), nx = static_cast<int>(p[0].size());
    TiltColumn c;
    if (nx == 2) {
        double lo = 0.0, hi = 0.0, s = target[1];
        for (int y = 0; y < ny; ++y) {
            if (a[y] <= 0) continue;
            if (p[y][0] <= 0) lo += a[y];
            if (p[y][1] > 0) hi += a[y];
        }
        const double eps = 1e-13;
        if (s < lo - eps || s > hi + eps) return c;
        auto at_theta = [&](double th) {
            Vec r{1.0, 1.0};
            if (std::isinf(th)) {
                r = th > 0 ? Vec{0.0, 1.0} : Vec{1.0, 0.0};
                TiltColumn col;
                col.q.assign(ny, Vec(2, 0.0));
                col.t.assign(2, 0.0);
                col.ok = true;
                for (int y = 0; y < ny; ++y) {
                    int pick = (p[y][1] > 0 && th > 0) || p[y][0] <= 0 ? 1 : 0;
                    col.q[y][pick] = 1.0;
                    col.t[pick] += a[y];
                    if (a[y] > 0) col.cost += a[y] * (-std::log(p[y][pick]));
                }
                col.ent = ent(col.t);
                return col;
            }
            // r proportional to (1, e^th) evaluated stably
            if (th > 0) r = {std::exp(-th), 1.0};
            else r = {1.0, std::exp(th)};
            return tilt_by(a, r, p);
        };
        if (s <= lo + eps) return at_theta(-kInf);
        if (s >= hi - eps) return at_theta(kInf);
        double tl = -1.0, th = 1.0;
        while (at_theta(tl).t[1] > s && tl > -700) tl *= 2;
        while (at_theta(th).t[1] < s && th < 700) th *= 2;
        double mid = 0.0;
        for (int it = 0; it < 200; ++it) {
            mid = 0.5 * (tl + th);
            double m = at_theta(mid).t[1];
            if (m < s) tl = mid;
            else th = mid;
            if (th - tl < 1e-14 * std::max(1.0, std::fabs(mid))) break;
        }
        return at_theta(0.5 * (tl + th));
    }
    // general alphabet: Newton on the dual, target assumed interior of the reachable set
    for (int x = 0; x < nx; ++x) {
        bool r = false;
        for (int y = 0; y < ny; ++y)
            if (a[y] > 0 && p[y][x] > 0) r = true;
        if (!r && target[x] > 1e-15) return c;
    }
    Vec th(nx, 0.0);
    const int d = nx - 1;
    auto col_of = [&](const Vec& theta) {
        double m = *std::max_element(theta.begin(), theta.end());
        Vec r(nx);
        for (int x = 0; x < nx; ++x) r[x] = std::exp(theta[x] - m);
        return tilt_by(a, r, p);
    };
    auto dual = [&](const Vec& theta) {
        double f = 0.0;
        for (int x = 0; x < nx; ++x) f += theta[x] * target[x];
        for (int y = 0; y < ny; ++y) {
            if (a[y] <= 0) continue;
            double m = -kInf;
            for (int x = 0; x < nx; ++x)
                if (p[y][x] > 0) m = std::max(m, theta[x]);
            double s = 0.0;
            for (int x = 0; x < nx; ++x)
                if (p[y][x] > 0) s += p[y][x] * std::exp(theta[x] - m);
            f -= a[y] * (std::log(s) + m);
        }
        return f;
    };
    TiltColumn cur = col_of(th);
    double f = dual(th);
    for (int it = 0; it < 300; ++it) {
        Eigen::VectorXd g(d);
        Eigen::MatrixXd H(d, d);
        double gmax = 0.0;
        for (int i = 0; i < d; ++i) {
            g[i] = target[i + 1] - cur.t[i + 1];
            gmax = std::max(gmax, std::fabs(g[i]));
        }
        if (gmax < 1e-14) break;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double v = 0.0;
                for (int y = 0; y < ny; ++y)
                    v += a[y] * (cur.q[y][i + 1] * (i == j) - cur.q[y][i + 1] * cur.q[y][j + 1]);
                H(i, j) = v + (i == j ? 1e-14 : 0.0);
            }
        Eigen::VectorXd st = H.ldlt().solve(g);
        double s = 1.0;
        bool moved = false;
        while (s > 1e-12) {
            Vec t2 = th;
            for (int i = 0; i < d; ++i) t2[i + 1] += s * st[i];
            double f2 = dual(t2);
            if (f2 >= f) {
                th = t2;
                f = f2;
                cur = col_of(th);
                moved = true;
                break;
            }
            s *= 0.5;
        }
        if (!moved) break;
    }
    return cur;
}

}  // namespace detail

using namespace detail;

SourceModel::SourceModel(JointXY p_xy)
    : p_xy_(std::move(p_xy)), p_x_(p_xy_.p_x()), p_y_(p_xy_.p_y()), p_x_given_y_(p_xy_.p_x_given_y()) {}

double SourceModel::delta_min() const { return cond_entropy_x_given_y(p_xy_); }

bool SourceModel::lossless() const {
    if (nx() != ny()) return false;
    for (std::size_t x = 0; x < nx(); ++x)
        for (std::size_t y = 0; y < ny(); ++y)
            if (x != y && p_xy_(x, y) > 0) return false;
    return true;
}

void ProblemSpec::validate() const {
    require(std::isfinite(R) && R >= 0.0, "rate R must be finite and non-negative");
    require(std::isfinite(Delta) && Delta >= 0.0, "distortion Delta must be finite and non-negative");
    require(u_size >= 0, "u_size must be positive");
}

void SolverConfig::validate() const {
    require(outer_grid_resolution >= 2, "outer_grid_resolution must be at least 2");
    require(restarts >= 1, "restarts must be positive");
    require(fixed_point_tol > 0 && rho_bisection_tol > 0, "tolerances must be positive");
    require(fixed_point_max_iters >= 1, "fixed_point_max_iters must be positive");
    require(damping > 0 && damping <= 1, "damping must lie in (0,1]");
    for (std::size_t i = 1; i < penalty_schedule.size(); ++i)
        require(penalty_schedule[i] > penalty_schedule[i - 1], "penalty_schedule must be increasing");
    require(posterior_resolution == 0 || posterior_resolution >= 2, "posterior_resolution must be at least 2");
    require(tilt_resolution == 0 || tilt_resolution >= 2, "tilt_resolution must be at least 2");
}

double sc_objective(const JointXYU& q, const SourceModel& model, double R) {
    double d = joint_divergence(q, model.p_xy());
    if (!std::isfinite(d)) return d;
    return d + std::max(mutual_info_yu(q) - R, 0.0);
}

// ---------------------------------------------------------------- lossless closed forms

double error_exponent_lossless(const Pmf& p, double R, double Delta) {
    require(R >= 0 && Delta >= 0, "error_exponent_lossless: negative R or Delta");
    double c = R + Delta, H = entropy(p);
    if (c <= H) return 0.0;
    std::vector<std::size_t> supp;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0) supp.push_back(i);
    double cap = std::log(static_cast<double>(supp.size()));
    if (c > cap + 1e-12) return kInf;
    if (c >= cap - 1e-15) {
        double d = 0.0;
        for (auto i : supp) d += std::log(1.0 / supp.size() / p[i]) / supp.size();
        return std::max(d, 0.0);
    }
    if (p.size() == 2) {
        double p1 = p[1], lo = p1, hi = 0.5;
        bool up = p1 < 0.5;
        if (!up) lo = 0.5, hi = p1;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            bool above = binary_entropy(mid) >= c;
            if (up) (above ? hi : lo) = mid;
            else (above ? lo : hi) = mid;
        }
        double q = up ? hi : lo;
        return binary_kl(q, p1);
    }
    auto tilt = [&](double beta) {
        Vec q(p.size(), 0.0);
        double z = 0.0;
        for (auto i : supp) z += q[i] = std::pow(p[i], beta);
        for (double& v : q) v /= z;
        return q;
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (ent(tilt(mid)) >= c) lo = mid;
        else hi = mid;
    }
    return kl(tilt(lo), p.probs());
}

double sc_exponent_lossless(const Pmf& p, double R, double Delta, int resolution) {
    require(R >= 0 && Delta >= 0, "sc_exponent_lossless: negative R or Delta");
    require(resolution >= 2, "sc_exponent_lossless: resolution must be at least 2");
    double c = R + Delta;
    if (entropy(p) <= c) return 0.0;
    auto golden = [](auto f, double lo, double hi) {
        const double g = (std::sqrt(5.0) - 1) / 2;
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        double f1 = f(x1), f2 = f(x2);
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            if (f1 < f2) {
                hi = x2, x2 = x1, f2 = f1;
                x1 = hi - g * (hi - lo), f1 = f(x1);
            } else {
                lo = x1, x1 = x2, f1 = f2;
                x2 = lo + g * (hi - lo), f2 = f(x2);
            }
        }
        return std::min(f1, f2);
    };
    if (p.size() == 2) {
        auto f = [&](double q) { return binary_kl(q, p[1]) + std::max(binary_entropy(q) - c, 0.0); };
        int best = 0;
        double bv = kInf;
        for (int i = 0; i <= resolution; ++i) {
            double v = f(static_cast<double>(i) / resolution);
            if (v < bv) bv = v, best = i;
        }
        double lo = std::max(0.0, (best - 1.0) / resolution), hi = std::min(1.0, (best + 1.0) / resolution);
        return std::max(0.0, std::min(bv, golden(f, lo, hi)));
    }
    double pmax = *std::max_element(p.probs().begin(), p.probs().end());
    auto family = [&](double s) {
        Vec q(p.size(), 0.0);
        double z = 0.0;
        if (s >= 1.0) {
            for (std::size_t i = 0; i < p.size(); ++i) z += q[i] = p[i] == pmax ? 1.0 : 0.0;
        } else {
            double beta = 1.0 / (1.0 - s);
            for (std::size_t i = 0; i < p.size(); ++i) z += q[i] = p[i] > 0 ? std::exp(beta * std::log(p[i] / pmax)) : 0.0;
        }
        for (double& v : q) v /= z;
        return kl(q, p.probs()) + std::max(ent(q) - c, 0.0);
    };
    int best = 0;
    double bv = kInf;
    for (int i = 0; i <= resolution; ++i) {
        double v = family(static_cast<double>(i) / resolution);
        if (v < bv) bv = v, best = i;
    }
    double lo = std::max(0.0, (best - 1.0) / resolution), hi = std::min(1.0, (best + 1.0) / resolution);
    return std::max(0.0, std::min(bv, golden(family, lo, hi)));
}

// ---------------------------------------------------------------- innermost layer of E

namespace {

struct InnerU {
    Vec a;                 // Q_{Y|U=u}
    std::vector<Vec> q;    // q[y][x]
};

double lagrangian_u(const InnerU& s, const Rows& p, double rho) {
    const std::size_t nx = p[0].size();
    Vec t(nx, 0.0);
    double c = 0.0;
    for (std::size_t y = 0; y < s.a.size(); ++y) {
        if (s.a[y] <= 0) continue;
        for (std::size_t x = 0; x < nx; ++x)
            if (s.q[y][x] > 0) {
                c += s.a[y] * s.q[y][x] * std::log(s.q[y][x] / p[y][x]);
                t[x] += s.a[y] * s.q[y][x];
            }
    }
    return c - rho * ent(t);
}

Vec mix_u(const InnerU& s, std::size_t nx) {
    Vec t(nx, 0.0);
    for (std::size_t y = 0; y < s.a.size(); ++y)
        if (s.a[y] > 0)
            for (std::size_t x = 0; x < nx; ++x) t[x] += s.a[y] * s.q[y][x];
    return t;
}

// damped multiplicative update q_y ∝ q_y^(1-α) (p_y t^-ρ)^α with backtracking on the Lagrangian
int solve_u_fixed_point(InnerU& s, const Rows& p, double rho, const SolverConfig& cfg, bool& converged) {
    const std::size_t nx = p[0].size(), ny = s.a.size();
    double alpha = cfg.damping;
    double L = lagrangian_u(s, p, rho);
    InnerU trial = s;
    int it = 0;
    converged = false;
    for (; it < cfg.fixed_point_max_iters; ++it) {
        Vec t = mix_u(s, nx);
        double change = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
            if (s.a[y] <= 0) continue;
            Vec lg(nx, -kInf);
            double mx = -kInf;
            for (std::size_t x = 0; x < nx; ++x) {
                if (p[y][x] <= 0) continue;
                double lt = t[x] > 0 ? std::log(t[x]) : -745.0;
                lg[x] = (1 - alpha) * std::log(s.q[y][x]) + alpha * (std::log(p[y][x]) - rho * lt);
                mx = std::max(mx, lg[x]);
            }
            double z = 0.0;
            for (std::size_t x = 0; x < nx; ++x) z += lg[x] > -kInf ? std::exp(lg[x] - mx) : 0.0;
            for (std::size_t x = 0; x < nx; ++x) {
                double v = lg[x] > -kInf ? std::exp(lg[x] - mx) / z : 0.0;
                change = std::max(change, std::fabs(v - s.q[y][x]));
                trial.q[y][x] = v;
            }
        }
        double L2 = lagrangian_u(trial, p, rho);
        if (L2 > L + 1e-15 * (1.0 + std::fabs(L))) {
            alpha *= 0.5;
            if (alpha < 1e-9) break;
            continue;
        }
        std::swap(s.q, trial.q);
        L = L2;
        if (change < cfg.fixed_point_tol) {
            converged = true;
            break;
        }
        alpha = std::min(cfg.damping, alpha * 1.25);
    }
    return it;
}

void project_simplex(Vec& v, const std::vector<char>& mask) {
    Vec u;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (mask[i]) u.push_back(v[i]);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, tau = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        css += u[k];
        double tk = (css - 1.0) / (k + 1);
        if (u[k] - tk > 0) tau = tk;
    }
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = mask[i] ? std::max(v[i] - tau, 0.0) : 0.0;
}

int solve_u_projected_gradient(InnerU& s, const Rows& p, double rho, const SolverConfig& cfg, bool& converged) {
    const std::size_t nx = p[0].size(), ny = s.a.size();
    double L = lagrangian_u(s, p, rho), eta = 0.1;
    converged = false;
    InnerU trial = s;
    int it = 0;
    for (; it < cfg.fixed_point_max_iters; ++it) {
        Vec t = mix_u(s, nx);
        std::vector<Vec> g(ny, Vec(nx, 0.0));
        for (std::size_t y = 0; y < ny; ++y) {
            if (s.a[y] <= 0) continue;
            for (std::size_t x = 0; x < nx; ++x) {
                if (p[y][x] <= 0) continue;
                double qv = std::max(s.q[y][x], 1e-300), tv = std::max(t[x], 1e-300);
                g[y][x] = s.a[y] * (std::log(qv / p[y][x]) + 1.0 + rho * (std::log(tv) + 1.0));
            }
        }
        bool accepted = false;
        double change = 0.0;
        while (eta > 1e-16) {
            change = 0.0;
            for (std::size_t y = 0; y < ny; ++y) {
                if (s.a[y] <= 0) continue;
                std::vector<char> mask(nx);
                Vec v(nx);
                for (std::size_t x = 0; x < nx; ++x) {
                    mask[x] = p[y][x] > 0;
                    v[x] = s.q[y][x] - eta * g[y][x] / s.a[y];
                }
                project_simplex(v, mask);
                for (std::size_t x = 0; x < nx; ++x) change = std::max(change, std::fabs(v[x] - s.q[y][x]));
                trial.q[y] = v;
            }
            double L2 = lagrangian_u(trial, p, rho);
            if (L2 <= L) {
                accepted = true;
                L = L2;
                std::swap(s.q, trial.q);
                eta *= 1.5;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted || change < cfg.fixed_point_tol) {
            converged = accepted || change < cfg.fixed_point_tol;
            break;
        }
    }
    return it;
}

}  // namespace

InnerResult inner_min_E(const Pmf& q_y, const CondPmf& q_u_given_y, double Delta, const SourceModel& model,
                        const SolverConfig& cfg, InnerMethod method) {
    cfg.validate();
    require(Delta >= 0, "inner_min_E: Delta must be non-negative");
    const std::size_t ny = model.ny(), nx = model.nx(), nu = q_u_given_y.n_out();
    require(q_y.size() == ny && q_u_given_y.n_in() == ny, "inner_min_E: alphabet mismatch");
    Rows p = channel_rows(model.p_x_given_y());
    InnerResult res;
    double base = kl(q_y, model.p_y());

    Vec qu(nu, 0.0);
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t u = 0; u < nu; ++u) qu[u] += q_y[y] * q_u_given_y(y, u);
    std::vector<InnerU> us(nu);
    for (std::size_t u = 0; u < nu; ++u) {
        us[u].a.assign(ny, 0.0);
        if (qu[u] > 0)
            for (std::size_t y = 0; y < ny; ++y) us[u].a[y] = q_y[y] * q_u_given_y(y, u) / qu[u];
        us[u].q = p;
    }
    auto pack = [&](const std::vector<InnerU>& st) {
        std::vector<double> flat(ny * nu * nx);
        for (std::size_t y = 0; y < ny; ++y)
            for (std::size_t u = 0; u < nu; ++u)
                for (std::size_t x = 0; x < nx; ++x) flat[(y * nu + u) * nx + x] = st[u].q[y][x];
        return CondPmf(ny * nu, nx, std::move(flat));
    };
    auto cond_ent = [&](const std::vector<InnerU>& st) {
        double h = 0.0;
        for (std::size_t u = 0; u < nu; ++u)
            if (qu[u] > 0) h += qu[u] * ent(mix_u(st[u], nx));
        return h;
    };
    auto divergence = [&](const std::vector<InnerU>& st) {
        double d = 0.0;
        for (std::size_t u = 0; u < nu; ++u)
            for (std::size_t y = 0; y < ny; ++y) {
                double w = q_y[y] * q_u_given_y(y, u);
                if (w <= 0) continue;
                for (std::size_t x = 0; x < nx; ++x)
                    if (st[u].q[y][x] > 0) d += w * st[u].q[y][x] * std::log(st[u].q[y][x] / p[y][x]);
            }
        return std::max(d, 0.0);
    };

    res.cond_entropy = cond_ent(us);
    if (!std::isfinite(base)) {
        res.q_x_given_yu = pack(us);
        res.feasible = res.cond_entropy >= Delta;
        return res;
    }
    if (res.cond_entropy >= Delta) {
        res.value = base;
        res.feasible = true;
        res.q_x_given_yu = pack(us);
        return res;
    }
    double hmax = 0.0;
    std::vector<double> hmax_u(nu, 0.0);
    for (std::size_t u = 0; u < nu; ++u)
        if (qu[u] > 0) hmax += qu[u] * (hmax_u[u] = hmax_posterior(us[u].a, p));
    if (Delta > hmax + 1e-12) {
        res.q_x_given_yu = pack(us);
        res.feasible = false;
        return res;
    }
    if (Delta >= hmax - 1e-12) {
        // only the entropy maximizers are feasible; full-support rows give uniform mixtures
        for (std::size_t u = 0; u < nu; ++u) {
            if (qu[u] <= 0) continue;
            Vec target(nx, 1.0 / nx);
            if (std::fabs(hmax_u[u] - std::log(static_cast<double>(nx))) > 1e-12) {
                Psi ps = psi_dual(us[u].a, 1e6, p);
                target = ps.t;
            }
            TiltColumn col = tilt_to_target(us[u].a, target, p);
            if (col.ok) us[u].q = col.q;
        }
        res.value = base + divergence(us);
        res.cond_entropy = cond_ent(us);
        res.feasible = true;
        res.rho = kInf;
        res.q_x_given_yu = pack(us);
        return res;
    }

    auto solve_at = [&](double rho, std::vector<InnerU>& st) {
        bool all = true;
        for (std::size_t u = 0; u < nu; ++u) {
            if (qu[u] <= 0) continue;
            bool conv = true;
            res.iterations += method == InnerMethod::FixedPoint ? solve_u_fixed_point(st[u], p, rho, cfg, conv)
                                                                : solve_u_projected_gradient(st[u], p, rho, cfg, conv);
            all = all && conv;
        }
        res.converged = res.converged && all;
        return cond_ent(st);
    };

    std::vector<InnerU> lo_s = us, hi_s = us;
    double lo = 0.0, glo = res.cond_entropy - Delta, hi = 1.0;
    double ghi = solve_at(hi, hi_s) - Delta;
    while (ghi < 0 && hi < 1e12) {
        lo = hi, glo = ghi, lo_s = hi_s;
        hi *= 4.0;
        ghi = solve_at(hi, hi_s) - Delta;
    }
    if (ghi < 0) res.converged = false;
    // Illinois false position on H(rho) - Delta
    int side = 0;
    double fhi = ghi, flo = glo;
    std::vector<InnerU> mid_s = hi_s;
    for (int it = 0; it < 200 && ghi > cfg.rho_bisection_tol && hi - lo > 1e-15 * hi; ++it) {
        double mid = (lo * fhi - hi * flo) / (fhi - flo);
        if (!(mid > lo && mid < hi) || it % 8 == 7) mid = 0.5 * (lo + hi);
        mid_s = ghi < -glo ? hi_s : lo_s;
        double gm = solve_at(mid, mid_s) - Delta;
        if (gm >= 0) {
            hi = mid, ghi = fhi = gm, hi_s = mid_s;
            if (side == 1) flo *= 0.5;
            side = 1;
        } else {
            lo = mid, glo = flo = gm, lo_s = mid_s;
            if (side == -1) fhi *= 0.5;
            side = -1;
        }
    }
    res.rho = hi;
    res.cond_entropy = cond_ent(hi_s);
    res.feasible = res.cond_entropy >= Delta - 1e-9;
    res.value = base + divergence(hi_s);
    res.q_x_given_yu = pack(hi_s);
    return res;
}

// ---------------------------------------------------------------- solver state

namespace {

struct Atom {
    double w = 0.0;
    Vec a;
    Vec r;  // tilt of the reconstruction channel (F only)
};

struct PostSet {
    std::vector<Vec> a;
    Vec H, hx, hmax;
    std::map<double, Vec> psi;

    std::size_t size() const { return a.size(); }
    void add(const Vec& v, const Rows& p) {
        a.push_back(v);
        H.push_back(ent(v));
        Vec m(p[0].size(), 0.0);
        for (std::size_t y = 0; y < v.size(); ++y)
            for (std::size_t x = 0; x < m.size(); ++x) m[x] += v[y] * p[y][x];
        hx.push_back(ent(m));
        hmax.push_back(hmax_posterior(v, p));
        psi.clear();
    }
    const Vec& psi_at(double rho, const Rows& p) {
        auto it = psi.find(rho);
        if (it != psi.end()) return it->second;
        Vec v(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) v[i] = psi_dual(a[i], rho, p).value;
        return psi.emplace(rho, std::move(v)).first->second;
    }
    void sort_binary() {
        std::vector<std::size_t> idx(a.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return a[i][1] < a[j][1]; });
        PostSet s;
        for (auto i : idx) {
            if (!s.a.empty() && std::fabs(s.a.back()[1] - a[i][1]) < 1e-15) continue;
            s.a.push_back(a[i]);
            s.H.push_back(H[i]);
            s.hx.push_back(hx[i]);
            s.hmax.push_back(hmax[i]);
        }
        *this = std::move(s);
    }
};

struct FCol {
    Vec r;
    double h = 0.0, c = 0.0;
};

// lower-left convex chain of (h, c) points: enough when columns may be mixed
std::vector<FCol> lower_hull(std::vector<FCol> pts) {
    std::sort(pts.begin(), pts.end(), [](const FCol& x, const FCol& y) { return x.h < y.h || (x.h == y.h && x.c < y.c); });
    std::vector<FCol> hull;
    for (auto& pt : pts) {
        if (!hull.empty() && std::fabs(hull.back().h - pt.h) < 1e-15) continue;
        while (hull.size() >= 2) {
            const FCol& o = hull[hull.size() - 2];
            const FCol& b = hull.back();
            double cr = (b.h - o.h) * (pt.c - o.c) - (b.c - o.c) * (pt.h - o.h);
            if (cr <= 1e-18) hull.pop_back();
            else break;
        }
        hull.push_back(pt);
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < hull.size(); ++i)
        if (hull[i].c < hull[best].c - 1e-15) best = i;
    hull.resize(best + 1);
    return hull;
}

// non-dominated (h, c) points: needed when every atom takes a single column
std::vector<FCol> pareto(std::vector<FCol> pts) {
    std::sort(pts.begin(), pts.end(), [](const FCol& x, const FCol& y) { return x.h < y.h || (x.h == y.h && x.c < y.c); });
    std::vector<FCol> out;
    for (auto& pt : pts)
        if (out.empty() || pt.c < out.back().c - 1e-15) out.push_back(pt);
    return out;
}

struct MidEval {
    double extra = 0.0;  // value above D(Q_Y||P_Y); +inf when some channel makes the inner layer infeasible
    double rho = 0.0;
    std::vector<Atom> atoms;
};

std::vector<Atom> atoms_from(const Eigen::VectorXd& x, std::size_t n, const std::vector<const Vec*>& a,
                             const std::vector<const Vec*>& r = {}) {
    std::vector<Atom> out;
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] > 1e-14) out.push_back({x[i], *a[i], r.empty() ? Vec{} : *r[i]});
    return out;
}

double golden_max(const std::function<double(double)>& f, double lo, double hi, int iters, double& arg) {
    const double g = (std::sqrt(5.0) - 1) / 2;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < iters; ++it) {
        if (f1 > f2) {
            hi = x2, x2 = x1, f2 = f1;
            x1 = hi - g * (hi - lo), f1 = f(x1);
        } else {
            lo = x1, x1 = x2, f1 = f2;
            x2 = lo + g * (hi - lo), f2 = f(x2);
        }
    }
    arg = f1 > f2 ? x1 : x2;
    return std::max(f1, f2);
}

}  // namespace

struct ExponentSolver::Impl {
    SourceModel model;
    SolverConfig cfg;
    Rows p;
    int nx, ny;
    Vec py;
    int post_res, tilt_res;
    PostSet grid;
    std::vector<Vec> rgrid;
    std::vector<std::vector<FCol>> fhull, fpareto;
    bool fbuilt = false;
    Vec rhos;

    Impl(SourceModel m, SolverConfig c) : model(std::move(m)), cfg(std::move(c)) {
        cfg.validate();
        p = channel_rows(model.p_x_given_y());
        nx = static_cast<int>(model.nx());
        ny = static_cast<int>(model.ny());
        py = model.p_y().probs();
        post_res = cfg.posterior_resolution ? cfg.posterior_resolution
                                            : (ny == 2 ? 400 : ny == 3 ? 40 : ny == 4 ? 14 : ny == 5 ? 8 : 5);
        tilt_res = cfg.tilt_resolution ? cfg.tilt_resolution
                                       : (nx == 2 ? 400 : nx == 3 ? 40 : nx == 4 ? 12 : 6);
        for (auto& v : simplex_grid(ny, post_res)) grid.add(v, p);
        if (ny == 2) grid.sort_binary();
        rgrid = simplex_grid(nx, tilt_res);
        rhos.push_back(0.0);
        for (int j = 0; j <= 60; ++j) rhos.push_back(std::pow(10.0, -3.0 + 6.0 * j / 60));
    }

    bool in_support(const Vec& q) const {
        for (int y = 0; y < ny; ++y)
            if (q[y] > 0 && py[y] <= 0) return false;
        return true;
    }

    // ------------------------------------------------------------ refinement helpers
    std::vector<Vec> around(const Vec& a, double step, int reach) const {
        std::vector<Vec> out;
        int k = static_cast<int>(a.size());
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                for (int s = -reach; s <= reach; ++s) {
                    if (s == 0) continue;
                    Vec v = a;
                    v[i] += s * step;
                    v[j] -= s * step;
                    if (v[i] < -1e-15 || v[j] < -1e-15) continue;
                    v[i] = std::max(v[i], 0.0);
                    v[j] = std::max(v[j], 0.0);
                    out.push_back(v);
                }
        return out;
    }

    PostSet refined(const PostSet& base, const std::vector<Atom>& atoms) const {
        PostSet s = base;
        s.psi.clear();
        for (const auto& at : atoms)
            for (double step : {1.0 / (post_res * 8.0), 1.0 / (post_res * 64.0), 1.0 / (post_res * 512.0)})
                for (auto& v : around(at.a, step, 7)) s.add(v, p);
        if (ny == 2) s.sort_binary();
        return s;
    }

    // ------------------------------------------------------------ rate-distortion type LPs
    // kind 0: R(Delta) = H(P_Y) - max sum w H(a) s.t. sum w hx <= Delta
    // kind 1: R_h(B) = min sum w hx s.t. sum w H(a) >= H(P_Y) - B
    struct RdEval {
        double value = kInf;
        std::vector<Atom> atoms;
    };

    RdEval rd_lp(const PostSet& S, int kind, double level) const {
        const int N = static_cast<int>(S.size());
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ny + 1, N + 1);
        Eigen::VectorXd b(ny + 1), c = Eigen::VectorXd::Zero(N + 1);
        for (int i = 0; i < N; ++i) {
            for (int y = 0; y < ny; ++y) A(y, i) = S.a[i][y];
            A(ny, i) = kind == 0 ? S.hx[i] : S.H[i];
            c[i] = kind == 0 ? S.H[i] : -S.hx[i];
        }
        A(ny, N) = kind == 0 ? 1.0 : -1.0;
        for (int y = 0; y < ny; ++y) b[y] = py[y];
        b[ny] = kind == 0 ? level : ent(py) - level;
        LpResult lp = lp_maximize(A, b, c);
        RdEval out;
        if (!lp.feasible) return out;
        std::vector<const Vec*> ptr;
        for (auto& v : S.a) ptr.push_back(&v);
        out.atoms = atoms_from(lp.x, N, ptr);
        out.value = kind == 0 ? std::max(ent(py) - lp.value, 0.0) : std::max(-lp.value, 0.0);
        return out;
    }

    RdEval rd_pairs(const PostSet& S, int kind, double level) const {
        RdEval out;
        double q = py[1], Hq = ent(py);
        Vec mq(nx, 0.0);
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) mq[x] += py[y] * p[y][x];
        double hq = ent(mq);
        auto consider = [&](double val, std::vector<Atom> atoms) {
            if (val < out.value) {
                out.value = val;
                out.atoms = std::move(atoms);
            }
        };
        if (kind == 0 ? hq <= level : Hq >= Hq - level) consider(kind == 0 ? 0.0 : hq, {{1.0, py, {}}});
        for (std::size_t i = 0; i < S.size(); ++i) {
            if (S.a[i][1] >= q) break;
            for (std::size_t j = S.size(); j-- > 0;) {
                if (S.a[j][1] <= q) break;
                double w = (S.a[j][1] - q) / (S.a[j][1] - S.a[i][1]);
                double Hm = w * S.H[i] + (1 - w) * S.H[j], hm = w * S.hx[i] + (1 - w) * S.hx[j];
                if (kind == 0) {
                    if (hm <= level + 1e-15) consider(std::max(Hq - Hm, 0.0), {{w, S.a[i], {}}, {1 - w, S.a[j], {}}});
                } else if (Hq - Hm <= level + 1e-15) {
                    consider(hm, {{w, S.a[i], {}}, {1 - w, S.a[j], {}}});
                }
            }
        }
        return out;
    }

    RdEval rd_solve(int kind, double level, int us, std::string& method) {
        auto run = [&](const PostSet& S) {
            if (us == 1) {
                RdEval e;
                Vec mq(nx, 0.0);
                for (int y = 0; y < ny; ++y)
                    for (int x = 0; x < nx; ++x) mq[x] += py[y] * p[y][x];
                if (kind == 0 && ent(mq) <= level) e = {0.0, {{1.0, py, {}}}};
                if (kind == 1) e = {ent(mq), {{1.0, py, {}}}};
                return e;
            }
            if (us >= ny + 1) return rd_lp(S, kind, level);
            if (ny == 2 && us == 2) return rd_pairs(S, kind, level);
            return RdEval{};
        };
        if (us >= ny + 1) method = "lp-posterior-grid";
        else if (us == 1) method = "constant";
        else if (ny == 2 && us == 2) method = "pair-enumeration";
        else method = "local-search";
        if (method == "local-search") return rd_local(kind, level, us);
        RdEval e = run(grid);
        for (int pass = 0; pass < 2 && !e.atoms.empty() && us > 1; ++pass) {
            RdEval e2 = run(refined(grid, e.atoms));
            if (e2.value <= e.value) e = e2;
        }
        return e;
    }

    // hill climbing over Q_{U|Y} for cardinalities the exact paths do not cover
    template <class Obj>
    std::vector<Vec> hill_climb(std::vector<Vec> chan, Obj f, std::mt19937_64& rng, int iters) const {
        int k = static_cast<int>(chan[0].size());
        double cur = f(chan);
        double step = 0.5;
        std::uniform_int_distribution<int> py_(0, ny - 1), pu(0, k - 1);
        for (int it = 0; it < iters && step > 1e-9; ++it) {
            bool improved = false;
            for (int trial = 0; trial < 4 * ny * k; ++trial) {
                int y = py_(rng), u1 = pu(rng), u2 = pu(rng);
                if (u1 == u2 || chan[y][u1] <= 0) continue;
                auto c2 = chan;
                double mv = step * chan[y][u1];
                c2[y][u1] -= mv;
                c2[y][u2] += mv;
                double v = f(c2);
                if (v > cur + 1e-14) {
                    cur = v;
                    chan = std::move(c2);
                    improved = true;
                }
            }
            if (!improved) step *= 0.5;
        }
        return chan;
    }

    std::vector<Vec> random_channel(int k, std::mt19937_64& rng) const {
        std::gamma_distribution<double> g(1.0, 1.0);
        std::vector<Vec> c(ny, Vec(k));
        for (auto& row : c) {
            double s = 0.0;
            for (double& v : row) s += v = g(rng);
            for (double& v : row) v /= s;
        }
        return c;
    }

    std::vector<Atom> atoms_of(const Vec& q, const std::vector<Vec>& chan) const {
        int k = static_cast<int>(chan[0].size());
        std::vector<Atom> out;
        for (int u = 0; u < k; ++u) {
            double w = 0.0;
            for (int y = 0; y < ny; ++y) w += q[y] * chan[y][u];
            if (w <= 0) continue;
            Vec a(ny);
            for (int y = 0; y < ny; ++y) a[y] = q[y] * chan[y][u] / w;
            out.push_back({w, a, {}});
        }
        return out;
    }

    static double info_of(const Vec& q, const std::vector<Atom>& atoms) {
        double h = 0.0;
        for (auto& at : atoms) h += at.w * ent(at.a);
        return std::max(ent(q) - h, 0.0);
    }

    double hx_of(const std::vector<Atom>& atoms) const {
        double h = 0.0;
        for (auto& at : atoms) {
            Vec m(nx, 0.0);
            for (int y = 0; y < ny; ++y)
                for (int x = 0; x < nx; ++x) m[x] += at.a[y] * p[y][x];
            h += at.w * ent(m);
        }
        return h;
    }

    RdEval rd_local(int kind, double level, int us) {
        std::mt19937_64 rng(cfg.rng_seed);
        RdEval best;
        auto obj = [&](const std::vector<Vec>& ch) {
            auto at = atoms_of(py, ch);
            double I = info_of(py, at), h = hx_of(at);
            if (kind == 0) return h <= level ? -I : -kInf;
            return I <= level ? -h : -kInf;
        };
        int starts = std::min(cfg.restarts, 16);
        for (int s = 0; s < starts; ++s) {
            std::mt19937_64 r2(cfg.rng_seed + 0x9E3779B97F4A7C15ULL * (s + 1));
            std::vector<Vec> ch;
            if (s == 0) {
                ch.assign(ny, Vec(us, 0.0));
                for (int y = 0; y < ny; ++y) ch[y][y % us] = 1.0;
            } else {
                ch = random_channel(us, r2);
            }
            if (obj(ch) == -kInf) continue;
            ch = hill_climb(ch, obj, r2, 400);
            double v = -obj(ch);
            if (v < best.value) best = {v, atoms_of(py, ch)};
        }
        return best;
    }

    ExponentResult rd_result(int kind, double level, int us) {
        ExponentResult res;
        std::string method;
        RdEval e = rd_solve(kind, level, us, method);
        res.diag.method = method;
        if (e.atoms.empty()) {
            res.value = kInf;
            res.diag.feasible = false;
            return res;
        }
        res.value = e.value;
        fill_witness(res, py, e.atoms, us, nullptr);
        double I = mutual_info_yu(res.witness), H = cond_entropy_x_given_u(res.witness);
        res.value = kind == 0 ? I : H;
        res.diag.constraint_value = kind == 0 ? H : I;
        return res;
    }

    // Q_{U|Y} and Q_{X|YU} from atoms; r-tilts when given, P_{X|Y} otherwise
    void fill_witness(ExponentResult& res, const Vec& q, const std::vector<Atom>& atoms, int us,
                      const CondPmf* qx) const {
        int k = std::max<int>(us, static_cast<int>(atoms.size()));
        std::vector<double> ch(ny * k, 0.0);
        for (int y = 0; y < ny; ++y) {
            double s = 0.0;
            for (std::size_t u = 0; u < atoms.size(); ++u) s += ch[y * k + u] = atoms[u].w * atoms[u].a[y];
            if (s > 0)
                for (int u = 0; u < k; ++u) ch[y * k + u] /= s;
            else
                ch[y * k] = 1.0;
        }
        Pmf qy(q);
        CondPmf quy(ny, k, std::move(ch));
        CondPmf qxyu;
        if (qx) {
            qxyu = *qx;
        } else {
            std::vector<double> flat(ny * k * nx);
            for (int y = 0; y < ny; ++y)
                for (int u = 0; u < k; ++u) {
                    Vec row = p[y];
                    if (u < static_cast<int>(atoms.size()) && !atoms[u].r.empty()) {
                        TiltColumn col = tilt_by(Vec(ny, 1.0 / ny), atoms[u].r, p);
                        if (col.ok) row = col.q[y];
                    }
                    for (int x = 0; x < nx; ++x) flat[(y * k + u) * nx + x] = row[x];
                }
            qxyu = CondPmf(ny * k, nx, std::move(flat));
        }
        res.witness = JointXYU::from_factors(qy, quy, qxyu);
        res.outer_q_y = qy;
        res.middle_q_u_given_y = quy;
        res.has_witness = true;
    }

    // ------------------------------------------------------------ E: middle layer
    bool full_support() const {
        for (auto& row : p)
            for (double v : row)
                if (v <= 0) return false;
        return true;
    }

    Vec rho_window(std::size_t k) const {
        double lo = rhos[k == 0 ? 0 : k - 1];
        double hi = k + 1 < rhos.size() ? rhos[k + 1] : rhos.back() * 100.0;
        return {lo, hi};
    }

    // max over rho of rho*Delta + sum w psi_rho(a) for fixed atoms
    std::pair<double, double> rho_max(const std::vector<Atom>& atoms, double Delta, bool refine) const {
        double hm = 0.0;
        for (auto& at : atoms) hm += at.w * hmax_posterior(at.a, p);
        if (hm < Delta - 1e-12) return {kInf, kInf};
        auto G = [&](double rho) {
            double v = rho * Delta;
            for (auto& at : atoms) v += at.w * psi_dual(at.a, rho, p).value;
            return v;
        };
        std::size_t bk = 0;
        double best = -kInf;
        for (std::size_t k = 0; k < rhos.size(); ++k) {
            double v = G(rhos[k]);
            if (v > best) best = v, bk = k;
        }
        double arg = rhos[bk];
        if (refine) {
            Vec w = rho_window(bk);
            double a2;
            double v = golden_max(G, w[0], w[1], 60, a2);
            if (v > best) best = v, arg = a2;
        }
        return {best, arg};
    }

    MidEval mid_E_lp(const Vec& q, double R, double Delta, PostSet& S, bool refine) const {
        MidEval out;
        const int N = static_cast<int>(S.size());
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ny + 1, N + 2);
        Eigen::VectorXd b(ny + 1), c = Eigen::VectorXd::Zero(N + 2);
        for (int i = 0; i < N; ++i) {
            for (int y = 0; y < ny; ++y) A(y, i) = S.a[i][y];
            A(ny, i) = S.H[i];
        }
        for (int y = 0; y < ny; ++y) A(y, N) = q[y], b[y] = q[y];
        A(ny, N) = ent(q);
        A(ny, N + 1) = -1.0;
        b[ny] = ent(q) - R;
        std::vector<const Vec*> ptr;
        for (auto& v : S.a) ptr.push_back(&v);
        ptr.push_back(&q);

        if (!(full_support() && Delta <= std::log(static_cast<double>(nx)) + 1e-12)) {
            for (int i = 0; i < N; ++i) c[i] = -S.hmax[i];
            c[N] = -hmax_posterior(q, p);
            LpResult lp = lp_maximize(A, b, c);
            if (lp.feasible && -lp.value < Delta - 1e-12) {
                out.extra = kInf;
                out.rho = kInf;
                out.atoms = atoms_from(lp.x, N + 1, ptr);
                return out;
            }
        }
        double best = -kInf;
        Eigen::VectorXd bx;
        std::vector<int> warm;
        auto G = [&](double rho, Eigen::VectorXd* xs) {
            const Vec& ps = S.psi_at(rho, p);
            for (int i = 0; i < N; ++i) c[i] = ps[i];
            c[N] = psi_dual(q, rho, p).value;
            c[N + 1] = 0.0;
            LpResult lp = lp_maximize(A, b, c, &warm);
            if (xs) *xs = lp.x;
            return rho * Delta + lp.value;
        };
        std::size_t bk = 0;
        for (std::size_t k = 0; k < rhos.size(); ++k) {
            Eigen::VectorXd x;
            double v = G(rhos[k], &x);
            if (v > best) best = v, bk = k, bx = x;
        }
        out.rho = rhos[bk];
        if (refine) {
            Vec w = rho_window(bk);
            double arg;
            double v = golden_max([&](double r) { return G(r, nullptr); }, w[0], w[1], 50, arg);
            if (v > best) {
                best = G(arg, &bx);
                out.rho = arg;
            }
        }
        out.extra = std::max(best, 0.0);
        out.atoms = atoms_from(bx, N + 1, ptr);
        return out;
    }

    struct Pair {
        std::size_t i, j;
        double w;
    };

    std::vector<Pair> feasible_pairs(const Vec& q, const PostSet& S, double need) const {
        std::vector<Pair> out;
        double q1 = q[1];
        for (std::size_t i = 0; i < S.size() && S.a[i][1] < q1; ++i)
            for (std::size_t j = S.size(); j-- > 0 && S.a[j][1] > q1;) {
                double w = (S.a[j][1] - q1) / (S.a[j][1] - S.a[i][1]);
                if (w * S.H[i] + (1 - w) * S.H[j] >= need - 1e-15) out.push_back({i, j, w});
            }
        return out;
    }

    MidEval mid_E_pairs(const Vec& q, double R, double Delta, PostSet& S, bool refine) const {
        MidEval out;
        auto pairs = feasible_pairs(q, S, ent(q) - R);
        if (!(full_support() && Delta <= std::log(static_cast<double>(nx)) + 1e-12)) {
            double hq = hmax_posterior(q, p);
            if (hq < Delta - 1e-12) {
                out.extra = out.rho = kInf;
                out.atoms = {{1.0, q, {}}};
                return out;
            }
            for (auto& pr : pairs)
                if (pr.w * S.hmax[pr.i] + (1 - pr.w) * S.hmax[pr.j] < Delta - 1e-12) {
                    out.extra = out.rho = kInf;
                    out.atoms = {{pr.w, S.a[pr.i], {}}, {1 - pr.w, S.a[pr.j], {}}};
                    return out;
                }
        }
        auto G = [&](double rho, std::vector<Atom>* atoms) {
            const Vec& ps = S.psi_at(rho, p);
            double best = psi_dual(q, rho, p).value;
            const Pair* bp = nullptr;
            for (auto& pr : pairs) {
                double v = pr.w * ps[pr.i] + (1 - pr.w) * ps[pr.j];
                if (v > best) best = v, bp = &pr;
            }
            if (atoms) {
                if (bp)
                    *atoms = {{bp->w, S.a[bp->i], {}}, {1 - bp->w, S.a[bp->j], {}}};
                else
                    *atoms = {{1.0, q, {}}};
            }
            return rho * Delta + best;
        };
        double best = -kInf;
        std::size_t bk = 0;
        for (std::size_t k = 0; k < rhos.size(); ++k) {
            std::vector<Atom> at;
            double v = G(rhos[k], &at);
            if (v > best) best = v, bk = k, out.atoms = std::move(at);
        }
        out.rho = rhos[bk];
        if (refine) {
            Vec w = rho_window(bk);
            double arg;
            double v = golden_max([&](double r) { return G(r, nullptr); }, w[0], w[1], 50, arg);
            if (v > best) {
                best = G(arg, &out.atoms);
                out.rho = arg;
            }
        }
        out.extra = std::max(best, 0.0);
        return out;
    }

    MidEval mid_E_local(const Vec& q, double R, double Delta, int us, bool refine) const {
        MidEval out;
        out.extra = -kInf;
        auto obj = [&](const std::vector<Vec>& ch) {
            auto at = atoms_of(q, ch);
            if (info_of(q, at) > R + 1e-12) return -kInf;
            return rho_max(at, Delta, false).first;
        };
        int starts = std::min(cfg.restarts, refine ? 16 : 4);
        for (int s = 0; s < starts; ++s) {
            std::mt19937_64 r2(cfg.rng_seed + 0x9E3779B97F4A7C15ULL * (s + 1));
            std::vector<Vec> ch = s == 0 ? std::vector<Vec>(ny, Vec(us, 1.0 / us)) : random_channel(us, r2);
            if (obj(ch) == -kInf) continue;
            ch = hill_climb(ch, obj, r2, refine ? 200 : 40);
            double v = obj(ch);
            if (v > out.extra) {
                out.extra = v;
                out.atoms = atoms_of(q, ch);
            }
        }
        if (out.atoms.empty()) out.atoms = {{1.0, q, {}}}, out.extra = rho_max(out.atoms, Delta, false).first;
        auto rm = rho_max(out.atoms, Delta, refine);
        out.extra = std::max(rm.first, 0.0);
        out.rho = rm.second;
        return out;
    }

    std::string e_method(int us) const {
        if (us >= ny + 1) return "lp-posterior-grid";
        if (us == 1) return "constant";
        if (ny == 2 && us == 2) return "pair-enumeration";
        return "local-search";
    }

    MidEval mid_E(const Vec& q, const ProblemSpec& sp, int us, PostSet& S, bool refine) const {
        std::string m = e_method(us);
        if (m == "lp-posterior-grid") return mid_E_lp(q, sp.R, sp.Delta, S, refine);
        if (m == "pair-enumeration") return mid_E_pairs(q, sp.R, sp.Delta, S, refine);
        if (m == "constant") {
            MidEval out;
            out.atoms = {{1.0, q, {}}};
            auto rm = rho_max(out.atoms, sp.Delta, refine);
            out.extra = std::max(rm.first, 0.0);
            out.rho = rm.second;
            return out;
        }
        return mid_E_local(q, sp.R, sp.Delta, us, refine);
    }

    // ------------------------------------------------------------ outer layer
    template <class Eval>
    Vec outer_search(Eval f, double& best, long& evals) const {
        std::vector<Vec> cand;
        for (auto& v : simplex_grid(ny, cfg.outer_grid_resolution))
            if (in_support(v)) cand.push_back(v);
        cand.push_back(py);
        std::vector<std::pair<double, std::size_t>> order;
        for (std::size_t i = 0; i < cand.size(); ++i) order.push_back({kl(Pmf(cand[i]), Pmf(py)), i});
        std::sort(order.begin(), order.end());
        best = kInf;
        Vec arg = py;
        for (auto& [d, i] : order) {
            if (d >= best) break;
            double v = f(cand[i]);
            ++evals;
            if (v < best) best = v, arg = cand[i];
        }
        if (!std::isfinite(best)) return arg;
        for (double step = 1.0 / cfg.outer_grid_resolution; step > 1e-7;) {
            bool moved = false;
            for (auto& v : around(arg, step, 1)) {
                if (!in_support(v)) continue;
                if (kl(Pmf(v), Pmf(py)) >= best) continue;
                double fv = f(v);
                ++evals;
                if (fv < best - 1e-13) {
                    best = fv, arg = v, moved = true;
                    break;
                }
            }
            if (!moved) step *= 0.5;
        }
        return arg;
    }

    ExponentResult e_witness(const Vec& q, const ProblemSpec& sp, int us, const MidEval& m) const {
        ExponentResult res;
        fill_witness(res, q, m.atoms, us, nullptr);
        res.diag.rho = m.rho;
        if (!std::isfinite(m.extra)) {
            res.value = kInf;
            res.diag.feasible = false;
            res.diag.constraint_value = cond_entropy_x_given_u(res.witness);
            return res;
        }
        InnerResult in = inner_min_E(res.outer_q_y, res.middle_q_u_given_y, sp.Delta, model, cfg);
        res.diag.iterations = in.iterations;
        res.diag.converged = in.converged;
        if (!in.feasible) {
            res.value = kInf;
            res.diag.feasible = false;
            return res;
        }
        res.witness = JointXYU::from_factors(res.outer_q_y, res.middle_q_u_given_y, in.q_x_given_yu);
        res.value = std::max(in.value, 0.0);
        res.diag.constraint_value = in.cond_entropy;
        res.diag.rho = in.rho;
        return res;
    }

    int default_us_E() const { return 2 * nx * ny + 2; }
    int default_us_F() const { return nx * ny + 2; }

    ExponentResult error_exponent(const ProblemSpec& sp0) {
        ProblemSpec sp = sp0;
        sp.validate();
        int us = sp.u_size ? sp.u_size : default_us_E();
        long evals = 0;
        double best;
        auto f = [&](const Vec& q) {
            double d = kl(Pmf(q), Pmf(py));
            return d + mid_E(q, sp, us, grid, false).extra;
        };
        Vec q = outer_search(f, best, evals);
        MidEval m;
        if (std::isfinite(best) && us > 1 && e_method(us) != "local-search") {
            MidEval m0 = mid_E(q, sp, us, grid, false);
            PostSet S = refined(grid, m0.atoms);
            m = mid_E(q, sp, us, S, true);
        } else {
            m = mid_E(q, sp, us, grid, true);
        }
        ExponentResult res = e_witness(q, sp, us, m);
        res.diag.evaluations = evals;
        res.diag.method = e_method(us) + "+psi-dual";
        if (std::isfinite(best) && std::isfinite(res.value) && res.value < best - 1e-3)
            res.diag.notes.push_back("witness value below grid search value");
        return res;
    }

    ExponentResult error_exponent_middle(const Vec& q, const ProblemSpec& sp0) {
        ProblemSpec sp = sp0;
        sp.validate();
        int us = sp.u_size ? sp.u_size : default_us_E();
        MidEval m0 = mid_E(q, sp, us, grid, false);
        MidEval m = m0;
        if (std::isfinite(m0.extra) && us > 1 && e_method(us) != "local-search") {
            PostSet S = refined(grid, m0.atoms);
            m = mid_E(q, sp, us, S, true);
        }
        ExponentResult res = e_witness(q, sp, us, m);
        res.diag.method = e_method(us) + "+psi-dual";
        return res;
    }

    // ------------------------------------------------------------ F
    std::vector<FCol> raw_columns(const Vec& a, const std::vector<Vec>& rs) const {
        std::vector<FCol> out;
        for (auto& r : rs) {
            TiltColumn tc = tilt_by(a, r, p);
            if (tc.ok) out.push_back({r, tc.ent, tc.cost});
        }
        return out;
    }

    void build_f() {
        if (fbuilt) return;
        for (auto& a : grid.a) {
            auto raw = raw_columns(a, rgrid);
            fhull.push_back(lower_hull(raw));
            fpareto.push_back(pareto(raw));
        }
        fbuilt = true;
    }

    struct FSet {
        PostSet S;
        std::vector<std::vector<FCol>> hull, par;
        std::vector<Vec> rs;
    };

    std::string f_method(int us) const {
        if (us >= ny + 2) return "lp-tilt-columns";
        if (us == 1) return "constant";
        if (ny == 2 && us == 2) return "pair-enumeration";
        return "local-search";
    }

    // min Sigma w c over per-atom column lists subject to Sigma w h <= Delta (Lagrangian sweep)
    static double choose_columns(const std::vector<double>& w, const std::vector<std::vector<FCol>>& cols,
                                 double Delta, std::vector<const FCol*>& pick) {
        auto at = [&](double nu, double& hs) {
            double cs = 0.0;
            hs = 0.0;
            for (std::size_t u = 0; u < cols.size(); ++u) {
                const FCol* b = nullptr;
                for (auto& cl : cols[u])
                    if (!b || cl.c + nu * cl.h < b->c + nu * b->h) b = &cl;
                if (!b) return kInf;
                pick[u] = b;
                cs += w[u] * b->c;
                hs += w[u] * b->h;
            }
            return cs;
        };
        pick.assign(cols.size(), nullptr);
        double hs;
        double c0 = at(0.0, hs);
        if (!std::isfinite(c0)) return kInf;
        if (hs <= Delta + 1e-15) return c0;
        double lo = 0.0, hi = 1.0;
        while (at(hi, hs), hs > Delta + 1e-15) {
            hi *= 4;
            if (hi > 1e12) return kInf;
        }
        for (int it = 0; it < 100; ++it) {
            double mid = 0.5 * (lo + hi);
            at(mid, hs);
            (hs > Delta + 1e-15 ? lo : hi) = mid;
        }
        return at(hi, hs);
    }

    MidEval mid_F_lp(const Vec& q, double R, double Delta, const FSet& F) const {
        MidEval out;
        out.extra = kInf;
        std::vector<const Vec*> ap, rp;
        std::vector<double> hh, cc, HH;
        auto push = [&](const Vec& a, double Ha, const std::vector<FCol>& cols) {
            for (auto& cl : cols) {
                ap.push_back(&a);
                rp.push_back(&cl.r);
                hh.push_back(cl.h);
                cc.push_back(cl.c);
                HH.push_back(Ha);
            }
        };
        for (std::size_t i = 0; i < F.S.size(); ++i) {
            bool ok = true;
            for (int y = 0; y < ny; ++y)
                if (F.S.a[i][y] > 0 && q[y] <= 0) ok = false;
            if (ok) push(F.S.a[i], F.S.H[i], F.hull[i]);
        }
        auto qcols = lower_hull(raw_columns(q, F.rs));
        push(q, ent(q), qcols);
        const int N = static_cast<int>(ap.size());
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ny + 2, N + 3);
        Eigen::VectorXd b(ny + 2), c = Eigen::VectorXd::Zero(N + 3);
        for (int i = 0; i < N; ++i) {
            for (int y = 0; y < ny; ++y) A(y, i) = (*ap[i])[y];
            A(ny, i) = hh[i];
            A(ny + 1, i) = HH[i];
            c[i] = -cc[i];
        }
        A(ny, N) = 1.0;
        A(ny + 1, N + 1) = 1.0;
        A(ny + 1, N + 2) = -1.0;
        c[N + 1] = -1.0;
        for (int y = 0; y < ny; ++y) b[y] = q[y];
        b[ny] = Delta;
        b[ny + 1] = ent(q) - R;
        LpResult lp = lp_maximize(A, b, c);
        if (!lp.feasible) return out;
        out.extra = std::max(-lp.value, 0.0);
        out.atoms = atoms_from(lp.x, N, ap, rp);
        return out;
    }

    MidEval mid_F_pairs(const Vec& q, double R, double Delta, const FSet& F) const {
        MidEval out;
        out.extra = kInf;
        auto qraw = raw_columns(q, F.rs);
        // single posterior: mixing two columns of a = q
        auto qh = lower_hull(qraw);
        for (std::size_t k = 0; k < qh.size(); ++k) {
            if (qh[k].h <= Delta + 1e-15) {
                if (qh[k].c < out.extra) out.extra = qh[k].c, out.atoms = {{1.0, q, qh[k].r}};
            } else if (k > 0 && qh[k - 1].h <= Delta) {
                double w = (qh[k].h - Delta) / (qh[k].h - qh[k - 1].h);
                double v = w * qh[k - 1].c + (1 - w) * qh[k].c;
                if (v < out.extra) out.extra = v, out.atoms = {{w, q, qh[k - 1].r}, {1 - w, q, qh[k].r}};
            }
        }
        const double Hq = ent(q), q1 = q[1];
        for (std::size_t i = 0; i < F.S.size() && F.S.a[i][1] < q1; ++i) {
            const auto& Pi = F.par[i];
            if (Pi.empty()) continue;
            for (std::size_t j = F.S.size(); j-- > 0 && F.S.a[j][1] > q1;) {
                const auto& Pj = F.par[j];
                if (Pj.empty()) continue;
                double w = (F.S.a[j][1] - q1) / (F.S.a[j][1] - F.S.a[i][1]);
                double hinge = std::max(0.0, Hq - w * F.S.H[i] - (1 - w) * F.S.H[j] - R);
                if (hinge + w * Pi.back().c + (1 - w) * Pj.back().c >= out.extra) continue;
                std::ptrdiff_t k2 = static_cast<std::ptrdiff_t>(Pj.size()) - 1;
                for (std::size_t k1 = 0; k1 < Pi.size(); ++k1) {
                    double thr = (Delta - w * Pi[k1].h) / (1 - w);
                    while (k2 >= 0 && Pj[k2].h > thr + 1e-15) --k2;
                    if (k2 < 0) break;
                    double v = hinge + w * Pi[k1].c + (1 - w) * Pj[k2].c;
                    if (v < out.extra)
                        out.extra = v, out.atoms = {{w, F.S.a[i], Pi[k1].r}, {1 - w, F.S.a[j], Pj[k2].r}};
                }
            }
        }
        return out;
    }

    MidEval mid_F_const(const Vec& q, double Delta, const FSet& F) const {
        MidEval out;
        out.extra = kInf;
        for (auto& cl : raw_columns(q, F.rs))
            if (cl.h <= Delta + 1e-15 && cl.c < out.extra) out.extra = cl.c, out.atoms = {{1.0, q, cl.r}};
        return out;
    }

    MidEval mid_F_local(const Vec& q, double R, double Delta, int us, const FSet& F, bool refine) const {
        MidEval out;
        out.extra = kInf;
        auto eval = [&](const std::vector<Vec>& ch, std::vector<Atom>* atoms) {
            auto at = atoms_of(q, ch);
            std::vector<double> w;
            std::vector<std::vector<FCol>> cols;
            for (auto& a : at) w.push_back(a.w), cols.push_back(pareto(raw_columns(a.a, F.rs)));
            std::vector<const FCol*> pick;
            double c = choose_columns(w, cols, Delta, pick);
            if (!std::isfinite(c)) return kInf;
            if (atoms) {
                for (std::size_t u = 0; u < at.size(); ++u) at[u].r = pick[u]->r;
                *atoms = at;
            }
            return c + std::max(0.0, info_of(q, at) - R);
        };
        int starts = std::min(cfg.restarts, refine ? 8 : 3);
        for (int s = 0; s < starts; ++s) {
            std::mt19937_64 r2(cfg.rng_seed + 0x9E3779B97F4A7C15ULL * (s + 1));
            std::vector<Vec> ch = s == 0 ? std::vector<Vec>(ny, Vec(us, 1.0 / us)) : random_channel(us, r2);
            auto obj = [&](const std::vector<Vec>& c) { return -eval(c, nullptr); };
            ch = hill_climb(ch, obj, r2, refine ? 100 : 20);
            std::vector<Atom> at;
            double v = eval(ch, &at);
            if (v < out.extra) out.extra = v, out.atoms = at;
        }
        return out;
    }

    MidEval mid_F(const Vec& q, const ProblemSpec& sp, int us, const FSet& F, bool refine) const {
        std::string m = f_method(us);
        if (m == "lp-tilt-columns") return mid_F_lp(q, sp.R, sp.Delta, F);
        if (m == "pair-enumeration") return mid_F_pairs(q, sp.R, sp.Delta, F);
        if (m == "constant") return mid_F_const(q, sp.Delta, F);
        return mid_F_local(q, sp.R, sp.Delta, us, F, refine);
    }

    FSet base_fset() {
        build_f();
        FSet F;
        F.S = grid;
        F.S.psi.clear();
        F.hull = fhull;
        F.par = fpareto;
        F.rs = rgrid;
        return F;
    }

    FSet refined_fset(const FSet& F0, const std::vector<Atom>& atoms) const {
        FSet F;
        F.rs = rgrid;
        for (auto& at : atoms)
            if (!at.r.empty())
                for (double step : {1.0 / (tilt_res * 8.0), 1.0 / (tilt_res * 64.0), 1.0 / (tilt_res * 512.0)})
                    for (auto& r : around(at.r, step, 7)) F.rs.push_back(r);
        F.S = refined(F0.S, atoms);
        for (auto& a : F.S.a) {
            auto raw = raw_columns(a, F.rs);
            F.hull.push_back(lower_hull(raw));
            F.par.push_back(pareto(raw));
        }
        return F;
    }

    ExponentResult strong_converse_exponent(const ProblemSpec& sp0) {
        ProblemSpec sp = sp0;
        sp.validate();
        int us = sp.u_size ? sp.u_size : default_us_F();
        FSet F = base_fset();
        long evals = 0;
        double best;
        auto f = [&](const Vec& q) { return kl(Pmf(q), Pmf(py)) + mid_F(q, sp, us, F, false).extra; };
        Vec q = outer_search(f, best, evals);
        ExponentResult res;
        res.diag.method = f_method(us);
        res.diag.evaluations = evals;
        if (!std::isfinite(best)) {
            res.value = kInf;
            res.diag.feasible = false;
            return res;
        }
        MidEval m = mid_F(q, sp, us, F, true);
        if (us > 1 && f_method(us) != "local-search") {
            FSet F2 = refined_fset(F, m.atoms);
            MidEval m2 = mid_F(q, sp, us, F2, true);
            if (m2.extra <= m.extra) m = m2;
        }
        fill_witness(res, q, m.atoms, us, nullptr);
        res.value = sc_objective(res.witness, model, sp.R);
        res.diag.constraint_value = cond_entropy_x_given_u(res.witness);
        res.diag.feasible = res.diag.constraint_value <= sp.Delta + 1e-8;
        return res;
    }
};

// ---------------------------------------------------------------- public API

ExponentSolver::ExponentSolver(SourceModel model, SolverConfig cfg)
    : impl_(std::make_unique<Impl>(std::move(model), std::move(cfg))) {}
ExponentSolver::~ExponentSolver() = default;
ExponentSolver::ExponentSolver(ExponentSolver&&) noexcept = default;
ExponentSolver& ExponentSolver::operator=(ExponentSolver&&) noexcept = default;

const SourceModel& ExponentSolver::model() const { return impl_->model; }
const SolverConfig& ExponentSolver::config() const { return impl_->cfg; }

ExponentResult ExponentSolver::rate_distortion(double Delta, int u_size) {
    require(Delta >= 0 && std::isfinite(Delta), "Delta must be finite and >= 0");
    require(u_size >= 0, "u_size must be >= 1");
    return impl_->rd_result(0, Delta, u_size ? u_size : static_cast<int>(impl_->ny) + 1);
}

ExponentResult ExponentSolver::wak_helper_rate(double B, int u_size) {
    require(B >= 0 && std::isfinite(B), "B must be finite and >= 0");
    require(u_size >= 0, "u_size must be >= 1");
    return impl_->rd_result(1, B, u_size ? u_size : static_cast<int>(impl_->ny) + 1);
}

ExponentResult ExponentSolver::error_exponent(const ProblemSpec& spec) { return impl_->error_exponent(spec); }

ExponentResult ExponentSolver::strong_converse_exponent(const ProblemSpec& spec) {
    return impl_->strong_converse_exponent(spec);
}

ExponentResult ExponentSolver::error_exponent_middle(const Pmf& q_y, const ProblemSpec& spec) {
    require(q_y.size() == impl_->model.ny(), "Q_Y has the wrong size");
    return impl_->error_exponent_middle(q_y.probs(), spec);
}

ExponentResult rate_distortion(const SourceModel& model, double Delta, const SolverConfig& cfg, int u_size) {
    return ExponentSolver(model, cfg).rate_distortion(Delta, u_size);
}

ExponentResult wak_helper_rate(const SourceModel& model, double B, const SolverConfig& cfg, int u_size) {
    return ExponentSolver(model, cfg).wak_helper_rate(B, u_size);
}

ExponentResult error_exponent(const SourceModel& model, const ProblemSpec& spec, const SolverConfig& cfg) {
    return ExponentSolver(model, cfg).error_exponent(spec);
}

ExponentResult strong_converse_exponent(const SourceModel& model, const ProblemSpec& spec, const SolverConfig& cfg) {
    return ExponentSolver(model, cfg).strong_converse_exponent(spec);
}

double positivity_threshold(const SourceModel& model, double Delta, const SolverConfig& cfg) {
    require(Delta >= model.delta_min() - 1e-12, "Delta below H(X|Y)");
    return rate_distortion(model, Delta, cfg).value;
}

}  // namespace ibexp
