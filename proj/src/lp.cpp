#include "ibexp/lp.hpp"

#include <cmath>
#include <limits>

namespace ibexp {

namespace {

struct Simplex {
    const Eigen::MatrixXd& A;  // m x (N + m), artificials last
    Eigen::VectorXd b;
    std::vector<int> basis;
    std::vector<char> in_basis;
    int n_struct;
    int iterations = 0;

    Simplex(const Eigen::MatrixXd& A_, Eigen::VectorXd b_, int nstruct)
        : A(A_), b(std::move(b_)), n_struct(nstruct) {
        int m = static_cast<int>(A.rows());
        basis.resize(m);
        in_basis.assign(A.cols(), 0);
        for (int i = 0; i < m; ++i) {
            basis[i] = nstruct + i;
            in_basis[nstruct + i] = 1;
        }
    }

    Eigen::MatrixXd basis_matrix() const {
        Eigen::MatrixXd B(A.rows(), A.rows());
        for (int i = 0; i < A.rows(); ++i) B.col(i) = A.col(basis[i]);
        return B;
    }

    // returns false when unbounded
    bool run(const Eigen::VectorXd& cost, bool allow_artificial) {
        const int m = static_cast<int>(A.rows());
        const int ncols = allow_artificial ? static_cast<int>(A.cols()) : n_struct;
        const double tol = 1e-10;
        int stall = 0;
        double last_obj = -std::numeric_limits<double>::infinity();
        for (int guard = 0; guard < 50000; ++guard) {
            Eigen::MatrixXd B = basis_matrix();
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
            Eigen::VectorXd xb = lu.solve(b);
            Eigen::VectorXd cb(m);
            for (int i = 0; i < m; ++i) cb[i] = cost[basis[i]];
            double obj = cb.dot(xb);
            if (obj <= last_obj + 1e-13) ++stall; else stall = 0;
            last_obj = obj;
            Eigen::VectorXd y = lu.transpose().solve(cb);
            bool bland = stall > 20;
            int enter = -1;
            double best = tol;
            for (int j = 0; j < ncols; ++j) {
                if (in_basis[j]) continue;
                double d = cost[j] - y.dot(A.col(j));
                if (d > best) {
                    enter = j;
                    if (bland) break;
                    best = d;
                }
            }
            if (enter < 0) return true;
            Eigen::VectorXd dir = lu.solve(A.col(enter));
            int leave = -1;
            double ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                if (dir[i] > 1e-12) {
                    double r = std::max(xb[i], 0.0) / dir[i];
                    if (r < ratio - 1e-14 || (r < ratio + 1e-14 && leave >= 0 && basis[i] < basis[leave])) {
                        ratio = r;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return false;
            in_basis[basis[leave]] = 0;
            basis[leave] = enter;
            in_basis[enter] = 1;
            ++iterations;
        }
        return true;
    }
};

}  // namespace

LpResult lp_maximize(const Eigen::MatrixXd& A0, const Eigen::VectorXd& b0, const Eigen::VectorXd& c,
                     std::vector<int>* warm) {
    const int m = static_cast<int>(A0.rows()), n = static_cast<int>(A0.cols());
    Eigen::MatrixXd A(m, n + m);
    Eigen::VectorXd b = b0;
    A.leftCols(n) = A0;
    A.rightCols(m).setIdentity();
    for (int i = 0; i < m; ++i)
        if (b[i] < 0) {
            b[i] = -b[i];
            A.row(i).head(n) *= -1.0;
        }
    Simplex s(A, b, n);
    LpResult res;
    if (warm && static_cast<int>(warm->size()) == m) {
        Simplex w(A, b, n);
        std::fill(w.in_basis.begin(), w.in_basis.end(), 0);
        bool ok = true;
        for (int i = 0; i < m && ok; ++i) {
            int j = (*warm)[i];
            if (j < 0 || j >= n || w.in_basis[j]) ok = false;
            else w.basis[i] = j, w.in_basis[j] = 1;
        }
        if (ok) {
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(w.basis_matrix());
            ok = std::fabs(lu.determinant()) > 1e-12;
            if (ok) {
                Eigen::VectorXd xb = lu.solve(b);
                ok = xb.minCoeff() > -1e-11 && (w.basis_matrix() * xb - b).cwiseAbs().maxCoeff() < 1e-9;
            }
        }
        if (ok) {
            Eigen::VectorXd c2 = Eigen::VectorXd::Zero(n + m);
            c2.head(n) = c;
            res.bounded = w.run(c2, false);
            res.feasible = true;
            res.iterations = w.iterations;
            Eigen::VectorXd xb = w.basis_matrix().partialPivLu().solve(b);
            res.x = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < m; ++i) res.x[w.basis[i]] = std::max(xb[i], 0.0);
            res.value = c.dot(res.x);
            *warm = w.basis;
            return res;
        }
    }
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n + m);
    c1.tail(m).setConstant(-1.0);
    s.run(c1, true);

    Eigen::VectorXd xb = s.basis_matrix().partialPivLu().solve(b);
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
        if (s.basis[i] >= n) infeas += std::max(xb[i], 0.0);
    if (infeas > 1e-8 * (1.0 + b.cwiseAbs().sum())) {
        res.iterations = s.iterations;
        return res;
    }
    // drive zero-level artificials out where a structural column can replace them
    for (int i = 0; i < m; ++i) {
        if (s.basis[i] < n) continue;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(s.basis_matrix());
        for (int j = 0; j < n; ++j) {
            if (s.in_basis[j]) continue;
            Eigen::VectorXd d = lu.solve(A.col(j));
            if (std::fabs(d[i]) > 1e-9) {
                s.in_basis[s.basis[i]] = 0;
                s.basis[i] = j;
                s.in_basis[j] = 1;
                break;
            }
        }
    }
    Eigen::VectorXd c2 = Eigen::VectorXd::Zero(n + m);
    c2.head(n) = c;
    res.bounded = s.run(c2, false);
    res.feasible = true;
    res.iterations = s.iterations;
    xb = s.basis_matrix().partialPivLu().solve(b);
    res.x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i)
        if (s.basis[i] < n) res.x[s.basis[i]] = std::max(xb[i], 0.0);
    res.value = c.dot(res.x);
    if (warm) {
        warm->clear();
        bool all = true;
        for (int i = 0; i < m; ++i) all = all && s.basis[i] < n;
        if (all) *warm = s.basis;
    }
    return res;
}

}  // namespace ibexp
