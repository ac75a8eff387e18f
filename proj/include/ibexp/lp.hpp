#pragma once
#include <Eigen/Dense>
#include <vector>

namespace ibexp {

struct LpResult {
    bool feasible = false;
    bool bounded = true;
    double value = 0.0;
    Eigen::VectorXd x;
    int iterations = 0;
};

// maximize c.x subject to A x = b, x >= 0; dense two-phase revised simplex for few rows.
// warm: optional starting basis (skips phase one when feasible), overwritten with the final basis
LpResult lp_maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                     std::vector<int>* warm = nullptr);

}  // namespace ibexp
