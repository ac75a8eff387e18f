#pragma once
#include <vector>

#include "ibexp/exponents.hpp"

namespace ibexp::detail {

using Vec = std::vector<double>;

std::vector<Vec> simplex_grid(int k, int r);
double ent(const Vec& p);
double binary_entropy(double q);
double binary_kl(double q, double p);

// model rows p_y(x) stored as rows[y][x]
using Rows = std::vector<Vec>;
Rows channel_rows(const CondPmf& p_x_given_y);

// min over q_y of sum a_y D(q_y||p_y) - rho h(sum a_y q_y), solved in its dual
struct Psi {
    double value = 0.0;  // cost - rho * ent
    double cost = 0.0;
    double ent = 0.0;    // h(t)
    Vec t;
    Vec theta;
};
Psi psi_dual(const Vec& a, double rho, const Rows& p);

// max over q_y << p_y of h(sum a_y q_y)
double hmax_posterior(const Vec& a, const Rows& p);

// q_y proportional to p_y * r, mixture t = sum a_y q_y
struct TiltColumn {
    bool ok = false;
    double cost = 0.0;
    double ent = 0.0;
    Vec t;
    std::vector<Vec> q;
};
TiltColumn tilt_by(const Vec& a, const Vec& r, const Rows& p);

// min sum a_y D(q_y||p_y) subject to sum a_y q_y = target (binary X handles boundary targets)
TiltColumn tilt_to_target(const Vec& a, const Vec& target, const Rows& p);

}  // namespace ibexp::detail
