#pragma once
#include <cstddef>
#include <limits>
#include <vector>

#include "ibexp/errors.hpp"

namespace ibexp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// x*log(x) with 0 log 0 = 0
double xlogx(double x);

class Pmf {
public:
    Pmf() = default;
    explicit Pmf(std::vector<double> probs);

    static Pmf uniform(std::size_t k);
    static Pmf point(std::size_t k, std::size_t at);

    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    const std::vector<double>& probs() const { return p_; }

private:
    std::vector<double> p_;
};

// stochastic matrix, rows indexed by the conditioning symbol
class CondPmf {
public:
    CondPmf() = default;
    CondPmf(std::size_t n_in, std::size_t n_out, std::vector<double> flat);
    explicit CondPmf(const std::vector<Pmf>& rows);

    std::size_t n_in() const { return nin_; }
    std::size_t n_out() const { return nout_; }
    double operator()(std::size_t in, std::size_t out) const { return m_[in * nout_ + out]; }
    Pmf row(std::size_t in) const;
    const std::vector<double>& flat() const { return m_; }

private:
    std::size_t nin_ = 0, nout_ = 0;
    std::vector<double> m_;
};

class JointXY {
public:
    JointXY() = default;
    JointXY(std::size_t nx, std::size_t ny, std::vector<double> flat);
    static JointXY from_factors(const Pmf& p_y, const CondPmf& p_x_given_y);

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    double operator()(std::size_t x, std::size_t y) const { return p_[x * ny_ + y]; }
    const std::vector<double>& flat() const { return p_; }

    Pmf p_x() const;
    Pmf p_y() const;
    CondPmf p_x_given_y() const;
    CondPmf p_y_given_x() const;

private:
    std::size_t nx_ = 0, ny_ = 0;
    std::vector<double> p_;
};

class JointXYU {
public:
    JointXYU() = default;
    JointXYU(std::size_t nx, std::size_t ny, std::size_t nu, std::vector<double> flat);
    // Q_Y Q_{U|Y} Q_{X|YU}; q_x_given_yu rows indexed by y*nu+u
    static JointXYU from_factors(const Pmf& q_y, const CondPmf& q_u_given_y, const CondPmf& q_x_given_yu);

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t nu() const { return nu_; }
    double operator()(std::size_t x, std::size_t y, std::size_t u) const {
        return p_[(x * ny_ + y) * nu_ + u];
    }
    const std::vector<double>& flat() const { return p_; }

    Pmf q_y() const;
    Pmf q_u() const;
    JointXY q_xy() const;
    std::vector<double> q_yu() const;  // flat y*nu+u
    std::vector<double> q_xu() const;  // flat x*nu+u
    CondPmf q_u_given_y() const;
    CondPmf q_x_given_yu() const;

private:
    std::size_t nx_ = 0, ny_ = 0, nu_ = 0;
    std::vector<double> p_;
};

double entropy(const Pmf& p);
double entropy(const std::vector<double>& masses);
double kl(const Pmf& q, const Pmf& p);
double kl(const std::vector<double>& q, const std::vector<double>& p);

double joint_divergence(const JointXYU& q, const JointXY& p_xy);
double joint_divergence_decomposed(const JointXYU& q, const JointXY& p_xy);

double mutual_info_yu(const JointXYU& q);
double cond_mutual_info_xu_given_y(const JointXYU& q);
double cond_entropy_x_given_u(const JointXYU& q);
double entropy_y(const JointXYU& q);
double mutual_info_x_yu(const JointXYU& q);
double mutual_info_xy(const JointXY& p);
double cond_entropy_x_given_y(const JointXY& p);

// E[log G(X)] with G the rank in decreasing probability order, ties by index
double expected_log_rank(const Pmf& p);
std::vector<std::size_t> probability_rank(const Pmf& p);

// P{X > a} and the bound (E[X]-a)/(d-a) for an empirical sample bounded by d
struct ReverseMarkov {
    double tail;
    double bound;
};
ReverseMarkov reverse_markov(const std::vector<double>& sample, double a, double d);

}  // namespace ibexp
