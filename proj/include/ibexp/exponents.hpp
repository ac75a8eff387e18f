#pragma once
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "ibexp/prob.hpp"

namespace ibexp {

class SourceModel {
public:
    SourceModel() = default;
    explicit SourceModel(JointXY p_xy);

    const JointXY& p_xy() const { return p_xy_; }
    const Pmf& p_x() const { return p_x_; }
    const Pmf& p_y() const { return p_y_; }
    const CondPmf& p_x_given_y() const { return p_x_given_y_; }
    std::size_t nx() const { return p_xy_.nx(); }
    std::size_t ny() const { return p_xy_.ny(); }
    double delta_min() const;  // H(X|Y)
    bool lossless() const;     // P{X=Y}=1

private:
    JointXY p_xy_;
    Pmf p_x_, p_y_;
    CondPmf p_x_given_y_;
};

struct ProblemSpec {
    double R = 0.0;
    double Delta = 0.0;
    int u_size = 0;  // 0 selects the cardinality default of the quantity being solved
    void validate() const;
};

struct SolverConfig {
    int outer_grid_resolution = 40;
    int restarts = 64;
    std::uint64_t rng_seed = 1;
    double fixed_point_tol = 1e-13;
    int fixed_point_max_iters = 20000;
    double rho_bisection_tol = 1e-11;
    double damping = 1.0;
    std::vector<double> penalty_schedule{1.0, 10.0, 100.0, 1000.0, 1e4};
    int posterior_resolution = 0;  // 0 = automatic by |Y|
    int tilt_resolution = 0;       // 0 = automatic by |X|
    void validate() const;
};

struct Diagnostics {
    int iterations = 0;
    int restarts_used = 0;
    int evaluations = 0;
    bool converged = true;
    bool feasible = true;
    double constraint_value = std::numeric_limits<double>::quiet_NaN();
    double oracle_gap = std::numeric_limits<double>::quiet_NaN();
    double rho = std::numeric_limits<double>::quiet_NaN();
    std::string method;
    std::vector<std::string> notes;
};

struct ExponentResult {
    double value = kInf;
    bool has_witness = false;
    JointXYU witness;
    Pmf outer_q_y;
    CondPmf middle_q_u_given_y;
    Diagnostics diag;
};

enum class InnerMethod { FixedPoint, ProjectedGradient };

struct InnerResult {
    double value = kInf;
    bool feasible = false;
    bool converged = true;
    double rho = 0.0;
    double cond_entropy = 0.0;  // H_Q(X|U) at the witness
    int iterations = 0;
    CondPmf q_x_given_yu;      // rows y*nu+u
};

// min over Q_{X|YU} with H_Q(X|U) >= Delta of D(Q_XYU || P_XY Q_{U|Y})
InnerResult inner_min_E(const Pmf& q_y, const CondPmf& q_u_given_y, double Delta, const SourceModel& model,
                        const SolverConfig& cfg = {}, InnerMethod method = InnerMethod::FixedPoint);

double error_exponent_lossless(const Pmf& p_x, double R, double Delta);
double sc_exponent_lossless(const Pmf& p_x, double R, double Delta, int resolution = 10000);

// keeps per-model caches (posterior grids, tilt columns) across repeated solves
class ExponentSolver {
public:
    explicit ExponentSolver(SourceModel model, SolverConfig cfg = {});
    ~ExponentSolver();
    ExponentSolver(ExponentSolver&&) noexcept;
    ExponentSolver& operator=(ExponentSolver&&) noexcept;

    const SourceModel& model() const;
    const SolverConfig& config() const;

    ExponentResult rate_distortion(double Delta, int u_size = 0);
    ExponentResult wak_helper_rate(double B, int u_size = 0);
    ExponentResult error_exponent(const ProblemSpec& spec);
    ExponentResult strong_converse_exponent(const ProblemSpec& spec);
    // middle value of E maximized over Q_{U|Y} for a fixed Q_Y
    ExponentResult error_exponent_middle(const Pmf& q_y, const ProblemSpec& spec);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

ExponentResult rate_distortion(const SourceModel& model, double Delta, const SolverConfig& cfg = {}, int u_size = 0);
ExponentResult wak_helper_rate(const SourceModel& model, double B, const SolverConfig& cfg = {}, int u_size = 0);
ExponentResult error_exponent(const SourceModel& model, const ProblemSpec& spec, const SolverConfig& cfg = {});
ExponentResult strong_converse_exponent(const SourceModel& model, const ProblemSpec& spec,
                                        const SolverConfig& cfg = {});
double positivity_threshold(const SourceModel& model, double Delta, const SolverConfig& cfg = {});

enum class OracleKind { E, F, RD, RH };

struct OracleResult {
    double value = kInf;
    double granularity = 0.0;
    long long evaluations = 0;
    bool used_hint = false;
};

// exhaustive rational grid (denominator grid_k); RH reads the helper rate B from spec.R
OracleResult brute_force_exponent_oracle(const SourceModel& model, const ProblemSpec& spec, OracleKind kind,
                                         int grid_k, double upper_hint = kInf);

// re-evaluates D(Q||P Q_{U|Y}) + |I_Q(Y;U) - R|^+
double sc_objective(const JointXYU& q, const SourceModel& model, double R);

}  // namespace ibexp
