#pragma once
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <vector>

#include "ibexp/prob.hpp"

namespace ibexp {

using BigInt = boost::multiprecision::cpp_int;
using Seq = std::vector<int>;

double log_big(const BigInt& v);  // -inf for 0
double to_double(const BigInt& v);

struct TypeVector {
    std::vector<int> counts;
    int n = 0;

    TypeVector() = default;
    explicit TypeVector(std::vector<int> c);
    std::size_t k() const { return counts.size(); }
    std::vector<double> freqs() const;
    bool operator==(const TypeVector& o) const { return counts == o.counts; }
};

// rows indexed by the conditioning symbol, row sums = base counts
struct CondTypeMatrix {
    int n_in = 0, n_out = 0;
    std::vector<int> counts;

    CondTypeMatrix() = default;
    CondTypeMatrix(int n_in, int n_out, std::vector<int> c);
    int operator()(int a, int b) const { return counts[a * n_out + b]; }
    TypeVector base() const;
    TypeVector out_type() const;
    int n() const;
    bool operator==(const CondTypeMatrix& o) const { return n_in == o.n_in && counts == o.counts; }
};

struct JointType3 {
    int nx = 0, ny = 0, nu = 0;
    std::vector<int> counts;  // (x*ny+y)*nu+u
    int operator()(int x, int y, int u) const { return counts[(x * ny + y) * nu + u]; }
};

TypeVector type_of(const Seq& seq, int alphabet);
CondTypeMatrix cond_type_of(const Seq& a, int ka, const Seq& b, int kb);

BigInt multinomial(const std::vector<int>& parts);
BigInt type_class_size(const TypeVector& t);
BigInt cond_type_class_size(const CondTypeMatrix& c);
BigInt binomial(int n, int k);

// restartable stream of types, first coordinate descending
class TypeEnumerator {
public:
    TypeEnumerator(int n, int k);
    bool next(TypeVector& out);
    void reset();

private:
    int n_, k_;
    std::vector<int> cur_;
    bool started_ = false, done_ = false;
};

class CondTypeEnumerator {
public:
    CondTypeEnumerator(const TypeVector& base, int out_k);
    bool next(CondTypeMatrix& out);
    void reset();

private:
    TypeVector base_;
    int out_k_;
    std::vector<TypeEnumerator> rows_;
    std::vector<TypeVector> cur_;
    bool started_ = false, done_ = false;
};

std::vector<TypeVector> enumerate_types(int n, int k);
std::vector<CondTypeMatrix> enumerate_cond_types(const TypeVector& base, int out_k);

double seq_log_prob(const TypeVector& t, const Pmf& model);
double seq_log_prob(const CondTypeMatrix& c, const CondPmf& model);

// all sequences of a type class, ascending lexicographic
std::vector<Seq> type_class_members(const TypeVector& t, std::size_t cap);

struct IntersectionResult {
    double log_size = -kInf;
    BigInt size = 0;
    std::optional<JointType3> witness;  // consistent joint type with the largest term
    double max_term_log = -kInf;         // log of the largest single product of multinomials
    double max_entropy_log = -kInf;      // n*max H_Q(Y|XU) over consistent joint types
    std::size_t joint_types = 0;
};

// |T(Q_{Y|X}|x) ∩ T(Q_{Y|U}|u)| given the joint counts N_xu of (x,u)
// n_xu: nx*nu, n_xy: nx*ny (row sums = x counts), n_uy: nu*ny (row sums = u counts)
IntersectionResult intersection_class_log_size(int nx, int ny, int nu, const std::vector<int>& n_xu,
                                               const std::vector<int>& n_xy, const std::vector<int>& n_uy);

struct CondClassProb {
    double log_prob = -kInf;        // exact log P^n_{Y|X}[T(Q_{Y|U}|u) | x]
    double single_letter = kInf;    // min D(Q_{Y|XU} || P_{Y|X} | P̂_xu) over the marginal constraints
    int n = 0;
    std::size_t joint_types = 0;
    double exponent() const { return n > 0 ? -log_prob / n : kInf; }
};

// n_xu: joint counts of the conditioning pair (nx*nu); n_uy: target conditional type of y given u (nu*ny)
CondClassProb cond_class_log_prob(int nx, int ny, int nu, const std::vector<int>& n_xu,
                                  const std::vector<int>& n_uy, const CondPmf& channel_y_given_x);

struct CoverResult {
    std::vector<Seq> codewords;
    BigInt universe = 0;      // |T_n(Q_Y)|
    double log_bound = 0.0;   // log of (n+1)^c e^{nI}
    double mutual_info = 0.0; // I(Q_Y, Q_{U|Y}) of the target joint type
    bool degenerate = false;
};

// q_u_given_y: conditional counts over (y, u), base = q_y
CoverResult greedy_type_cover(const TypeVector& q_y, const CondTypeMatrix& q_u_given_y,
                              std::size_t cap = 20000000);
bool verify_cover(const TypeVector& q_y, const CondTypeMatrix& q_u_given_y, const std::vector<Seq>& codewords,
                  std::size_t cap = 1000000);

}  // namespace ibexp
