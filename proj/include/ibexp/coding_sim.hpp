#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ibexp/exponents.hpp"
#include "ibexp/types.hpp"

namespace ibexp {

enum class SchemeVariant { Error, StrongConverse };

// sequences are indexed base-k with the first symbol most significant
std::uint64_t seq_index(const Seq& s, int k);
Seq seq_from_index(std::uint64_t idx, int n, int k);
std::uint64_t checked_pow(int base, int n, std::uint64_t cap);  // throws SizeCapExceeded above cap

// floor(e^{n*Delta}) with 1e-12 relative slack for round-off in Delta
BigInt list_cap(int n, double Delta);

double log_loss(const Seq& x, const std::vector<Seq>& list);
double log_loss(bool member, const BigInt& list_size, int n);

struct TypeBlock {
    TypeVector q_y;
    CondTypeMatrix q_u_given_y;  // n_in = |Y|, n_out = |U|
    std::vector<Seq> codewords;
    int first_message = 0;       // message id of codewords[0]
    std::vector<int> message;    // per codeword; 0 when routed to overflow
    BigInt list_size = 0;        // identical for every codeword of the block
    double objective = 0.0;      // single-letter value that selected q_u_given_y
};

struct CodingScheme {
    int n = 0, nx = 0, ny = 0, nu = 0;
    double rate_R = 0.0, delta = 0.0, epsilon = 0.0;
    SchemeVariant variant = SchemeVariant::Error;
    std::vector<TypeBlock> blocks;
    std::map<std::vector<int>, int> block_of;  // y type counts -> block
    std::vector<int> table;                    // y index -> message, when |Y|^n is small
    int messages = 0;                          // largest message id in use

    int encode(const Seq& y) const;
    // membership of x in the list of message m (0 is the overflow symbol with an empty list)
    bool in_list(int m, const Seq& x) const;
    const TypeBlock* block_for_message(int m, int* codeword) const;
    BigInt max_list_size() const;
};

// epsilon unset: 2(|X||U|+1)ln(n+1)/n
CodingScheme build_achievability_scheme(const SourceModel& model, int n, double R, double Delta,
                                        std::optional<double> epsilon, SchemeVariant variant, int u_size = 2);

struct TypeBreakdown {
    std::vector<int> y_type;
    double mass = 0.0;
    double error_mass = 0.0;
};

struct SlopePoint {
    int n = 0;
    double p_e = 0.0;
    double stderr_ = 0.0;
    double minus_log_pe_over_n = 0.0;
    bool dropped = false;
};

struct SimReport {
    double p_e = 0.0;
    double stderr_ = 0.0;
    bool exact = true;
    long long samples = 0;
    std::vector<TypeBreakdown> per_type;
    std::vector<SlopePoint> slope_data;
    double slope = 0.0;
    double slope_stderr = 0.0;
    std::vector<std::string> flags;
};

SimReport exact_excess_prob(const CodingScheme& scheme, const SourceModel& model);
SimReport mc_excess_prob(const CodingScheme& scheme, const SourceModel& model, long long samples, std::uint64_t seed);

struct OptimalDecoder {
    std::vector<std::vector<std::uint64_t>> lists;  // per message, x indices
    double p_e = 0.0;
};

// encoder: y index -> message label in [0, M); every label is decoded, none is reserved
OptimalDecoder optimal_decoder(const std::vector<int>& encoder, const SourceModel& model, int n, double Delta);
SimReport optimal_decoder_excess_prob(const std::vector<int>& encoder, const SourceModel& model, int n, double Delta);

double brute_force_optimal_pe(const SourceModel& model, int n, double R, double Delta);

// least-squares slope of -log p_e against n over the undropped points
void fit_exponent_slope(SimReport& rep);
// samples <= 0 evaluates each n exactly
SimReport empirical_exponent_slope(const SourceModel& model, double R, double Delta, std::optional<double> epsilon,
                                   const std::vector<int>& n_list, long long samples, std::uint64_t seed,
                                   SchemeVariant variant = SchemeVariant::Error, int u_size = 2);

struct IdentityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double diff = 0.0;
    double divergence = 0.0;   // D(Q_{XYV} || P_XY Q_{V|Y}), V = (J, U_J)
    double info = 0.0;         // I(Y_J; U_J, J)
    double msg_entropy = 0.0;  // H(M)/n
    double rate = 0.0;         // log(#labels)/n
    bool bound_plain = false;  // lhs >= divergence
    bool bound_rate = false;   // lhs >= divergence + |info - rate|^+
};

// q_joint: pmf over (x^n, y^n), index x_idx * |Y|^n + y_idx; encoder: y index -> message
IdentityReport verify_single_letter_identity(const std::vector<double>& q_joint, const std::vector<int>& encoder,
                                             const SourceModel& model, int n);

struct IdentityFixture {
    std::vector<double> q_joint;
    std::vector<int> encoder;
};

// q with i.i.d. exponential weights (non-product almost surely), encoder uniform over labels
IdentityFixture random_identity_fixture(const SourceModel& model, int n, int labels, std::uint64_t seed);

}  // namespace ibexp
