#pragma once
#include <cstdint>
#include <vector>

#include "ibexp/coding_sim.hpp"
#include "ibexp/exponents.hpp"

namespace ibexp {

// labels are 0-based; sequences are base-k indices (first symbol most significant)
struct HelperBothSidesCode {
    int n = 0, nx = 0, ny = 0;
    int helper_labels = 1;
    int messages = 1;
    std::vector<int> helper;          // y index -> l
    std::vector<int> tx;              // x index * helper_labels + l -> m
    std::vector<std::uint64_t> dec;   // m * helper_labels + l -> x index

    void validate() const;
};

struct IbCode {
    int n = 0, nx = 0, ny = 0;
    int labels = 1;
    std::uint64_t list_cap = 1;
    std::vector<int> encoder;                       // y index -> l
    std::vector<std::vector<std::uint64_t>> lists;  // per l, distinct x indices

    void validate() const;
};

IbCode helper_to_ib(const HelperBothSidesCode& code);
// model given: labels within a list follow posterior-descending then lexicographic order
HelperBothSidesCode ib_to_helper(const IbCode& code, const SourceModel* model = nullptr);

// P{decoded x != x}
double helper_error(const HelperBothSidesCode& code, const SourceModel& model);
// P{x not in list}
double ib_error(const IbCode& code, const SourceModel& model);

// top-posterior lists for the helper map (optimal IB code for that encoder)
IbCode optimal_ib_code(const std::vector<int>& encoder, int labels, const SourceModel& model, int n, double R);

// transmitter that ignores the helper, embedded as a helper-both-sides code
HelperBothSidesCode embed_wak(int n, int nx, int ny, int helper_labels, int messages, const std::vector<int>& helper,
                              const std::vector<int>& tx_x_only, const std::vector<std::uint64_t>& dec);

struct EquivalenceReport {
    long long codes_checked = 0;
    double max_discrepancy = 0.0;        // over exact-equality checks
    double max_dominance_violation = 0.0; // ib_error(helper_to_ib(c)) - helper_error(c), must be <= 0
    bool exhaustive = false;
    bool ok = false;
};

// trials <= 0 at n = 1 enumerates the complete code space
EquivalenceReport verify_equivalence(const SourceModel& model, int n, double R, double B, int trials,
                                     std::uint64_t seed);

}  // namespace ibexp
