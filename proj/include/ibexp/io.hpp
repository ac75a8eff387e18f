#pragma once
#include <string>
#include <vector>

#include "json.hpp"

#include "ibexp/coding_sim.hpp"
#include "ibexp/exponents.hpp"
#include "ibexp/wak_bridge.hpp"

namespace ibexp::io {

using Json = nlohmann::ordered_json;

// {"alphabet_sizes": [nx, ny(, nu)], "probs": [...]}, probs row-major over (x, y)
SourceModel model_from_json(const Json& j);
Json model_to_json(const SourceModel& m);
// third alphabet size of a model document, 0 when absent
int model_u_size(const Json& j);

// path to a JSON file, or the JSON text itself when it starts with '{'
Json load_json(const std::string& path_or_inline);

struct ProblemInput {
    SourceModel model;
    ProblemSpec spec;
    SolverConfig cfg;
    bool has_R = false, has_Delta = false;
};

// {"model": ..., "R": .., "Delta": .., "u_size": .., "solver": {...}}
ProblemInput problem_from_json(const Json& j);
void apply_solver_json(SolverConfig& cfg, const Json& j);
Json solver_to_json(const SolverConfig& cfg);

// scale multiplies every information quantity (1 for nats, 1/ln2 for bits)
Json result_to_json(const ExponentResult& r, double scale = 1.0);
Json witness_to_json(const ExponentResult& r);
std::string witness_hash(const ExponentResult& r);
std::string diagnostics_field(const Diagnostics& d);

Json scheme_to_json(const CodingScheme& s);
Json sim_report_to_json(const SimReport& r, double scale = 1.0);
Json identity_report_to_json(const IdentityReport& r);
Json equivalence_report_to_json(const EquivalenceReport& r);

Json helper_code_to_json(const HelperBothSidesCode& c);
HelperBothSidesCode helper_code_from_json(const Json& j);
Json ib_code_to_json(const IbCode& c);
IbCode ib_code_from_json(const Json& j);

// shortest round-tripping decimal, "inf" / "-inf" / "nan" for non-finite values
std::string fmt(double v);
double parse_double(const std::string& s);

std::string csv_row(const std::vector<std::string>& fields);
std::vector<std::string> split_csv(const std::string& line);

// "a,b,c" or "start:stop:count"; non-empty and strictly increasing
std::vector<double> parse_grid(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

}  // namespace ibexp::io
