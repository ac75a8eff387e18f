#include "ibexp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ibexp/errors.hpp"

namespace ibexp::io {

namespace {

Json parse_text(const std::string& text, const std::string& where) {
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw InvalidInput(where + ": " + e.what());
    }
}

template <class T>
T get(const Json& j, const char* key) {
    require(j.contains(key), std::string("missing field \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw InvalidInput(std::string("field \"") + key + "\" has the wrong type");
    }
}

double num(const Json& j, const char* key) {
    const Json& v = j.at(key);
    if (v.is_string()) return parse_double(v.get<std::string>());
    require(v.is_number(), std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
}

Json number(double v) {
    if (std::isfinite(v)) return v;
    return fmt(v);
}

}  // namespace

SourceModel model_from_json(const Json& j) {
    require(j.is_object(), "model must be a JSON object");
    auto sizes = get<std::vector<long long>>(j, "alphabet_sizes");
    require(sizes.size() == 2 || sizes.size() == 3, "alphabet_sizes must have 2 or 3 entries");
    for (auto s : sizes) require(s >= 1 && s <= 64, "alphabet sizes must lie in [1, 64]");
    auto probs = get<std::vector<double>>(j, "probs");
    for (double p : probs) require(std::isfinite(p) && p >= 0, "probs must be finite and >= 0");
    return SourceModel(JointXY(sizes[0], sizes[1], std::move(probs)));
}

Json model_to_json(const SourceModel& m) {
    Json j;
    j["alphabet_sizes"] = {m.nx(), m.ny()};
    j["probs"] = m.p_xy().flat();
    return j;
}

int model_u_size(const Json& j) {
    if (!j.is_object() || !j.contains("alphabet_sizes")) return 0;
    auto sizes = get<std::vector<long long>>(j, "alphabet_sizes");
    return sizes.size() == 3 ? static_cast<int>(sizes[2]) : 0;
}

Json load_json(const std::string& path_or_inline) {
    std::size_t k = path_or_inline.find_first_not_of(" \t\r\n");
    if (k != std::string::npos && path_or_inline[k] == '{') return parse_text(path_or_inline, "inline JSON");
    std::ifstream in(path_or_inline);
    require(static_cast<bool>(in), "cannot open " + path_or_inline);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path_or_inline);
}

void apply_solver_json(SolverConfig& cfg, const Json& j) {
    require(j.is_object(), "solver must be a JSON object");
    for (auto& [k, v] : j.items()) {
        try {
            if (k == "outer_grid_resolution") cfg.outer_grid_resolution = v.get<int>();
            else if (k == "restarts") cfg.restarts = v.get<int>();
            else if (k == "rng_seed") cfg.rng_seed = v.get<std::uint64_t>();
            else if (k == "fixed_point_tol") cfg.fixed_point_tol = v.get<double>();
            else if (k == "fixed_point_max_iters") cfg.fixed_point_max_iters = v.get<int>();
            else if (k == "rho_bisection_tol") cfg.rho_bisection_tol = v.get<double>();
            else if (k == "damping") cfg.damping = v.get<double>();
            else if (k == "penalty_schedule") cfg.penalty_schedule = v.get<std::vector<double>>();
            else if (k == "posterior_resolution") cfg.posterior_resolution = v.get<int>();
            else if (k == "tilt_resolution") cfg.tilt_resolution = v.get<int>();
            else throw InvalidInput("unknown solver field \"" + k + "\"");
        } catch (const Json::exception&) {
            throw InvalidInput("solver field \"" + k + "\" has the wrong type");
        }
    }
    cfg.validate();
}

Json solver_to_json(const SolverConfig& c) {
    Json j;
    j["outer_grid_resolution"] = c.outer_grid_resolution;
    j["restarts"] = c.restarts;
    j["rng_seed"] = c.rng_seed;
    j["fixed_point_tol"] = c.fixed_point_tol;
    j["fixed_point_max_iters"] = c.fixed_point_max_iters;
    j["rho_bisection_tol"] = c.rho_bisection_tol;
    j["damping"] = c.damping;
    j["penalty_schedule"] = c.penalty_schedule;
    j["posterior_resolution"] = c.posterior_resolution;
    j["tilt_resolution"] = c.tilt_resolution;
    return j;
}

ProblemInput problem_from_json(const Json& j) {
    require(j.is_object(), "problem must be a JSON object");
    ProblemInput p;
    require(j.contains("model"), "missing field \"model\"");
    p.model = model_from_json(j.at("model"));
    p.spec.u_size = model_u_size(j.at("model"));
    if (j.contains("R")) p.spec.R = num(j, "R"), p.has_R = true;
    if (j.contains("Delta")) p.spec.Delta = num(j, "Delta"), p.has_Delta = true;
    if (j.contains("u_size")) p.spec.u_size = get<int>(j, "u_size");
    if (j.contains("solver")) apply_solver_json(p.cfg, j.at("solver"));
    return p;
}

Json witness_to_json(const ExponentResult& r) {
    if (!r.has_witness) return nullptr;
    Json w;
    w["alphabet_sizes"] = {r.witness.nx(), r.witness.ny(), r.witness.nu()};
    w["q_xyu"] = r.witness.flat();
    w["q_y"] = r.outer_q_y.probs();
    w["q_u_given_y"] = r.middle_q_u_given_y.flat();
    return w;
}

std::string witness_hash(const ExponentResult& r) {
    if (!r.has_witness) return "none";
    // FNV-1a over the witness rounded to 9 digits
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&](const std::string& s) {
        for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
    };
    char buf[32];
    for (double v : r.witness.flat()) {
        std::snprintf(buf, sizeof buf, "%.9f;", v);
        feed(buf);
    }
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string diagnostics_field(const Diagnostics& d) {
    std::string s = "method=" + d.method + ";iterations=" + std::to_string(d.iterations) +
                    ";evaluations=" + std::to_string(d.evaluations) + ";converged=" + (d.converged ? "1" : "0") +
                    ";feasible=" + (d.feasible ? "1" : "0");
    for (auto& n : d.notes) s += ";note=" + n;
    for (auto& c : s)
        if (c == ',' || c == '\n' || c == '"') c = ' ';
    return s;
}

Json result_to_json(const ExponentResult& r, double scale) {
    Json j;
    j["value_nats"] = number(r.value * scale);
    j["witness"] = witness_to_json(r);
    Json d;
    d["method"] = r.diag.method;
    d["iterations"] = r.diag.iterations;
    d["restarts_used"] = r.diag.restarts_used;
    d["evaluations"] = r.diag.evaluations;
    d["converged"] = r.diag.converged;
    d["feasible"] = r.diag.feasible;
    d["constraint_value"] = std::isnan(r.diag.constraint_value) ? Json(nullptr) : number(r.diag.constraint_value);
    d["rho"] = std::isnan(r.diag.rho) ? Json(nullptr) : number(r.diag.rho);
    d["notes"] = r.diag.notes;
    d["witness_hash"] = witness_hash(r);
    j["diagnostics"] = d;
    return j;
}

Json scheme_to_json(const CodingScheme& s) {
    Json j;
    j["n"] = s.n;
    j["alphabet_sizes"] = {s.nx, s.ny, s.nu};
    j["R"] = s.rate_R;
    j["Delta"] = s.delta;
    j["epsilon"] = s.epsilon;
    j["variant"] = s.variant == SchemeVariant::Error ? "error" : "strong-converse";
    j["messages"] = s.messages;
    Json blocks = Json::array();
    for (auto& b : s.blocks) {
        Json jb;
        jb["y_type"] = b.q_y.counts;
        jb["u_given_y"] = b.q_u_given_y.counts;
        jb["codewords"] = b.codewords;
        jb["message"] = b.message;
        jb["list_size"] = b.list_size.str();
        jb["objective"] = number(b.objective);
        blocks.push_back(jb);
    }
    j["blocks"] = blocks;
    return j;
}

Json sim_report_to_json(const SimReport& r, double scale) {
    Json j;
    j["p_e"] = r.p_e;
    j["stderr"] = r.stderr_;
    j["exact"] = r.exact;
    j["samples"] = r.samples;
    Json pts = Json::array();
    for (auto& p : r.slope_data) {
        Json q;
        q["n"] = p.n;
        q["p_e"] = p.p_e;
        q["stderr"] = p.stderr_;
        q["minus_log_pe_over_n"] = number(p.minus_log_pe_over_n * scale);
        q["dropped"] = p.dropped;
        pts.push_back(q);
    }
    j["points"] = pts;
    if (!r.slope_data.empty()) {
        j["slope"] = number(r.slope * scale);
        j["slope_stderr"] = number(r.slope_stderr * scale);
    }
    Json types = Json::array();
    for (auto& t : r.per_type) types.push_back({{"y_type", t.y_type}, {"mass", t.mass}, {"error_mass", t.error_mass}});
    j["per_type"] = types;
    j["flags"] = r.flags;
    return j;
}

Json identity_report_to_json(const IdentityReport& r) {
    Json j;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["diff"] = r.diff;
    j["divergence"] = r.divergence;
    j["info"] = r.info;
    j["msg_entropy"] = r.msg_entropy;
    j["rate"] = r.rate;
    j["bound_plain"] = r.bound_plain;
    j["bound_rate"] = r.bound_rate;
    return j;
}

Json equivalence_report_to_json(const EquivalenceReport& r) {
    Json j;
    j["codes_checked"] = r.codes_checked;
    j["max_discrepancy"] = r.max_discrepancy;
    j["max_dominance_violation"] = r.max_dominance_violation;
    j["exhaustive"] = r.exhaustive;
    j["ok"] = r.ok;
    return j;
}

Json helper_code_to_json(const HelperBothSidesCode& c) {
    Json j;
    j["kind"] = "helper";
    j["n"] = c.n;
    j["alphabet_sizes"] = {c.nx, c.ny};
    j["helper_labels"] = c.helper_labels;
    j["messages"] = c.messages;
    j["helper"] = c.helper;
    j["tx"] = c.tx;
    j["dec"] = c.dec;
    return j;
}

HelperBothSidesCode helper_code_from_json(const Json& j) {
    require(j.is_object(), "code must be a JSON object");
    HelperBothSidesCode c;
    c.n = get<int>(j, "n");
    auto sz = get<std::vector<int>>(j, "alphabet_sizes");
    require(sz.size() == 2, "code alphabet_sizes must have 2 entries");
    c.nx = sz[0], c.ny = sz[1];
    require(c.n >= 1 && c.nx >= 1 && c.ny >= 1, "code sizes must be >= 1");
    c.helper_labels = get<int>(j, "helper_labels");
    c.messages = get<int>(j, "messages");
    c.helper = get<std::vector<int>>(j, "helper");
    c.tx = get<std::vector<int>>(j, "tx");
    c.dec = get<std::vector<std::uint64_t>>(j, "dec");
    c.validate();
    return c;
}

Json ib_code_to_json(const IbCode& c) {
    Json j;
    j["kind"] = "ib";
    j["n"] = c.n;
    j["alphabet_sizes"] = {c.nx, c.ny};
    j["labels"] = c.labels;
    j["list_cap"] = c.list_cap;
    j["encoder"] = c.encoder;
    j["lists"] = c.lists;
    return j;
}

IbCode ib_code_from_json(const Json& j) {
    require(j.is_object(), "code must be a JSON object");
    IbCode c;
    c.n = get<int>(j, "n");
    auto sz = get<std::vector<int>>(j, "alphabet_sizes");
    require(sz.size() == 2, "code alphabet_sizes must have 2 entries");
    c.nx = sz[0], c.ny = sz[1];
    require(c.n >= 1 && c.nx >= 1 && c.ny >= 1, "code sizes must be >= 1");
    c.labels = get<int>(j, "labels");
    c.list_cap = get<std::uint64_t>(j, "list_cap");
    c.encoder = get<std::vector<int>>(j, "encoder");
    c.lists = get<std::vector<std::vector<std::uint64_t>>>(j, "lists");
    c.validate();
    return c;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::nan("");
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) throw InvalidInput("not a number: \"" + s + "\"");
    return v;
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string s;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) s += ',';
        s += fields[i];
    }
    return s;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out(1);
    for (char c : line) {
        if (c == ',') out.emplace_back();
        else out.back() += c;
    }
    return out;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> g;
    require(!text.empty(), "grid is empty");
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> f(1);
        for (char c : text) {
            if (c == ':') f.emplace_back();
            else f.back() += c;
        }
        require(f.size() == 3, "range grid takes the form start:stop:count");
        double a = parse_double(f[0]), b = parse_double(f[1]);
        double cnt = parse_double(f[2]);
        require(cnt >= 1 && cnt == std::floor(cnt) && cnt <= 1e6, "grid count must be a positive integer");
        int k = static_cast<int>(cnt);
        for (int i = 0; i < k; ++i) g.push_back(k == 1 ? a : a + (b - a) * i / (k - 1));
    } else {
        for (auto& f : split_csv(text)) {
            require(!f.empty(), "grid has an empty entry");
            g.push_back(parse_double(f));
        }
    }
    require(!g.empty(), "grid is empty");
    for (double v : g) require(std::isfinite(v), "grid values must be finite");
    for (std::size_t i = 1; i < g.size(); ++i) require(g[i] > g[i - 1], "grid must be strictly increasing");
    return g;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    require(!text.empty(), "list is empty");
    for (auto& f : split_csv(text)) {
        int v = 0;
        auto res = std::from_chars(f.data(), f.data() + f.size(), v);
        if (res.ec != std::errc() || res.ptr != f.data() + f.size()) throw InvalidInput("not an integer: \"" + f + "\"");
        out.push_back(v);
    }
    return out;
}

}  // namespace ibexp::io
