#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "ibexp/coding_sim.hpp"
#include "ibexp/errors.hpp"
#include "ibexp/exponents.hpp"
#include "ibexp/io.hpp"
#include "ibexp/types.hpp"
#include "ibexp/wak_bridge.hpp"

using namespace ibexp;
using io::Json;

namespace {

struct Common {
    std::string model, out = "-", format = "csv", grid;
    std::uint64_t seed = 1;
    int restarts = 64;
    int u_size = 0;
    bool bits = false;
};

struct Point {
    std::optional<double> R, Delta, B, epsilon;
};

class Output {
public:
    Output(const Common& c) : csv_(c.format == "csv"), scale_(c.bits ? 1.0 / std::log(2.0) : 1.0) {}

    bool csv() const { return csv_; }
    double scale() const { return scale_; }
    std::string num(double v) const { return io::fmt(v); }
    std::string info(double v) const { return io::fmt(v * scale_); }

    void header(const std::vector<std::string>& cols) {
        cols_ = cols;
        text_ << io::csv_row(cols) << '\n';
    }
    // numeric fields must parse back to the same value
    void row(const std::vector<std::string>& fields, const std::vector<bool>& numeric) {
        std::string line = io::csv_row(fields);
        auto back = io::split_csv(line);
        if (back.size() != cols_.size() || back != fields) throw AssertionFailure("CSV row failed to round-trip: " + line);
        for (std::size_t i = 0; i < fields.size(); ++i)
            if (i < numeric.size() && numeric[i]) {
                double v = io::parse_double(back[i]);
                if (io::fmt(v) != fields[i]) throw AssertionFailure("CSV field failed to round-trip: " + fields[i]);
            }
        text_ << line << '\n';
    }
    void json(const Json& j) { text_ << j.dump(2) << '\n'; }
    void line(const std::string& s) { text_ << s << '\n'; }

    void flush(const std::string& path) const {
        if (path == "-" || path.empty()) {
            std::cout << text_.str();
            std::cout.flush();
            return;
        }
        std::ofstream f(path, std::ios::binary);
        require(static_cast<bool>(f), "cannot write " + path);
        f << text_.str();
    }

private:
    bool csv_;
    double scale_;
    std::vector<std::string> cols_;
    std::ostringstream text_;
};

struct Loaded {
    SourceModel model;
    ProblemSpec spec;
    SolverConfig cfg;
    bool has_R = false, has_Delta = false;
    Json model_json;
};

Loaded load(const Common& c, bool need_model = true) {
    Loaded L;
    if (c.model.empty()) {
        require(!need_model, "--model is required");
        return L;
    }
    Json j = io::load_json(c.model);
    if (j.is_object() && j.contains("model")) {
        auto p = io::problem_from_json(j);
        L.model = p.model;
        L.spec = p.spec;
        L.cfg = p.cfg;
        L.has_R = p.has_R;
        L.has_Delta = p.has_Delta;
        L.model_json = j.at("model");
    } else {
        L.model = io::model_from_json(j);
        L.spec.u_size = io::model_u_size(j);
        L.model_json = j;
    }
    if (c.u_size > 0) L.spec.u_size = c.u_size;
    L.cfg.restarts = c.restarts;
    L.cfg.rng_seed = c.seed;
    L.cfg.validate();
    return L;
}

void dump_fixture(const Json& fixture) { std::cerr << "failing fixture: " << fixture.dump() << '\n'; }

int cmd_rd(const Common& c, const Point& pt, bool helper) {
    Loaded L = load(c);
    ExponentSolver solver(L.model, L.cfg);
    std::vector<double> grid;
    if (!c.grid.empty()) grid = io::parse_grid(c.grid);
    else {
        std::optional<double> v = helper ? pt.B : pt.Delta;
        if (!v && !helper && L.has_Delta) v = L.spec.Delta;
        require(v.has_value(), helper ? "--helper-rate or --grid is required" : "--delta or --grid is required");
        grid.push_back(*v);
    }
    Output out(c);
    Json arr = Json::array();
    const std::string col = helper ? "B" : "Delta";
    if (out.csv()) out.header({col, "value_nats", "witness_hash", "diagnostics"});
    for (double g : grid) {
        ExponentResult r = helper ? solver.wak_helper_rate(g, L.spec.u_size) : solver.rate_distortion(g, L.spec.u_size);
        if (out.csv()) {
            out.row({out.info(g), out.info(r.value), io::witness_hash(r), io::diagnostics_field(r.diag)},
                    {true, true, false, false});
        } else {
            Json j = io::result_to_json(r, out.scale());
            j[col] = g * out.scale();
            arr.push_back(j);
        }
    }
    if (!out.csv()) out.json(c.grid.empty() ? arr[0] : arr);
    out.flush(c.out);
    return 0;
}

int cmd_exponent(const Common& c, const Point& pt, bool sc) {
    Loaded L = load(c);
    std::optional<double> R = pt.R, D = pt.Delta;
    if (!R && L.has_R) R = L.spec.R;
    if (!D && L.has_Delta) D = L.spec.Delta;
    bool sweep_R = false;
    std::vector<double> grid;
    if (!c.grid.empty()) {
        grid = io::parse_grid(c.grid);
        if (pt.R.has_value() != pt.Delta.has_value()) sweep_R = pt.Delta.has_value();
        else if (!pt.R && R.has_value() != D.has_value()) sweep_R = D.has_value();
        else throw InvalidInput("with --grid give exactly one of --rate / --delta");
    } else {
        require(R && D, "--rate and --delta are required without --grid");
        grid.push_back(*D);
    }
    ExponentSolver solver(L.model, L.cfg);
    Output out(c);
    double boundary = std::nan("");
    if (sweep_R) boundary = solver.rate_distortion(*D).value;
    std::vector<std::string> cols{sweep_R ? "R" : "Delta", "value_nats", "witness_hash", "diagnostics"};
    if (sweep_R) cols.push_back("R_of_Delta");
    if (out.csv()) out.header(cols);
    Json arr = Json::array();
    for (double g : grid) {
        ProblemSpec spec;
        spec.R = sweep_R ? g : *R;
        spec.Delta = sweep_R ? *D : g;
        spec.u_size = L.spec.u_size;
        ExponentResult r = sc ? solver.strong_converse_exponent(spec) : solver.error_exponent(spec);
        if (out.csv()) {
            std::vector<std::string> f{out.info(g), out.info(r.value), io::witness_hash(r), io::diagnostics_field(r.diag)};
            std::vector<bool> nm{true, true, false, false};
            if (sweep_R) f.push_back(out.info(boundary)), nm.push_back(true);
            out.row(f, nm);
        } else {
            Json j = io::result_to_json(r, out.scale());
            j["R"] = spec.R * out.scale();
            j["Delta"] = spec.Delta * out.scale();
            if (sweep_R) j["R_of_Delta"] = boundary * out.scale();
            arr.push_back(j);
        }
    }
    if (!out.csv()) out.json(c.grid.empty() ? arr[0] : arr);
    out.flush(c.out);
    return 0;
}

int cmd_simulate(const Common& c, const Point& pt, const std::string& n_list, long long samples,
                 const std::string& variant, const std::string& scheme_out) {
    Loaded L = load(c);
    std::optional<double> R = pt.R, D = pt.Delta;
    if (!R && L.has_R) R = L.spec.R;
    if (!D && L.has_Delta) D = L.spec.Delta;
    require(R && D, "--rate and --delta are required");
    require(variant == "error" || variant == "sc", "--variant must be error or sc");
    require(samples >= 0, "--samples must be >= 0");
    auto ns = io::parse_int_list(n_list);
    for (std::size_t i = 1; i < ns.size(); ++i) require(ns[i] > ns[i - 1], "--n must be strictly increasing");
    for (int n : ns) require(n >= 1, "--n entries must be >= 1");
    SchemeVariant v = variant == "error" ? SchemeVariant::Error : SchemeVariant::StrongConverse;
    int us = L.spec.u_size > 0 ? L.spec.u_size : 2;
    Output out(c);
    SimReport total = empirical_exponent_slope(L.model, *R, *D, pt.epsilon, ns, samples, c.seed, v, us);
    Json schemes = Json::array();
    if (!scheme_out.empty())
        for (int n : ns) schemes.push_back(io::scheme_to_json(build_achievability_scheme(L.model, n, *R, *D, pt.epsilon, v, us)));
    if (out.csv()) {
        out.header({"n", "p_e", "stderr", "minus_log_pe_over_n"});
        for (auto& p : total.slope_data)
            out.row({std::to_string(p.n), out.num(p.p_e), out.num(p.stderr_), out.info(p.minus_log_pe_over_n)},
                    {true, true, true, true});
    } else {
        out.json(io::sim_report_to_json(total, out.scale()));
    }
    if (!scheme_out.empty()) {
        std::ofstream f(scheme_out, std::ios::binary);
        require(static_cast<bool>(f), "cannot write " + scheme_out);
        f << schemes.dump() << '\n';
    }
    out.flush(c.out);
    return 0;
}

int cmd_oracle(const Common& c, const Point& pt, const std::string& kind_s, int k, bool check) {
    Loaded L = load(c);
    OracleKind kind;
    if (kind_s == "E") kind = OracleKind::E;
    else if (kind_s == "F") kind = OracleKind::F;
    else if (kind_s == "RD") kind = OracleKind::RD;
    else if (kind_s == "RH") kind = OracleKind::RH;
    else throw InvalidInput("--kind must be one of E, F, RD, RH");
    ProblemSpec spec = L.spec;
    if (pt.R) spec.R = *pt.R;
    if (pt.B) spec.R = *pt.B;
    if (pt.Delta) spec.Delta = *pt.Delta;
    OracleResult o = brute_force_exponent_oracle(L.model, spec, kind, k);
    double sv = std::nan(""), gap = std::nan("");
    if (check) {
        ExponentSolver solver(L.model, L.cfg);
        ExponentResult r = kind == OracleKind::E    ? solver.error_exponent(spec)
                           : kind == OracleKind::F  ? solver.strong_converse_exponent(spec)
                           : kind == OracleKind::RD ? solver.rate_distortion(spec.Delta, spec.u_size)
                                                    : solver.wak_helper_rate(spec.R, spec.u_size);
        sv = r.value;
        gap = std::isinf(sv) && std::isinf(o.value) ? 0.0 : std::fabs(sv - o.value);
        if (!(gap <= std::max(5e-3, o.granularity))) {
            Json fx;
            fx["model"] = io::model_to_json(L.model);
            fx["kind"] = kind_s;
            fx["R"] = spec.R;
            fx["Delta"] = spec.Delta;
            fx["u_size"] = spec.u_size;
            fx["grid_k"] = k;
            fx["oracle"] = o.value;
            fx["solver"] = sv;
            dump_fixture(fx);
            throw AssertionFailure("solver and oracle differ by " + io::fmt(gap));
        }
    }
    Output out(c);
    if (out.csv()) {
        out.header({"kind", "R", "Delta", "grid_k", "value_nats", "granularity", "evaluations", "solver_value_nats", "gap"});
        out.row({kind_s, out.info(spec.R), out.info(spec.Delta), std::to_string(k), out.info(o.value),
                 out.info(o.granularity), std::to_string(o.evaluations), out.info(sv), out.info(gap)},
                {false, true, true, true, true, true, true, true, true});
    } else {
        Json j;
        j["kind"] = kind_s;
        j["R"] = spec.R * out.scale();
        j["Delta"] = spec.Delta * out.scale();
        j["grid_k"] = k;
        j["value_nats"] = std::isfinite(o.value) ? Json(o.value * out.scale()) : Json(io::fmt(o.value));
        j["granularity"] = o.granularity * out.scale();
        j["evaluations"] = o.evaluations;
        j["solver_value_nats"] = std::isnan(sv) ? Json(nullptr) : Json(sv * out.scale());
        j["gap"] = std::isnan(gap) ? Json(nullptr) : Json(gap * out.scale());
        out.json(j);
    }
    out.flush(c.out);
    return 0;
}

int cmd_wak(const Common& c, const Point& pt, int n, int trials, const std::string& code_path) {
    Loaded L = load(c);
    Output out(c);
    if (!code_path.empty()) {
        Json j = io::load_json(code_path);
        require(j.is_object() && j.contains("kind"), "code JSON needs a \"kind\" field");
        std::string kind = j.at("kind").is_string() ? j.at("kind").get<std::string>() : "";
        Json res;
        if (kind == "helper") {
            auto h = io::helper_code_from_json(j);
            auto ib = helper_to_ib(h);
            res["error"] = helper_error(h, L.model);
            res["transformed_error"] = ib_error(ib, L.model);
            res["transformed"] = io::ib_code_to_json(ib);
        } else if (kind == "ib") {
            auto ib = io::ib_code_from_json(j);
            auto h = ib_to_helper(ib, &L.model);
            res["error"] = ib_error(ib, L.model);
            res["transformed_error"] = helper_error(h, L.model);
            res["transformed"] = io::helper_code_to_json(h);
        } else {
            throw InvalidInput("code kind must be helper or ib");
        }
        out.json(res);
        out.flush(c.out);
        return 0;
    }
    std::optional<double> R = pt.R;
    if (!R && L.has_R) R = L.spec.R;
    require(R.has_value() && pt.B.has_value(), "--rate and --helper-rate are required");
    EquivalenceReport rep = verify_equivalence(L.model, n, *R, *pt.B, trials, c.seed);
    if (out.csv()) {
        out.header({"n", "codes_checked", "max_discrepancy", "max_dominance_violation", "exhaustive", "ok"});
        out.row({std::to_string(n), std::to_string(rep.codes_checked), out.num(rep.max_discrepancy),
                 out.num(rep.max_dominance_violation), rep.exhaustive ? "1" : "0", rep.ok ? "1" : "0"},
                {true, true, true, true, true, true});
    } else {
        Json j = io::equivalence_report_to_json(rep);
        j["n"] = n;
        out.json(j);
    }
    if (!rep.ok) {
        out.flush(c.out);
        Json fx;
        fx["model"] = io::model_to_json(L.model);
        fx["n"] = n;
        fx["R"] = *R;
        fx["B"] = *pt.B;
        fx["trials"] = trials;
        fx["seed"] = c.seed;
        dump_fixture(fx);
        throw AssertionFailure("code equivalence check failed");
    }
    out.flush(c.out);
    return 0;
}

int cmd_identity(const Common& c, int n, int trials, int labels) {
    Loaded L = load(c);
    require(trials >= 1, "--trials must be >= 1");
    Output out(c);
    if (out.csv()) out.header({"trial", "lhs", "rhs", "diff", "bound_plain", "bound_rate"});
    Json arr = Json::array();
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        IdentityFixture f = random_identity_fixture(L.model, n, labels, c.seed + 0x9E3779B97F4A7C15ULL * t);
        IdentityReport r = verify_single_letter_identity(f.q_joint, f.encoder, L.model, n);
        worst = std::max(worst, r.diff);
        if (out.csv()) {
            out.row({std::to_string(t), out.info(r.lhs), out.info(r.rhs), out.info(r.diff), r.bound_plain ? "1" : "0",
                     r.bound_rate ? "1" : "0"},
                    {true, true, true, true, true, true});
        } else {
            Json j = io::identity_report_to_json(r);
            j["trial"] = t;
            arr.push_back(j);
        }
        if (!(r.diff <= 1e-10) || !r.bound_plain || !r.bound_rate) {
            out.flush(c.out);
            Json fx;
            fx["model"] = io::model_to_json(L.model);
            fx["n"] = n;
            fx["q_joint"] = f.q_joint;
            fx["encoder"] = f.encoder;
            fx["report"] = io::identity_report_to_json(r);
            dump_fixture(fx);
            throw AssertionFailure("single-letter identity failed on trial " + std::to_string(t));
        }
    }
    if (!out.csv()) out.json({{"trials", arr}, {"max_abs_diff", worst}});
    std::cerr << "max_abs_diff=" << io::fmt(worst) << '\n';
    out.flush(c.out);
    return 0;
}

int cmd_cover(const Common& c, const std::string& y_type, const std::string& u_given_y) {
    auto ty = io::parse_int_list(y_type);
    auto cu = io::parse_int_list(u_given_y);
    for (int v : ty) require(v >= 0, "--y-type counts must be >= 0");
    for (int v : cu) require(v >= 0, "--u-given-y counts must be >= 0");
    require(!ty.empty() && cu.size() % ty.size() == 0, "--u-given-y must have |Y| * |U| entries");
    TypeVector t(ty);
    require(t.n >= 1, "--y-type must have positive length");
    int nu = static_cast<int>(cu.size() / ty.size());
    CondTypeMatrix m(static_cast<int>(ty.size()), nu, cu);
    for (std::size_t y = 0; y < ty.size(); ++y) {
        int s = 0;
        for (int u = 0; u < nu; ++u) s += m(static_cast<int>(y), u);
        require(s == ty[y], "--u-given-y rows must sum to the y-type counts");
    }
    CoverResult cr = greedy_type_cover(t, m);
    if (cr.universe <= 1000000 && !verify_cover(t, m, cr.codewords)) {
        Json fx;
        fx["y_type"] = ty;
        fx["u_given_y"] = cu;
        dump_fixture(fx);
        throw AssertionFailure("greedy cover leaves a sequence uncovered");
    }
    Output out(c);
    if (out.csv()) {
        std::vector<std::string> cols;
        for (int i = 0; i < t.n; ++i) cols.push_back("u" + std::to_string(i));
        out.header(cols);
        for (auto& w : cr.codewords) {
            std::vector<std::string> f;
            for (int s : w) f.push_back(std::to_string(s));
            out.row(f, std::vector<bool>(f.size(), true));
        }
    } else {
        Json j;
        j["codewords"] = cr.codewords;
        j["universe"] = cr.universe.str();
        j["log_bound"] = cr.log_bound;
        j["mutual_info"] = cr.mutual_info * out.scale();
        j["degenerate"] = cr.degenerate;
        out.json(j);
    }
    out.flush(c.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information-bottleneck source coding exponents"};
    app.require_subcommand(1);
    app.fallthrough();
    Common c;
    app.add_option("--model", c.model, "model or problem JSON (file path or inline text)");
    app.add_option("--out", c.out, "output path, - for stdout");
    app.add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", c.seed, "random seed");
    app.add_option("--restarts", c.restarts, "solver restarts");
    app.add_option("--grid", c.grid, "sweep values: a,b,c or start:stop:count");
    app.add_option("--u-size", c.u_size, "auxiliary alphabet size (0 = default)");
    app.add_flag("--bits", c.bits, "report information quantities in bits");

    Point pt;
    auto add_point = [&](CLI::App* s, bool r, bool d, bool b) {
        if (r) s->add_option("--rate", pt.R, "rate R in nats");
        if (d) s->add_option("--delta", pt.Delta, "distortion level Delta in nats");
        if (b) s->add_option("--helper-rate", pt.B, "helper rate B in nats");
    };

    auto* rd = app.add_subcommand("rd", "rate-distortion function R(Delta), or R_h(B) with --helper");
    bool helper = false;
    add_point(rd, false, true, true);
    rd->add_flag("--helper", helper, "sweep the helper rate function instead");

    auto* ex = app.add_subcommand("exponent", "error exponent E(R, Delta)");
    add_point(ex, true, true, false);
    auto* sc = app.add_subcommand("sc-exponent", "strong converse exponent F(R, Delta)");
    add_point(sc, true, true, false);

    auto* sim = app.add_subcommand("simulate", "simulate the type-covering scheme");
    add_point(sim, true, true, false);
    std::string n_list, variant = "error", scheme_out;
    long long samples = 0;
    sim->add_option("--epsilon", pt.epsilon, "list slack (default from n)");
    sim->add_option("--n", n_list, "blocklengths, comma separated")->required();
    sim->add_option("--samples", samples, "Monte Carlo samples per n (0 = exact)");
    sim->add_option("--variant", variant, "error or sc");
    sim->add_option("--scheme-out", scheme_out, "write the schemes as JSON");

    auto* orc = app.add_subcommand("oracle", "exhaustive grid oracle");
    add_point(orc, true, true, true);
    std::string kind = "E";
    int grid_k = 40;
    bool check = false;
    orc->add_option("--kind", kind, "E, F, RD or RH");
    orc->add_option("--k", grid_k, "grid denominator");
    orc->add_flag("--check", check, "compare with the solver, exit 4 on disagreement");

    auto* wak = app.add_subcommand("wak-check", "helper / list-code equivalence check");
    add_point(wak, true, false, true);
    int wn = 1, wtrials = 0;
    std::string code_path;
    wak->add_option("--n", wn, "blocklength");
    wak->add_option("--trials", wtrials, "random codes (0 = full enumeration)");
    wak->add_option("--code", code_path, "transform a code JSON instead");

    auto* idc = app.add_subcommand("identity-check", "single-letter identity on random fixtures");
    int in = 4, itrials = 100, labels = 2;
    idc->add_option("--n", in, "blocklength");
    idc->add_option("--trials", itrials, "number of random fixtures");
    idc->add_option("--labels", labels, "encoder labels");

    auto* cov = app.add_subcommand("cover", "greedy covering codebook for a joint type");
    std::string y_type, u_given_y;
    cov->add_option("--y-type", y_type, "y type counts, comma separated")->required();
    cov->add_option("--u-given-y", u_given_y, "conditional counts, y-major rows")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (rd->parsed()) return cmd_rd(c, pt, helper);
        if (ex->parsed()) return cmd_exponent(c, pt, false);
        if (sc->parsed()) return cmd_exponent(c, pt, true);
        if (sim->parsed()) return cmd_simulate(c, pt, n_list, samples, variant, scheme_out);
        if (orc->parsed()) return cmd_oracle(c, pt, kind, grid_k, check);
        if (wak->parsed()) return cmd_wak(c, pt, wn, wtrials, code_path);
        if (idc->parsed()) return cmd_identity(c, in, itrials, labels);
        if (cov->parsed()) return cmd_cover(c, y_type, u_given_y);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const SizeCapExceeded& e) {
        std::cerr << "size cap: " << e.what() << '\n';
        return 3;
    } catch (const AssertionFailure& e) {
        std::cerr << "assertion failed: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
