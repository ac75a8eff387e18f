#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "ibexp/io.hpp"

namespace py = pybind11;
using namespace ibexp;
using io::Json;

namespace {

SourceModel model_of(const std::string& text) { return io::model_from_json(Json::parse(text)); }

SolverConfig cfg_of(const std::string& text) {
    SolverConfig cfg;
    if (!text.empty()) io::apply_solver_json(cfg, Json::parse(text));
    cfg.validate();
    return cfg;
}

std::string dump(const Json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_ibexp, m) {
    m.doc() = "information bottleneck exponents: native core";

    static py::exception<SizeCapExceeded> size_cap(m, "SizeCapExceeded", PyExc_RuntimeError);
    static py::exception<AssertionFailure> assertion(m, "AssertionFailure", PyExc_AssertionError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InvalidInput& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const SizeCapExceeded& e) {
            size_cap(e.what());
        } catch (const AssertionFailure& e) {
            assertion(e.what());
        } catch (const Json::exception& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("rate_distortion", [](const std::string& model, double Delta, const std::string& cfg, int u_size) {
        return dump(io::result_to_json(rate_distortion(model_of(model), Delta, cfg_of(cfg), u_size)));
    });
    m.def("wak_helper_rate", [](const std::string& model, double B, const std::string& cfg, int u_size) {
        return dump(io::result_to_json(wak_helper_rate(model_of(model), B, cfg_of(cfg), u_size)));
    });
    m.def("error_exponent", [](const std::string& model, double R, double Delta, const std::string& cfg, int u_size) {
        return dump(io::result_to_json(error_exponent(model_of(model), {R, Delta, u_size}, cfg_of(cfg))));
    });
    m.def("strong_converse_exponent",
          [](const std::string& model, double R, double Delta, const std::string& cfg, int u_size) {
              return dump(
                  io::result_to_json(strong_converse_exponent(model_of(model), {R, Delta, u_size}, cfg_of(cfg))));
          });
    m.def("error_exponent_lossless", [](const std::vector<double>& p, double R, double Delta) {
        return error_exponent_lossless(Pmf(p), R, Delta);
    });
    m.def("sc_exponent_lossless", [](const std::vector<double>& p, double R, double Delta) {
        return sc_exponent_lossless(Pmf(p), R, Delta);
    });
    m.def("oracle", [](const std::string& model, const std::string& kind, double R, double Delta, int u_size,
                       int grid_k) {
        OracleKind k;
        if (kind == "E") k = OracleKind::E;
        else if (kind == "F") k = OracleKind::F;
        else if (kind == "RD") k = OracleKind::RD;
        else if (kind == "RH") k = OracleKind::RH;
        else throw InvalidInput("kind must be E, F, RD or RH");
        auto r = brute_force_exponent_oracle(model_of(model), {R, Delta, u_size}, k, grid_k);
        return py::make_tuple(r.value, r.granularity, r.evaluations);
    });
    m.def("entropy", [](const std::vector<double>& p) { return entropy(Pmf(p)); });
    m.def("kl", [](const std::vector<double>& q, const std::vector<double>& p) { return kl(Pmf(q), Pmf(p)); });
    m.def("expected_log_rank", [](const std::vector<double>& p) { return expected_log_rank(Pmf(p)); });

    m.def("simulate", [](const std::string& model, double R, double Delta, py::object epsilon,
                         const std::vector<int>& ns, long long samples, std::uint64_t seed, bool sc, int u_size) {
        std::optional<double> eps;
        if (!epsilon.is_none()) eps = epsilon.cast<double>();
        auto rep = empirical_exponent_slope(model_of(model), R, Delta, eps, ns, samples, seed,
                                            sc ? SchemeVariant::StrongConverse : SchemeVariant::Error, u_size);
        return dump(io::sim_report_to_json(rep));
    });
    m.def("brute_force_optimal_pe", [](const std::string& model, int n, double R, double Delta) {
        return brute_force_optimal_pe(model_of(model), n, R, Delta);
    });
    m.def("wak_check", [](const std::string& model, int n, double R, double B, int trials, std::uint64_t seed) {
        return dump(io::equivalence_report_to_json(verify_equivalence(model_of(model), n, R, B, trials, seed)));
    });
    m.def("identity_check", [](const std::string& model, int n, int labels, std::uint64_t seed) {
        SourceModel sm = model_of(model);
        auto f = random_identity_fixture(sm, n, labels, seed);
        return dump(io::identity_report_to_json(verify_single_letter_identity(f.q_joint, f.encoder, sm, n)));
    });
}
