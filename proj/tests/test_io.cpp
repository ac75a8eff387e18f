#include <cmath>

#include "doctest.h"
#include "ibexp/io.hpp"

using namespace ibexp;

TEST_SUITE("io") {

TEST_CASE("model JSON") {
    auto j = io::Json::parse(R"({"alphabet_sizes": [2, 2, 3], "probs": [0.54, 0.04, 0.06, 0.36]})");
    SourceModel m = io::model_from_json(j);
    CHECK(m.nx() == 2);
    CHECK(m.p_xy()(1, 1) == doctest::Approx(0.36));
    CHECK(io::model_u_size(j) == 3);
    SourceModel back = io::model_from_json(io::model_to_json(m));
    CHECK(back.p_xy().flat() == m.p_xy().flat());
    CHECK_THROWS_AS(io::model_from_json(io::Json::parse(R"({"alphabet_sizes": [2, 2], "probs": [1, 0, 0]})")),
                    InvalidInput);
    CHECK_THROWS_AS(io::model_from_json(io::Json::parse(R"({"probs": [1]})")), InvalidInput);
    CHECK_THROWS_AS(io::model_from_json(io::Json::parse(R"({"alphabet_sizes": "x", "probs": [1]})")), InvalidInput);
    CHECK_THROWS_AS(io::load_json("{not json"), InvalidInput);
    CHECK_THROWS_AS(io::load_json("/nonexistent/model.json"), InvalidInput);
}

TEST_CASE("problem JSON") {
    auto p = io::problem_from_json(io::Json::parse(
        R"({"model": {"alphabet_sizes": [2, 2], "probs": [0.9, 0, 0, 0.1]}, "R": 0.2, "Delta": 0.3,
            "u_size": 2, "solver": {"restarts": 8, "outer_grid_resolution": 20}})"));
    CHECK(p.has_R);
    CHECK(p.spec.R == 0.2);
    CHECK(p.spec.Delta == 0.3);
    CHECK(p.spec.u_size == 2);
    CHECK(p.cfg.restarts == 8);
    CHECK(p.cfg.outer_grid_resolution == 20);
    CHECK_THROWS_AS(io::problem_from_json(io::Json::parse(R"({"model": {"alphabet_sizes": [1, 1], "probs": [1]},
                                                               "solver": {"bogus": 1}})")),
                    InvalidInput);
}

TEST_CASE("number formatting round trips") {
    for (double v : {0.0, 0.1, 1.0 / 3.0, 0.044168, 1e-300, 12345.678}) CHECK(io::parse_double(io::fmt(v)) == v);
    CHECK(io::fmt(kInf) == "inf");
    CHECK(std::isinf(io::parse_double("inf")));
    CHECK_THROWS_AS(io::parse_double("0.1x"), InvalidInput);
}

TEST_CASE("grids") {
    CHECK(io::parse_grid("0.1,0.2,0.4") == std::vector<double>{0.1, 0.2, 0.4});
    auto g = io::parse_grid("0:1:5");
    REQUIRE(g.size() == 5);
    CHECK(g[2] == 0.5);
    CHECK_THROWS_AS(io::parse_grid(""), InvalidInput);
    CHECK_THROWS_AS(io::parse_grid("0.2,0.1"), InvalidInput);
    CHECK_THROWS_AS(io::parse_grid("0.1,0.1"), InvalidInput);
    CHECK_THROWS_AS(io::parse_grid("0:1"), InvalidInput);
    CHECK(io::parse_int_list("10,20") == std::vector<int>{10, 20});
    CHECK_THROWS_AS(io::parse_int_list("10,a"), InvalidInput);
}

TEST_CASE("csv rows") {
    std::vector<std::string> f{"0.1", "0.5", "abc", "method=x;iterations=1"};
    CHECK(io::split_csv(io::csv_row(f)) == f);
}

TEST_CASE("code JSON") {
    HelperBothSidesCode c;
    c.n = 1, c.nx = 2, c.ny = 2, c.helper_labels = 2, c.messages = 2;
    c.helper = {0, 1};
    c.tx = {0, 1, 1, 0};
    c.dec = {0, 1, 1, 0};
    auto back = io::helper_code_from_json(io::helper_code_to_json(c));
    CHECK(back.tx == c.tx);
    CHECK(back.dec == c.dec);
    IbCode ib = helper_to_ib(c);
    auto ib2 = io::ib_code_from_json(io::ib_code_to_json(ib));
    CHECK(ib2.lists == ib.lists);
    auto bad = io::helper_code_to_json(c);
    bad["tx"] = std::vector<int>{0, 5, 0, 0};
    CHECK_THROWS_AS(io::helper_code_from_json(bad), InvalidInput);
}

TEST_CASE("result JSON fields") {
    SourceModel m(JointXY(2, 2, {0.9, 0, 0, 0.1}));
    auto r = rate_distortion(m, 0.1);
    auto j = io::result_to_json(r);
    CHECK(j.contains("value_nats"));
    CHECK(j.contains("witness"));
    CHECK(j.contains("diagnostics"));
    CHECK(j["value_nats"].get<double>() == r.value);
    CHECK(io::witness_hash(r) == io::witness_hash(rate_distortion(m, 0.1)));
    CHECK(io::diagnostics_field(r.diag).find(',') == std::string::npos);
}

}  // TEST_SUITE
