#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "gridclear/model.hpp"

using namespace gridclear;

namespace {

NetworkCase load_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    return load_case(in);
}

std::string one_bus_case() {
    return R"({
      "horizon": 1, "base_mva": 100.0,
      "areas": [{"id": "A"}],
      "buses": [{"id": "B1", "area_id": "A", "demand": [30.0]}],
      "branches": [],
      "generators": [{
        "id": "G1", "bus_id": "B1",
        "p_min": 10.0, "p_max": 50.0, "p_su_max": 50.0, "p_sd_max": 50.0,
        "ramp_up": 50.0, "ramp_down": 50.0,
        "min_up": 1, "min_down": 1, "cold_start_time": 1,
        "cost_q": 0.0, "cost_l": 25.0, "cost_noload": 0.0,
        "cost_startup": 100.0, "cost_hot_startup": 50.0, "cost_shutdown": 20.0,
        "initial_status_on": false, "initial_status_duration": 1
      }]
    })";
}

}  // namespace

TEST_CASE("minimal one-bus case parses") {
    NetworkCase cs = parse_case(one_bus_case());
    CHECK(cs.buses.size() == 1);
    CHECK(cs.generators.size() == 1);
    CHECK(cs.horizon == 1);
}

TEST_CASE("unknown bus reference is named in the error") {
    std::string text = one_bus_case();
    const auto pos = text.find("\"bus_id\": \"B1\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 14, "\"bus_id\": \"B9\"");
    try {
        parse_case(text);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("B9") != std::string::npos);
    }
}

TEST_CASE("malformed JSON raises a parse error") {
    CHECK_THROWS_AS(parse_case("{ not json"), ParseError);
}

TEST_CASE("duplicate bus id is rejected") {
    std::string text = R"({
      "horizon": 1, "base_mva": 100.0,
      "areas": [{"id": "A"}],
      "buses": [{"id": "B1", "area_id": "A", "demand": [1.0]},
                 {"id": "B1", "area_id": "A", "demand": [1.0]}],
      "branches": [{"id":"x","from_bus":"B1","to_bus":"B1","reactance":0.1,"flow_limit":10}],
      "generators": []
    })";
    CHECK_THROWS_AS(parse_case(text), ValidationError);
}

TEST_CASE("disconnected graph is rejected") {
    std::string text = R"({
      "horizon": 1, "base_mva": 100.0,
      "areas": [{"id": "A"}],
      "buses": [{"id": "B1", "area_id": "A", "demand": [1.0]},
                 {"id": "B2", "area_id": "A", "demand": [1.0]}],
      "branches": [],
      "generators": []
    })";
    try {
        parse_case(text);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("disconnected") != std::string::npos);
    }
}

TEST_CASE("bundled demo4bus topology: 2 tie-lines, 4 shared buses") {
    NetworkCase cs = load_file("cases/demo4bus.json");
    const auto stats = case_stats(cs);
    CHECK(stats.n_buses == 4);
    CHECK(stats.n_areas == 2);
    CHECK(stats.n_tie_lines == 2);
    CHECK(stats.n_shared_buses == 4);
}

TEST_CASE("admittance matrix follows the DC Laplacian convention") {
    SECTION("two buses, x = 0.1") {
        std::string text = R"({
          "horizon": 1, "base_mva": 100.0,
          "areas": [{"id": "A"}],
          "buses": [{"id": "B1", "area_id": "A", "demand": [1.0]},
                     {"id": "B2", "area_id": "A", "demand": [1.0]}],
          "branches": [{"from_bus":"B1","to_bus":"B2","reactance":0.1,"flow_limit":10}],
          "generators": []
        })";
        auto B = build_admittance(parse_case(text));
        CHECK(B(0, 0) == Catch::Approx(10.0));
        CHECK(B(0, 1) == Catch::Approx(-10.0));
        CHECK(B(1, 0) == Catch::Approx(-10.0));
        CHECK(B(1, 1) == Catch::Approx(10.0));
    }
    SECTION("triangle, all x = 0.1") {
        std::string text = R"({
          "horizon": 1, "base_mva": 100.0,
          "areas": [{"id": "A"}],
          "buses": [{"id": "B1", "area_id": "A", "demand": [1.0]},
                     {"id": "B2", "area_id": "A", "demand": [1.0]},
                     {"id": "B3", "area_id": "A", "demand": [1.0]}],
          "branches": [{"from_bus":"B1","to_bus":"B2","reactance":0.1,"flow_limit":10},
                        {"from_bus":"B2","to_bus":"B3","reactance":0.1,"flow_limit":10},
                        {"from_bus":"B1","to_bus":"B3","reactance":0.1,"flow_limit":10}],
          "generators": []
        })";
        auto B = build_admittance(parse_case(text));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(B(i, j) == Catch::Approx(i == j ? 20.0 : -10.0));
    }
    SECTION("single bus yields the zero matrix") {
        auto B = build_admittance(parse_case(one_bus_case()));
        REQUIRE(B.rows() == 1);
        CHECK(B(0, 0) == 0.0);
    }
    SECTION("row sums vanish and B is symmetric on bundled cases") {
        for (const char* path : {"cases/micro2.json", "cases/demo4bus.json",
                                 "cases/demo14.json", "cases/demo3area.json"}) {
            auto B = build_admittance(load_file(path));
            CHECK((B - B.transpose()).lpNorm<Eigen::Infinity>() == 0.0);
            CHECK(B.rowwise().sum().lpNorm<Eigen::Infinity>() < 1e-9);
        }
    }
}

TEST_CASE("single-area partition is degenerate") {
    NetworkCase cs = parse_case(one_bus_case());
    auto part = partition_areas(cs);
    REQUIRE(part.views.size() == 1);
    CHECK(part.tie_lines.empty());
    CHECK(part.shared_buses.empty());
    CHECK(part.views[0].internal_buses.size() == 1);
}

TEST_CASE("two areas joined by one branch share both endpoints") {
    std::string text = R"({
      "horizon": 1, "base_mva": 100.0,
      "areas": [{"id": "A"}, {"id": "B"}],
      "buses": [{"id": "b1", "area_id": "A", "demand": [1.0]},
                 {"id": "b2", "area_id": "B", "demand": [1.0]}],
      "branches": [{"from_bus":"b1","to_bus":"b2","reactance":0.1,"flow_limit":10}],
      "generators": []
    })";
    auto cs = parse_case(text);
    auto part = partition_areas(cs);
    REQUIRE(part.shared_buses.size() == 2);
    REQUIRE(part.tie_lines.size() == 1);
    const auto& va = part.views[0];
    CHECK(va.internal_buses == std::vector<int>{0});
    CHECK(va.external_buses == std::vector<int>{1});
    CHECK(va.view_buses == std::vector<int>{0, 1});
}

TEST_CASE("bundled demo3area topology matches the hand count") {
    NetworkCase cs = load_file("cases/demo3area.json");
    auto part = partition_areas(cs);
    // Hand count from the generator topology: ties B6-B13, B5-B18, B12-B14,
    // B4-B7; shared buses are exactly their endpoints.
    CHECK(part.tie_lines.size() == 4);
    std::set<std::string> shared_ids;
    for (int b : part.shared_buses) shared_ids.insert(cs.buses[b].id);
    CHECK(shared_ids ==
          std::set<std::string>{"B12", "B13", "B14", "B18", "B4", "B5", "B6", "B7"});

    SECTION("internal buses partition the bus set; ties appear in two views") {
        std::size_t total = 0;
        for (const auto& v : part.views) total += v.internal_buses.size();
        CHECK(total == cs.buses.size());
        for (int tie : part.tie_lines) {
            int count = 0;
            for (const auto& v : part.views)
                count += std::count(v.tie_lines.begin(), v.tie_lines.end(), tie);
            CHECK(count == 2);
        }
    }
}

TEST_CASE("emitted cases round-trip") {
    for (const char* path : {"cases/micro2.json", "cases/demo3area.json"}) {
        NetworkCase cs = load_file(path);
        NetworkCase again = parse_case(emit_case(cs));
        CHECK(emit_case(again) == emit_case(cs));
        CHECK(again.buses.size() == cs.buses.size());
        CHECK(again.generators.size() == cs.generators.size());
        for (std::size_t g = 0; g < cs.generators.size(); ++g) {
            CHECK(again.generators[g].cost_l == cs.generators[g].cost_l);
            CHECK(again.generators[g].initial_output == cs.generators[g].initial_output);
        }
    }
}
