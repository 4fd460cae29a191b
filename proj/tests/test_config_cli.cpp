#include "doctest.h"

#include <fstream>
#include <sstream>

#include "dfrc/commands.hpp"
#include "dfrc/config.hpp"
#include "dfrc/report.hpp"
#include "dfrc/sweep.hpp"

using namespace dfrc;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(DFRC_SOURCE_DIR) / "configs";

Json explicit_config() { return read_json_file(kConfigs / "explicit.json"); }

std::string error_path(const Json& j) {
  try {
    scenario_config_from_json(j);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dfrc_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_json(const fs::path& p, const Json& j) { std::ofstream(p) << j.dump(2); }

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

Json toy_config() {
  return Json::parse(R"({
    "subcarriers": [2e9],
    "tx_array": {"num_elements": 4},
    "radar_rx_array": {"num_elements": 4},
    "num_slots": 2,
    "constellation_size": 2,
    "power_budget_dbw": 20,
    "radar": {"target_directions_deg": [10], "target_power_db": -160, "noise_dbw": -150},
    "clutter": {"scatterers": [{"angle_deg": -30, "power_db": -150}]},
    "users": [],
    "protected": []
  })");
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("explicit scenario round trip") {
    const ScenarioConfig c = scenario_config_from_json(explicit_config());
    CHECK(c.scenario.num_subcarriers() == 2);
    CHECK(c.scenario.subcarriers[1] == 2e9 + 1e5);
    CHECK(c.scenario.users.size() == 2);
    CHECK(c.scenario.target_direction[1] == doctest::Approx(deg_to_rad(5.0)).epsilon(1e-15));
    CHECK(c.scenario.power_budget == doctest::Approx(100.0).epsilon(1e-14));
    // scr_db calibrates each scatterer against the target power
    const double total = c.scenario.clutter[0].power[0] + c.scenario.clutter[1].power[0];
    CHECK(c.scenario.target_power[0] / total == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(validate(c.scenario).empty());
    CHECK_FALSE(c.merit.is_null());

    const Scenario back = scenario_from_json(scenario_to_json(c.scenario));
    CHECK(back.users[1].paths[1].power == doctest::Approx(c.scenario.users[1].paths[1].power).epsilon(1e-12));
    CHECK(back.clutter[1].angle == doctest::Approx(c.scenario.clutter[1].angle).epsilon(1e-14));
  }

  TEST_CASE("errors name the offending field") {
    Json j = explicit_config();
    j["tx_array"]["num_elements"] = "eight";
    CHECK(error_path(j) == "tx_array.num_elements");

    j = explicit_config();
    j["users"][1]["paths"][0]["kind"] = "reflected";
    CHECK(error_path(j) == "users[1].paths[0].kind");

    j = explicit_config();
    j["radar"]["bogus"] = 1;
    CHECK(error_path(j) == "radar.bogus");

    j = explicit_config();
    j["users"][0]["error_target"] = 0.7;
    CHECK(error_path(j).rfind("users[0].error_target", 0) == 0);

    j = explicit_config();
    j["radar"]["target_directions_deg"] = {0, 0, 0};
    CHECK(error_path(j).rfind("radar.target_directions_deg", 0) == 0);

    j = explicit_config();
    j["generator"] = {{"seed", 1}};
    CHECK(error_path(j) != "<none>");
  }

  TEST_CASE("generated scenarios") {
    const Json j = Json::parse(R"({"generator": {"seed": 3, "num_subcarriers": 2, "tx_elements": 6}})");
    const ScenarioConfig c = scenario_config_from_json(j);
    REQUIRE(c.generator.has_value());
    CHECK(c.generator_seed == 3);
    CHECK(c.scenario.num_subcarriers() == 2);
    CHECK(c.scenario.tx_array.num_elements == 6);
    CHECK(error_path(Json::parse(R"({"generator": {"seed": 1.5}})")) == "generator.seed");
  }

  TEST_CASE("merit parsing") {
    CHECK(merit_from_json(Json::parse(R"({"kind": "power-mean", "p": -20})"), 4).kind() == MeritKind::PowerMean);
    CHECK(merit_from_json(parse_merit_flag("power-mean:p=-20"), 4).power() == -20.0);
    const Json det = parse_merit_flag("detection-prob:pfa=1e-4");
    CHECK(det["pfa"].get<double>() == 1e-4);
    CHECK(merit_from_json(det, 3).size() == 3);
    CHECK(merit_from_json(parse_merit_flag("quasi-arithmetic:generator=exp-mean,a=0.5"), 2).is_concave());
    CHECK(merit_from_json(Json::parse(R"({"kind": "mutual-info", "weights": [1, 3]})"), 2).weights()(1) ==
          doctest::Approx(0.75));

    auto path_of = [](const Json& j, int k) -> std::string {
      try {
        merit_from_json(j, k);
      } catch (const ConfigError& e) {
        return e.path();
      }
      return "<none>";
    };
    CHECK(path_of(parse_merit_flag("quasi-arithmetic:generator=radical-mean,a=2"), 2) == "merit.generator");
    CHECK(path_of(parse_merit_flag("power-mean:p=2"), 2) == "merit.p");
    CHECK(path_of(Json::parse(R"({"kind": "mutual-info", "weights": [1]})"), 2) == "merit.weights");
    CHECK(path_of(parse_merit_flag("entropy"), 2) == "merit.kind");
  }

  TEST_CASE("design options") {
    const DesignOptions o =
        design_options_from_json(Json::parse(R"({"eta_acc": 1e-3, "i_max": 7, "filter_order": "users-first"})"));
    CHECK(o.eta_acc == 1e-3);
    CHECK(o.i_max == 7);
    CHECK(o.filter_order == FilterOrder::UsersFirst);
    CHECK_THROWS_AS(design_options_from_json(Json::parse(R"({"i_max": 0})")), ConfigError);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1e-300) == "1e-300");
    CHECK(format_number(2.0) == "2");
  }

  TEST_CASE("validate exit codes") {
    const fs::path dir = scratch("validate");
    CHECK(cmd_validate(kConfigs / "explicit.json") == kExitOk);
    CHECK(cmd_validate(kConfigs / "table1.json") == kExitOk);
    CHECK(cmd_validate(dir / "missing.json") == kExitConfig);
    Json bad = explicit_config();
    bad["users"][0]["error_target"] = 0.7;
    write_json(dir / "bad.json", bad);
    CHECK(cmd_validate(dir / "bad.json") == kExitConfig);
    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK(cmd_validate(dir / "broken.json") == kExitConfig);
  }

  TEST_CASE("solve writes the output set") {
    const fs::path dir = scratch("solve");
    SolveArgs a;
    a.config = kConfigs / "explicit.json";
    a.out = dir;
    REQUIRE(cmd_solve(a) == kExitOk);
    for (const char* f : {"trace.csv", "beampattern_tx_0.csv", "beampattern_tx_1.csv", "beampattern_rx_0.csv",
                          "beampattern_rx_1.csv", "protected_directions.csv", "result.json"}) {
      CHECK(fs::exists(dir / f));
    }
    const auto tx = lines(dir / "beampattern_tx_0.csv");
    CHECK(tx.front() == "angle_deg,power_linear,power_db,power_rel_db");
    CHECK(tx.size() == 722);
    CHECK(lines(dir / "protected_directions.csv").size() == 3);
    const Json r = read_json_file(dir / "result.json");
    CHECK(r.contains("termination"));

    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");

    a.merit = "power-mean:p=3";
    CHECK(cmd_solve(a) == kExitConfig);
  }

  TEST_CASE("solve reports an infeasible start") {
    const fs::path dir = scratch("infeasible");
    Json j = explicit_config();
    for (auto& u : j["users"]) {
      u["error_target"] = 1e-12;
      u["noise_dbw"] = -90;
    }
    j["design"] = {{"init_restarts", 1}, {"start_rounds", 2}};
    write_json(dir / "cfg.json", j);
    SolveArgs a;
    a.config = dir / "cfg.json";
    a.out = dir / "out";
    CHECK(cmd_solve(a) == kExitInfeasible);
  }

  TEST_CASE("sweep writes one row per value and seed") {
    const fs::path dir = scratch("sweep");
    write_json(dir / "toy.json", toy_config());
    write_json(dir / "spec.json", Json::parse(R"({
      "scenario": "toy.json",
      "axis": "scr",
      "values": [-10, 0],
      "seeds": {"first": 1, "count": 2},
      "design": {"i_max": 20}
    })"));
    SweepArgs a;
    a.spec = dir / "spec.json";
    a.out = dir / "out";
    a.jobs = 2;
    REQUIRE(cmd_sweep(a) == kExitOk);
    const auto rows = lines(dir / "out" / "sweep.csv");
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].rfind("value,seed,instance_seed", 0) == 0);
    CHECK(rows[1].rfind("-10,1,", 0) == 0);
    CHECK(rows[4].rfind("0,2,", 0) == 0);
    CHECK(lines(dir / "out" / "sweep_summary.csv").size() == 3);

    // identical bytes on a rerun with a different worker count
    std::stringstream first;
    first << std::ifstream(dir / "out" / "sweep.csv").rdbuf();
    a.jobs = 1;
    a.out = dir / "again";
    REQUIRE(cmd_sweep(a) == kExitOk);
    std::stringstream second;
    second << std::ifstream(dir / "again" / "sweep.csv").rdbuf();
    CHECK(first.str() == second.str());

    write_json(dir / "bad.json", Json::parse(R"({"scenario": "toy.json", "axis": "gain", "values": [1], "seeds": [1]})"));
    a.spec = dir / "bad.json";
    CHECK(cmd_sweep(a) == kExitConfig);
  }
}
