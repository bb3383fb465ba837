#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "invarlab/report_io.hpp"
#include "invarlab/rng.hpp"
#include "invarlab/run.hpp"
#include "invarlab/scenario_format.hpp"

using namespace invarlab;
namespace fs = std::filesystem;

namespace {

const char* kTwoSiteText = R"([labels]
size = 2
[sites]
names = A,B
prior = 0.5,0.5
[scanner.A]
kind = bsc
epsilon = 0.1
[scanner.B]
kind = bsc
epsilon = 0.4
)";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("invarlab_test_" + tag + "_" +
                                        std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("scenario parsing") {
  SUBCASE("two-site bsc file") {
    const Scenario scenario = parse_scenario(kTwoSiteText);
    CHECK(scenario.label_alphabet.size() == 2);
    CHECK(scenario.site_alphabet.labels == std::vector<std::string>{"A", "B"});
    CHECK(scenario.observation_alphabet.size() == 2);
    CHECK(std::get<BscScanner>(scenario.scanners[0].model).crossover == 0.1);
    CHECK(std::get<BscScanner>(scenario.scanners[1].model).crossover == 0.4);
    CHECK(scenario == two_site_bsc_scenario(0.1, 0.4));
  }

  SUBCASE("mixed scanner kinds widen the observation alphabet") {
    const char* text = R"([labels]
size = 2
[sites]
names = A,B
[scanner.A]
kind = bsc
epsilon = 0.1
[scanner.B]
kind = explicit
x_size = 3
rows = 0.9,0.1,0.0, 0.1,0.9,0.0
)";
    const Scenario scenario = parse_scenario(text);
    CHECK(scenario.observation_alphabet.size() == 3);
    const JointDistribution joint = build_joint(scenario);
    CHECK(joint.axis(kObservationAxis).size() == 3);
    // the bsc arm is zero-padded: p(x | y=0, s=A) = (0.9, 0.1, 0)
    const int idx0[] = {0, 0, 0};
    const int idx1[] = {0, 0, 1};
    const int idx2[] = {0, 0, 2};
    CHECK(std::abs(joint.at(idx0) - 0.25 * 0.9) < 1e-12);
    CHECK(std::abs(joint.at(idx1) - 0.25 * 0.1) < 1e-12);
    CHECK(joint.at(idx2) == 0.0);
  }

  SUBCASE("a scanner row that does not sum to one names the site and row") {
    const char* text = R"([labels]
size = 2
[sites]
names = A
[scanner.A]
kind = explicit
x_size = 2
rows = 0.9,0.1, 0.5,0.4
)";
    try {
      parse_scenario(text);
      FAIL("expected a parse error");
    } catch (const ParseError& error) {
      CHECK(std::string(error.what()).find("A") != std::string::npos);
      CHECK(std::string(error.what()).find("row 1") != std::string::npos);
    }
  }

  SUBCASE("unknown keys and sections are named") {
    CHECK_THROWS_WITH_AS(parse_scenario("[labels]\nsize = 2\nfoo = 1\n[sites]\nnames = A\n"
                                        "[scanner.A]\nkind = bsc\nepsilon = 0.1\n"),
                         doctest::Contains("unknown key 'foo'"), ParseError);
    CHECK_THROWS_WITH_AS(parse_scenario("[labels]\nsize = 2\n[workers]\n[sites]\nnames = A\n"
                                        "[scanner.A]\nkind = bsc\nepsilon = 0.1\n"),
                         doctest::Contains("unknown section [workers]"), ParseError);
  }

  SUBCASE("parse errors carry line numbers") {
    try {
      parse_scenario("[labels]\nsize == 2\n");
      FAIL("expected a parse error");
    } catch (const ParseError& error) {
      CHECK(error.line_number == 2);
    }
  }

  SUBCASE("coupling zero row flags the exclusive label") {
    const char* text = R"([labels]
size = 3
[sites]
names = A,B
[coupling]
joint = 0.25,0.166666666666666657,0.25,0.166666666666666657,0.0,0.166666666666666657
[scanner.A]
kind = explicit
x_size = 3
rows = 1,0,0, 0,1,0, 0,0,1
[scanner.B]
kind = explicit
x_size = 3
rows = 1,0,0, 0,1,0, 0,0,1
)";
    const Scenario scenario = parse_scenario(text);
    const auto labels = site_exclusive_labels(build_joint(scenario));
    CHECK(labels[2].exclusive);
    CHECK(labels[2].sites == std::vector<int>{1});
  }

  SUBCASE("a coupling table overrides the site prior") {
    const char* text = R"([labels]
size = 2
[sites]
names = A,B
prior = 0.9,0.1
[coupling]
joint = 0.25,0.25, 0.25,0.25
[scanner.A]
kind = bsc
epsilon = 0.1
[scanner.B]
kind = bsc
epsilon = 0.2
)";
    const Scenario scenario = parse_scenario(text);
    REQUIRE(std::holds_alternative<JointCoupling>(scenario.coupling));
    const int s_keep[] = {kSiteAxis};
    const JointDistribution p_s = marginalize(build_joint(scenario), s_keep);
    CHECK(std::abs(p_s.mass()[0] - 0.5) < 1e-12);
  }

  SUBCASE("missing scanner section is reported") {
    CHECK_THROWS_WITH_AS(parse_scenario("[labels]\nsize = 2\n[sites]\nnames = A,B\n"
                                        "[scanner.A]\nkind = bsc\nepsilon = 0.1\n"),
                         doctest::Contains("missing [scanner.B]"), ParseError);
  }
}

TEST_CASE("shipped scenario fixtures parse and match their builders") {
  const fs::path dir(INVARLAB_SCENARIO_DIR);
  CHECK(parse_scenario(read_file(dir / "two_site_bsc.scn")) == two_site_bsc_scenario(0.1, 0.4));
  CHECK(parse_scenario(read_file(dir / "identical_bsc.scn")) == two_site_bsc_scenario(0.1, 0.1));
  CHECK(parse_scenario(read_file(dir / "site_exclusive.scn")) == site_exclusive_scenario());
  const Scenario erasure = parse_scenario(read_file(dir / "erasure_pair.scn"));
  CHECK(erasure.observation_alphabet.size() == 4);
  build_joint(erasure);  // must construct cleanly
}

TEST_CASE("scenario round-trips bit-exactly") {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    Scenario scenario = random_scenario(rng.next_u64(),
                                        ScenarioSizes{2 + trial % 3, 2 + trial % 2, 2 + trial % 3},
                                        trial % 2 == 0, 0.8);
    const Scenario reparsed = parse_scenario(serialize_scenario(scenario));
    CHECK(reparsed == scenario);
    // twice more to be sure serialization is a fixed point
    CHECK(parse_scenario(serialize_scenario(reparsed)) == reparsed);
  }

  const Scenario named = parse_scenario(kTwoSiteText);
  CHECK(parse_scenario(serialize_scenario(named)) == named);
  const Scenario exclusive = site_exclusive_scenario();
  CHECK(parse_scenario(serialize_scenario(exclusive)) == exclusive);
}

TEST_CASE("encoder files round-trip") {
  const Alphabet x = Alphabet::indexed("x", 3);
  const Encoder original = stochastic_encoder(x, {0.25, 0.75, 1.0 / 3, 2.0 / 3, 0.0, 1.0}, 2);
  const Encoder reparsed = parse_encoder(serialize_encoder(original), x);
  CHECK(reparsed == original);

  CHECK_THROWS_AS(parse_encoder("[encoder]\nz_size = 2\nrows = 1,0\n", x), ParseError);
  CHECK_THROWS_AS(parse_encoder("nonsense\n", x), ParseError);
}

TEST_CASE("json writer") {
  JsonValue root = JsonValue::object();
  root.set("name", "report \"x\"");
  root.set("value", 0.1);
  root.set("count", 3);
  root.set("flag", true);
  JsonValue list = JsonValue::array();
  list.push(1.5);
  list.push(nullptr);
  root.set("items", std::move(list));

  const std::string text = root.dump();
  const auto parsed = nlohmann::json::parse(text);
  CHECK(parsed["name"] == "report \"x\"");
  CHECK(parsed["value"].get<double>() == 0.1);
  CHECK(parsed["count"] == 3);
  CHECK(parsed["flag"] == true);
  CHECK(parsed["items"][0].get<double>() == 1.5);
  CHECK(parsed["items"][1].is_null());
}

TEST_CASE("report json round-trips every float bit-exactly") {
  const JointDistribution joint = build_joint(two_site_bsc_scenario(0.1, 0.4));
  const Scenario scenario = two_site_bsc_scenario(0.1, 0.4);
  const InformationReport report =
      evaluate_encoder(joint, identity_encoder(joint.axis(kObservationAxis)));
  const JsonValue value = to_json(report, scenario.site_alphabet, scenario.label_alphabet);
  const auto parsed = nlohmann::json::parse(value.dump());

  CHECK(parsed["i_y_z_bits"].get<double>() == report.i_y_z);
  CHECK(parsed["i_z_s_bits"].get<double>() == report.i_z_s);
  CHECK(parsed["risk"].get<double>() == report.risk);
  CHECK(parsed["per_site_i_y_z_bits"]["A"].get<double>() == report.per_site_i_y_z[0].second);
  CHECK(parsed["per_site_i_y_z_bits"]["B"].get<double>() == report.per_site_i_y_z[1].second);
  CHECK(parsed["prediction_rates"]["A"]["0"].get<double>() ==
        report.prediction_rates[0].second[0]);
}

TEST_CASE("dispatch writes the documented files") {
  TempDir dir("dispatch");
  const fs::path scenario_path = dir.path / "two_site.scn";
  {
    std::ofstream out(scenario_path, std::ios::binary);
    out << kTwoSiteText;
  }

  SUBCASE("info") {
    RunConfig config;
    config.command = "info";
    config.scenario_path = scenario_path.string();
    config.encoder_spec = "identity";
    config.out_dir = (dir.path / "info").string();
    REQUIRE(dispatch(config) == kExitOk);
    const auto parsed = nlohmann::json::parse(read_file(dir.path / "info" / "report.json"));
    CHECK(parsed["tool"] == "invarlab");
    CHECK(std::abs(parsed["information"]["per_site_i_y_z_bits"]["A"].get<double>() -
                   0.5310044064107188) < 1e-9);
    CHECK(std::abs(parsed["information"]["per_site_i_y_z_bits"]["B"].get<double>() -
                   0.02904940554533142) < 1e-9);
    CHECK(std::abs(parsed["site_profile"]["minimum_value_bits"].get<double>() -
                   0.02904940554533142) < 1e-9);
  }

  SUBCASE("prop1 with the enumerated encoder holds on identical scanners") {
    const fs::path identical_path = dir.path / "identical.scn";
    {
      std::ofstream out(identical_path, std::ios::binary);
      out << serialize_scenario(two_site_bsc_scenario(0.1, 0.1));
    }
    RunConfig config;
    config.command = "prop1";
    config.scenario_path = identical_path.string();
    config.encoder_spec = "enumerate";
    config.out_dir = (dir.path / "prop1").string();
    REQUIRE(dispatch(config) == kExitOk);
    const auto parsed = nlohmann::json::parse(read_file(dir.path / "prop1" / "prop1.json"));
    CHECK(parsed["prop1"]["verdict"] == "holds");
    CHECK(parsed["prop1"]["slack_bits"].get<double>() >= -1e-9);
  }

  SUBCASE("prop2 auto-detects the exclusive label") {
    const fs::path exclusive_path = dir.path / "exclusive.scn";
    {
      std::ofstream out(exclusive_path, std::ios::binary);
      out << serialize_scenario(site_exclusive_scenario());
    }
    RunConfig config;
    config.command = "prop2";
    config.scenario_path = exclusive_path.string();
    config.encoder_spec = "identity";
    config.out_dir = (dir.path / "prop2").string();
    REQUIRE(dispatch(config) == kExitOk);
    const auto parsed = nlohmann::json::parse(read_file(dir.path / "prop2" / "prop2.json"));
    CHECK(parsed["prop2"]["exclusive_label"] == "2");
    CHECK(parsed["prop2"]["home_site"] == "B");
    CHECK(parsed["prop2"]["recall_at_home"].get<double>() == 1.0);
    CHECK(parsed["prop2"]["i_z_s_bits"].get<double>() > 0.01);
  }

  SUBCASE("frontier emits csv files with fixed headers") {
    RunConfig config;
    config.command = "frontier";
    config.scenario_path = scenario_path.string();
    config.lambda_points = 3;
    config.restarts = 4;
    config.max_iters = 500;
    config.out_dir = (dir.path / "frontier").string();
    REQUIRE(dispatch(config) == kExitOk);
    const std::string csv = read_file(dir.path / "frontier" / "frontier.csv");
    CHECK(csv.starts_with("lambda,i_y_z_bits,i_z_s_bits,risk,converged,restarts_used\n"));
    CHECK(csv.back() == '\n');
    CHECK(csv.find("\r") == std::string::npos);
    // header + 1 + lambda_points rows
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    const std::string pareto = read_file(dir.path / "frontier" / "pareto.csv");
    CHECK(pareto.starts_with("lambda,i_y_z_bits,i_z_s_bits,risk,converged,restarts_used\n"));
  }

  SUBCASE("frontier in risk mode") {
    RunConfig config;
    config.command = "frontier";
    config.scenario_path = scenario_path.string();
    config.mode = "risk";
    config.lambda_points = 2;
    config.restarts = 4;
    config.max_iters = 500;
    config.out_dir = (dir.path / "risk_frontier").string();
    REQUIRE(dispatch(config) == kExitOk);
    const auto parsed =
        nlohmann::json::parse(read_file(dir.path / "risk_frontier" / "report.json"));
    for (const auto& point : parsed["frontier"]["points"]) {
      const double objective = point["objective_value"].get<double>();
      const double risk = point["report"]["risk"].get<double>();
      const double lambda = point["lambda"].get<double>();
      const double leak = point["report"]["i_z_s_bits"].get<double>();
      CHECK(std::abs(objective - (risk + lambda * leak)) < 1e-9);
    }
  }

  SUBCASE("info with an optimized encoder") {
    const fs::path exclusive_path = dir.path / "exclusive_opt.scn";
    {
      std::ofstream out(exclusive_path, std::ios::binary);
      out << serialize_scenario(site_exclusive_scenario());
    }
    RunConfig config;
    config.command = "info";
    config.scenario_path = exclusive_path.string();
    config.encoder_spec = "optimize";
    config.lambda = 1e3;
    config.restarts = 6;
    config.max_iters = 2000;
    config.out_dir = (dir.path / "opt").string();
    REQUIRE(dispatch(config) == kExitOk);
    const auto parsed = nlohmann::json::parse(read_file(dir.path / "opt" / "report.json"));
    CHECK(parsed["information"]["i_z_s_bits"].get<double>() <= 1e-6);
  }

  SUBCASE("info with an encoder file") {
    const fs::path encoder_path = dir.path / "swap.enc";
    {
      std::ofstream out(encoder_path, std::ios::binary);
      out << "[encoder]\nz_size = 2\nrows = 0,1, 1,0\n";
    }
    RunConfig config;
    config.command = "info";
    config.scenario_path = scenario_path.string();
    config.encoder_spec = encoder_path.string();
    config.out_dir = (dir.path / "file_enc").string();
    REQUIRE(dispatch(config) == kExitOk);
    const auto parsed = nlohmann::json::parse(read_file(dir.path / "file_enc" / "report.json"));
    // swapping symbols preserves every information quantity
    CHECK(std::abs(parsed["information"]["i_y_z_bits"].get<double>() -
                   0.18872187554086717) < 1e-9);
  }

  SUBCASE("search emits a catalog and summary") {
    RunConfig config;
    config.command = "search";
    config.instances = 5;
    config.scanner_family = "free-random";
    config.sizes = ScenarioSizes{2, 2, 2};
    config.out_dir = (dir.path / "search").string();
    REQUIRE(dispatch(config) == kExitOk);
    const auto parsed = nlohmann::json::parse(read_file(dir.path / "search" / "catalog.json"));
    CHECK(parsed["catalog"]["instances_run"] == 5);
    REQUIRE(parsed["catalog"]["violations"].get<int>() >= 1);
    CHECK(parsed["catalog"]["entries"][0]["instance"] == 0);
    const std::string summary = read_file(dir.path / "search" / "summary.csv");
    CHECK(summary.starts_with(
        "instance,verdict,lhs_i_y_z_bits,rhs_min_site_i_y_x_bits,slack_bits,"));
  }
}

TEST_CASE("probe audit matches the golden report byte for byte") {
  const Scenario scenario = two_site_bsc_scenario(0.1, 0.4);
  const JointDistribution joint = build_joint(scenario);
  const Prop1Report report =
      check_prop1(joint, identity_encoder(joint.axis(kObservationAxis)));
  const std::string payload = to_json(report, scenario.site_alphabet).dump();
  const std::string golden =
      read_file(fs::path(INVARLAB_SCENARIO_DIR).parent_path() / "tests" / "golden" /
                "probe_prop1.json");
  CHECK(payload == golden);

  // the same payload comes out of the command-line path
  TempDir dir("golden");
  const fs::path scenario_path = dir.path / "probe.scn";
  std::ofstream(scenario_path, std::ios::binary) << serialize_scenario(scenario);
  RunConfig config;
  config.command = "prop1";
  config.scenario_path = scenario_path.string();
  config.encoder_spec = "identity";
  config.out_dir = (dir.path / "out").string();
  REQUIRE(dispatch(config) == kExitOk);
  const auto written = nlohmann::json::parse(read_file(dir.path / "out" / "prop1.json"));
  CHECK(written["prop1"] == nlohmann::json::parse(golden));
}

TEST_CASE("dispatch exit codes") {
  TempDir dir("exit_codes");

  SUBCASE("missing scenario file") {
    RunConfig config;
    config.command = "info";
    config.scenario_path = (dir.path / "absent.scn").string();
    config.out_dir = dir.path.string();
    CHECK(dispatch(config) == kExitUsage);
  }

  SUBCASE("parse error") {
    const fs::path bad = dir.path / "bad.scn";
    {
      std::ofstream out(bad, std::ios::binary);
      out << "[labels]\nsize = 2\n[sites]\nnames = A\n[scanner.A]\nkind = warp\n";
    }
    RunConfig config;
    config.command = "info";
    config.scenario_path = bad.string();
    config.out_dir = dir.path.string();
    CHECK(dispatch(config) == kExitUsage);
  }

  SUBCASE("capacity error") {
    const fs::path scenario_path = dir.path / "wide.scn";
    {
      std::ofstream out(scenario_path, std::ios::binary);
      out << serialize_scenario(random_scenario(1, ScenarioSizes{2, 2, 8}, true));
    }
    RunConfig config;
    config.command = "info";
    config.scenario_path = scenario_path.string();
    config.encoder_spec = "enumerate";
    config.z_size = 8;  // 8^8 maps exceeds the enumeration cap
    config.out_dir = dir.path.string();
    CHECK(dispatch(config) == kExitCapacity);
  }

  SUBCASE("unknown command") {
    RunConfig config;
    config.command = "explode";
    config.out_dir = dir.path.string();
    CHECK(dispatch(config) == kExitUsage);
  }
}

TEST_CASE("dispatch output is byte-identical across runs") {
  TempDir dir("determinism");
  const fs::path scenario_path = dir.path / "two_site.scn";
  {
    std::ofstream out(scenario_path, std::ios::binary);
    out << kTwoSiteText;
  }

  RunConfig config;
  config.command = "frontier";
  config.scenario_path = scenario_path.string();
  config.lambda_points = 2;
  config.restarts = 3;
  config.max_iters = 300;
  config.seed = 5;

  // identical config twice into the same directory: every file byte-identical
  config.out_dir = (dir.path / "a").string();
  REQUIRE(dispatch(config) == kExitOk);
  std::map<std::string, std::string> first_bytes;
  for (const char* name : {"frontier.csv", "pareto.csv", "report.json"}) {
    first_bytes[name] = read_file(dir.path / "a" / name);
  }
  REQUIRE(dispatch(config) == kExitOk);
  for (const auto& [name, bytes] : first_bytes) {
    CHECK(read_file(dir.path / "a" / name) == bytes);
  }

  // the CSVs do not embed the output path, so a second directory matches too
  RunConfig second = config;
  second.out_dir = (dir.path / "b").string();
  REQUIRE(dispatch(second) == kExitOk);
  for (const char* name : {"frontier.csv", "pareto.csv"}) {
    CHECK(read_file(dir.path / "b" / name) == first_bytes[name]);
  }
}
