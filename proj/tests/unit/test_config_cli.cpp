// Copyright 2026 The epcload Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <json.hpp>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "epcload/cli.hpp"
#include "epcload/config.hpp"
#include "epcload/errors.hpp"

using namespace epcload;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("epcload_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"epcload"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
  return p;
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

const std::string kMinimal = R"({"traffic": {"period_T_s": 10.0},
  "population": {"n_groups": 2, "group_size": 100}, "horizon_s": 20.0})";

const std::string kQ10k = R"({"traffic": {"period_T_s": 10.0},
  "population": {"n_groups": 200, "group_size": 50}, "horizon_s": 40.0})";

}  // namespace

TEST_CASE("config: minimal file takes defaults") {
  const auto c = parse_config(R"({"traffic": {"period_T_s": 10.0}})");
  CHECK(c.traffic.period_T == 10.0);
  CHECK(c.traffic.slot_delta == doctest::Approx(1e-5));
  CHECK(c.traffic.n_slots == 1000000);
  CHECK(c.population.total_sources() == 10000);
  CHECK(c.profiles.at(Entity::MME).service_time() == doctest::Approx(9e-4));
  CHECK(constant_delay_K(c.profiles) == doctest::Approx(0.0055));
  CHECK(c.procedure_template().hops.size() == 19);
  CHECK(c.policy.multipliers == std::vector<double>{1.0, 2.0, 2.5});
}

TEST_CASE("config: field-level errors") {
  CHECK(error_of(R"({"traffic": {}})") == "traffic.period_T_s: required field is missing");
  CHECK(error_of("{}") == "traffic.period_T_s: required field is missing");
  CHECK(error_of(R"({"traffic": {"period_T_s": 10, "period": 3}})") ==
        "traffic.period: unknown field");
  CHECK(error_of(R"({"traffic": {"period_T_s": 10}, "extra": 1})") == "extra: unknown field");
  CHECK(error_of(R"({"traffic": {"period_T_s": "ten"}})").rfind("traffic.period_T_s", 0) == 0);
  CHECK(error_of(R"({"traffic": {"period_T_s": 10}, "policy": {"scope": "sgw"}})")
            .rfind("policy.scope", 0) == 0);
  CHECK(error_of(R"({"traffic": {"period_T_s": 10}, "scale": {"q_series": [1525]}})")
            .rfind("scale.q_series[0]", 0) == 0);
  CHECK(error_of(R"({"traffic": {"period_T_s": 10}, "horizon_s": 5})").rfind("horizon_s", 0) ==
        0);
  CHECK(error_of(R"({"traffic": {"period_T_s": 10}, "entities": [{"entity": "MME"}]})")
            .rfind("entities[0]", 0) == 0);
  CHECK(error_of("not json").rfind("config: invalid JSON", 0) == 0);
}

TEST_CASE("config: shipped default file loads and round-trips") {
  const auto c = load_config(fs::path(EPCLOAD_SOURCE_DIR) / "configs" / "default.json");
  CHECK(c.scale.q_series.size() == 10);
  CHECK(c.population.total_sources() == 10000);
  // Every other field in the shipped file spells out a default.
  const auto again = parse_config(R"({"traffic": {"period_T_s": 10.0}, "scale": {"q_series":
    [4000, 8000, 12000, 16000, 20000, 24000, 28000, 32000, 36000, 40000]}})");
  CHECK(c.resolved_json() == again.resolved_json());
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("cli: generate writes outputs and a manifest") {
  TempDir d("gen");
  const auto cfg = write_file(d.path / "c.json", kMinimal);
  const auto a = d.path / "a";
  const auto b = d.path / "b";
  auto r1 = run({"generate", "--config", cfg.string(), "--seed", "5", "--out", a.string()});
  REQUIRE(r1.code == kExitOk);
  CHECK(fs::exists(a / "events.csv"));
  CHECK(fs::exists(a / "events.bin"));
  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["command"] == "generate");
  CHECK(m["seed"] == 5);
  CHECK(m["config"]["traffic"]["period_T_s"] == 10.0);
  CHECK(m["outputs"].size() == 2);

  auto r2 = run({"generate", "--config", cfg.string(), "--seed", "5", "--out", b.string()});
  REQUIRE(r2.code == kExitOk);
  CHECK(slurp(a / "events.csv") == slurp(b / "events.csv"));
  CHECK(slurp(a / "events.bin") == slurp(b / "events.bin"));
  const auto c = d.path / "c";
  REQUIRE(run({"generate", "--config", cfg.string(), "--seed", "6", "--out", c.string()}).code ==
          kExitOk);
  CHECK(slurp(a / "events.csv") != slurp(c / "events.csv"));
}

TEST_CASE("cli: output directory from the environment") {
  TempDir d("env");
  const auto cfg = write_file(d.path / "c.json", kMinimal);
  ::setenv(kOutDirEnv, (d.path / "envout").string().c_str(), 1);
  const auto r = run({"generate", "--config", cfg.string()});
  ::unsetenv(kOutDirEnv);
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(d.path / "envout" / "manifest.json"));
}

TEST_CASE("cli: configuration errors exit 2") {
  TempDir d("cfgerr");
  const auto cfg = write_file(d.path / "bad.json", R"({"traffic": {"slot_delta_s": 1e-5}})");
  const auto r = run({"generate", "--config", cfg.string(), "--out", (d.path / "o").string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("traffic.period_T_s") != std::string::npos);
  CHECK(run({"generate"}).code == kExitConfig);
  CHECK(run({"bogus"}).code == kExitConfig);
  CHECK(run({"generate", "--config", (d.path / "missing.json").string(), "--out",
             (d.path / "o").string()})
            .code == kExitIo);
}

TEST_CASE("cli: help on every subcommand exits 0") {
  for (const char* cmd : {"generate", "validate-arrivals", "simulate", "predict", "scale",
                          "fit-trace", "fixture"}) {
    CAPTURE(cmd);
    const auto r = run({cmd, "--help"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("--out") != std::string::npos);
  }
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("cli: predict at Q=10k and under overload") {
  TempDir d("pred");
  const auto cfg = write_file(d.path / "c.json", kQ10k);
  const auto out = (d.path / "o").string();
  const auto r = run({"predict", "--config", cfg.string(), "--out", out});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("p=0.99 delay=") != std::string::npos);
  const auto model = nlohmann::json::parse(slurp(d.path / "o" / "model.json"));
  CHECK(model["percentile_delay_s"].get<double>() == doctest::Approx(0.0128).epsilon(0.02));
  CHECK(slurp(d.path / "o" / "survival.csv").rfind("tau_s,survival\n", 0) == 0);

  const auto over = run({"predict", "--config", cfg.string(), "--out", out, "--rate", "1200"});
  CHECK(over.code == kExitOverload);
  CHECK(over.err.find("capacity multiplier above") != std::string::npos);
  CHECK(run({"predict", "--config", cfg.string(), "--out", out, "--rate", "1200", "--multiplier",
             "2"})
            .code == kExitOk);
}

TEST_CASE("cli: validate-arrivals rejects a deterministic stream") {
  TempDir d("val");
  std::string csv = "timestamp_s\n";
  for (int i = 0; i < 40; ++i) csv += std::to_string(0.1 * i) + "\n";
  const auto stream = write_file(d.path / "s.csv", csv);
  const auto r = run({"validate-arrivals", "--stream", stream.string(), "--out",
                      (d.path / "o").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("verdict=fail") != std::string::npos);
  CHECK(r.out.find("warning: fewer than 50 events") != std::string::npos);
  const auto ks = nlohmann::json::parse(slurp(d.path / "o" / "ks.json"));
  CHECK(ks["pass_1pct"] == false);
  CHECK(ks["significance_valid"] == false);
  CHECK(slurp(d.path / "o" / "model_cdf.csv").rfind("tau_s,cdf_value\n", 0) == 0);
  CHECK(run({"validate-arrivals", "--out", (d.path / "o").string()}).code == kExitConfig);
}

TEST_CASE("cli: validate-arrivals passes a generated Q=10k stream") {
  TempDir d("val10k");
  const auto cfg = write_file(d.path / "c.json", kQ10k);
  const auto r = run({"validate-arrivals", "--config", cfg.string(), "--out",
                      (d.path / "o").string()});
  REQUIRE(r.code == kExitOk);
  const auto ks = nlohmann::json::parse(slurp(d.path / "o" / "ks.json"));
  CHECK(ks["statistic"].get<double>() <= 0.05);
  CHECK(ks["n"].get<int>() > 20000);
}

TEST_CASE("cli: simulate at Q=10k agrees with predict") {
  TempDir d("sim");
  const auto cfg = write_file(d.path / "c.json", kQ10k);
  const auto so = d.path / "s";
  const auto po = d.path / "p";
  const auto r = run({"simulate", "--config", cfg.string(), "--out", so.string()});
  REQUIRE(r.code == kExitOk);
  REQUIRE(run({"predict", "--config", cfg.string(), "--out", po.string()}).code == kExitOk);
  const auto summary = nlohmann::json::parse(slurp(so / "summary.json"));
  const auto model = nlohmann::json::parse(slurp(po / "model.json"));
  const double sim_p99 = summary["replications"][0]["p99_s"].get<double>();
  const double pred_p99 = model["percentile_delay_s"].get<double>();
  CHECK(std::abs(sim_p99 - pred_p99) / pred_p99 < 0.10);

  const auto usage = nlohmann::json::parse(slurp(so / "utilization.json"));
  CHECK(usage["requests"].get<std::size_t>() > 20000);
  CHECK(usage["entities"].size() == 6);
  CHECK(slurp(so / "delays.csv").rfind("request_id,arrival_s,completion_s,delay_s\n", 0) == 0);

  const auto sj = d.path / "sj";
  REQUIRE(run({"simulate", "--config", cfg.string(), "--out", sj.string(), "--mode", "single-job",
               "--replications", "2"})
              .code == kExitOk);
  const auto s2 = nlohmann::json::parse(slurp(sj / "summary.json"));
  CHECK(s2["replications"].size() == 2);
  CHECK_FALSE(fs::exists(sj / "utilization.json"));
  CHECK(run({"simulate", "--config", cfg.string(), "--out", sj.string(), "--mode", "bogus"}).code ==
        kExitConfig);
}

TEST_CASE("cli: fixture, fit-trace and trace-driven scale") {
  TempDir d("trace");
  const auto fo = d.path / "f";
  REQUIRE(run({"fixture", "--peak-rate", "2.2", "--seed", "3", "--out", fo.string()}).code ==
          kExitOk);
  const auto fixture = fo / "fixture.csv";
  REQUIRE(fs::exists(fixture));
  const auto wo = d.path / "w";
  const auto r = run({"fit-trace", "--trace", fixture.string(), "--out", wo.string()});
  REQUIRE(r.code == kExitOk);
  const auto windows = slurp(wo / "windows.csv");
  CHECK(std::count(windows.begin(), windows.end(), '\n') == 9);

  const auto cfg = write_file(d.path / "c.json", R"({"traffic": {"period_T_s": 10.0},
    "trace": {"window_s": 3600, "capacity_scale": 0.002},
    "policy": {"target_delay_s": 50.0}})");
  const auto so = d.path / "s";
  const auto s = run({"scale", "--config", cfg.string(), "--trace", fixture.string(), "--out",
                      so.string()});
  CHECK(s.code == kExitOk);
  const auto dec = slurp(so / "decisions.csv");
  CHECK(dec.rfind("window_start_s,lambda_hat,multiplier,predicted_p,empirical_p,feasible\n", 0) ==
        0);
  CHECK(std::count(dec.begin(), dec.end(), '\n') == 9);
  CHECK(dec.find(",1,") != std::string::npos);
  CHECK(dec.find(",2,") != std::string::npos);
  CHECK(run({"fit-trace", "--trace", (d.path / "none.csv").string(), "--out", wo.string()}).code ==
        kExitIo);
}

TEST_CASE("cli: scale exits 4 when no multiplier suffices") {
  TempDir d("scale");
  const auto cfg = write_file(d.path / "c.json", R"({"traffic": {"period_T_s": 10.0},
    "scale": {"q_series": [4000, 44000], "window_s": 3.0, "warmup_s": 1.0}})");
  const auto r = run({"scale", "--config", cfg.string(), "--out", (d.path / "o").string()});
  CHECK(r.code == kExitOverload);
  CHECK(r.out.find("INFEASIBLE") != std::string::npos);
  const auto dec = slurp(d.path / "o" / "decisions.csv");
  CHECK(dec.find(",1,") != std::string::npos);
  CHECK(dec.find(",2.5,") != std::string::npos);
}
