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

#include "epcload/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "epcload/arrival.hpp"
#include "epcload/autoscaler.hpp"
#include "epcload/config.hpp"
#include "epcload/delay_model.hpp"
#include "epcload/epc_sim.hpp"
#include "epcload/errors.hpp"
#include "epcload/event_io.hpp"
#include "epcload/ks.hpp"
#include "epcload/rng.hpp"
#include "epcload/stats.hpp"
#include "epcload/trace.hpp"
#include "epcload/traffic.hpp"

#ifndef EPCLOAD_VERSION
#define EPCLOAD_VERSION "0.0.0"
#endif

namespace epcload {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Common {
  std::string config;
  std::uint64_t seed = 1;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "JSON scenario file");
  if (config_required) opt->required();
  cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
  cmd->add_option("--out", c.out, "output directory (default: $EPCLOAD_OUT_DIR or ./epcload_out)");
}

class Run {
 public:
  Run(std::string command, const Common& c, std::ostream& out)
      : command_(std::move(command)), seed_(c.seed), out_(out) {
    if (!c.out.empty()) {
      dir_ = c.out;
    } else if (const char* env = std::getenv(kOutDirEnv); env && *env) {
      dir_ = env;
    } else {
      dir_ = "epcload_out";
    }
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    if (!c.config.empty()) {
      config_ = load_config(c.config);
      manifest_["config_path"] = c.config;
    }
  }

  const Config& config() const {
    if (!config_) throw ConfigError("--config is required for " + command_);
    return *config_;
  }
  bool has_config() const { return config_.has_value(); }
  std::uint64_t seed() const { return seed_; }
  std::ostream& out() { return out_; }
  ordered_json& manifest() { return manifest_; }

  fs::path path(const std::string& name) {
    outputs_.push_back(name);
    return dir_ / name;
  }

  std::ofstream open(const std::string& name) {
    const auto p = path(name);
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot write " + p.string());
    return f;
  }

  void write_text(const std::string& name, const std::string& text) {
    auto f = open(name);
    f << text << '\n';
    check(f, name);
  }

  void check(std::ofstream& f, const std::string& name) {
    f.flush();
    if (!f) throw IoError("write failed: " + (dir_ / name).string());
  }

  void finish() {
    ordered_json m;
    m["command"] = command_;
    m["version"] = EPCLOAD_VERSION;
    m["seed"] = seed_;
    for (auto& [k, v] : manifest_.items()) m[k] = v;
    m["config"] = config_ ? ordered_json::parse(config_->resolved_json()) : ordered_json();
    m["outputs"] = outputs_;
    std::ofstream f(dir_ / "manifest.json");
    f << m.dump(2) << '\n';
    f.flush();
    if (!f) throw IoError("write failed: " + (dir_ / "manifest.json").string());
  }

 private:
  std::string command_;
  std::uint64_t seed_;
  std::ostream& out_;
  fs::path dir_;
  std::optional<Config> config_;
  ordered_json manifest_ = ordered_json::object();
  std::vector<std::string> outputs_;
};

EventStream generate_from(const Config& c, std::uint64_t seed) {
  const auto pop = c.population.build(c.traffic.period_T);
  return generate_requests(pop, c.traffic, c.horizon_s, seed);
}

EventStream read_stream(const fs::path& p) {
  if (p.extension() == ".bin") return read_events_binary(p);
  return parse_trace(p).stream;
}

double config_lambda_beta(const Config& c) {
  return lambda_beta(c.population.total_sources(), c.traffic.period_T, c.traffic.tx_probability);
}

std::vector<double> measured_delays(const std::vector<DelaySample>& samples, double warmup) {
  std::vector<double> d;
  for (const auto& s : samples)
    if (s.arrival >= warmup) d.push_back(s.delay());
  return d;
}

int cmd_generate(Run& run) {
  const auto& c = run.config();
  const auto stream = generate_from(c, run.seed());
  {
    auto f = run.open("events.csv");
    write_events_csv(f, stream);
    run.check(f, "events.csv");
  }
  write_events_binary(run.path("events.bin"), stream);
  run.manifest()["events"] = stream.size();
  run.finish();
  run.out() << "generated " << stream.size() << " requests from "
            << c.population.total_sources() << " sources over " << c.horizon_s << " s\n";
  return kExitOk;
}

int cmd_validate(Run& run, const std::string& stream_path) {
  EventStream stream;
  double rate = 0.0;
  if (!stream_path.empty()) {
    stream = read_stream(stream_path);
    run.manifest()["stream"] = stream_path;
  } else {
    stream = generate_from(run.config(), run.seed());
  }
  if (run.has_config()) rate = config_lambda_beta(run.config());
  const auto gaps = stream.gaps();
  if (gaps.size() < 2) throw InputError("validate-arrivals: need at least 3 events");
  if (rate <= 0.0) {
    const double span = stream[stream.size() - 1].time - stream[0].time;
    if (!(span > 0.0)) throw InputError("validate-arrivals: all events share one timestamp");
    rate = static_cast<double>(gaps.size()) / span;
  }
  const auto model = [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
  const auto report = ks_test(gaps, model);

  auto sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  const double top = std::max(quantile_sorted(sorted, 0.999), 5.0 / rate);
  constexpr int kPoints = 200;
  auto emp = run.open("empirical_cdf.csv");
  auto mod = run.open("model_cdf.csv");
  emp << "tau_s,cdf_value\n";
  mod << "tau_s,cdf_value\n";
  for (int i = 0; i <= kPoints; ++i) {
    const double tau = top * i / kPoints;
    const double f = 1.0 - survival_sorted(sorted, tau);
    emp << format_double(tau) << ',' << format_double(f) << '\n';
    mod << format_double(tau) << ',' << format_double(model(tau)) << '\n';
  }
  run.check(emp, "empirical_cdf.csv");
  run.check(mod, "model_cdf.csv");

  auto j = ordered_json::parse(to_json_text(report));
  j["model_rate"] = rate;
  run.write_text("ks.json", j.dump(2));
  run.manifest()["ks_statistic"] = report.statistic;
  run.finish();

  run.out() << "gaps=" << report.n << " rate=" << rate << " ks=" << report.statistic
            << " critical_1pct=" << report.critical_1pct
            << " verdict=" << (report.pass_1pct() ? "pass" : "fail") << '\n';
  if (!report.significance_valid)
    run.out() << "warning: fewer than " << kKsMinSamples
              << " events, significance not claimed\n";
  return kExitOk;
}

struct Replica {
  SimulationResult result;
  bool per_message = false;
  std::vector<double> delays;
  std::vector<DelaySample>& samples() { return result.samples; }
};

Replica simulate_once(const Config& c, SimulationMode mode, std::uint64_t seed) {
  const auto stream = generate_from(c, seed);
  Replica r;
  if (mode == SimulationMode::SingleJob) {
    r.result.samples =
        single_job_mode(stream, c.profiles.at(Entity::MME), constant_delay_K(c.profiles));
  } else {
    SimulationOptions o;
    o.topology = c.topology;
    o.link_latency = c.simulation.link_latency_s;
    o.mme_crypto_work = c.simulation.mme_crypto_work;
    r.result = run_bearer_simulation(stream, c.procedure_template(), c.profiles, o);
    r.per_message = true;
  }
  r.delays = measured_delays(r.result.samples, c.simulation.warmup_s);
  return r;
}

int cmd_simulate(Run& run, const std::string& mode_flag, int replications, int jobs) {
  const auto& c = run.config();
  auto mode = c.simulation.mode;
  if (mode_flag == "single-job") mode = SimulationMode::SingleJob;
  else if (mode_flag == "per-message") mode = SimulationMode::PerMessage;
  else if (!mode_flag.empty()) throw ConfigError("--mode: expected 'per-message' or 'single-job'");
  if (replications < 1) throw ConfigError("--replications: must be >= 1");
  if (jobs < 1) throw ConfigError("--jobs: must be >= 1");

  const double lb = config_lambda_beta(c);
  const double rho = lb * c.profiles.at(Entity::MME).service_time();
  if (rho >= 1.0)
    run.out() << "warning: MME load rho=" << rho << " >= 1, delays grow without bound\n";

  std::vector<Replica> reps(static_cast<std::size_t>(replications));
  std::vector<std::exception_ptr> errors(reps.size());
#pragma omp parallel for num_threads(jobs) schedule(dynamic)
  for (int i = 0; i < replications; ++i) {
    try {
      const auto seed = i == 0 ? run.seed() : derive_seed(run.seed(), static_cast<std::uint64_t>(i));
      reps[static_cast<std::size_t>(i)] = simulate_once(c, mode, seed);
      if (i > 0) reps[static_cast<std::size_t>(i)].samples().clear();
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  {
    auto f = run.open("delays.csv");
    f << "request_id,arrival_s,completion_s,delay_s\n";
    for (const auto& s : reps[0].samples())
      f << s.request_id << ',' << format_double(s.arrival) << ',' << format_double(s.completion)
        << ',' << format_double(s.delay()) << '\n';
    run.check(f, "delays.csv");
  }
  if (reps[0].per_message) run.write_text("utilization.json", usage_json_text(reps[0].result));

  auto summary_of = [](const std::vector<double>& d) {
    ordered_json s;
    s["requests"] = d.size();
    if (d.empty()) return s;
    auto sorted = d;
    std::sort(sorted.begin(), sorted.end());
    s["mean_s"] = mean(sorted);
    s["p50_s"] = quantile_sorted(sorted, 0.5);
    s["p90_s"] = quantile_sorted(sorted, 0.9);
    s["p99_s"] = quantile_sorted(sorted, 0.99);
    return s;
  };
  ordered_json summary;
  summary["mode"] = mode == SimulationMode::SingleJob ? "single-job" : "per-message";
  summary["lambda_beta"] = lb;
  summary["rho"] = rho;
  summary["warmup_s"] = c.simulation.warmup_s;
  summary["replications"] = ordered_json::array();
  for (const auto& r : reps) summary["replications"].push_back(summary_of(r.delays));
  run.write_text("summary.json", summary.dump(2));
  run.finish();

  const auto& s0 = summary["replications"][0];
  run.out() << "simulated " << reps[0].samples().size() << " requests (rho=" << rho << ")";
  if (s0.contains("p99_s"))
    run.out() << " mean=" << s0["mean_s"].get<double>() << " s p99=" << s0["p99_s"].get<double>()
              << " s";
  run.out() << '\n';
  return kExitOk;
}

int cmd_predict(Run& run, std::optional<double> rate_flag, std::optional<double> pct_flag,
                double multiplier) {
  const auto& c = run.config();
  const double lb = rate_flag ? *rate_flag : config_lambda_beta(c);
  const double p = pct_flag ? *pct_flag : c.policy.percentile;
  if (!(lb > 0.0)) throw ConfigError("--rate: must be positive");
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("--percentile: must lie in (0, 1)");
  if (!(multiplier > 0.0)) throw ConfigError("--multiplier: must be positive");
  const auto profiles = c.policy.apply(c.profiles, multiplier);
  const auto model = build_delay_model(lb, profiles);

  double tau_p = model.K;
  bool clamped = 1.0 - p > model.psi;
  if (!clamped) tau_p = delay_percentile(p, model);

  auto f = run.open("survival.csv");
  f << "tau_s,survival\n";
  const double top = delay_percentile(std::max(p, 1.0 - 1e-4 * std::min(1.0, model.psi)), model);
  constexpr int kPoints = 200;
  for (int i = 0; i <= kPoints; ++i) {
    const double tau = top * i / kPoints;
    f << format_double(tau) << ',' << format_double(delay_survival(tau, model).probability) << '\n';
  }
  run.check(f, "survival.csv");

  auto j = ordered_json::parse(to_json_text(model));
  j["multiplier"] = multiplier;
  j["percentile"] = p;
  j["percentile_delay_s"] = tau_p;
  j["percentile_below_validity_threshold"] = clamped;
  run.write_text("model.json", j.dump(2));
  run.finish();
  run.out() << "p=" << p << " delay=" << format_double(tau_p) << " s (lambda_beta=" << lb
            << ", rho=" << model.rho << ")\n";
  return kExitOk;
}

int cmd_scale(Run& run, const std::string& trace_path, std::optional<double> fixed) {
  const auto& c = run.config();
  std::vector<WindowSpec> series;
  ArrivalGenerator gen;
  EpcProfiles profiles = c.profiles;
  LoopOptions opts;
  opts.seed = run.seed();
  opts.simulation.topology = c.topology;
  opts.simulation.link_latency = c.simulation.link_latency_s;
  opts.simulation.mme_crypto_work = c.simulation.mme_crypto_work;
  opts.procedure = c.procedure_template();
  opts.fixed_multiplier = fixed;
  if (!trace_path.empty()) {
    const auto parsed = parse_trace(trace_path);
    const auto windows = window_and_fit(parsed.stream, c.trace.window_s);
    for (const auto& pt : replay_rate_series(windows))
      series.push_back({pt.window_start, c.trace.window_s, pt.lambda_hat, std::nullopt});
    profiles = c.profiles.scaled(c.trace.capacity_scale);
    gen = poisson_generator();
    opts.warmup = 0.0;
    run.manifest()["trace"] = trace_path;
  } else {
    if (c.scale.q_series.empty())
      throw ConfigError("scale.q_series: required unless --trace is given");
    for (std::size_t i = 0; i < c.scale.q_series.size(); ++i) {
      const auto q = c.scale.q_series[i];
      series.push_back({static_cast<double>(i) * c.scale.window_s, c.scale.window_s,
                        lambda_beta(q, c.traffic.period_T, c.traffic.tx_probability), q});
    }
    gen = traffic_generator(c.traffic, c.scale.group_size);
    opts.warmup = c.scale.warmup_s;
  }
  const auto records = run_scaling_loop(series, profiles, c.policy, gen, opts);
  auto f = run.open("decisions.csv");
  write_decisions_csv(f, records);
  run.check(f, "decisions.csv");
  run.finish();

  int exit = kExitOk;
  for (const auto& r : records) {
    run.out() << "window " << r.window_start << " s: lambda=" << r.decision.lambda_beta
              << " x" << r.decision.multiplier << " predicted=" << r.decision.predicted
              << " empirical=" << r.empirical << (r.decision.feasible ? "" : " INFEASIBLE")
              << '\n';
    if (!r.decision.feasible) exit = kExitOverload;
  }
  return exit;
}

int cmd_fit_trace(Run& run, const std::string& trace_path, std::optional<double> window) {
  const auto parsed = parse_trace(trace_path);
  const double w = window ? *window : (run.has_config() ? run.config().trace.window_s : 3600.0);
  const auto windows = window_and_fit(parsed.stream, w);
  auto f = run.open("windows.csv");
  write_windows_csv(f, windows);
  run.check(f, "windows.csv");
  run.manifest()["trace"] = trace_path;
  run.manifest()["duplicates"] = parsed.duplicates;
  run.manifest()["malformed"] = parsed.malformed;
  run.finish();
  std::size_t pass = 0, fitted = 0;
  for (const auto& x : windows) {
    if (!x.has_ks) continue;
    ++fitted;
    if (x.ks.pass_1pct()) ++pass;
  }
  run.out() << parsed.stream.size() << " events, " << windows.size() << " windows, " << pass
            << "/" << fitted << " exponential fits pass at 1%";
  if (parsed.malformed) run.out() << ", " << parsed.malformed << " malformed rows rejected";
  run.out() << '\n';
  return kExitOk;
}

int cmd_fixture(Run& run, double peak_rate) {
  const auto profile = DiurnalProfile::morning_ramp(peak_rate);
  const auto stream = diurnal_fixture(profile, run.seed());
  auto f = run.open("fixture.csv");
  f << "timestamp_s\n";
  for (const auto& e : stream.events()) f << format_double(e.time) << '\n';
  run.check(f, "fixture.csv");
  run.manifest()["peak_rate"] = peak_rate;
  run.finish();
  run.out() << "wrote " << stream.size() << " events over " << profile.rates.size()
            << " windows\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bearer-request load and delay model for IoT traffic at the EPC", "epcload"};
  app.set_version_flag("--version", EPCLOAD_VERSION);
  app.require_subcommand(1);

  Common g, v, s, p, sc, ft, fx;
  auto* gen = app.add_subcommand("generate", "generate a bearer-request stream");
  add_common(gen, g, true);

  std::string stream_path;
  auto* val = app.add_subcommand("validate-arrivals",
                                 "compare inter-arrival gaps with the exponential model");
  add_common(val, v, false);
  val->add_option("--stream", stream_path, "event CSV or .bin stream instead of generating");

  std::string mode;
  int replications = 1, jobs = 1;
  auto* sim = app.add_subcommand("simulate", "simulate the EPC and record bearer delays");
  add_common(sim, s, true);
  sim->add_option("--mode", mode, "per-message or single-job");
  sim->add_option("--replications", replications, "independent seeds")->capture_default_str();
  sim->add_option("--jobs", jobs, "parallel replications")->capture_default_str();

  std::optional<double> rate, pct;
  double multiplier = 1.0;
  auto* pre = app.add_subcommand("predict", "evaluate the analytic delay model");
  add_common(pre, p, true);
  pre->add_option("--rate", rate, "bearer-request rate (default: from the population)");
  pre->add_option("--percentile", pct, "delay percentile (default: policy.percentile)");
  pre->add_option("--multiplier", multiplier, "capacity multiplier")->capture_default_str();

  std::string scale_trace;
  std::optional<double> fixed;
  auto* sca = app.add_subcommand("scale", "run the closed scaling loop");
  add_common(sca, sc, true);
  sca->add_option("--trace", scale_trace, "trace CSV to replay instead of scale.q_series");
  sca->add_option("--multiplier", fixed, "hold this multiplier (baseline)");

  std::string fit_trace;
  std::optional<double> window;
  auto* fit = app.add_subcommand("fit-trace", "windowed exponential fits of a trace");
  add_common(fit, ft, false);
  fit->add_option("--trace", fit_trace, "trace CSV")->required();
  fit->add_option("--window", window, "window length in seconds");

  double peak = 1.0;
  auto* fix = app.add_subcommand("fixture", "write a synthetic diurnal trace");
  add_common(fix, fx, false);
  fix->add_option("--peak-rate", peak, "events per second in the busiest hour")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) {
      Run run("generate", g, out);
      return cmd_generate(run);
    }
    if (val->parsed()) {
      if (stream_path.empty() && v.config.empty())
        throw ConfigError("validate-arrivals: give --stream or --config");
      Run run("validate-arrivals", v, out);
      return cmd_validate(run, stream_path);
    }
    if (sim->parsed()) {
      Run run("simulate", s, out);
      return cmd_simulate(run, mode, replications, jobs);
    }
    if (pre->parsed()) {
      Run run("predict", p, out);
      return cmd_predict(run, rate, pct, multiplier);
    }
    if (sca->parsed()) {
      Run run("scale", sc, out);
      return cmd_scale(run, scale_trace, fixed);
    }
    if (fit->parsed()) {
      Run run("fit-trace", ft, out);
      return cmd_fit_trace(run, fit_trace, window);
    }
    if (fix->parsed()) {
      Run run("fixture", fx, out);
      return cmd_fixture(run, peak);
    }
  } catch (const OverloadError& e) {
    err << "error: " << e.what() << "\nhint: a capacity multiplier above "
        << e.min_multiplier() << " brings the MME below saturation\n";
    return kExitOverload;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace epcload
