#include "dopcbf/experiment.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "dopcbf/svg.hpp"

namespace dopcbf {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

std::string join(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path + " must be an object");
}

void check_keys(const json& j, const std::string& path,
                const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      fail("unknown config field: " + join(path, it.key().c_str()));
    }
  }
}

double get_num(const json& j, const std::string& path, const char* key,
               double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) fail(join(path, key) + " must be a number");
  return v.get<double>();
}

int get_int(const json& j, const std::string& path, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(join(path, key) + " must be an integer");
  return v.get<int>();
}

bool get_bool(const json& j, const std::string& path, const char* key,
              bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) fail(join(path, key) + " must be a boolean");
  return v.get<bool>();
}

std::string get_str(const json& j, const std::string& path, const char* key,
                    const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) fail(join(path, key) + " must be a string");
  return v.get<std::string>();
}

std::uint64_t get_u64(const json& j, const std::string& path, const char* key,
                      std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  fail(join(path, key) + " must be a nonnegative integer");
}

const char* kind_name(RoadProfile::Kind k) {
  switch (k) {
    case RoadProfile::Kind::three_section: return "three_section";
    case RoadProfile::Kind::random: return "random";
    case RoadProfile::Kind::constant: return "constant";
    case RoadProfile::Kind::custom: return "custom";
  }
  return "three_section";
}

void parse_road(const json& r, RoadSpec& road) {
  expect_object(r, "road");
  check_keys(r, "road", {"kind", "constant_theta", "knots", "rate_bound"});
  const std::string kind = get_str(r, "road", "kind", "three_section");
  if (kind == "three_section") {
    road.kind = RoadProfile::Kind::three_section;
  } else if (kind == "random") {
    road.kind = RoadProfile::Kind::random;
  } else if (kind == "constant") {
    road.kind = RoadProfile::Kind::constant;
  } else if (kind == "custom") {
    road.kind = RoadProfile::Kind::custom;
  } else {
    fail("road.kind must be one of \"three_section\", \"random\", \"constant\", "
         "\"custom\" (got \"" + kind + "\")");
  }
  road.constant_theta = get_num(r, "road", "constant_theta", 0.0);
  road.rate_bound = get_num(r, "road", "rate_bound", 0.02);
  if (r.contains("knots")) {
    if (road.kind != RoadProfile::Kind::custom) {
      fail("road.knots is only valid with road.kind == \"custom\"");
    }
    const json& ks = r.at("knots");
    if (!ks.is_array()) fail("road.knots must be an array of [t, theta] pairs");
    road.knots.clear();
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const json& kv = ks.at(i);
      if (!kv.is_array() || kv.size() != 2 || !kv.at(0).is_number() ||
          !kv.at(1).is_number()) {
        fail("road.knots[" + std::to_string(i) + "] must be a [t, theta] pair");
      }
      road.knots.emplace_back(kv.at(0).get<double>(), kv.at(1).get<double>());
    }
  }
}

void parse_filter(const json& f, AccFilterParams& filt) {
  expect_object(f, "filter");
  check_keys(f, "filter",
             {"alpha", "sigma", "nu", "omega", "gamma", "w_s", "w_u", "Lr",
              "alpha_d_rule"});
  filt.alpha = get_num(f, "filter", "alpha", filt.alpha);
  filt.sigma = get_num(f, "filter", "sigma", filt.sigma);
  filt.nu = get_num(f, "filter", "nu", filt.nu);
  filt.omega = get_num(f, "filter", "omega", filt.omega);
  filt.gamma = get_num(f, "filter", "gamma", filt.gamma);
  filt.w_s = get_num(f, "filter", "w_s", filt.w_s);
  if (f.contains("w_u") && !f.at("w_u").is_null()) {
    if (!f.at("w_u").is_number()) fail("filter.w_u must be a number or null");
    filt.w_u = f.at("w_u").get<double>();
  }
  if (f.contains("Lr")) {
    const json& lr = f.at("Lr");
    if (!lr.is_array() || lr.size() != 2 || !lr.at(0).is_number() ||
        !lr.at(1).is_number()) {
      fail("filter.Lr must be an array of two numbers");
    }
    filt.Lr << lr.at(0).get<double>(), lr.at(1).get<double>();
  }
  const std::string rule = get_str(f, "filter", "alpha_d_rule", "derivation");
  if (rule == "derivation") {
    filt.alpha_d_rule = AlphaDRule::derivation;
  } else if (rule == "one_minus_quarter_nu") {
    filt.alpha_d_rule = AlphaDRule::one_minus_quarter_nu;
  } else {
    fail("filter.alpha_d_rule must be \"derivation\" or \"one_minus_quarter_nu\" "
         "(got \"" + rule + "\")");
  }
}

void validate_semantics(const ExperimentConfig& cfg) {
  if (cfg.controller != "cbf" && cfg.controller != "docbf" &&
      cfg.controller != "dopcbf") {
    fail("controller must be one of \"cbf\", \"docbf\", \"dopcbf\" (got \"" +
         cfg.controller + "\")");
  }
  try {
    cfg.acc.validate();
    cfg.sim.validate();
  } catch (const std::exception& e) {
    fail(e.what());
  }
  if (!std::isfinite(cfg.D0)) fail("x0.D must be finite");
  if (!std::isfinite(cfg.v0) || cfg.v0 < 0.0) fail("x0.v must be nonnegative");
  if (!(cfg.metrics_skip >= 0.0) || cfg.metrics_skip >= cfg.sim.t_end) {
    fail("metrics.skip must lie in [0, sim.t_end)");
  }
  if (!(cfg.road.rate_bound > 0.0)) fail("road.rate_bound must be positive");
  if (cfg.road.kind == RoadProfile::Kind::constant &&
      std::abs(cfg.road.constant_theta) > 0.2) {
    fail("road.constant_theta must lie in [-0.2, 0.2]");
  }
  if (cfg.road.kind == RoadProfile::Kind::custom) {
    if (cfg.road.knots.size() < 2) {
      fail("road.knots needs at least two [t, theta] pairs");
    }
    RoadProfile probe;
    probe.kind = RoadProfile::Kind::custom;
    probe.knots = cfg.road.knots;
    probe.rate_bound = cfg.road.rate_bound;
    try {
      probe.validate();
    } catch (const std::exception& e) {
      fail(std::string("road.knots: ") + e.what());
    }
  }
  if (!(cfg.filter.alpha > 0.0)) fail("filter.alpha must be positive");
  if (!(cfg.filter.sigma > 0.0)) fail("filter.sigma must be positive");
  if (!(cfg.filter.nu > 0.0)) fail("filter.nu must be positive");
  if (!(cfg.filter.omega >= 0.0)) fail("filter.omega must be nonnegative");
  if (!(cfg.filter.gamma > 0.0)) fail("filter.gamma must be positive");
  if (!(cfg.filter.w_s > 0.0)) fail("filter.w_s must be positive");
  if (cfg.filter.w_u && !(*cfg.filter.w_u > 0.0)) {
    fail("filter.w_u must be positive");
  }
  if (!cfg.filter.Lr.allFinite()) fail("filter.Lr must be finite");
  try {
    build_acc_controllers(cfg.acc, cfg.filter);
  } catch (const std::exception& e) {
    fail(std::string("config rejected: ") + e.what());
  }
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  expect_object(j, "config");
  check_keys(j, "",
             {"controller", "seed", "output_dir", "road", "acc", "x0", "filter",
              "sim", "metrics"});
  cfg.controller = get_str(j, "", "controller", cfg.controller);
  cfg.seed = get_u64(j, "", "seed", cfg.seed);
  cfg.output_dir = get_str(j, "", "output_dir", cfg.output_dir);
  if (j.contains("road")) parse_road(j.at("road"), cfg.road);
  if (j.contains("acc")) {
    const json& a = j.at("acc");
    expect_object(a, "acc");
    check_keys(a, "acc",
               {"M", "c", "T", "mu", "g", "v_l", "v_r", "theta_dm",
                "raw_gravity_channel"});
    cfg.acc.M = get_num(a, "acc", "M", cfg.acc.M);
    cfg.acc.c = get_num(a, "acc", "c", cfg.acc.c);
    cfg.acc.T = get_num(a, "acc", "T", cfg.acc.T);
    cfg.acc.mu = get_num(a, "acc", "mu", cfg.acc.mu);
    cfg.acc.g = get_num(a, "acc", "g", cfg.acc.g);
    cfg.acc.v_l = get_num(a, "acc", "v_l", cfg.acc.v_l);
    cfg.acc.v_r = get_num(a, "acc", "v_r", cfg.acc.v_r);
    cfg.acc.theta_dm = get_num(a, "acc", "theta_dm", cfg.acc.theta_dm);
    cfg.acc.raw_gravity_channel =
        get_bool(a, "acc", "raw_gravity_channel", cfg.acc.raw_gravity_channel);
  }
  if (j.contains("x0")) {
    const json& x = j.at("x0");
    expect_object(x, "x0");
    check_keys(x, "x0", {"D", "v"});
    cfg.D0 = get_num(x, "x0", "D", cfg.D0);
    cfg.v0 = get_num(x, "x0", "v", cfg.v0);
  }
  if (j.contains("filter")) parse_filter(j.at("filter"), cfg.filter);
  if (j.contains("sim")) {
    const json& s = j.at("sim");
    expect_object(s, "sim");
    check_keys(s, "sim", {"t_end", "dt_ctrl", "dt_int", "record_every"});
    cfg.sim.t_end = get_num(s, "sim", "t_end", cfg.sim.t_end);
    cfg.sim.dt_ctrl = get_num(s, "sim", "dt_ctrl", cfg.sim.dt_ctrl);
    cfg.sim.dt_int = get_num(s, "sim", "dt_int", cfg.sim.dt_int);
    cfg.sim.record_every = get_int(s, "sim", "record_every", cfg.sim.record_every);
  }
  if (j.contains("metrics")) {
    const json& m = j.at("metrics");
    expect_object(m, "metrics");
    check_keys(m, "metrics", {"skip"});
    cfg.metrics_skip = get_num(m, "metrics", "skip", cfg.metrics_skip);
  }
  validate_semantics(cfg);
  return cfg;
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("short write to " + path.string());
}

json report_to_json(const RunReport& rep) {
  json j;
  j["rms_du"] = rep.rms_du;
  j["min_h"] = rep.min_h;
  j["min_hde"] = rep.min_hde;
  j["violation"] = rep.violation;
  j["violation_time"] =
      rep.violation_time ? json(*rep.violation_time) : json(nullptr);
  j["qp_failures"] = rep.qp_failures;
  return j;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["controller"] = cfg.controller;
  j["seed"] = cfg.seed;
  json road;
  road["kind"] = kind_name(cfg.road.kind);
  road["rate_bound"] = cfg.road.rate_bound;
  if (cfg.road.kind == RoadProfile::Kind::constant) {
    road["constant_theta"] = cfg.road.constant_theta;
  }
  if (cfg.road.kind == RoadProfile::Kind::custom) {
    json ks = json::array();
    for (const auto& [t, th] : cfg.road.knots) ks.push_back({t, th});
    road["knots"] = ks;
  }
  j["road"] = road;
  j["acc"] = {{"M", cfg.acc.M},
              {"c", cfg.acc.c},
              {"T", cfg.acc.T},
              {"mu", cfg.acc.mu},
              {"g", cfg.acc.g},
              {"v_l", cfg.acc.v_l},
              {"v_r", cfg.acc.v_r},
              {"theta_dm", cfg.acc.theta_dm},
              {"raw_gravity_channel", cfg.acc.raw_gravity_channel}};
  j["x0"] = {{"D", cfg.D0}, {"v", cfg.v0}};
  const double w_u = cfg.filter.w_u.value_or(1.0 / (cfg.acc.M * cfg.acc.M));
  j["filter"] = {{"alpha", cfg.filter.alpha},
                 {"sigma", cfg.filter.sigma},
                 {"nu", cfg.filter.nu},
                 {"omega", cfg.filter.omega},
                 {"gamma", cfg.filter.gamma},
                 {"w_s", cfg.filter.w_s},
                 {"w_u", w_u},
                 {"Lr", {cfg.filter.Lr(0), cfg.filter.Lr(1)}},
                 {"alpha_d_rule",
                  cfg.filter.alpha_d_rule == AlphaDRule::derivation
                      ? "derivation"
                      : "one_minus_quarter_nu"}};
  j["sim"] = {{"t_end", cfg.sim.t_end},
              {"dt_ctrl", cfg.sim.dt_ctrl},
              {"dt_int", cfg.sim.dt_int},
              {"record_every", cfg.sim.record_every}};
  j["metrics"] = {{"skip", cfg.metrics_skip}};
  return j;
}

std::string trajectory_csv(const Trajectory& traj, const RoadProfile& road,
                           const AccParams& acc) {
  std::string out = "t,D,v,u,slack,theta,theta_hat,d_true,d_hat,h,h_de\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    const double d_hat = traj.estimates[i](0);
    out += fmt_g(t);
    out += ',';
    out += fmt_g(traj.states[i](0));
    out += ',';
    out += fmt_g(traj.states[i](1));
    out += ',';
    out += fmt_g(traj.controls[i].u.size() > 0 ? traj.controls[i].u(0) : 0.0);
    out += ',';
    out += fmt_g(traj.controls[i].slack);
    out += ',';
    out += fmt_g(road.theta(t));
    out += ',';
    out += fmt_g(grade_from_disturbance(d_hat, acc));
    out += ',';
    out += fmt_g(traj.disturbances[i](0));
    out += ',';
    out += fmt_g(d_hat);
    out += ',';
    out += fmt_g(traj.barrier_h[i]);
    out += ',';
    out += fmt_g(traj.barrier_hde[i]);
    out += '\n';
  }
  return out;
}

std::string run_plot_svg(const Trajectory& traj, const RoadProfile& road,
                         const AccParams& acc) {
  std::vector<double> t = traj.times;
  std::vector<double> h(traj.size()), hde(traj.size()), th(traj.size()),
      th_hat(traj.size()), gap(traj.size()), speed(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    h[i] = traj.barrier_h[i];
    hde[i] = traj.barrier_hde[i];
    th[i] = road.theta(traj.times[i]);
    th_hat[i] = grade_from_disturbance(traj.estimates[i](0), acc);
    gap[i] = traj.states[i](0);
    speed[i] = traj.states[i](1);
  }
  SvgPanel barrier{"barrier",
                   "t (s)",
                   "h",
                   {{"h", "", t, h}, {"h - sigma*V_e", "", t, hde}},
                   0.0};
  SvgPanel grade{"road grade",
                 "t (s)",
                 "theta (rad)",
                 {{"theta", "", t, th}, {"theta_hat", "", t, th_hat}},
                 std::nullopt};
  SvgPanel dist{"gap to lead", "t (s)", "D (m)", {{"D", "", t, gap}}, std::nullopt};
  SvgPanel vel{"speed", "t (s)", "v (m/s)", {{"v", "", t, speed}}, std::nullopt};
  return render_svg_panels({barrier, grade, dist, vel}, 2);
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  return config_to_json(cfg).dump(2) + "\n";
}

RoadProfile resolve_road(const RoadSpec& spec, std::uint64_t seed, double t_end) {
  switch (spec.kind) {
    case RoadProfile::Kind::three_section:
      return make_three_section_profile();
    case RoadProfile::Kind::random:
      return random_road(seed, t_end, spec.rate_bound);
    case RoadProfile::Kind::constant:
      return make_constant_profile(spec.constant_theta);
    case RoadProfile::Kind::custom: {
      RoadProfile p;
      p.kind = RoadProfile::Kind::custom;
      p.knots = spec.knots;
      p.rate_bound = spec.rate_bound;
      p.validate();
      return p;
    }
  }
  throw ConfigError("road.kind is not recognized");
}

RunArtifacts run_single(const ExperimentConfig& cfg,
                        const std::optional<RoadProfile>& road_override) {
  AccControllers ctrls = build_acc_controllers(cfg.acc, cfg.filter);
  RoadProfile road =
      road_override ? *road_override : resolve_road(cfg.road, cfg.seed, cfg.sim.t_end);
  road.validate();

  const AccParams acc = cfg.acc;
  const RoadProfile road_copy = road;
  DisturbanceFn disturbance = [road_copy, acc](double t) {
    Eigen::VectorXd d(1);
    d << grade_disturbance(road_copy.theta(t), acc);
    return d;
  };

  const Controller* ctrl = nullptr;
  if (cfg.controller == "cbf") {
    ctrl = &ctrls.regular_cbf;
  } else if (cfg.controller == "docbf") {
    ctrl = &ctrls.docbf;
  } else if (cfg.controller == "dopcbf") {
    ctrl = &ctrls.dopcbf;
  } else {
    throw ConfigError("controller must be one of \"cbf\", \"docbf\", \"dopcbf\"");
  }

  StateVec x0(2);
  x0 << cfg.D0, cfg.v0;
  Trajectory traj =
      simulate(ctrls.plant, *ctrl, ctrls.observer, disturbance, x0, cfg.sim,
               ctrls.probe);
  RunReport report = make_run_report(traj, cfg.metrics_skip);
  return RunArtifacts{std::move(traj), std::move(report), std::move(road)};
}

int cmd_simulate(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  try {
    RunArtifacts art = run_single(cfg);
    write_text(dir / "trajectory.csv", trajectory_csv(art.traj, art.road, cfg.acc));
    json rep;
    rep["config"] = config_to_json(cfg);
    rep["report"] = report_to_json(art.report);
    write_text(dir / "report.json", rep.dump(2) + "\n");
    write_text(dir / "plot.svg", run_plot_svg(art.traj, art.road, cfg.acc));
    if (art.report.qp_failures > 0) {
      std::cerr << "run finished with " << art.report.qp_failures
                << " infeasible controller step(s); see report.json\n";
      return 1;
    }
    return 0;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    json rep;
    rep["config"] = config_to_json(cfg);
    rep["failure"] = e.what();
    write_text(dir / "report.json", rep.dump(2) + "\n");
    std::cerr << "run failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_batch(const ExperimentConfig& cfg, int n_runs) {
  if (n_runs <= 0) fail("batch size must be positive");
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);

  std::string per_run =
      "seed,controller,rms_du,min_h,min_hde,violation,violation_time,qp_failures\n";
  auto append_row = [&per_run](std::uint64_t seed, const std::string& name,
                               const RunReport& r) {
    per_run += std::to_string(seed);
    per_run += ',';
    per_run += name;
    per_run += ',';
    per_run += fmt_g(r.rms_du);
    per_run += ',';
    per_run += fmt_g(r.min_h);
    per_run += ',';
    per_run += fmt_g(r.min_hde);
    per_run += ',';
    per_run += r.violation ? '1' : '0';
    per_run += ',';
    if (r.violation_time) per_run += fmt_g(*r.violation_time);
    per_run += ',';
    per_run += std::to_string(r.qp_failures);
    per_run += '\n';
  };

  std::vector<RunReport> baseline, candidate;
  baseline.reserve(static_cast<std::size_t>(n_runs));
  candidate.reserve(static_cast<std::size_t>(n_runs));
  int qp_failures_a = 0;
  int qp_failures_b = 0;
  json failures = json::array();
  for (int i = 0; i < n_runs; ++i) {
    const std::uint64_t run_seed =
        derive_run_seed(cfg.seed, static_cast<std::uint64_t>(i));
    const RoadProfile road =
        random_road(run_seed, cfg.sim.t_end, cfg.road.rate_bound);

    ExperimentConfig a = cfg;
    a.controller = "docbf";
    ExperimentConfig b = cfg;
    b.controller = "dopcbf";
    try {
      const RunArtifacts ra = run_single(a, road);
      const RunArtifacts rb = run_single(b, road);
      append_row(run_seed, "docbf", ra.report);
      append_row(run_seed, "dopcbf", rb.report);
      qp_failures_a += ra.report.qp_failures;
      qp_failures_b += rb.report.qp_failures;
      baseline.push_back(ra.report);
      candidate.push_back(rb.report);
    } catch (const std::exception& e) {
      // One bad pair must not sink the batch; it is dropped from the paired
      // statistics and recorded for the summary.
      std::cerr << "run pair (seed " << run_seed << ") failed: " << e.what()
                << "\n";
      failures.push_back(
          {{"seed", run_seed}, {"message", std::string(e.what())}});
    }
  }

  const BatchSummary s = compare_batch(baseline, candidate);
  json summary;
  summary["n"] = n_runs;
  summary["master_seed"] = cfg.seed;
  summary["baseline"] = "docbf";
  summary["candidate"] = "dopcbf";
  summary["mean_improvement_pct"] = s.mean_improvement_pct;
  summary["max_improvement_pct"] = s.max_improvement_pct;
  summary["min_improvement_pct"] = s.min_improvement_pct;
  summary["win_rate"] = s.win_rate;
  summary["pairs_compared"] = s.pairs_compared;
  summary["pairs_skipped"] = s.pairs_skipped;
  summary["violations"] = {{"docbf", s.violations_a}, {"dopcbf", s.violations_b}};
  summary["qp_failures"] = {{"docbf", qp_failures_a}, {"dopcbf", qp_failures_b}};
  summary["failed_pairs"] = failures;
  summary["config"] = config_to_json(cfg);

  write_text(dir / "per_run.csv", per_run);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return (qp_failures_a + qp_failures_b) > 0 || !failures.empty() ? 1 : 0;
}

int cmd_sweep_sigma(const ExperimentConfig& cfg, const std::vector<double>& sigmas) {
  if (sigmas.empty()) fail("sigma sweep needs at least one value");
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);

  std::string csv = "sigma,min_h,min_hde,rms_du\n";
  SvgPanel panel{"barrier vs time", "t (s)", "h", {}, 0.0};
  int ran = 0;
  for (const double sigma : sigmas) {
    ExperimentConfig c = cfg;
    c.filter.sigma = sigma;
    RunArtifacts art;
    try {
      if (!(sigma > 0.0)) throw ContractViolation("sigma must be positive");
      art = run_single(c);
    } catch (const std::exception& e) {
      std::cerr << "skipping sigma=" << fmt_g(sigma) << ": " << e.what() << "\n";
      continue;
    }
    ++ran;
    csv += fmt_g(sigma);
    csv += ',';
    csv += fmt_g(art.report.min_h);
    csv += ',';
    csv += fmt_g(art.report.min_hde);
    csv += ',';
    csv += fmt_g(art.report.rms_du);
    csv += '\n';
    SvgSeries series;
    series.label = "sigma=" + std::string(fmt_g(sigma));
    series.x = art.traj.times;
    series.y = art.traj.barrier_h;
    panel.series.push_back(std::move(series));
  }

  write_text(dir / "sweep.csv", csv);
  write_text(dir / "sweep.svg", render_svg_panels({panel}, 1));
  if (ran == 0) {
    std::cerr << "no admissible sigma values; nothing was run\n";
    return 1;
  }
  return 0;
}

}  // namespace dopcbf
