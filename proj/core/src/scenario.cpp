#include "aoisim/scenario.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "aoisim/deadline.hpp"
#include "aoisim/indices.hpp"

namespace aoisim {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string join_doubles(const std::vector<double>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ';';
    out += fmt_double(vs[i]);
  }
  return out;
}

TerminalSpec parse_terminal(const json& j, int id) {
  TerminalSpec spec;
  spec.id = id;
  const bool has_lambda = j.contains("lambda");
  const bool has_period = j.contains("period");
  if (has_lambda == has_period)
    throw ConfigError("terminal " + std::to_string(id) +
                      ": exactly one of lambda/period required");
  if (has_lambda) {
    spec.arrivals = BernoulliArrivals{j.at("lambda").get<double>()};
  } else {
    PeriodicArrivals p;
    p.period = j.at("period").get<int>();
    if (j.contains("phase")) p.phase = j.at("phase").get<int>();
    spec.arrivals = p;
  }
  if (j.contains("omega")) spec.omega = j.at("omega").get<double>();
  if (j.contains("p_e")) spec.p_e = j.at("p_e").get<double>();
  if (j.contains("deadline")) spec.deadline = j.at("deadline").get<int>();
  if (j.contains("epsilon")) spec.epsilon = j.at("epsilon").get<double>();
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw ConfigError("terminal " + std::to_string(id) + ": " + e.what());
  }
  return spec;
}

const std::vector<std::string> kSweepVars = {
    "lambda", "lambda_0", "lambda_1", "p_e", "p_e_0", "p_e_1", "n", "t_s"};

}  // namespace

void ScenarioConfig::validate() const {
  if (horizon == 0) throw ConfigError("horizon must be >= 1");
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (frame_slots < 1) throw ConfigError("frame_slots must be >= 1");
  if (terminals.empty()) throw ConfigError("at least one terminal required");
  if (policies.empty() && !access)
    throw ConfigError("nothing to run: no policies and no access protocol");
  for (const auto& p : policies) {
    if (p == "mdp_oracle") continue;
    policy_kind_from_string(p);  // throws on unknown name
  }
  if (sweep_variable) {
    if (sweep_values.empty()) throw ConfigError("sweep.values must be nonempty");
    bool known = false;
    for (const auto& v : kSweepVars) known = known || v == *sweep_variable;
    if (!known) throw ConfigError("unknown sweep.variable: " + *sweep_variable);
    if (*sweep_variable == "t_s" && !access && policies.empty())
      throw ConfigError("t_s sweep needs an access protocol or policies");
  }
  if (access) {
    try {
      access->config.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("access: ") + e.what());
    }
  }
  for (const auto& t : terminals) {
    try {
      t.validate();
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
}

ScenarioConfig parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  ScenarioConfig cfg;
  try {
    if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<std::uint64_t>();
    if (j.contains("replications"))
      cfg.replications = j.at("replications").get<int>();
    if (j.contains("frame_slots")) cfg.frame_slots = j.at("frame_slots").get<int>();

    if (!j.contains("terminals")) throw ConfigError("terminals required");
    const auto& jt = j.at("terminals");
    if (jt.is_array()) {
      int id = 0;
      for (const auto& item : jt) cfg.terminals.push_back(parse_terminal(item, id++));
    } else if (jt.is_object() && jt.contains("count") && jt.contains("template")) {
      const int count = jt.at("count").get<int>();
      if (count < 1) throw ConfigError("terminals.count must be >= 1");
      for (int id = 0; id < count; ++id)
        cfg.terminals.push_back(parse_terminal(jt.at("template"), id));
    } else {
      throw ConfigError("terminals must be an array or {count, template}");
    }

    if (j.contains("policies"))
      cfg.policies = j.at("policies").get<std::vector<std::string>>();

    if (j.contains("access")) {
      const auto& ja = j.at("access");
      AccessRunConfig arc;
      const std::string proto = ja.value("protocol", std::string("ipra"));
      if (proto == "ipra") arc.protocol = AccessProtocol::ipra;
      else if (proto == "aloha") arc.protocol = AccessProtocol::aloha;
      else throw ConfigError("access.protocol must be ipra or aloha");
      if (ja.contains("p")) arc.config.p = ja.at("p").get<double>();
      if (ja.contains("t_s")) arc.config.t_s = ja.at("t_s").get<int>();
      if (ja.contains("t_c")) arc.config.t_c = ja.at("t_c").get<int>();
      if (ja.contains("index_threshold")) {
        const auto& thr = ja.at("index_threshold");
        if (thr.is_string() && thr.get<std::string>() == "auto")
          arc.auto_threshold = true;
        else
          arc.config.index_threshold = thr.get<double>();
      }
      if (ja.contains("tune_horizon"))
        arc.tune_horizon = ja.at("tune_horizon").get<std::uint64_t>();
      if (ja.contains("tune_grid_points"))
        arc.tune_grid_points = ja.at("tune_grid_points").get<int>();
      if (ja.contains("tune_grid_lo")) arc.tune_grid_lo = ja.at("tune_grid_lo").get<double>();
      if (ja.contains("tune_grid_hi")) arc.tune_grid_hi = ja.at("tune_grid_hi").get<double>();
      cfg.access = arc;
    }

    if (j.contains("sweep")) {
      cfg.sweep_variable = j.at("sweep").at("variable").get<std::string>();
      cfg.sweep_values = j.at("sweep").at("values").get<std::vector<double>>();
    }
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string csv_header() {
  return "scenario,sweep_var,sweep_value,replication,kind,label,n_terminals,"
         "horizon,frame_slots,seed,avg_weighted_aoi,per_terminal_aoi,"
         "violation_freq,contention_slots,idle_contention_slots,"
         "transmission_slots,collision_slots,success_frames,failed_frames,"
         "collision_frames,index_threshold,normalized_aoi,wall_ms";
}

std::string to_csv_line(const CsvRow& r) {
  std::string out;
  out += r.scenario;
  out += ',' + r.sweep_var;
  out += ',' + (r.sweep_value ? fmt_double(*r.sweep_value) : std::string());
  out += ',' + std::to_string(r.replication);
  out += ',' + r.kind;
  out += ',' + r.label;
  out += ',' + std::to_string(r.n_terminals);
  out += ',' + std::to_string(r.horizon);
  out += ',' + std::to_string(r.frame_slots);
  out += ',' + std::to_string(r.seed);
  out += ',' + fmt_double(r.avg_weighted_aoi);
  out += ',' + join_doubles(r.per_terminal_aoi);
  out += ',' + join_doubles(r.violation_freq);
  out += ',' + std::to_string(r.contention.contention_slots);
  out += ',' + std::to_string(r.contention.idle_contention_slots);
  out += ',' + std::to_string(r.contention.transmission_slots);
  out += ',' + std::to_string(r.contention.collision_slots);
  out += ',' + std::to_string(r.contention.success_frames);
  out += ',' + std::to_string(r.contention.failed_frames);
  out += ',' + std::to_string(r.contention.collision_frames);
  out += ',' + fmt_double(r.index_threshold);
  out += ',' + (r.normalized_aoi ? fmt_double(*r.normalized_aoi) : std::string());
  out += ',' + fmt_double(r.wall_ms);
  return out;
}

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << csv_header() << '\n';
  for (const auto& r : rows) out << to_csv_line(r) << '\n';
}

int worker_threads() {
  if (const char* env = std::getenv("AOISIM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

// Applies one sweep value to a copy of the scenario's terminals / frames.
struct SweepPoint {
  std::vector<TerminalSpec> terminals;
  int frame_slots = 1;
  int t_s = 1;
};

SweepPoint apply_sweep(const ScenarioConfig& cfg,
                       const std::optional<double>& value) {
  SweepPoint pt;
  pt.terminals = cfg.terminals;
  pt.frame_slots = cfg.frame_slots;
  pt.t_s = cfg.access ? cfg.access->config.t_s : 1;
  if (!value) return pt;
  const std::string& var = *cfg.sweep_variable;
  const double v = *value;
  const auto set_lambda = [&](TerminalSpec& t) {
    if (!t.is_bernoulli())
      throw ConfigError("lambda sweep over a periodic terminal");
    t.arrivals = BernoulliArrivals{v};
  };
  if (var == "lambda") {
    for (auto& t : pt.terminals)
      if (t.is_bernoulli()) set_lambda(t);
  } else if (var == "lambda_0" || var == "lambda_1") {
    const std::size_t n = var == "lambda_0" ? 0 : 1;
    if (n >= pt.terminals.size()) throw ConfigError("sweep terminal out of range");
    set_lambda(pt.terminals[n]);
  } else if (var == "p_e") {
    for (auto& t : pt.terminals) t.p_e = v;
  } else if (var == "p_e_0" || var == "p_e_1") {
    const std::size_t n = var == "p_e_0" ? 0 : 1;
    if (n >= pt.terminals.size()) throw ConfigError("sweep terminal out of range");
    pt.terminals[n].p_e = v;
  } else if (var == "n") {
    const int count = static_cast<int>(v);
    if (count < 1) throw ConfigError("n sweep value must be >= 1");
    std::vector<TerminalSpec> ts;
    for (int id = 0; id < count; ++id) {
      TerminalSpec t = cfg.terminals[static_cast<std::size_t>(id) %
                                     cfg.terminals.size()];
      t.id = id;
      ts.push_back(t);
    }
    pt.terminals = std::move(ts);
  } else if (var == "t_s") {
    pt.t_s = static_cast<int>(v);
    pt.frame_slots = static_cast<int>(v);  // centralized rows pay the same frame
  }
  for (const auto& t : pt.terminals) t.validate();
  return pt;
}

// Truncation for the two-terminal oracle, sized from geometric tail bounds;
// nullopt when the joint space would blow the memory budget.
std::optional<FullRviOptions> suggest_full_options(
    const std::vector<TerminalSpec>& specs) {
  if (specs.size() != 2) return std::nullopt;
  FullRviOptions o;
  const auto cap_a = [](double lambda) {
    if (lambda >= 0.999) return 6;
    const int a = static_cast<int>(
        std::ceil(std::log(3e-7) / std::log(1.0 - lambda)));
    return std::clamp(a, 8, 40);
  };
  const auto cap_d = [](double lambda, double pe, int a_cap) {
    const double per_slot = 0.5 * (1.0 - pe);  // rough delivery rate share
    const double r = 1.0 - per_slot;
    int d = static_cast<int>(std::ceil(std::log(3e-7) / std::log(r)));
    d += a_cap;
    if (lambda >= 0.999) d = std::max(16, d / 2);
    return std::clamp(d, 16, 256);
  };
  o.a_max1 = cap_a(specs[0].lambda());
  o.a_max2 = cap_a(specs[1].lambda());
  o.d_max1 = cap_d(specs[0].lambda(), specs[0].p_e, o.a_max1);
  o.d_max2 = cap_d(specs[1].lambda(), specs[1].p_e, o.a_max2);
  o.tol = 1e-6;
  const std::size_t joint =
      static_cast<std::size_t>(o.a_max1) * (o.d_max1 + 1) *
      static_cast<std::size_t>(o.a_max2) * (o.d_max2 + 1);
  if (joint > 4'000'000) return std::nullopt;
  return o;
}

struct RunItem {
  std::string kind;   // policy | access | oracle
  std::string label;
};

}  // namespace

std::vector<CsvRow> run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();

  std::vector<std::optional<double>> sweep_points;
  if (cfg.sweep_variable)
    for (double v : cfg.sweep_values) sweep_points.emplace_back(v);
  else
    sweep_points.emplace_back(std::nullopt);

  std::vector<RunItem> items;
  for (const auto& p : cfg.policies)
    items.push_back({p == "mdp_oracle" ? "oracle" : "policy", p});
  if (cfg.access)
    items.push_back(
        {"access", cfg.access->protocol == AccessProtocol::ipra ? "ipra" : "aloha"});

  // rows[point][item][rep]; oracle items occupy rep 0 only.
  std::vector<std::vector<std::vector<std::optional<CsvRow>>>> rows(
      sweep_points.size());
  for (auto& per_point : rows) {
    per_point.resize(items.size());
    for (auto& per_item : per_point)
      per_item.resize(static_cast<std::size_t>(cfg.replications));
  }

  const auto run_point = [&](std::size_t pi) {
    const SweepPoint pt = apply_sweep(cfg, sweep_points[pi]);
    const std::string sweep_var = cfg.sweep_variable.value_or("");

    // Auto-tuned threshold is shared by every replication of this point.
    double tuned_threshold =
        cfg.access ? cfg.access->config.index_threshold : 0.0;
    if (cfg.access && cfg.access->auto_threshold) {
      const auto& arc = *cfg.access;
      double lambda_min = 1.0;
      for (const auto& t : pt.terminals)
        lambda_min = std::min(lambda_min, t.arrival_rate());
      const double d_hi =
          8.0 * (static_cast<double>(pt.terminals.size()) * pt.t_s +
                 1.0 / lambda_min);
      const double grid_lo = arc.tune_grid_lo.value_or(1e-2);
      const double grid_hi = arc.tune_grid_hi.value_or(
          index_bernoulli(1, static_cast<std::int64_t>(d_hi), lambda_min));
      AccessConfig tmpl = arc.config;
      tmpl.t_s = pt.t_s;
      const auto tune = tune_ipra(
          pt.terminals, tmpl,
          make_log_grid(grid_lo, grid_hi, arc.tune_grid_points),
          arc.tune_horizon, mix_seed(cfg.seed, 0xA110 + pi));
      tuned_threshold = tune.config.index_threshold;
    }

    for (std::size_t ii = 0; ii < items.size(); ++ii) {
      const auto& item = items[ii];
      const int reps = item.kind == "oracle" ? 1 : cfg.replications;
      for (int rep = 0; rep < reps; ++rep) {
        const std::uint64_t run_seed = mix_seed(cfg.seed, (pi << 20) ^ rep);
        CsvRow row;
        row.scenario = cfg.name;
        row.sweep_var = sweep_var;
        row.sweep_value = sweep_points[pi];
        row.replication = rep;
        row.kind = item.kind;
        row.label = item.label;
        row.n_terminals = static_cast<int>(pt.terminals.size());
        row.horizon = cfg.horizon;
        row.frame_slots = pt.frame_slots;
        row.seed = run_seed;

        const auto t0 = std::chrono::steady_clock::now();
        if (item.kind == "oracle") {
          const auto opts = suggest_full_options(pt.terminals);
          if (!opts) {
            std::cerr << "note: skipping mdp_oracle row (state space beyond "
                         "budget) at sweep point "
                      << (sweep_points[pi] ? fmt_double(*sweep_points[pi])
                                           : std::string("-"))
                      << "\n";
            continue;
          }
          const auto res = rvi_full(pt.terminals, *opts);
          row.avg_weighted_aoi = res.j;
          row.horizon = 0;
          row.seed = 0;
        } else if (item.kind == "policy") {
          auto policy = make_policy(policy_kind_from_string(item.label));
          const RunMetrics m = run_framed(pt.terminals, *policy,
                                          pt.frame_slots, cfg.horizon, run_seed);
          row.avg_weighted_aoi = m.avg_weighted_aoi;
          row.per_terminal_aoi = m.per_terminal_mean_aoi;
          row.violation_freq = m.per_terminal_violation_freq;
        } else {
          AccessConfig acfg = cfg.access->config;
          acfg.t_s = pt.t_s;
          acfg.index_threshold = tuned_threshold;
          const RunMetrics m = run_access(pt.terminals, cfg.access->protocol,
                                          acfg, cfg.horizon, run_seed);
          row.avg_weighted_aoi = m.avg_weighted_aoi;
          row.per_terminal_aoi = m.per_terminal_mean_aoi;
          row.violation_freq = m.per_terminal_violation_freq;
          row.contention = m.contention;
          row.index_threshold = acfg.index_threshold;
        }
        const auto t1 = std::chrono::steady_clock::now();
        row.wall_ms =
            std::chrono::duration<double, std::milli>(t1 - t0).count();
        rows[pi][ii][static_cast<std::size_t>(rep)] = std::move(row);
      }
    }

    // Normalized AoI for access rows: divide by the first policy row of the
    // same (point, replication).
    if (cfg.access && !cfg.policies.empty()) {
      std::size_t ref_item = items.size();
      for (std::size_t ii = 0; ii < items.size(); ++ii)
        if (items[ii].kind == "policy") {
          ref_item = ii;
          break;
        }
      if (ref_item < items.size()) {
        for (std::size_t ii = 0; ii < items.size(); ++ii) {
          if (items[ii].kind != "access") continue;
          for (int rep = 0; rep < cfg.replications; ++rep) {
            auto& acc_row = rows[pi][ii][static_cast<std::size_t>(rep)];
            const auto& ref_row = rows[pi][ref_item][static_cast<std::size_t>(rep)];
            if (acc_row && ref_row && ref_row->avg_weighted_aoi > 0)
              acc_row->normalized_aoi =
                  acc_row->avg_weighted_aoi / ref_row->avg_weighted_aoi;
          }
        }
      }
    }
  };

  const int threads =
      std::min<int>(worker_threads(), static_cast<int>(sweep_points.size()));
  if (threads <= 1) {
    for (std::size_t pi = 0; pi < sweep_points.size(); ++pi) run_point(pi);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (;;) {
            const std::size_t pi = next.fetch_add(1);
            if (pi >= sweep_points.size()) break;
            run_point(pi);
          }
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<CsvRow> flat;
  for (const auto& per_point : rows)
    for (const auto& per_item : per_point)
      for (const auto& r : per_item)
        if (r) flat.push_back(*r);

  if (cfg.output) write_csv(*cfg.output, flat);
  return flat;
}

std::vector<PresetInfo> list_presets() {
  return {
      {"fig5a", "2 symmetric Bernoulli terminals, lambda sweep 0.1..1.0; "
                "whittle / no-buffer vs exact 2-terminal oracle"},
      {"fig5b", "2 terminals, lambda_1 sweep with lambda_2 = 0.5; whittle / "
                "no-buffer vs oracle"},
      {"fig5c", "mixed arrivals: terminal 0 Bernoulli (swept), terminal 1 "
                "periodic T_p = 2; whittle with pattern-matched indices"},
      {"fig5d", "unreliable channels: lambda = 0.8 both, p_e_1 = 0.9, sweep "
                "p_e_0; whittle (scaled indices) vs oracle"},
      {"fig6", "N sweep 5..100 at lambda = 0.02: whittle vs no-buffer vs "
               "rr-one vs stationary-random"},
      {"fig7", "IPRA vs centralized whittle at N = 50, lambda = 0.01, "
               "p = 0.2, sweep T_s in {1, 10, 100}; normalized AoI column"},
  };
}

ScenarioConfig make_preset(const std::string& name) {
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.seed = 424242;
  cfg.horizon = 1'000'000;
  const auto bern_terminal = [](int id, double lambda) {
    TerminalSpec t;
    t.id = id;
    t.arrivals = BernoulliArrivals{lambda};
    return t;
  };
  const auto lambda_grid = [] {
    std::vector<double> v;
    for (int i = 1; i <= 10; ++i) v.push_back(i / 10.0);
    return v;
  };

  if (name == "fig5a") {
    cfg.terminals = {bern_terminal(0, 0.5), bern_terminal(1, 0.5)};
    cfg.policies = {"whittle", "whittle_no_buffer", "mdp_oracle"};
    cfg.sweep_variable = "lambda";
    cfg.sweep_values = lambda_grid();
  } else if (name == "fig5b") {
    cfg.terminals = {bern_terminal(0, 0.5), bern_terminal(1, 0.5)};
    cfg.policies = {"whittle", "whittle_no_buffer", "mdp_oracle"};
    cfg.sweep_variable = "lambda_0";
    cfg.sweep_values = lambda_grid();
  } else if (name == "fig5c") {
    TerminalSpec periodic;
    periodic.id = 1;
    periodic.arrivals = PeriodicArrivals{2, std::nullopt};
    cfg.terminals = {bern_terminal(0, 0.5), periodic};
    cfg.policies = {"whittle", "rr_one"};
    cfg.sweep_variable = "lambda_0";
    cfg.sweep_values = lambda_grid();
  } else if (name == "fig5d") {
    cfg.terminals = {bern_terminal(0, 0.8), bern_terminal(1, 0.8)};
    cfg.terminals[1].p_e = 0.9;
    cfg.policies = {"whittle", "mdp_oracle"};
    cfg.sweep_variable = "p_e_0";
    cfg.sweep_values = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  } else if (name == "fig6") {
    cfg.terminals = {bern_terminal(0, 0.02)};
    cfg.policies = {"whittle", "whittle_no_buffer", "rr_one",
                    "stationary_random"};
    cfg.sweep_variable = "n";
    cfg.sweep_values = {5, 10, 20, 30, 50, 75, 100};
  } else if (name == "fig7") {
    TerminalSpec t = bern_terminal(0, 0.01);
    for (int id = 0; id < 50; ++id) {
      t.id = id;
      cfg.terminals.push_back(t);
    }
    cfg.policies = {"whittle"};
    AccessRunConfig arc;
    arc.protocol = AccessProtocol::ipra;
    arc.config.p = 0.2;
    arc.auto_threshold = true;
    cfg.access = arc;
    cfg.sweep_variable = "t_s";
    cfg.sweep_values = {1, 10, 100};
    cfg.replications = 3;
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  return cfg;
}

IndexValidationReport validate_indices(const std::vector<double>& lambdas,
                                       const std::vector<int>& as,
                                       const std::vector<int>& ds,
                                       const RviOptions& oracle_opts) {
  if (lambdas.empty() || as.empty() || ds.empty())
    throw ConfigError("validate_indices: empty grid");

  struct Job {
    double lambda;
    int a, d;
  };
  std::vector<Job> jobs;
  for (double l : lambdas)
    for (int a : as)
      for (int d : ds) jobs.push_back({l, a, d});

  IndexValidationReport rep;
  rep.checks.resize(jobs.size());

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      const auto& jb = jobs[i];
      IndexCheck c;
      c.lambda = jb.lambda;
      c.a = jb.a;
      c.d = jb.d;
      c.closed_form = index_bernoulli(jb.a, jb.d, jb.lambda);
      c.flip_charge = indifference_charge(jb.lambda, jb.a, jb.d, 1e-6, oracle_opts);
      c.bracket_lo = jb.d > 1 ? index_bernoulli(jb.a, jb.d - 1, jb.lambda) : 0.0;
      c.bracket_hi = index_bernoulli(jb.a, jb.d + 1, jb.lambda);
      const double slack = 1e-4;
      c.pass = c.flip_charge >= c.bracket_lo - slack &&
               c.flip_charge <= c.bracket_hi + slack;
      rep.checks[i] = c;
    }
  };
  const int threads = std::min<int>(worker_threads(), static_cast<int>(jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  rep.all_pass = true;
  for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

}  // namespace aoisim
