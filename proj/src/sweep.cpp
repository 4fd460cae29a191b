#include "dfrc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "dfrc/errors.hpp"

namespace dfrc {

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Epsilon: return "epsilon";
    case SweepAxis::Delta: return "delta";
    case SweepAxis::Scr: return "scr";
    case SweepAxis::NumUsers: return "num_users";
    case SweepAxis::PowerMeanP: return "power_mean_p";
  }
  return "?";
}

namespace {

SweepAxis axis_from_string(const std::string& s) {
  for (SweepAxis a : {SweepAxis::Epsilon, SweepAxis::Delta, SweepAxis::Scr, SweepAxis::NumUsers,
                      SweepAxis::PowerMeanP}) {
    if (to_string(a) == s) return a;
  }
  throw ConfigError("axis", "expected epsilon, delta, scr, num_users or power_mean_p");
}

std::uint64_t as_seed(const Json& j, const std::string& path) {
  if (!(j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0))) {
    throw ConfigError(path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

}  // namespace

SweepSpec sweep_spec_from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("<root>", "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const std::vector<std::string> keys = {"scenario", "axis", "values", "seeds", "merit", "design",
                                                  "max_draws"};
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) throw ConfigError(it.key(), "unknown field");
  }
  SweepSpec spec;
  if (!j.contains("scenario")) throw ConfigError("scenario", "missing required field");
  const Json& sc = j.at("scenario");
  if (sc.is_string()) {
    std::filesystem::path p = sc.get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    spec.base = load_scenario_config(p);
  } else {
    spec.base = scenario_config_from_json(sc);
  }

  if (!j.contains("axis") || !j.at("axis").is_string()) throw ConfigError("axis", "expected a string");
  spec.axis = axis_from_string(j.at("axis").get<std::string>());

  if (!j.contains("values") || !j.at("values").is_array() || j.at("values").empty()) {
    throw ConfigError("values", "expected a non-empty array of numbers");
  }
  for (std::size_t i = 0; i < j.at("values").size(); ++i) {
    const Json& v = j.at("values").at(i);
    const std::string path = "values[" + std::to_string(i) + "]";
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    switch (spec.axis) {
      case SweepAxis::Epsilon:
        if (!(x > 0.0 && x < 0.5)) throw ConfigError(path, "epsilon must lie in (0, 1/2)");
        break;
      case SweepAxis::Delta:
        if (!(x >= 0.0 && x <= 1.0)) throw ConfigError(path, "delta must lie in [0, 1]");
        break;
      case SweepAxis::NumUsers:
        if (!(x >= 0.0 && x == std::floor(x) && x <= spec.base.scenario.num_users())) {
          throw ConfigError(path, "number of users must be an integer between 0 and " +
                                      std::to_string(spec.base.scenario.num_users()));
        }
        break;
      case SweepAxis::PowerMeanP:
        if (!(x <= 1.0)) throw ConfigError(path, "p must be <= 1");
        break;
      case SweepAxis::Scr:
        if (spec.base.scenario.clutter.empty()) throw ConfigError(path, "the scenario has no clutter");
        break;
    }
    spec.values.push_back(x);
  }

  if (!j.contains("seeds")) throw ConfigError("seeds", "missing required field");
  const Json& seeds = j.at("seeds");
  if (seeds.is_array()) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      spec.seeds.push_back(as_seed(seeds.at(i), "seeds[" + std::to_string(i) + "]"));
    }
  } else if (seeds.is_object()) {
    const std::uint64_t first = seeds.contains("first") ? as_seed(seeds.at("first"), "seeds.first") : 1;
    const std::uint64_t count = seeds.contains("count") ? as_seed(seeds.at("count"), "seeds.count") : 0;
    for (std::uint64_t i = 0; i < count; ++i) spec.seeds.push_back(first + i);
  }
  if (spec.seeds.empty()) throw ConfigError("seeds", "expected a non-empty list of seeds or {first, count}");

  spec.merit = j.contains("merit") ? j.at("merit") : spec.base.merit;
  if (spec.axis == SweepAxis::PowerMeanP && !spec.merit.is_null()) {
    if (!spec.merit.is_object() || spec.merit.value("kind", "power-mean") != "power-mean") {
      throw ConfigError("merit.kind", "a power_mean_p sweep needs a power-mean merit");
    }
  }
  // Fails early on a bad merit section.
  (void)sweep_merit(spec, spec.values.front(), spec.base.scenario.num_subcarriers());

  spec.design = design_options_from_json(j.contains("design") ? j.at("design") : spec.base.design);
  if (j.contains("max_draws")) {
    const Json& d = j.at("max_draws");
    if (!d.is_number_integer() || d.get<int>() < 1) throw ConfigError("max_draws", "expected an integer >= 1");
    spec.max_draws = d.get<int>();
  }
  if (spec.max_draws > 1 && !spec.base.generator) {
    throw ConfigError("max_draws", "redrawing needs a generated scenario");
  }
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  return sweep_spec_from_json(read_json_file(path), path.parent_path());
}

Scenario apply_axis(const Scenario& base, SweepAxis axis, double value) {
  Scenario s = base;
  switch (axis) {
    case SweepAxis::Epsilon:
      for (auto& u : s.users) std::fill(u.error_target.begin(), u.error_target.end(), value);
      break;
    case SweepAxis::Delta:
      for (auto& d : s.protected_directions) d.delta = value;
      break;
    case SweepAxis::Scr:
      apply_scr(s, db_to_linear(value));
      break;
    case SweepAxis::NumUsers:
      s.users.resize(static_cast<std::size_t>(value));
      break;
    case SweepAxis::PowerMeanP:
      break;
  }
  return s;
}

MeritFunction sweep_merit(const SweepSpec& spec, double value, int num_subcarriers) {
  if (spec.axis == SweepAxis::PowerMeanP) {
    Json m = spec.merit.is_null() ? Json{{"kind", "power-mean"}} : spec.merit;
    m["p"] = value;
    return merit_from_json(m, num_subcarriers);
  }
  if (spec.merit.is_null()) return MeritFunction::power_mean(1.0, MeritFunction::uniform_weights(num_subcarriers));
  return merit_from_json(spec.merit, num_subcarriers);
}

std::uint64_t instance_seed(std::uint64_t seed, int attempt) {
  if (attempt == 0) return seed;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(attempt), 0x5eedu};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace {

// Value indices in the order their feasibility is checked: the tightest
// constraint first, so that an infeasible draw is rejected early.
std::vector<std::size_t> screening_order(const SweepSpec& spec) {
  std::vector<std::size_t> idx(spec.values.size());
  std::iota(idx.begin(), idx.end(), 0);
  const auto& v = spec.values;
  switch (spec.axis) {
    case SweepAxis::Epsilon:
    case SweepAxis::Delta:
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
      break;
    case SweepAxis::NumUsers:
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
      break;
    default:
      break;
  }
  return idx;
}

// The SNR constraints do not involve clutter or the merit, so one start
// serves every value of those axes.
bool start_shared(SweepAxis axis) { return axis == SweepAxis::PowerMeanP || axis == SweepAxis::Scr; }

std::vector<RunRecord> run_seed(const SweepSpec& spec, std::uint64_t seed) {
  const std::size_t nv = spec.values.size();
  std::vector<RunRecord> rows(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    rows[i].value = spec.values[i];
    rows[i].seed = seed;
  }
  DesignOptions opts = spec.design;
  opts.rng_seed = seed;

  try {
    std::vector<Problem> problems;
    std::vector<StartReport> starts;
    bool found = false;
    const int draws = spec.base.generator ? spec.max_draws : 1;
    for (int attempt = 0; attempt < draws && !found; ++attempt) {
      const std::uint64_t inst = spec.base.generator ? instance_seed(seed, attempt) : 0;
      const Scenario base = spec.base.generator ? random_instance(*spec.base.generator, inst) : spec.base.scenario;
      problems.clear();
      for (double v : spec.values) {
        const Scenario s = apply_axis(base, spec.axis, v);
        require_valid(s);
        problems.push_back(make_problem(s));
      }
      starts.assign(nv, {});
      found = true;
      for (std::size_t i : screening_order(spec)) {
        if (start_shared(spec.axis) && i != screening_order(spec).front()) {
          starts[i] = starts[screening_order(spec).front()];
          continue;
        }
        starts[i] = find_start(problems[i], opts);
        log(LogLevel::Debug, "seed " + std::to_string(seed) + " draw " + std::to_string(attempt) + " value " +
                                 format_number(spec.values[i]) + ": " + starts[i].diagnostic);
        if (!starts[i].feasible) {
          found = false;
          for (auto& r : rows) r.start_margin = starts[i].best_margin;
          break;
        }
      }
      for (auto& r : rows) {
        r.instance_seed = inst;
        r.draws = attempt + 1;
      }
    }
    if (!found) {
      for (auto& r : rows) {
        r.status = "no-feasible-start";
        r.f = std::numeric_limits<double>::quiet_NaN();
      }
      log(LogLevel::Info, "seed " + std::to_string(seed) + ": no feasible start");
      return rows;
    }

    for (std::size_t i = 0; i < nv; ++i) {
      RunRecord& r = rows[i];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const MeritFunction merit = sweep_merit(spec, spec.values[i], problems[i].num_subcarriers());
        DesignResult res = design(problems[i], merit, opts, starts[i].point);
        const IterationRecord& last = res.trace.back();
        r.status = "ok";
        r.f = res.objective();
        r.iterations = res.iterations();
        r.termination = to_string(res.termination);
        r.monotone = res.monotone;
        r.power_ok = last.power_ratio <= 1.0 + 1e-8;
        r.protected_ok = last.protected_ratio <= 1.0 + 1e-8;
        r.snr_ok = last.snr_margin >= 1.0 - 1e-8;
        r.sinr = last.sinr;
        r.start_margin = starts[i].best_margin;
      } catch (const std::exception& e) {
        r.status = "error";
        r.message = e.what();
        r.f = std::numeric_limits<double>::quiet_NaN();
      }
      r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      log(LogLevel::Info, "seed " + std::to_string(seed) + " value " + format_number(r.value) + ": " + r.status +
                              " f=" + format_number(r.f) + " (" + format_number(r.wall_seconds) + " s)");
    }
  } catch (const std::exception& e) {
    for (auto& r : rows) {
      r.status = "error";
      r.message = e.what();
      r.f = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return rows;
}

double db_or_nan(double v) { return v > 0.0 ? linear_to_db(v) : (v == 0.0 ? -std::numeric_limits<double>::infinity()
                                                                           : std::numeric_limits<double>::quiet_NaN()); }

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

}  // namespace

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<RunRecord> run_sweep(const SweepSpec& spec, int jobs) {
  const std::size_t ns = spec.seeds.size();
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), ns);
  std::vector<std::vector<RunRecord>> per_seed(ns);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < ns; i = next++) per_seed[i] = run_seed(spec, spec.seeds[i]);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::vector<RunRecord> rows;
  for (std::size_t v = 0; v < spec.values.size(); ++v) {
    for (std::size_t s = 0; s < ns; ++s) rows.push_back(per_seed[s][v]);
  }
  return rows;
}

CsvTable sweep_table(const std::vector<RunRecord>& rows, int num_subcarriers) {
  std::vector<std::string> h = {"value", "seed", "instance_seed", "draws", "status", "f", "f_db", "iterations",
                                "termination", "monotone", "power_ok", "protected_ok", "snr_ok", "start_margin"};
  for (int k = 0; k < num_subcarriers; ++k) h.push_back("sinr_db_" + std::to_string(k));
  for (int k = 0; k < num_subcarriers; ++k) h.push_back("sorted_sinr_db_" + std::to_string(k));
  h.push_back("min_sinr_db");
  h.push_back("max_sinr_db");
  h.push_back("message");
  CsvTable t(std::move(h));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rows) {
    t.add(r.value).add(std::to_string(r.seed)).add(std::to_string(r.instance_seed)).add(r.draws).add(r.status);
    t.add(r.f).add(db_or_nan(r.f)).add(r.iterations).add(r.termination);
    t.add(r.monotone).add(r.power_ok).add(r.protected_ok).add(r.snr_ok).add(r.start_margin);
    std::vector<double> db;
    for (double s : r.sinr) db.push_back(linear_to_db(s));
    std::vector<double> sorted = db;
    std::sort(sorted.begin(), sorted.end());
    for (int k = 0; k < num_subcarriers; ++k) t.add(k < int(db.size()) ? db[k] : nan);
    for (int k = 0; k < num_subcarriers; ++k) t.add(k < int(sorted.size()) ? sorted[k] : nan);
    t.add(sorted.empty() ? nan : sorted.front()).add(sorted.empty() ? nan : sorted.back());
    t.add(r.message);
    t.end_row();
  }
  return t;
}

CsvTable summary_table(const std::vector<RunRecord>& rows, const std::vector<double>& values) {
  CsvTable t({"value", "runs", "ok", "f_mean", "f_median", "f_db_median", "min_sinr_mean", "max_sinr_mean",
              "min_sinr_db_mean", "max_sinr_db_mean", "iterations_mean"});
  for (double v : values) {
    int runs = 0;
    std::vector<double> f, fdb, lo, hi, lodb, hidb, it;
    for (const auto& r : rows) {
      if (r.value != v) continue;
      ++runs;
      if (r.status != "ok") continue;
      f.push_back(r.f);
      fdb.push_back(db_or_nan(r.f));
      const auto [mn, mx] = std::minmax_element(r.sinr.begin(), r.sinr.end());
      lo.push_back(*mn);
      hi.push_back(*mx);
      lodb.push_back(linear_to_db(*mn));
      hidb.push_back(linear_to_db(*mx));
      it.push_back(r.iterations);
    }
    t.add(v).add(runs).add(static_cast<int>(f.size())).add(mean(f)).add(median(f)).add(median(fdb));
    t.add(mean(lo)).add(mean(hi)).add(mean(lodb)).add(mean(hidb)).add(mean(it));
    t.end_row();
  }
  return t;
}

CsvTable timing_table(const std::vector<RunRecord>& rows) {
  CsvTable t({"value", "seed", "status", "iterations", "wall_seconds"});
  for (const auto& r : rows) {
    t.add(r.value).add(std::to_string(r.seed)).add(r.status).add(r.iterations).add(r.wall_seconds);
    t.end_row();
  }
  return t;
}

}  // namespace dfrc
