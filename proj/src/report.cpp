#include "dfrc/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <system_error>

#include "dfrc/userfilter.hpp"

namespace dfrc {

LogLevel log_level() {
  const char* env = std::getenv("DFRC_LOG");
  if (!env) return LogLevel::Warn;
  const std::string s(env);
  if (s == "error") return LogLevel::Error;
  if (s == "info") return LogLevel::Info;
  if (s == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

void log(LogLevel level, const std::string& message) {
  static const LogLevel threshold = log_level();
  if (level > threshold) return;
  static std::mutex mu;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "[" << names[static_cast<int>(level)] << "] " << message << '\n';
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc()) throw std::runtime_error("format_number: conversion failed");
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::add(double v) {
  current_.push_back(format_number(v));
  return *this;
}

CsvTable& CsvTable::add(long long v) {
  current_.push_back(std::to_string(v));
  return *this;
}

CsvTable& CsvTable::add(const std::string& v) {
  if (v.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : v) {
      if (c == '"') q += '"';
      q += c;
    }
    current_.push_back(q + "\"");
  } else {
    current_.push_back(v);
  }
  return *this;
}

void CsvTable::end_row() {
  if (current_.size() != header_.size()) {
    throw std::logic_error("CsvTable: row has " + std::to_string(current_.size()) + " cells, header has " +
                           std::to_string(header_.size()));
  }
  rows_.push_back(std::move(current_));
  current_.clear();
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_file_atomic(path, str()); }

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<double> beampattern_grid_deg() {
  std::vector<double> g;
  for (int i = -360; i <= 360; ++i) g.push_back(i * 0.25);
  return g;
}

CsvTable trace_table(const DesignResult& result, const Problem& problem) {
  std::vector<std::string> h = {"iteration", "f"};
  const int kk = problem.num_subcarriers();
  for (int k = 0; k < kk; ++k) h.push_back("sinr_" + std::to_string(k));
  for (int k = 0; k < kk; ++k) {
    for (std::size_t m = 0; m < problem.users[k].size(); ++m) {
      h.push_back("snr_" + std::to_string(k) + "_" + std::to_string(m));
    }
  }
  for (const char* c : {"power_ratio", "protected_ratio", "snr_margin", "code_kept", "newton_steps"}) h.push_back(c);
  CsvTable t(std::move(h));
  for (const auto& r : result.trace) {
    t.add(r.iteration).add(r.f);
    for (double s : r.sinr) t.add(s);
    for (const auto& row : r.snr) {
      for (double s : row) t.add(s);
    }
    t.add(r.power_ratio).add(r.protected_ratio).add(r.snr_margin).add(r.code_kept).add(r.newton_steps);
    t.end_row();
  }
  return t;
}

namespace {

CsvTable pattern_table(const std::vector<double>& values) {
  const auto grid = beampattern_grid_deg();
  const double peak = *std::max_element(values.begin(), values.end());
  CsvTable t({"angle_deg", "power_linear", "power_db", "power_rel_db"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    t.add(grid[i]).add(values[i]).add(linear_to_db(values[i])).add(linear_to_db(values[i] / peak));
    t.end_row();
  }
  return t;
}

std::vector<double> tx_pattern(const CVector& code, const Problem& problem, int k) {
  const Scenario& sc = problem.scenario;
  std::vector<double> v;
  for (double a : beampattern_grid_deg()) {
    v.push_back(transmit_beampattern(code, sc.tx_array, sc.subcarriers[k], deg_to_rad(a), sc.num_slots));
  }
  return v;
}

}  // namespace

CsvTable tx_beampattern_table(const CVector& code, const Problem& problem, int k) {
  return pattern_table(tx_pattern(code, problem, k));
}

CsvTable rx_beampattern_table(const CVector& filter, const Problem& problem, int k) {
  const Scenario& sc = problem.scenario;
  const CMatrix w = unvec<double>(filter, sc.radar_rx_array.num_elements);
  std::vector<double> v;
  for (double a : beampattern_grid_deg()) {
    v.push_back(receive_beampattern(w, sc.radar_rx_array, sc.subcarriers[k], deg_to_rad(a)));
  }
  return pattern_table(v);
}

CsvTable protected_table(const std::vector<CVector>& codes, const Problem& problem) {
  const Scenario& sc = problem.scenario;
  CsvTable t({"subcarrier", "angle_deg", "delta", "power_linear", "power_db", "peak_linear", "power_rel_db",
              "cap_rel_db"});
  std::vector<double> peaks;
  for (int k = 0; k < sc.num_subcarriers(); ++k) {
    const auto v = tx_pattern(codes[k], problem, k);
    peaks.push_back(*std::max_element(v.begin(), v.end()));
  }
  for (const auto& d : sc.protected_directions) {
    const double p = transmit_beampattern(codes[d.subcarrier], sc.tx_array, sc.subcarriers[d.subcarrier], d.angle,
                                          sc.num_slots);
    const double peak = peaks[d.subcarrier];
    const double cap = d.delta * sc.tx_array.num_elements * sc.power_budget;
    t.add(d.subcarrier).add(rad_to_deg(d.angle)).add(d.delta).add(p).add(linear_to_db(p)).add(peak);
    t.add(linear_to_db(p / peak)).add(linear_to_db(cap / peak));
    t.end_row();
  }
  return t;
}

namespace {

nlohmann::json complex_json(const CVector& v) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return {{"re", re}, {"im", im}};
}

}  // namespace

nlohmann::json result_json(const DesignResult& result, const Problem& problem, const std::string& merit_name) {
  using nlohmann::json;
  const IterationRecord& last = result.trace.back();
  json out;
  out["merit"] = merit_name;
  out["objective"] = result.objective();
  out["iterations"] = result.iterations();
  out["termination"] = to_string(result.termination);
  out["monotone"] = result.monotone;
  out["sinr"] = last.sinr;
  json sinr_db = json::array();
  for (double s : last.sinr) sinr_db.push_back(linear_to_db(s));
  out["sinr_db"] = sinr_db;
  out["power_ratio"] = last.power_ratio;
  out["protected_ratio"] = last.protected_ratio;
  out["snr_margin"] = last.snr_margin;
  out["start"] = {{"feasible", result.start.feasible},
                  {"best_margin", result.start.best_margin},
                  {"restarts", result.start.restarts},
                  {"rounds", result.start.rounds}};
  json subs = json::array();
  for (int k = 0; k < problem.num_subcarriers(); ++k) {
    json users = json::array();
    for (std::size_t m = 0; m < problem.users[k].size(); ++m) {
      const UserLink& link = problem.users[k][m];
      const LinkMode mode = result.user_modes[k][m];
      const double s = last.snr[k][m];
      users.push_back({{"user", link.user},
                       {"mode", mode == LinkMode::Direct ? "direct" : "indirect"},
                       {"snr", s},
                       {"rho", rho_threshold(link.error_target, mode, problem.scenario.constellation_size).rho},
                       {"error_prob", error_prob(mode, s, problem.scenario.constellation_size)},
                       {"filter", complex_json(result.user_filters[k][m])}});
    }
    subs.push_back({{"subcarrier", k},
                    {"frequency_hz", problem.scenario.subcarriers[k]},
                    {"sinr", last.sinr[k]},
                    {"code", complex_json(result.codes[k])},
                    {"radar_filter", complex_json(result.radar_filters[k])},
                    {"users", users}});
  }
  out["subcarriers"] = subs;
  return out;
}

void write_design_outputs(const std::filesystem::path& dir, const DesignResult& result, const Problem& problem,
                          const std::string& merit_name) {
  std::filesystem::create_directories(dir);
  trace_table(result, problem).write(dir / "trace.csv");
  for (int k = 0; k < problem.num_subcarriers(); ++k) {
    tx_beampattern_table(result.codes[k], problem, k).write(dir / ("beampattern_tx_" + std::to_string(k) + ".csv"));
    rx_beampattern_table(result.radar_filters[k], problem, k)
        .write(dir / ("beampattern_rx_" + std::to_string(k) + ".csv"));
  }
  protected_table(result.codes, problem).write(dir / "protected_directions.csv");
  write_file_atomic(dir / "result.json", result_json(result, problem, merit_name).dump(2) + "\n");
}

}  // namespace dfrc
