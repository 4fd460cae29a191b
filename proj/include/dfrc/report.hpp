// Output files of the command-line tool: CSV tables with fixed headers,
// beampattern samples and the JSON result document. Numbers are written in
// shortest round-trip form with a decimal point regardless of locale.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "dfrc/driver.hpp"

namespace dfrc {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Level from DFRC_LOG (error|warn|info|debug), default warn.
LogLevel log_level();
void log(LogLevel level, const std::string& message);

std::string format_number(double v);

/// Rows are buffered and the file is replaced atomically on write().
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& add(double v);
  CsvTable& add(long long v);
  CsvTable& add(int v) { return add(static_cast<long long>(v)); }
  CsvTable& add(bool v) { return add(static_cast<long long>(v)); }
  CsvTable& add(const std::string& v);
  CsvTable& add(const char* v) { return add(std::string(v)); }
  void end_row();

  const std::vector<std::string>& header() const { return header_; }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> current_;
};

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// 721 angles from -90 to 90 degrees in 0.25 degree steps.
std::vector<double> beampattern_grid_deg();

CsvTable trace_table(const DesignResult& result, const Problem& problem);
CsvTable tx_beampattern_table(const CVector& code, const Problem& problem, int k);
CsvTable rx_beampattern_table(const CVector& filter, const Problem& problem, int k);

/// Transmit beampattern at the exact protected angles, relative to the
/// peak of the sampled transmit beampattern of the same subcarrier.
CsvTable protected_table(const std::vector<CVector>& codes, const Problem& problem);

nlohmann::json result_json(const DesignResult& result, const Problem& problem, const std::string& merit_name);

/// Writes trace.csv, beampattern_{tx,rx}_k.csv, protected_directions.csv and result.json.
void write_design_outputs(const std::filesystem::path& dir, const DesignResult& result, const Problem& problem,
                          const std::string& merit_name);

}  // namespace dfrc
