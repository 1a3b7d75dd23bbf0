#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qbm/compare.hpp"
#include "qbm/oracle.hpp"

namespace qbm::io {

inline constexpr const char* kCsvSchema = "qbm-compare/v1";

// Formats with 17 significant digits (round-trip exact for doubles).
std::string format_double(double v);

// CSV writer: first line `# schema=qbm-compare/v1`, then `# key=value`
// metadata (including a `# generated=<ISO timestamp>` line that golden-file
// comparisons must skip), then a header row and data rows.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns);
    void set_meta(const std::string& key, const std::string& value);
    void add_row(const std::vector<double>& values);
    void write(const std::string& path) const;
    std::string to_string() const;

  private:
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::vector<double>> rows_;
};

// Flat key = value config with [section] headers. Unknown keys are rejected
// against the caller-provided whitelist at lookup time via `take`.
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    std::optional<std::string> take(const std::string& section, const std::string& key);
    bool empty_leftovers() const;
    std::vector<std::string> leftover_keys() const;

  private:
    std::map<std::string, std::string> values_;  // "section.key" -> value
};

std::string trajectory_csv(const MomentTrajectory& tr, const ModelParams& p);
std::string sweep_csv(const SweepResult& sweep);
std::string stationary_csv(const std::vector<StationaryMoments>& rows, const ModelParams& p);
std::string validity_json(const ValidityReport& report, const std::string& preset_name);
std::string oracle_json(const OracleMeasurement& m, const DiscreteBath& bath,
                        const ModelParams& p, double window_start, double window_end);

// FNV-1a over the grid values; used in sweep file names.
std::string grid_hash(const std::vector<double>& lambdas, const std::vector<double>& temps);

std::string output_dir_from_env();

}  // namespace qbm::io
