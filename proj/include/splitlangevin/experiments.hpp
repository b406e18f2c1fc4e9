#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace splitlangevin {

/// Plain-text run configuration: one `key = value` per line, `#` starts a
/// comment. Keys keep their insertion order so the config can be echoed
/// verbatim into output headers.
class RunConfig {
 public:
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  std::optional<std::string> get(const std::string& key) const;
  bool has(const std::string& key) const { return get(key).has_value(); }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  /// Comma-separated reals; entries may be written 2^-k.
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Parses a real, accepting the 2^-k shorthand used for step sizes.
double parse_real(const std::string& text);

struct Check {
  std::string name;
  bool pass = false;
  double margin = 0.0;
};

struct RunSummary {
  std::string experiment;
  std::map<std::string, double> metrics;
  std::vector<Check> checks;
  std::vector<std::filesystem::path> files;
};

const std::vector<std::string>& experiment_names();

/// Runs the experiment named by the `experiment` key, writes its CSV files
/// and `summary.json` into the `out` directory (default "."), and returns the
/// summary. Throws Error(UnknownExperiment) / Error(ConfigError) and
/// propagates numerical failures.
RunSummary run_experiment(const RunConfig& config);

/// Machine-readable error record: {"error", "message", "step", "path"}.
std::string error_record_json(const std::exception& e);

/// Command-line entry: --experiment, --config, --seed, --workers, --out,
/// repeated --set key=value. Returns the process exit status.
int run_cli(int argc, char** argv);

}  // namespace splitlangevin
