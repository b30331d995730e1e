#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace hyperdiff {

/// A command plus key=value settings. Keys outside the known set are
/// rejected when parsed.
struct RunConfig {
  std::string command;
  std::map<std::string, std::string> values;

  /// Command-line arguments (without the program name): the command as the
  /// first bare word, then `key=value`, `--key value`, `--key=value` or
  /// `--config <path>`. Later settings override earlier ones, so flags
  /// override values loaded from a config file that precedes them.
  static RunConfig from_args(const std::vector<std::string>& args);

  /// Text with one `key=value` per line; `#` starts a comment. The command
  /// may be given as `command=<name>`.
  static RunConfig from_text(const std::string& text);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  long get_long(const std::string& key, long fallback) const;
  double get_double(const std::string& key, double fallback) const;
};

/// The recognized keys.
const std::vector<std::string>& known_keys();

/// Runs one subcommand: check-properties, unicity, build-m0, build-inverse,
/// verify-criterion, synthesize, perturb, augment, joint. Reports go to the
/// file named by `out` (stdout otherwise); summaries go to `log`. Returns 0
/// on success or the exit code of the error category.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Parses argv and runs, mapping parse failures to exit code 2.
int main_entry(int argc, const char* const* argv, std::ostream& log, std::ostream& err);

}  // namespace hyperdiff
