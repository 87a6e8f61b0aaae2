#pragma once

// Verification suites: each suite expands a grid of parameters into cases,
// evaluates them on a worker pool and collects the outcomes into a report
// whose bytes depend only on the configuration.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qerd/qseries.hpp"

namespace qerd {

/// Raised for unreadable or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid axis name -> comma separated values, e.g. "n" -> "0..4",
/// "z" -> "0.3, q^2, 1.7, 0.5@pi/3".
using GridOverrides = std::map<std::string, std::string>;

struct SuiteConfig {
  std::string suite;  // a suite name or "all"
  unsigned precision = QContext::kDefaultDigits;
  /// Overrides every suite's default tolerance when set.
  std::optional<std::string> tolerance;
  unsigned jobs = 0;  // 0 = hardware concurrency
  /// Per-suite grid overrides, keyed by suite name.
  std::map<std::string, GridOverrides> grids;
};

enum class CaseStatus { pass, fail, truncation, error };
const char* to_string(CaseStatus s);

struct CaseResult {
  std::string suite;
  std::string key;  // "<suite>/<ordinal>"
  std::vector<std::pair<std::string, std::string>> params;
  CaseStatus status = CaseStatus::error;
  std::string residual;
  std::string threshold;
  std::string tail_bound;
  std::string message;
};

struct VerificationReport {
  std::string suite;
  unsigned precision = 0;
  std::map<std::string, std::string> tolerances;  // per suite
  std::vector<CaseResult> cases;

  std::size_t count(CaseStatus s) const;
  /// 0 all pass, 1 failures or errors, 3 only truncation problems.
  int exit_code() const;
  std::string to_json() const;
};

const std::vector<std::string>& suite_names();

/// Reads "key = value" lines; top-level keys suite, precision, tolerance,
/// jobs; a section [name] holds grid overrides for suite `name`.
SuiteConfig parse_config(std::istream& in);
SuiteConfig load_config(const std::string& path);

/// Checks names, precision and tolerance; throws ConfigError.
void validate(const SuiteConfig& cfg);

/// Expands and runs the grid. Throws ConfigError on bad grid values.
VerificationReport run_suite(const SuiteConfig& cfg);

/// A grid value: decimal real, "a+bi", "bi", "r@theta" (polar, theta may be
/// "pi/3" style), "q" or "q^e" for the current base.
Complex parse_value(const std::string& token, const QContext& ctx);
/// Splits a list and expands integer ranges "a..b".
std::vector<std::string> split_list(const std::string& text);

}  // namespace qerd
