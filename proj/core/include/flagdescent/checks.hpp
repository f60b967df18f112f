#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "flagdescent/errors.hpp"

namespace flagdescent::checks {

inline constexpr const char* kVersion = "0.1.0";

enum class Status { pass, fail, error, skipped_budget };

const char* status_name(Status s);

struct CheckResult {
  Status status = Status::pass;
  /// Named exact counts produced by the check (deterministic).
  std::map<std::string, std::int64_t> counts;
  /// Failure or error detail; empty on pass.
  std::string witness;
};

struct CheckDef {
  std::string id;
  std::string title;
  /// What the check verifies, as a mathematical statement.
  std::string what;
  /// Pinned instance parameters.
  std::map<std::string, std::string> instance;
  /// Suites containing this check ("paper", "smoke").
  std::vector<std::string> suites;
  std::function<CheckResult(const Budget&)> run;
};

/// All registered checks, in canonical order.
const std::vector<CheckDef>& registry();

/// Lookup by id; throws PreconditionError listing the valid ids.
const CheckDef& find_check(const std::string& id);

/// A declarative execution plan.
struct Plan {
  std::vector<std::string> check_ids;
  Budget budget;
  std::uint32_t width = 1;

  /// The named suite ("paper" = the full acceptance set, "smoke" = a fast subset).
  static Plan suite(const std::string& name);
  /// Parses the JSON plan format: {"schema": 1, "budget": N, "width": W,
  /// "checks": ["id", ...]}.  Unknown ids and malformed fields are errors.
  static Plan from_json_text(const std::string& text);
  std::string to_json_text() const;
};

struct ReportEntry {
  std::string id;
  Status status = Status::pass;
  std::map<std::string, std::int64_t> counts;
  std::string witness;
  double wall_ms = 0.0;
};

struct Report {
  std::string tool_version = kVersion;
  std::uint32_t schema_version = 1;
  Plan plan;
  std::vector<ReportEntry> entries;

  bool all_passed() const;
  bool any_failed() const;
  bool any_skipped() const;
  /// 0 all-pass, 1 any fail or error, 3 budget skips without failures.
  int exit_code() const;
  /// Deterministic JSON; timing fields are emitted as 0 when masked.
  std::string to_json_text(bool mask_timing = false) const;
  /// One line per check plus a final tally.
  std::string summary() const;
};

/// Executes the plan in a work pool of the plan's width.
Report run(const Plan& plan);

/// Human explanation of one check: statement and pinned instance.
std::string explain(const std::string& id);

}  // namespace flagdescent::checks
