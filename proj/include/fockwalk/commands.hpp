#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fockwalk/config.hpp"

namespace fockwalk {

struct Table {
  struct Column {
    std::string name;
    bool integer = false;
  };
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;
};

struct CommandResult {
  Table table;
  nlohmann::ordered_json summary;
};

CommandResult cmd_walk(const RunConfig& config);
CommandResult cmd_protocol(const RunConfig& config);
CommandResult cmd_fidelity_curve(const RunConfig& config);

struct PropertyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<PropertyCheck> cmd_validate();

// 17 significant digits, scientific notation, independent of the C locale.
// Integer columns print as plain integers.
std::string format_number(double value, bool integer);

void write_csv(std::ostream& out, const Table& table);
nlohmann::ordered_json table_to_json(const Table& table);

// Writes the table plus summary to config.output_path (CSV gets a sibling
// "<path>.summary.json") or, without a path, to `stdout_stream` with the summary
// as a trailing JSON object.
void write_result(const RunConfig& config, const CommandResult& result, std::ostream& stdout_stream);

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitTruncation = 3,
  kExitValidation = 4,
};

}  // namespace fockwalk
