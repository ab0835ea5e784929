#ifndef TLI_COMMANDS_HPP
#define TLI_COMMANDS_HPP

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tli/config.hpp"

namespace tli {

enum class Command {
  kinematics,
  sweep_energy,
  sweep_field,
  fringe,
  step,
  sensitivity,
  scale,
  validate,
};

std::optional<Command> parse_command(std::string_view name);
std::string_view command_name(Command cmd);
std::vector<std::string> command_names();

/// CSV table: one header row, LF line endings, every value finite.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  void write(std::ostream &out) const;
};

/// Scientific notation, 9 significant digits. Throws on non-finite values.
std::string csv_number(double value);

struct CommandResult {
  CsvTable table;
  int exit_code = 0;     // nonzero when the command ran but reports failure
  std::string diagnostic; // for stderr when exit_code != 0
};

/// Runs one command. Simulation and configuration errors propagate as exceptions.
CommandResult run_command(Command cmd, const RunConfig &cfg);

} // namespace tli

#endif // TLI_COMMANDS_HPP
