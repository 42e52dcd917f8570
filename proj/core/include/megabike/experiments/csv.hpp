#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "megabike/sim/game_loop.hpp"

namespace megabike::experiments {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Six significant digits, shortest form ("0.5", "1157.62", "1e+06").
std::string format_real(double value);

void write_csv(std::ostream& out, const CsvTable& table);
std::string to_csv(const CsvTable& table);
/// Errors: IOError.
void emit_csv(const std::filesystem::path& path, const CsvTable& table);

/// iteration,round,bikeID,aliveAgents,energyTotal,lootAcquired,radiusBound,rulesEvaluated,wallClockNanos
CsvTable round_records_table(const sim::RunMetrics& metrics);

/// Copy of `table` without the named columns (used to compare runs modulo timing).
CsvTable drop_columns(const CsvTable& table, const std::vector<std::string>& names);

}  // namespace megabike::experiments
