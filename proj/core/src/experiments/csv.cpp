#include "megabike/experiments/csv.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "megabike/error.hpp"

namespace megabike::experiments {

namespace {

// Quotes fields that would otherwise break the row.
std::string escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

}  // namespace

std::string format_real(double value) { return fmt::format("{:.6g}", value); }

void write_csv(std::ostream& out, const CsvTable& table) {
  write_row(out, table.header);
  for (const auto& row : table.rows) write_row(out, row);
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

void emit_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IOError, "cannot open " + path.string() + " for writing");
  write_csv(out, table);
  out.flush();
  if (!out) throw Error(Errc::IOError, "failed writing " + path.string());
}

CsvTable round_records_table(const sim::RunMetrics& metrics) {
  CsvTable table;
  table.header = {"iteration",    "round",         "bikeID",         "aliveAgents",
                  "energyTotal",  "lootAcquired",  "radiusBound",    "rulesEvaluated",
                  "wallClockNanos"};
  table.rows.reserve(metrics.rounds.size());
  for (const auto& r : metrics.rounds) {
    table.rows.push_back({std::to_string(r.iteration), std::to_string(r.round),
                          std::to_string(r.bike_id), std::to_string(r.alive_agents),
                          format_real(r.energy_total), format_real(r.loot_acquired),
                          format_real(r.radius_bound), std::to_string(r.rules_evaluated),
                          std::to_string(r.wall_clock_nanos)});
  }
  return table;
}

CsvTable drop_columns(const CsvTable& table, const std::vector<std::string>& names) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (std::find(names.begin(), names.end(), table.header[i]) == names.end()) keep.push_back(i);
  }
  CsvTable out;
  for (std::size_t i : keep) out.header.push_back(table.header[i]);
  for (const auto& row : table.rows) {
    auto& dst = out.rows.emplace_back();
    for (std::size_t i : keep) dst.push_back(i < row.size() ? row[i] : std::string());
  }
  return out;
}

}  // namespace megabike::experiments
