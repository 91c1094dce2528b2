#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "memthermo/calibration.hpp"
#include "memthermo/experiments.hpp"
#include "memthermo/homeostasis.hpp"

namespace memthermo::csv {

// Shortest round-trip is not the contract: 9 significant digits, C locale.
std::string format_double(double x);
double parse_double(std::string_view s);  // throws std::invalid_argument
std::uint64_t parse_u64(std::string_view s);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // throws std::invalid_argument
};

// "\n" line endings, no quoting (cells never contain commas). Throws IoError.
void write(const Table& table, const std::filesystem::path& path);
Table read(const std::filesystem::path& path);
std::string to_string(const Table& table);

// Schemas. Column names are part of the file contract.
// cycle: exactly t_s, t_set_K, t_air_K, t_dev_K, r_ohm, phase
Table trace_table(std::span<const TraceRecord> records);
std::vector<TraceRecord> parse_trace(const Table& table);
Table hold_table(std::span<const HoldSummary> holds);
Table level_trace_table(std::span<const LevelResult> levels);
Table level_summary_table(std::span<const LevelResult> levels);
Table hsr_table(std::span<const HsrRecord> records);
Table nullcline_table(std::span<const NullclinePoint> grid);
std::vector<NullclinePoint> parse_nullcline(const Table& table);
Table iv_table(const IVCurveSet& ivs);
IVCurveSet parse_iv(const Table& table);
Table signature_table(std::span<const SignaturePoint> points);
Table extraction_table(const ExtractionResult& result);
Table baseline_table(std::span<const std::pair<double, double>> curve);
Table window_rate_table(std::span<const WindowRate> windows);
Table spike_group_table(std::span<const SpikeGroupRate> groups);
Table spike_table(std::span<const std::uint64_t> steps);
Table temperature_trace_table(std::span<const double> t_dev, double dt);
InputPattern parse_pattern(const Table& table);  // columns: step, load

}  // namespace memthermo::csv
