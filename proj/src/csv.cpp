#include "memthermo/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "memthermo/errors.hpp"

namespace memthermo::csv {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return x;
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not an unsigned integer: '" + std::string(s) + "'");
  }
  return x;
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::invalid_argument("missing CSV column '" + std::string(name) + "'");
}

std::string to_string(const Table& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out;
}

void write(const Table& table, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  const auto text = to_string(table);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

Table read(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for reading");
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != t.header.size()) {
        throw IoError("'" + path.string() + "': row width differs from header");
      }
      t.rows.push_back(std::move(cells));
    }
  }
  if (first) throw IoError("'" + path.string() + "' has no header");
  return t;
}

namespace {

std::string cell(double x) { return format_double(x); }
std::string cell(std::uint64_t x) { return std::to_string(x); }

std::vector<std::string> trace_cells(const TraceRecord& r) {
  return {cell(r.t), cell(r.t_set), cell(r.t_air), cell(r.t_dev), cell(r.r),
          std::string(phase_name(r.phase))};
}

const std::vector<std::string> kTraceHeader = {"t_s",     "t_set_K", "t_air_K",
                                               "t_dev_K", "r_ohm",   "phase"};

}  // namespace

Table trace_table(std::span<const TraceRecord> records) {
  Table t{kTraceHeader, {}};
  for (const auto& r : records) t.rows.push_back(trace_cells(r));
  return t;
}

std::vector<TraceRecord> parse_trace(const Table& table) {
  const auto c_t = table.column("t_s"), c_set = table.column("t_set_K"),
             c_air = table.column("t_air_K"), c_dev = table.column("t_dev_K"),
             c_r = table.column("r_ohm"), c_phase = table.column("phase");
  // Optional columns written by the hsr schema.
  std::optional<std::size_t> c_pulse, c_v;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == "pulse_index") c_pulse = i;
    if (table.header[i] == "v_applied_V") c_v = i;
  }
  std::vector<TraceRecord> out;
  for (const auto& row : table.rows) {
    TraceRecord r;
    r.t = parse_double(row[c_t]);
    r.t_set = parse_double(row[c_set]);
    r.t_air = parse_double(row[c_air]);
    r.t_dev = parse_double(row[c_dev]);
    r.r = parse_double(row[c_r]);
    r.phase = parse_phase(row[c_phase]);
    if (c_pulse && !row[*c_pulse].empty()) r.pulse_index = parse_u64(row[*c_pulse]);
    if (c_v) r.v_applied = parse_double(row[*c_v]);
    out.push_back(r);
  }
  return out;
}

Table hold_table(std::span<const HoldSummary> holds) {
  Table t{{"hold", "setpoint_K", "r_end_ohm", "r_steady_ohm", "settled"}, {}};
  for (std::size_t i = 0; i < holds.size(); ++i) {
    const auto& h = holds[i];
    t.rows.push_back({std::to_string(i), cell(h.setpoint), cell(h.r_end), cell(h.r_steady),
                      h.settled ? "1" : "0"});
  }
  return t;
}

Table level_trace_table(std::span<const LevelResult> levels) {
  Table t{{"level"}, {}};
  t.header.insert(t.header.end(), kTraceHeader.begin(), kTraceHeader.end());
  for (const auto& lr : levels) {
    for (const auto& r : lr.cycling.trace) {
      std::vector<std::string> row{std::string(level_name(lr.level))};
      auto rest = trace_cells(r);
      row.insert(row.end(), rest.begin(), rest.end());
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table level_summary_table(std::span<const LevelResult> levels) {
  Table t{{"level", "r_ref_ohm", "drop", "sensitivity_pct_per_K"}, {}};
  for (const auto& lr : levels) {
    t.rows.push_back({std::string(level_name(lr.level)),
                      cell(level_reference_resistance(lr.level)), cell(lr.drop),
                      cell(lr.sensitivity)});
  }
  return t;
}

Table hsr_table(std::span<const HsrRecord> records) {
  Table t{kTraceHeader, {}};
  t.header.insert(t.header.end(), {"pulse_index", "v_applied_V", "frac_at_test", "frac_ref300"});
  for (const auto& h : records) {
    auto row = trace_cells(h.record);
    row.push_back(h.record.pulse_index ? cell(*h.record.pulse_index) : std::string());
    row.push_back(cell(h.record.v_applied));
    row.push_back(cell(h.frac_at_test));
    row.push_back(cell(h.frac_ref));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table nullcline_table(std::span<const NullclinePoint> grid) {
  Table t{{"v_V", "T_K", "frac"}, {}};
  for (const auto& p : grid) t.rows.push_back({cell(p.v), cell(p.temperature), cell(p.fraction)});
  return t;
}

std::vector<NullclinePoint> parse_nullcline(const Table& table) {
  const auto cv = table.column("v_V"), ct = table.column("T_K"), cf = table.column("frac");
  std::vector<NullclinePoint> out;
  for (const auto& row : table.rows) {
    out.push_back({parse_double(row[cv]), parse_double(row[ct]), parse_double(row[cf])});
  }
  return out;
}

Table iv_table(const IVCurveSet& ivs) {
  Table t{{"T_K", "v_V", "i_A"}, {}};
  for (const auto& c : ivs.curves) {
    for (const auto& p : c.points) t.rows.push_back({cell(c.temperature), cell(p.v), cell(p.i)});
  }
  return t;
}

IVCurveSet parse_iv(const Table& table) {
  const auto ct = table.column("T_K"), cv = table.column("v_V"), ci = table.column("i_A");
  IVCurveSet out;
  for (const auto& row : table.rows) {
    const double temp = parse_double(row[ct]);
    auto it = std::find_if(out.curves.begin(), out.curves.end(),
                           [temp](const IVCurve& c) { return c.temperature == temp; });
    if (it == out.curves.end()) {
      out.curves.push_back({temp, {}});
      it = out.curves.end() - 1;
    }
    it->points.push_back({parse_double(row[cv]), parse_double(row[ci])});
  }
  return out;
}

Table signature_table(std::span<const SignaturePoint> points) {
  Table t{{"v_V", "T_K", "inv_T_per_K", "ln_i_over_T2"}, {}};
  for (const auto& p : points) {
    t.rows.push_back({cell(p.v), cell(p.temperature), cell(p.inv_t), cell(p.ln_i_over_t2)});
  }
  return t;
}

Table extraction_table(const ExtractionResult& r) {
  const auto& d = r.diagnostics;
  return {{"a_prefactor_A_per_K2", "phi_b_eV", "alpha_pos", "alpha_neg", "stage1_min_r2",
           "stage2_r2_pos", "stage2_r2_neg", "intercept_spread", "thermionic_consistent"},
          {{cell(r.params.a_prefactor), cell(r.params.phi_b), cell(r.params.alpha_pos),
            cell(r.params.alpha_neg), cell(d.stage1_min_r2), cell(d.stage2_r2_pos),
            cell(d.stage2_r2_neg), cell(d.intercept_spread),
            d.thermionic_consistent ? "1" : "0"}}};
}

Table baseline_table(std::span<const std::pair<double, double>> curve) {
  Table t{{"load", "rate"}, {}};
  for (const auto& [l, r] : curve) t.rows.push_back({cell(l), cell(r)});
  return t;
}

Table window_rate_table(std::span<const WindowRate> windows) {
  Table t{{"window", "t_start_s", "load", "rate", "t_set_K", "t_dev_K"}, {}};
  for (const auto& w : windows) {
    t.rows.push_back({cell(w.index), cell(w.t_start), cell(w.load), cell(w.rate), cell(w.t_set),
                      cell(w.t_dev)});
  }
  return t;
}

Table spike_group_table(std::span<const SpikeGroupRate> groups) {
  Table t{{"group", "t_end_s", "rate"}, {}};
  for (const auto& g : groups) t.rows.push_back({cell(g.index), cell(g.t_end), cell(g.rate)});
  return t;
}

Table spike_table(std::span<const std::uint64_t> steps) {
  Table t{{"step"}, {}};
  for (auto s : steps) t.rows.push_back({cell(s)});
  return t;
}

Table temperature_trace_table(std::span<const double> t_dev, double dt) {
  Table t{{"t_s", "t_dev_K"}, {}};
  for (std::size_t k = 0; k < t_dev.size(); ++k) {
    t.rows.push_back({cell(static_cast<double>(k + 1) * dt), cell(t_dev[k])});
  }
  return t;
}

InputPattern parse_pattern(const Table& table) {
  const auto cs = table.column("step"), cl = table.column("load");
  InputPattern p;
  std::uint64_t expected = 0;
  for (const auto& row : table.rows) {
    if (parse_u64(row[cs]) != expected) {
      throw std::invalid_argument("pattern steps must be consecutive from 0");
    }
    ++expected;
    const double load = parse_double(row[cl]);
    if (!p.segments.empty() && p.segments.back().load == load) {
      ++p.segments.back().duration;
    } else {
      p.segments.push_back({1, load});
    }
  }
  p.validate();
  return p;
}

}  // namespace memthermo::csv
