#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>

#include "minshare/scenario.hpp"

namespace minshare {

namespace {

std::string render(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

template <typename T>
T parse_number(const std::string& cell, std::size_t line) {
  T v{};
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw ConfigError("line " + std::to_string(line), "cannot parse '" + cell + "' as a number");
  }
  return v;
}

}  // namespace

void write_csv(const Trace& trace, std::ostream& out) {
  out << "t,M_star";
  for (AgentId id : trace.agents) out << ",x_" << id;
  out << '\n';
  for (const TraceRow& row : trace.rows) {
    out << row.t << ',' << render(row.M_star);
    for (const auto& x : row.x) {
      out << ',';
      if (x) out << render(*x);
    }
    out << '\n';
  }
}

Trace read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("line 1", "missing CSV header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() < 2 || header[0] != "t" || header[1] != "M_star") {
    throw ConfigError("line 1", "header must start with t,M_star");
  }
  Trace trace;
  for (std::size_t c = 2; c < header.size(); ++c) {
    if (header[c].rfind("x_", 0) != 0) throw ConfigError("line 1", "column '" + header[c] + "' is not x_<id>");
    trace.agents.push_back(parse_number<AgentId>(header[c].substr(2), 1));
  }
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw ConfigError("line " + std::to_string(n), "expected " + std::to_string(header.size()) + " cells, got " +
                                                         std::to_string(cells.size()));
    }
    TraceRow row;
    row.t = parse_number<std::uint64_t>(cells[0], n);
    row.M_star = parse_number<double>(cells[1], n);
    for (std::size_t c = 2; c < cells.size(); ++c) {
      if (cells[c].empty()) row.x.emplace_back();
      else row.x.emplace_back(parse_number<double>(cells[c], n));
    }
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

void write_csv_file(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_csv(trace, out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

Trace read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in);
}

}  // namespace minshare
