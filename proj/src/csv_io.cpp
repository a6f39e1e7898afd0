#include "rsdesign/csv_io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "rsdesign/errors.hpp"

namespace rsdesign {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, const std::string& where) {
  double v = 0.0;
  // from_chars rejects a leading '+', which some spreadsheets write.
  const char* first = cell.data() + (!cell.empty() && cell[0] == '+' ? 1 : 0);
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ConfigError(where + ": '" + cell + "' is not a number");
  }
  return v;
}

}  // namespace

Design read_design_csv(std::istream& is, const std::string& source) {
  std::string line;
  int line_no = 0;
  int q = 0;
  std::vector<FactorPoint> points;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto cells = split(t);
    if (q == 0) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] != "x" + std::to_string(i + 1)) {
          throw ConfigError(where + ": expected header x1,...,xq, got '" + t + "'");
        }
      }
      q = static_cast<int>(cells.size());
      continue;
    }
    if (static_cast<int>(cells.size()) != q) {
      throw ConfigError(where + ": expected " + std::to_string(q) + " values, got " +
                        std::to_string(cells.size()));
    }
    FactorPoint p;
    p.reserve(cells.size());
    for (const auto& c : cells) p.push_back(parse_number(c, where));
    points.push_back(std::move(p));
  }
  if (q == 0) throw ConfigError(source + ": no header line x1,...,xq found");
  if (points.empty()) throw ConfigError(source + ": design has no runs");
  try {
    return Design(q, std::move(points));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

Design read_design_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open design file '" + path + "'");
  return read_design_csv(in, path);
}

std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  std::string s(buf, ptr);
  return s == "-0" ? "0" : s;
}

void write_design_csv(std::ostream& os, const Design& design,
                      const std::vector<std::string>& comments) {
  for (const auto& c : comments) os << "# " << c << '\n';
  for (int i = 0; i < design.factors(); ++i) os << (i ? "," : "") << 'x' << i + 1;
  os << '\n';
  for (const auto& p : design.points()) {
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << format_number(p[i]);
    os << '\n';
  }
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
    h ^= static_cast<unsigned char>(*it);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rsdesign
