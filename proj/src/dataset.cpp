#include "pce/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pce/errors.hpp"

namespace pce {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_double(const std::string& cell, std::size_t row,
                    const std::string& col) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw ParseError("malformed numeric cell '" + cell + "' at row " +
                     std::to_string(row) + ", column " + col);
  }
  return v;
}

int parse_binary(const std::string& cell, std::size_t row,
                 const std::string& col) {
  if (cell == "0") return 0;
  if (cell == "1") return 1;
  throw ParseError("expected 0 or 1, got '" + cell + "' at row " +
                   std::to_string(row) + ", column " + col);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void Dataset::validate() const {
  const auto [l, h] = outcome_bounds;
  if (!(l < h)) throw ValidationError("outcome bounds require l < h");
  const std::size_t p = covariate_names.size();

  std::size_t n1 = 0, n0 = 0, nc1 = 0, nc0 = 0, resp1 = 0, resp0 = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const UnitRecord& u = records[i];
    const std::string at = " (record " + std::to_string(i + 1) + ")";
    if (u.x.size() != p)
      throw ValidationError("covariate dimension mismatch" + at);
    for (double xv : u.x)
      if (!std::isfinite(xv))
        throw ValidationError("non-finite covariate" + at);
    if (u.z != 0 && u.z != 1) throw ValidationError("z must be 0 or 1" + at);
    if (u.r != 0 && u.r != 1) throw ValidationError("r must be 0 or 1" + at);
    if (u.z == 1 && !u.c.has_value())
      throw ValidationError("c required when z=1" + at);
    if (u.z == 0 && u.c.has_value())
      throw ValidationError("c must be absent when z=0" + at);
    if (u.r == 1 && !u.y.has_value())
      throw ValidationError("y required when r=1" + at);
    if (u.r == 0 && u.y.has_value())
      throw ValidationError("y must be absent when r=0" + at);
    if (u.y.has_value() && !(l <= *u.y && *u.y <= h))
      throw ValidationError("y out of bounds" + at);

    if (u.z == 1) {
      ++n1;
      (*u.c == 1 ? nc1 : nc0)++;
      resp1 += static_cast<std::size_t>(u.r);
    } else {
      ++n0;
      resp0 += static_cast<std::size_t>(u.r);
    }
  }
  if (n1 == 0) throw ValidationError("treatment arm is empty");
  if (n0 == 0) throw ValidationError("control arm is empty");
  if (nc1 == 0) throw ValidationError("no compliers in treatment arm");
  if (nc0 == 0) throw ValidationError("no noncompliers in treatment arm");
  if (resp1 == 0) throw ValidationError("no responders in treatment arm");
  if (resp0 == 0) throw ValidationError("no responders in control arm");
}

Dataset load_csv(const std::string& path, std::pair<double, double> bounds) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path);
  const auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "z" || header[1] != "c" ||
      header[2] != "r" || header[3] != "y") {
    throw ParseError("header must start with z,c,r,y: " + path);
  }

  Dataset d;
  d.outcome_bounds = bounds;
  d.covariate_names.assign(header.begin() + 4, header.end());
  const std::size_t ncol = header.size();

  std::size_t row = 1;  // data rows, 1-based
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != ncol)
      throw ParseError("row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(ncol));
    UnitRecord u;
    u.z = parse_binary(cells[0], row, "z");
    if (!cells[1].empty()) u.c = parse_binary(cells[1], row, "c");
    u.r = parse_binary(cells[2], row, "r");
    if (!cells[3].empty()) u.y = parse_double(cells[3], row, "y");
    u.x.reserve(ncol - 4);
    for (std::size_t j = 4; j < ncol; ++j) {
      if (cells[j].empty())
        throw ValidationError("covariate missingness not allowed (row " +
                              std::to_string(row) + ", column " +
                              d.covariate_names[j - 4] + ")");
      u.x.push_back(parse_double(cells[j], row, d.covariate_names[j - 4]));
    }
    d.records.push_back(std::move(u));
    ++row;
  }

  d.validate();
  return d;
}

void write_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  out << "z,c,r,y";
  for (const auto& name : d.covariate_names) out << ',' << name;
  out << '\n';
  for (const UnitRecord& u : d.records) {
    out << u.z << ',';
    if (u.c.has_value()) out << *u.c;
    out << ',' << u.r << ',';
    if (u.y.has_value()) out << fmt17(*u.y);
    for (double xv : u.x) out << ',' << fmt17(xv);
    out << '\n';
  }
}

std::vector<std::string> validate_dataset(const Dataset& d) {
  std::vector<std::string> warnings;
  std::size_t n1 = 0, n0 = 0, nc1 = 0, resp1 = 0, resp0 = 0;
  for (const UnitRecord& u : d.records) {
    if (u.z == 1) {
      ++n1;
      if (u.c.has_value() && *u.c == 1) ++nc1;
      resp1 += static_cast<std::size_t>(u.r);
    } else {
      ++n0;
      resp0 += static_cast<std::size_t>(u.r);
    }
  }
  auto frac = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  if (n1 > 0 && frac(resp1, n1) < 0.10)
    warnings.push_back("low treated response");
  if (n0 > 0 && frac(resp0, n0) < 0.10)
    warnings.push_back("low control response");
  if (n1 > 0 && frac(nc1, n1) < 0.05) warnings.push_back("few compliers");
  if (n1 > 0 && frac(n1 - nc1, n1) < 0.05)
    warnings.push_back("few noncompliers");
  return warnings;
}

}  // namespace pce
