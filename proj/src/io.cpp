#include "weylsheet/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "weylsheet/errors.hpp"

namespace weylsheet {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& os, const Chart& chart, const std::vector<CsvColumn>& columns) {
  for (const CsvColumn& c : columns)
    if (!c.values || c.values->size() != chart.size())
      throw DomainError("CSV column '" + c.name + "' does not match the chart");
  os << "u1,u2";
  for (const CsvColumn& c : columns) os << ',' << c.name;
  os << '\n';
  for (int i = 0; i < chart.n1(); ++i)
    for (int j = 0; j < chart.n2(); ++j) {
      os << format_double(chart.coord(0, i)) << ',' << format_double(chart.coord(1, j));
      for (const CsvColumn& c : columns) os << ',' << format_double((*c.values)[chart.index(i, j)]);
      os << '\n';
    }
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void save_csv(const std::filesystem::path& path, const Chart& chart,
              const std::vector<CsvColumn>& columns) {
  std::ofstream out = open_for_write(path);
  write_csv(out, chart, columns);
  finish(out, path);
}

void write_obj(std::ostream& os, const SampledSurface& s) {
  const Chart& c = s.chart();
  for (const Vector3d& p : s.positions())
    os << "v " << format_double(p[0]) << ' ' << format_double(p[1]) << ' ' << format_double(p[2])
       << '\n';
  auto id = [&](int i, int j) { return c.index(i, j) + 1; };
  for (int i = 0; i + 1 < c.n1(); ++i)
    for (int j = 0; j + 1 < c.n2(); ++j) {
      os << "f " << id(i, j) << ' ' << id(i + 1, j) << ' ' << id(i + 1, j + 1) << '\n';
      os << "f " << id(i, j) << ' ' << id(i + 1, j + 1) << ' ' << id(i, j + 1) << '\n';
    }
}

void save_obj(const std::filesystem::path& path, const SampledSurface& s) {
  std::ofstream out = open_for_write(path);
  write_obj(out, s);
  finish(out, path);
}

void save_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_for_write(path);
  out << text;
  finish(out, path);
}

}  // namespace weylsheet
