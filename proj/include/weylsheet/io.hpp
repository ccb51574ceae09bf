#pragma once

// CSV field dumps and OBJ meshes.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "weylsheet/fields.hpp"
#include "weylsheet/surface.hpp"

namespace weylsheet {

/// %.17g, so that every double round-trips.
std::string format_double(double x);

struct CsvColumn {
  std::string name;
  const std::vector<double>* values;
};

/// Header "u1,u2,<names>", one row per node in row-major order.
void write_csv(std::ostream& os, const Chart& chart, const std::vector<CsvColumn>& columns);
void save_csv(const std::filesystem::path& path, const Chart& chart,
              const std::vector<CsvColumn>& columns);

/// One vertex per node, each grid cell split into two triangles (1-based indices).
void write_obj(std::ostream& os, const SampledSurface& s);
void save_obj(const std::filesystem::path& path, const SampledSurface& s);

void save_text(const std::filesystem::path& path, const std::string& text);

}  // namespace weylsheet
