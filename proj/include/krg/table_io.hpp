#pragma once

#include <map>
#include <string>
#include <vector>

#include "krg/bandwidth.hpp"
#include "krg/fit.hpp"
#include "krg/grid.hpp"
#include "krg/nd_array.hpp"
#include "krg/sample_set.hpp"

namespace krg {

// Delimited text with a header row. Delimiter is sniffed from the header
// (tab, comma, else whitespace). Location columns are "x" (1-d), "x1".."xd",
// or the pair "z_re"/"z_im" (complex locations, embedded as two real axes).
// Remaining columns are responses; "<name>_re"/"<name>_im" pairs form one
// complex response. Row indices in errors count data rows, header excluded.
SampleSet load_table(const std::string& path);

// Tab-separated writer used for predictions, reports, and benchmark tables.
void write_columns(const std::string& path, const std::vector<std::string>& names,
                   const std::vector<const std::vector<double>*>& cols);

// Self-describing container for gridded real fields sharing one grid:
// grid geometry, free-form metadata, and named row-major value blocks.
// Values print as %.17g so a load reproduces every double bit-exactly.
struct SurfaceFile {
  GridSpec grid;
  std::map<std::string, std::string> meta;
  std::vector<std::string> field_names;
  std::vector<NdArray<double>> fields;

  int field(const std::string& name) const;  // -1 when absent
  void add(const std::string& name, NdArray<double> values);
};

void write_surface_file(const std::string& path, const SurfaceFile& sf);
SurfaceFile load_surface_file(const std::string& path);

SurfaceFile surface_to_file(const FitSurface& surface);
FitSurface surface_from_file(const SurfaceFile& sf);

// Per-candidate sweep table: normalized and original-scale bandwidths, the
// trace columns, and per-response MSE/GCV/selection flags.
void write_cv_report(const std::string& path, const CvReport& report, const GridSpec& grid);

void write_text_atomic(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace krg
