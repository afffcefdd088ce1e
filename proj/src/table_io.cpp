#include "krg/table_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "krg/errors.hpp"
#include "krg/kernels.hpp"

namespace krg {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  if (delim == ' ') {
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
  }
  std::string tok;
  std::istringstream ss(line);
  while (std::getline(ss, tok, delim)) {
    // trim surrounding spaces
    std::size_t b = tok.find_first_not_of(" \t\r");
    std::size_t e = tok.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : tok.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

double parse_cell(const std::string& cell, std::int64_t row, const std::string& col) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || (end && *end != '\0'))
    throw InputError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                     ", column '" + col + "'");
  if (!std::isfinite(v))
    throw InputError("non-finite value at row " + std::to_string(row) + ", column '" + col + "'");
  return v;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write '" + tmp + "'");
    out << content;
    if (!out) throw ResourceError("short write to '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ResourceError("cannot replace '" + path + "': " + ec.message());
}

SampleSet load_table(const std::string& path) {
  const std::string text = read_text(path);
  std::istringstream in(text);
  std::string line;

  // header
  std::string header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    header = line;
    break;
  }
  if (header.empty()) throw InputError("empty table '" + path + "'");
  const char delim = header.find('\t') != std::string::npos   ? '\t'
                     : header.find(',') != std::string::npos ? ','
                                                              : ' ';
  const auto names = split_line(header, delim);
  const auto width = names.size();
  if (width == 0) throw InputError("empty header in '" + path + "'");

  std::vector<std::vector<double>> cols(width);
  std::int64_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    ++row;
    const auto cells = split_line(line, delim);
    if (cells.size() != width)
      throw InputError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(width));
    for (std::size_t c = 0; c < width; ++c)
      cols[c].push_back(parse_cell(cells[c], row, names[c]));
  }
  if (row == 0) throw InputError("no data rows in '" + path + "'");

  auto find = [&](const std::string& name) -> int {
    for (std::size_t c = 0; c < width; ++c)
      if (names[c] == name) return static_cast<int>(c);
    return -1;
  };

  std::vector<bool> used(width, false);
  SampleSet set;

  const int zre = find("z_re");
  const int zim = find("z_im");
  std::vector<int> loc_cols;
  if (zre >= 0 && zim >= 0) {
    loc_cols = {zre, zim};
    set.dims = 2;
    set.complex_locations = true;
  } else if (int x = find("x"); x >= 0) {
    loc_cols = {x};
    set.dims = 1;
  } else {
    for (int j = 1;; ++j) {
      const int c = find("x" + std::to_string(j));
      if (c < 0) break;
      loc_cols.push_back(c);
    }
    if (loc_cols.empty())
      throw InputError("no location columns in '" + path +
                       "' (expected x, x1..xd, or z_re/z_im)");
    set.dims = static_cast<int>(loc_cols.size());
  }
  for (int c : loc_cols) used[static_cast<std::size_t>(c)] = true;

  set.x.resize(static_cast<std::size_t>(row) * set.dims);
  for (std::int64_t i = 0; i < row; ++i)
    for (int j = 0; j < set.dims; ++j)
      set.x[static_cast<std::size_t>(i) * set.dims + j] =
          cols[static_cast<std::size_t>(loc_cols[static_cast<std::size_t>(j)])]
              [static_cast<std::size_t>(i)];

  for (std::size_t c = 0; c < width; ++c) {
    if (used[c]) continue;
    std::string base;
    int re = -1, im = -1;
    if (ends_with(names[c], "_re")) {
      base = names[c].substr(0, names[c].size() - 3);
      const int other = find(base + "_im");
      if (other >= 0 && !used[static_cast<std::size_t>(other)]) {
        re = static_cast<int>(c);
        im = other;
      }
    } else if (ends_with(names[c], "_im")) {
      base = names[c].substr(0, names[c].size() - 3);
      const int other = find(base + "_re");
      if (other >= 0 && !used[static_cast<std::size_t>(other)]) {
        re = other;
        im = static_cast<int>(c);
      }
    }
    ResponseColumn col;
    if (re >= 0) {
      col.name = base;
      col.is_complex = true;
      col.re = std::move(cols[static_cast<std::size_t>(re)]);
      col.im = std::move(cols[static_cast<std::size_t>(im)]);
      used[static_cast<std::size_t>(re)] = true;
      used[static_cast<std::size_t>(im)] = true;
    } else {
      col.name = names[c];
      col.re = std::move(cols[c]);
      used[c] = true;
    }
    set.responses.push_back(std::move(col));
  }

  set.validate();
  return set;
}

void write_columns(const std::string& path, const std::vector<std::string>& names,
                   const std::vector<const std::vector<double>*>& cols) {
  if (names.size() != cols.size()) throw InputError("column writer got mismatched inputs");
  std::size_t rows = cols.empty() ? 0 : cols.front()->size();
  for (const auto* c : cols)
    if (c->size() != rows) throw InputError("column writer got ragged columns");

  std::ostringstream out;
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "\t" : "") << names[c];
  out << "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "\t" : "") << fmt((*cols[c])[i]);
    out << "\n";
  }
  write_text_atomic(path, out.str());
}

int SurfaceFile::field(const std::string& name) const {
  for (std::size_t i = 0; i < field_names.size(); ++i)
    if (field_names[i] == name) return static_cast<int>(i);
  return -1;
}

void SurfaceFile::add(const std::string& name, NdArray<double> values) {
  field_names.push_back(name);
  fields.push_back(std::move(values));
}

void write_surface_file(const std::string& path, const SurfaceFile& sf) {
  std::ostringstream out;
  out << "krg-surface 1\n";
  out << "dims " << sf.grid.dims << "\n";
  auto ints = [&](const char* key, const std::vector<std::int64_t>& v) {
    out << key;
    for (auto x : v) out << " " << x;
    out << "\n";
  };
  auto reals = [&](const char* key, const std::vector<double>& v) {
    out << key;
    for (auto x : v) out << " " << fmt(x);
    out << "\n";
  };
  ints("m", sf.grid.m);
  reals("lo", sf.grid.lo);
  reals("hi", sf.grid.hi);
  reals("step", sf.grid.step);
  reals("scale", sf.grid.scale);
  ints("padded", sf.grid.padded);
  ints("fft_len", sf.grid.fft_len);
  out << "oversample " << sf.grid.oversample << "\n";
  out << "pad " << (sf.grid.pad ? 1 : 0) << "\n";
  for (const auto& [key, value] : sf.meta) out << "meta " << key << " " << value << "\n";
  out << "fields " << sf.fields.size() << "\n";
  for (std::size_t f = 0; f < sf.fields.size(); ++f) {
    const auto& arr = sf.fields[f];
    out << "field " << sf.field_names[f] << " " << arr.size() << "\n";
    for (std::int64_t i = 0; i < arr.size(); ++i)
      out << fmt(arr[i]) << ((i + 1) % 8 == 0 || i + 1 == arr.size() ? "\n" : " ");
  }
  out << "end\n";
  write_text_atomic(path, out.str());
}

SurfaceFile load_surface_file(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string key;
  int version = 0;
  if (!(in >> key >> version) || key != "krg-surface" || version != 1)
    throw InputError("'" + path + "' is not a surface file");

  SurfaceFile sf;
  auto read_ints = [&](std::vector<std::int64_t>& v) {
    v.resize(static_cast<std::size_t>(sf.grid.dims));
    for (auto& x : v)
      if (!(in >> x)) throw InputError("truncated surface file '" + path + "'");
  };
  auto read_reals = [&](std::vector<double>& v) {
    v.resize(static_cast<std::size_t>(sf.grid.dims));
    for (auto& x : v)
      if (!(in >> x)) throw InputError("truncated surface file '" + path + "'");
  };

  while (in >> key) {
    if (key == "dims") {
      if (!(in >> sf.grid.dims) || sf.grid.dims <= 0)
        throw InputError("bad dims in '" + path + "'");
    } else if (key == "m") {
      read_ints(sf.grid.m);
    } else if (key == "lo") {
      read_reals(sf.grid.lo);
    } else if (key == "hi") {
      read_reals(sf.grid.hi);
    } else if (key == "step") {
      read_reals(sf.grid.step);
    } else if (key == "scale") {
      read_reals(sf.grid.scale);
    } else if (key == "padded") {
      read_ints(sf.grid.padded);
    } else if (key == "fft_len") {
      read_ints(sf.grid.fft_len);
    } else if (key == "oversample") {
      in >> sf.grid.oversample;
    } else if (key == "pad") {
      int v = 1;
      in >> v;
      sf.grid.pad = v != 0;
    } else if (key == "meta") {
      std::string name, rest;
      in >> name;
      std::getline(in, rest);
      if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
      sf.meta[name] = rest;
    } else if (key == "fields") {
      std::size_t count = 0;
      in >> count;
      for (std::size_t f = 0; f < count; ++f) {
        std::string tag, name;
        std::int64_t len = 0;
        if (!(in >> tag >> name >> len) || tag != "field")
          throw InputError("malformed field block in '" + path + "'");
        NdArray<double> arr(sf.grid.m);
        if (arr.size() != len)
          throw InputError("field '" + name + "' length does not match the grid in '" + path + "'");
        for (std::int64_t i = 0; i < len; ++i)
          if (!(in >> arr[i])) throw InputError("truncated field '" + name + "' in '" + path + "'");
        sf.add(name, std::move(arr));
      }
    } else if (key == "end") {
      return sf;
    } else {
      throw InputError("unknown key '" + key + "' in '" + path + "'");
    }
  }
  throw InputError("missing end marker in '" + path + "'");
}

SurfaceFile surface_to_file(const FitSurface& surface) {
  SurfaceFile sf;
  sf.grid = surface.grid;
  sf.meta["kernel"] = kernel_family_name(surface.kernel.family);
  std::string h;
  for (std::size_t j = 0; j < surface.kernel.h.size(); ++j)
    h += (j ? " " : "") + fmt(surface.kernel.h[j]);
  sf.meta["h"] = h;
  sf.meta["order"] = std::to_string(surface.order);
  sf.meta["masked_count"] = std::to_string(surface.masked_count);
  sf.meta["rank_fallback_count"] = std::to_string(surface.rank_fallback_count);
  sf.meta["undersmoothed"] = surface.undersmoothed ? "1" : "0";
  for (std::size_t c = 0; c < surface.values.size(); ++c)
    sf.add(surface.column_names[c], surface.values[c]);
  NdArray<double> solved(std::vector<std::int64_t>(surface.grid.m.begin(), surface.grid.m.end()));
  for (std::int64_t g = 0; g < solved.size(); ++g)
    solved[g] = surface.solved[g] ? 1.0 : 0.0;
  sf.add("__solved", std::move(solved));
  return sf;
}

FitSurface surface_from_file(const SurfaceFile& sf) {
  FitSurface surface;
  surface.grid = sf.grid;
  if (auto it = sf.meta.find("kernel"); it != sf.meta.end())
    surface.kernel.family = kernel_family_from_name(it->second);
  if (auto it = sf.meta.find("h"); it != sf.meta.end()) {
    std::istringstream hs(it->second);
    double v;
    while (hs >> v) surface.kernel.h.push_back(v);
  }
  if (auto it = sf.meta.find("order"); it != sf.meta.end()) surface.order = std::stoi(it->second);
  if (auto it = sf.meta.find("masked_count"); it != sf.meta.end())
    surface.masked_count = std::stoll(it->second);
  if (auto it = sf.meta.find("rank_fallback_count"); it != sf.meta.end())
    surface.rank_fallback_count = std::stoll(it->second);
  if (auto it = sf.meta.find("undersmoothed"); it != sf.meta.end())
    surface.undersmoothed = it->second == "1";

  surface.solved =
      NdArray<std::uint8_t>(std::vector<std::int64_t>(sf.grid.m.begin(), sf.grid.m.end()), 1);
  for (std::size_t f = 0; f < sf.fields.size(); ++f) {
    if (sf.field_names[f] == "__solved") {
      for (std::int64_t g = 0; g < sf.fields[f].size(); ++g)
        surface.solved[g] = sf.fields[f][g] != 0.0 ? 1 : 0;
      continue;
    }
    surface.column_names.push_back(sf.field_names[f]);
    surface.values.push_back(sf.fields[f]);
  }
  return surface;
}

void write_cv_report(const std::string& path, const CvReport& report, const GridSpec& grid) {
  std::ostringstream out;
  const int d = grid.dims;
  out << "index";
  for (int j = 0; j < d; ++j) out << "\th" << (j + 1);
  for (int j = 0; j < d; ++j) out << "\th" << (j + 1) << "_orig";
  out << "\ttrace_ratio\ttrace_std\tdof\tundersmoothed";
  for (const auto& resp : report.responses)
    out << "\tmse_" << resp.name << "\tgcv_" << resp.name << "\tselected_" << resp.name;
  out << "\n";

  for (std::size_t c = 0; c < report.candidates.size(); ++c) {
    const auto& cand = report.candidates[c];
    out << c;
    for (int j = 0; j < d; ++j) out << "\t" << fmt(cand.h[static_cast<std::size_t>(j)]);
    // Original-scale column: the normalized value times the axis deviation,
    // the same convention the sweep consoles print.
    for (int j = 0; j < d; ++j)
      out << "\t" << fmt(cand.h[static_cast<std::size_t>(j)] * grid.scale[static_cast<std::size_t>(j)]);
    out << "\t" << fmt(cand.trace.ratio) << "\t" << fmt(cand.trace.ratio_std) << "\t"
        << fmt(cand.trace.dof) << "\t" << (cand.undersmoothed ? 1 : 0);
    for (const auto& resp : report.responses) {
      out << "\t" << fmt(resp.mse[c]) << "\t" << fmt(resp.gcv[c]) << "\t"
          << (resp.selected == static_cast<int>(c) ? 1 : 0);
    }
    out << "\n";
  }
  write_text_atomic(path, out.str());
}

}  // namespace krg
