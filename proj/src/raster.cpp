#include "raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace floodsim {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("raster: " + path + ": " + what);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

void check_invariants(const Raster& r, const std::string& path) {
  if (r.rows < 1 || r.cols < 1) fail(path, "rows and cols must be >= 1");
  if (!(r.cell_size > 0.0)) fail(path, "cell size must be positive");
  if (static_cast<int64_t>(r.values.size()) != r.rows * r.cols)
    fail(path, "value count does not match rows*cols");
}

}  // namespace

RasterFormat raster_format_from_string(const std::string& s) {
  const std::string k = lower(s);
  if (k == "ascii_grid" || k == "asc") return RasterFormat::ascii_grid;
  if (k == "raw_f32" || k == "r32" || k == "raw_f32_with_header") return RasterFormat::raw_f32;
  throw std::runtime_error("unknown raster format '" + s + "'");
}

const char* to_string(RasterFormat f) {
  return f == RasterFormat::ascii_grid ? "ascii_grid" : "raw_f32";
}

Raster make_raster(int64_t rows, int64_t cols, double cell_size, float fill) {
  if (rows < 1 || cols < 1) throw std::runtime_error("raster dims must be >= 1");
  if (!(cell_size > 0.0)) throw std::runtime_error("raster cell size must be positive");
  Raster r;
  r.rows = rows;
  r.cols = cols;
  r.cell_size = cell_size;
  r.values.assign(static_cast<size_t>(rows * cols), fill);
  return r;
}

namespace {

Raster load_ascii_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  Raster r;
  std::map<std::string, double> hdr;
  // Header: key/value lines until the first token that parses as a number.
  std::string tok;
  while (in >> tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end && *end == '\0' && end != tok.c_str()) {
      // First data value; header is done.
      if (!hdr.count("ncols") || !hdr.count("nrows")) fail(path, "missing ncols/nrows header");
      r.cols = static_cast<int64_t>(hdr["ncols"]);
      r.rows = static_cast<int64_t>(hdr["nrows"]);
      r.cell_size = hdr.count("cellsize") ? hdr["cellsize"] : 1.0;
      r.origin_x = hdr.count("xllcorner") ? hdr["xllcorner"] : 0.0;
      r.origin_y = hdr.count("yllcorner") ? hdr["yllcorner"] : 0.0;
      r.nodata = hdr.count("nodata_value") ? static_cast<float>(hdr["nodata_value"]) : -9999.0f;
      if (r.rows < 1 || r.cols < 1) fail(path, "nonpositive grid dims");
      if (!(r.cell_size > 0.0)) fail(path, "nonpositive cell size");
      r.values.reserve(static_cast<size_t>(r.rows * r.cols));
      r.values.push_back(static_cast<float>(v));
      break;
    }
    std::string key = lower(tok);
    double val = 0.0;
    if (!(in >> val)) fail(path, "header key '" + tok + "' has no value");
    hdr[key] = val;
  }
  if (r.values.empty()) fail(path, "no data values");
  double v = 0.0;
  while (in >> v) r.values.push_back(static_cast<float>(v));
  if (!in.eof()) fail(path, "malformed value payload");
  if (static_cast<int64_t>(r.values.size()) != r.rows * r.cols)
    fail(path, "expected " + std::to_string(r.rows * r.cols) + " values, got " +
                   std::to_string(r.values.size()));
  return r;
}

void write_ascii_grid(const Raster& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  char buf[64];
  out << "ncols " << r.cols << "\n"
      << "nrows " << r.rows << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", r.origin_x);
  out << "xllcorner " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", r.origin_y);
  out << "yllcorner " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", r.cell_size);
  out << "cellsize " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(r.nodata));
  out << "NODATA_value " << buf << "\n";
  for (int64_t i = 0; i < r.rows; ++i) {
    for (int64_t j = 0; j < r.cols; ++j) {
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(r.at(i, j)));
      out << buf << (j + 1 == r.cols ? "" : " ");
    }
    out << "\n";
  }
  if (!out) fail(path, "write failed");
}

Raster load_raw_f32(const std::string& path) {
  std::ifstream hdr(path + ".hdr");
  if (!hdr) fail(path + ".hdr", "cannot open");
  Raster r;
  bool have_rows = false, have_cols = false;
  std::string key;
  while (hdr >> key) {
    double val = 0.0;
    if (!(hdr >> val)) fail(path + ".hdr", "key '" + key + "' has no value");
    key = lower(key);
    if (key == "rows") {
      r.rows = static_cast<int64_t>(val);
      have_rows = true;
    } else if (key == "cols") {
      r.cols = static_cast<int64_t>(val);
      have_cols = true;
    } else if (key == "cell_size") {
      r.cell_size = val;
    } else if (key == "nodata") {
      r.nodata = static_cast<float>(val);
    } else if (key == "origin_x") {
      r.origin_x = val;
    } else if (key == "origin_y") {
      r.origin_y = val;
    } else {
      fail(path + ".hdr", "unknown header key '" + key + "'");
    }
  }
  if (!have_rows || !have_cols) fail(path + ".hdr", "missing rows/cols");
  if (r.rows < 1 || r.cols < 1) fail(path, "nonpositive grid dims");
  if (!(r.cell_size > 0.0)) fail(path, "nonpositive cell size");

  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  in.seekg(0, std::ios::end);
  const int64_t bytes = static_cast<int64_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  const int64_t expected = r.rows * r.cols * static_cast<int64_t>(sizeof(float));
  if (bytes != expected)
    fail(path, "payload is " + std::to_string(bytes) + " bytes, header implies " +
                   std::to_string(expected));
  r.values.resize(static_cast<size_t>(r.rows * r.cols));
  // Payload is little-endian float32; this reader assumes a little-endian host.
  in.read(reinterpret_cast<char*>(r.values.data()), expected);
  if (!in) fail(path, "short read");
  return r;
}

void write_raw_f32(const Raster& r, const std::string& path) {
  {
    std::ofstream hdr(path + ".hdr");
    if (!hdr) fail(path + ".hdr", "cannot open for writing");
    char buf[64];
    hdr << "rows " << r.rows << "\n"
        << "cols " << r.cols << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", r.cell_size);
    hdr << "cell_size " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(r.nodata));
    hdr << "nodata " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", r.origin_x);
    hdr << "origin_x " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", r.origin_y);
    hdr << "origin_y " << buf << "\n";
    if (!hdr) fail(path + ".hdr", "write failed");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out.write(reinterpret_cast<const char*>(r.values.data()),
            static_cast<std::streamsize>(r.values.size() * sizeof(float)));
  if (!out) fail(path, "write failed");
}

}  // namespace

Raster load_raster(const std::string& path, RasterFormat format) {
  Raster r = format == RasterFormat::ascii_grid ? load_ascii_grid(path) : load_raw_f32(path);
  check_invariants(r, path);
  return r;
}

void write_raster(const Raster& r, const std::string& path, RasterFormat format) {
  check_invariants(r, path);
  if (format == RasterFormat::ascii_grid)
    write_ascii_grid(r, path);
  else
    write_raw_f32(r, path);
}

Dims downsample_dims(int64_t rows, int64_t cols, int64_t factor) {
  if (factor < 1) throw std::runtime_error("downsample factor must be >= 1");
  return Dims{(rows + factor - 1) / factor, (cols + factor - 1) / factor};
}

Raster downsample_mean(const Raster& r, int64_t factor) {
  if (factor < 1) throw std::runtime_error("downsample factor must be >= 1");
  if (factor == 1) return r;
  const Raster* src = &r;
  Raster padded;
  if (r.rows % factor != 0 || r.cols % factor != 0) {
    padded = pad_to_divisible(r, factor, factor).first;
    src = &padded;
  }
  Raster out = make_raster(src->rows / factor, src->cols / factor, r.cell_size * static_cast<double>(factor));
  out.nodata = r.nodata;
  out.origin_x = src->origin_x;
  out.origin_y = src->origin_y;
  const double inv = 1.0 / static_cast<double>(factor * factor);
  for (int64_t i = 0; i < out.rows; ++i) {
    for (int64_t j = 0; j < out.cols; ++j) {
      double sum = 0.0;
      for (int64_t bi = 0; bi < factor; ++bi)
        for (int64_t bj = 0; bj < factor; ++bj)
          sum += static_cast<double>(src->at(i * factor + bi, j * factor + bj));
      out.at(i, j) = static_cast<float>(sum * inv);
    }
  }
  return out;
}

std::pair<Raster, PadRecord> pad_to_divisible(const Raster& r, int64_t cx, int64_t cy) {
  if (cx < 1 || cy < 1) throw std::runtime_error("partition counts must be >= 1");
  const int64_t new_rows = (r.rows + cy - 1) / cy * cy;
  const int64_t new_cols = (r.cols + cx - 1) / cx * cx;
  PadRecord rec{r.rows, r.cols};
  if (new_rows == r.rows && new_cols == r.cols) return {r, rec};
  Raster out = make_raster(new_rows, new_cols, r.cell_size);
  out.nodata = r.nodata;
  out.origin_x = r.origin_x;
  // Row 0 is the north edge, so appended rows extend the grid southward.
  out.origin_y = r.origin_y - static_cast<double>(new_rows - r.rows) * r.cell_size;
  for (int64_t i = 0; i < new_rows; ++i) {
    const int64_t si = std::min(i, r.rows - 1);
    for (int64_t j = 0; j < new_cols; ++j) out.at(i, j) = r.at(si, std::min(j, r.cols - 1));
  }
  return {out, rec};
}

Raster crop_to_record(const Raster& r, const PadRecord& rec) {
  if (rec.orig_rows > r.rows || rec.orig_cols > r.cols)
    throw std::runtime_error("crop record exceeds raster extent");
  if (rec.orig_rows == r.rows && rec.orig_cols == r.cols) return r;
  Raster out = make_raster(rec.orig_rows, rec.orig_cols, r.cell_size);
  out.nodata = r.nodata;
  out.origin_x = r.origin_x;
  out.origin_y = r.origin_y + static_cast<double>(r.rows - rec.orig_rows) * r.cell_size;
  for (int64_t i = 0; i < out.rows; ++i)
    for (int64_t j = 0; j < out.cols; ++j) out.at(i, j) = r.at(i, j);
  return out;
}

void validate_dem(const Raster& r) {
  for (int64_t i = 0; i < r.rows; ++i) {
    for (int64_t j = 0; j < r.cols; ++j) {
      const float v = r.at(i, j);
      if (v == r.nodata)
        throw std::runtime_error("DEM has nodata cell at row " + std::to_string(i) + ", col " +
                                 std::to_string(j));
      if (!std::isfinite(v))
        throw std::runtime_error("DEM has nonfinite cell at row " + std::to_string(i) + ", col " +
                                 std::to_string(j));
    }
  }
}

}  // namespace floodsim
