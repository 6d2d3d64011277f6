#include "config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace floodsim {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double to_double(const std::map<std::string, std::string>& kv, const std::string& key,
                 double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  size_t pos = 0;
  const double v = std::stod(it->second, &pos);
  if (pos != it->second.size())
    throw std::runtime_error("config: key '" + key + "' has non-numeric value '" + it->second +
                             "'");
  return v;
}

int64_t to_int(const std::map<std::string, std::string>& kv, const std::string& key,
               int64_t fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  size_t pos = 0;
  const int64_t v = std::stoll(it->second, &pos);
  if (pos != it->second.size())
    throw std::runtime_error("config: key '" + key + "' has non-integer value '" + it->second +
                             "'");
  return v;
}

std::string get(const std::map<std::string, std::string>& kv, const std::string& key,
                const std::string& fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

// "0:3000, 86400:15000" or a single constant like "15000".
StepSeries parse_series(const std::string& text) {
  StepSeries series;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const size_t colon = item.find(':');
    double t = 0.0, q = 0.0;
    if (colon == std::string::npos) {
      q = std::stod(item);
    } else {
      t = std::stod(item.substr(0, colon));
      q = std::stod(item.substr(colon + 1));
    }
    if (q < 0.0) throw std::runtime_error("config: discharge values must be >= 0");
    series.add(t, q);
  }
  if (series.empty()) throw std::runtime_error("config: empty discharge series");
  return series;
}

CrossSection parse_section(const std::map<std::string, std::string>& kv,
                           const std::string& block) {
  CrossSection s;
  const auto side = kv.find(block + ".side");
  if (side == kv.end()) throw std::runtime_error("config: " + block + " needs a side");
  s.side = side_from_string(side->second);
  s.fraction_start = to_double(kv, block + ".fraction_start", 0.0);
  s.fraction_end = to_double(kv, block + ".fraction_end", 1.0);
  return s;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::vector<std::string> scope;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line == "}") {
      if (scope.empty())
        throw std::runtime_error("config: unmatched '}' on line " + std::to_string(line_no));
      scope.pop_back();
      continue;
    }
    if (line.back() == '{') {
      const std::string name = trim(line.substr(0, line.size() - 1));
      if (name.empty() || name.find('=') != std::string::npos)
        throw std::runtime_error("config: bad block header on line " + std::to_string(line_no));
      scope.push_back(name);
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: expected 'key = value' on line " +
                               std::to_string(line_no));
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::runtime_error("config: empty key or value on line " + std::to_string(line_no));
    std::string full;
    for (const auto& s : scope) full += s + ".";
    full += key;
    if (out.count(full))
      throw std::runtime_error("config: duplicate key '" + full + "' on line " +
                               std::to_string(line_no));
    out[full] = value;
  }
  if (!scope.empty()) throw std::runtime_error("config: unclosed block '" + scope.back() + "'");
  return out;
}

SimConfig config_from_text(const std::string& text) {
  const auto kv = parse_config_text(text);
  SimConfig cfg;
  cfg.dem_path = get(kv, "dem_path", "");
  if (kv.count("dem_format")) cfg.dem_format = raster_format_from_string(kv.at("dem_format"));
  cfg.downsample = to_int(kv, "downsample", 1);
  cfg.resolution = to_double(kv, "resolution", 0.0);
  cfg.dt = to_double(kv, "dt", cfg.dt);
  cfg.start_time = to_double(kv, "start_time", 0.0);
  cfg.duration = to_double(kv, "duration", 0.0);
  cfg.cx = static_cast<int>(to_int(kv, "cx", 1));
  cfg.cy = static_cast<int>(to_int(kv, "cy", 1));
  cfg.g = to_double(kv, "physics.g", cfg.g);
  cfg.h_min = to_double(kv, "physics.h_min", cfg.h_min);
  cfg.manning = to_double(kv, "physics.manning", cfg.manning);
  cfg.manning_path = get(kv, "physics.manning_path", "");
  if (kv.count("physics.manning_format"))
    cfg.manning_format = raster_format_from_string(kv.at("physics.manning_format"));
  const std::string hb = get(kv, "h_boundary", "replicate");
  if (hb == "replicate")
    cfg.h_boundary = HBoundaryMode::replicate;
  else if (hb == "reflect_wall")
    cfg.h_boundary = HBoundaryMode::reflect_wall;
  else
    throw std::runtime_error("config: h_boundary must be replicate or reflect_wall");

  if (kv.count("inflow.side")) {
    InflowSpec in;
    in.section = parse_section(kv, "inflow");
    in.slope = to_double(kv, "inflow.slope", 0.0);
    in.discharge = parse_series(get(kv, "inflow.discharge", "0"));
    cfg.inflow = in;
  }
  if (kv.count("outflow.side")) {
    OutflowSpec out;
    out.section = parse_section(kv, "outflow");
    out.slope = to_double(kv, "outflow.slope", 0.0);
    cfg.outflow = out;
  }

  cfg.snapshot_interval = to_double(kv, "snapshot_interval", 0.0);
  cfg.output_dir = get(kv, "output_dir", "");
  cfg.extent_threshold = to_double(kv, "extent_threshold", cfg.extent_threshold);
  cfg.initial_depth = to_double(kv, "initial_depth", 0.0);
  if (kv.count("initial_surface")) cfg.initial_surface = to_double(kv, "initial_surface", 0.0);
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_text(ss.str());
}

void validate_config(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::runtime_error("config: dt must be positive");
  if (!(cfg.duration > 0.0)) throw std::runtime_error("config: duration must be positive");
  if (cfg.cx < 1 || cfg.cy < 1) throw std::runtime_error("config: cx and cy must be >= 1");
  if (cfg.downsample < 1) throw std::runtime_error("config: downsample factor must be >= 1");
  if (!(cfg.g > 0.0)) throw std::runtime_error("config: g must be positive");
  if (cfg.h_min < 0.0) throw std::runtime_error("config: h_min must be >= 0");
  if (cfg.manning_path.empty() && !(cfg.manning > 0.0))
    throw std::runtime_error("config: manning must be positive");
  if (cfg.extent_threshold < 0.0)
    throw std::runtime_error("config: extent_threshold must be >= 0");
  if (cfg.initial_depth < 0.0) throw std::runtime_error("config: initial_depth must be >= 0");
  auto check_section = [](const CrossSection& s, const char* what) {
    if (!(s.fraction_start >= 0.0 && s.fraction_start < s.fraction_end && s.fraction_end <= 1.0))
      throw std::runtime_error(std::string("config: ") + what +
                               " fractions must satisfy 0 <= start < end <= 1");
  };
  if (cfg.inflow) {
    check_section(cfg.inflow->section, "inflow");
    if (!(cfg.inflow->slope > 0.0)) throw std::runtime_error("config: inflow slope must be > 0");
  }
  if (cfg.outflow) {
    check_section(cfg.outflow->section, "outflow");
    if (!(cfg.outflow->slope > 0.0))
      throw std::runtime_error("config: outflow slope must be > 0");
  }
}

}  // namespace floodsim
