#include "minimax/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "minimax/errors.hpp"

namespace minimax {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

// Range values are rounded to 12 significant digits so 0.05 * 3 reads back as 0.15.
double tidy(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::vector<json> axis_values(const json& v, const std::string& path) {
  std::vector<json> out;
  if (v.is_array()) {
    for (const json& item : v) out.push_back(item);
  } else if (v.is_object()) {
    for (const auto& [key, value] : v.items()) {
      if (key != "start" && key != "stop" && key != "step") {
        fail(path, "unknown key \"" + key + "\" in range (start, stop, step)");
      }
      if (!value.is_number()) fail(path + "." + key, "expected a number");
    }
    if (!v.contains("start") || !v.contains("stop") || !v.contains("step")) {
      fail(path, "a range needs start, stop and step");
    }
    const double start = v["start"].get<double>();
    const double stop = v["stop"].get<double>();
    const double step = v["step"].get<double>();
    if (!(step > 0.0)) fail(path + ".step", "must be > 0");
    if (stop >= start) {
      const auto count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
      for (std::int64_t k = 0; k < count; ++k) out.push_back(tidy(start + k * step));
    }
  } else {
    fail(path, "expected an array of values or a {start, stop, step} range");
  }
  if (out.empty()) fail(path, "empty grid axis");
  return out;
}

void set_path(json& doc, const std::string& key, const json& value) {
  json* node = &doc;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (part.empty()) fail("$.grid." + key, "malformed key");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part) || !(*node)[part].is_object()) {
      fail("$.grid." + key, "no config section \"" + part + "\"");
    }
    node = &(*node)[part];
    pos = dot + 1;
  }
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string value_cell(const json& v) {
  if (v.is_string()) return csv_cell(v.get<std::string>());
  if (v.is_number_float()) return format_double(v.get<double>());
  return csv_cell(v.dump());
}

std::string optional_cell(const std::optional<double>& x) {
  return x ? format_double(*x) : std::string();
}

}  // namespace

SweepSpec parse_sweep(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("$: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("$", "expected an object");
  SweepSpec spec;
  for (const auto& [key, value] : j.items()) {
    if (key == "base") {
      spec.base = value;
    } else if (key == "grid") {
      if (!value.is_object()) fail("$.grid", "expected an object of axes");
      for (const auto& [axis, values] : value.items()) {
        spec.axes.push_back({axis, axis_values(values, "$.grid." + axis)});
      }
    } else if (key == "repeats") {
      if (!value.is_number_integer() || value.get<std::int64_t>() < 1) {
        fail("$.repeats", "expected an integer >= 1");
      }
      spec.repeats = value.get<std::int64_t>();
    } else if (key == "seed_stride") {
      if (!value.is_number_unsigned()) fail("$.seed_stride", "expected a non-negative integer");
      spec.seed_stride = value.get<std::uint64_t>();
    } else if (key == "max_runs") {
      if (!value.is_number_unsigned()) fail("$.max_runs", "expected a non-negative integer");
      spec.max_runs = value.get<std::size_t>();
    } else {
      fail("$", "unknown key \"" + key + "\"");
    }
  }
  if (spec.base.is_null()) fail("$.base", "missing required field");
  if (spec.axes.empty()) fail("$.grid", "empty grid");
  try {
    config_from_json(spec.base);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("base: ") + e.what());
  }
  return spec;
}

SweepSpec load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read sweep file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_sweep(buffer.str());
}

std::size_t sweep_size(const SweepSpec& spec) {
  std::size_t n = static_cast<std::size_t>(spec.repeats);
  for (const GridAxis& axis : spec.axes) n *= axis.values.size();
  return n;
}

std::vector<SweepPoint> expand_sweep(const SweepSpec& spec, FieldConvention fallback,
                                     std::optional<std::uint64_t> seed_override) {
  const std::size_t total = sweep_size(spec);
  if (total == 0) fail("$.grid", "empty grid");
  if (total > spec.max_runs) {
    fail("$.max_runs", "grid has " + std::to_string(total) + " runs, cap is " +
                           std::to_string(spec.max_runs));
  }
  ExperimentConfig base = config_from_json(spec.base);
  if (seed_override) set_seed(base, *seed_override);
  const json base_json = config_to_json(base);

  std::vector<SweepPoint> points;
  points.reserve(total);
  std::vector<std::size_t> idx(spec.axes.size(), 0);
  for (std::size_t n = 0; n < total / static_cast<std::size_t>(spec.repeats); ++n) {
    json doc = base_json;
    std::vector<json> values;
    std::optional<double> sigma;
    for (std::size_t a = 0; a < spec.axes.size(); ++a) {
      const json& v = spec.axes[a].values[idx[a]];
      values.push_back(v);
      if (spec.axes[a].key == "sigma") {
        if (!v.is_number() || !(v.get<double>() > 0.0)) fail("$.grid.sigma", "values must be > 0");
        sigma = v.get<double>();
      } else {
        set_path(doc, spec.axes[a].key, v);
      }
    }
    ExperimentConfig cfg = config_from_json(doc);
    if (sigma) {
      const double lambda = cfg.solver.gn.lambda;
      if (!(lambda < 1.0)) fail("$.grid.sigma", "sigma sweeps need lambda < 1");
      cfg.solver.gn.step = *sigma / (1.0 / lambda - 1.0);
      cfg = config_from_json(config_to_json(cfg));
    }
    for (std::int64_t r = 0; r < spec.repeats; ++r) {
      SweepPoint point;
      point.values = values;
      point.repeat = r;
      point.config = cfg;
      set_seed(point.config, cfg.seed + static_cast<std::uint64_t>(r) * spec.seed_stride);
      point.config = resolve(point.config, fallback);
      points.push_back(std::move(point));
    }
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      if (++idx[a] < spec.axes[a].values.size()) break;
      idx[a] = 0;
    }
  }
  return points;
}

SweepSummary run_sweep(const std::vector<SweepPoint>& points, const std::vector<GridAxis>& axes,
                       const std::filesystem::path& out_dir, unsigned workers) {
  std::filesystem::create_directories(out_dir);
  std::vector<SweepRun> runs(points.size());
  auto record_name = [](std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "run_%05zu.json", i);
    return std::string(buf);
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        RunRecord record = execute_run(points[i].config);
        write_record(record, out_dir / record_name(i));
        runs[i].record = std::move(record);
      } catch (const std::exception& e) {
        runs[i].error = e.what();
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(points.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::string index = "run";
  for (const GridAxis& axis : axes) index += ',' + csv_cell(axis.key);
  index += ",repeat,seed,verdict,final_iter,final_field_norm,final_distance,final_value,"
           "final_metric,record,error\n";
  SweepSummary summary;
  summary.runs = points.size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    index += std::to_string(i);
    for (const json& v : points[i].values) index += ',' + value_cell(v);
    index += ',' + std::to_string(points[i].repeat);
    index += ',' + std::to_string(points[i].config.seed);
    if (runs[i].record && !runs[i].record->rows.empty()) {
      const RunRecord& r = *runs[i].record;
      const TrajectoryRow& last = r.rows.back();
      index += ',' + std::string(to_string(r.verdict));
      index += ',' + std::to_string(last.iter);
      index += ',' + format_double(last.field_norm);
      index += ',' + optional_cell(last.distance);
      index += ',' + format_double(last.value);
      index += ',' + optional_cell(last.metric);
      index += ',' + record_name(i) + ",\n";
    } else {
      ++summary.failures;
      const std::string error = runs[i].error.empty() ? "no rows recorded" : runs[i].error;
      index += ",,,,,,,," + csv_cell(error) + '\n';
    }
  }
  write_text(out_dir / "index.csv", index);
  return summary;
}

}  // namespace minimax
