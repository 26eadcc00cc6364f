#include "minimax/record.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "minimax/errors.hpp"

namespace minimax {

using nlohmann::json;

namespace {

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

ParamPoint point_for(const GameOracle& oracle, const std::vector<double>& values) {
  return ParamPoint(to_vector(values), oracle.dims().m);
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json eigen_list(const std::vector<Complex>& eigs) {
  json out = json::array();
  for (const Complex& z : eigs) out.push_back({z.real(), z.imag()});
  return out;
}

json row_json(const TrajectoryRow& row, bool mask_timing) {
  return {{"iter", row.iter},
          {"wall_time", mask_timing ? json(nullptr) : json(row.wall_time)},
          {"field_norm", row.field_norm},
          {"distance", optional_number(row.distance)},
          {"value", row.value},
          {"metric", optional_number(row.metric)}};
}

json mlp_json(const MlpSpec& spec) {
  return {{"widths", spec.widths},
          {"activation", std::string(to_string(spec.activation))},
          {"leaky_slope", spec.leaky_slope},
          {"head", spec.head == OutputActivation::Sigmoid ? "sigmoid" : "identity"}};
}

constexpr char kSnapshotMagic[8] = {'M', 'M', 'X', 'S', 'N', 'A', 'P', '1'};

void put_u64(std::string& out, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return x;
}

}  // namespace

RunRecord execute_run(const ExperimentConfig& cfg) {
  RunRecord record;
  record.config = cfg;
  if (cfg.gan) {
    record.warnings = validate(*cfg.gan);
    const GanRun run = train_toy_gan(*cfg.gan);
    record.rows = run.rows;
    record.verdict = run.verdict;
    record.final_point = to_std(run.final_point.values());
    record.split = run.final_point.split();
    return record;
  }
  if (!cfg.game) throw ConfigError("$: no game or gan section");
  record.warnings = validate(cfg.solver);
  const OraclePtr oracle = make_game(*cfg.game);
  const GameDims dims = oracle->dims();
  const std::vector<double> init =
      cfg.init.value_or(std::vector<double>(static_cast<std::size_t>(dims.m + dims.n), 0.1));
  const Trajectory traj =
      run_solver(point_for(*oracle, init), *oracle, cfg.solver, cfg.iters, cfg.stop, cfg.seed);
  record.rows = traj.rows;
  record.verdict = traj.verdict;
  record.final_point = to_std(traj.final_point.values());
  record.split = traj.final_point.split();
  if (cfg.analyze.attach) {
    const auto nash = oracle->nash_points();
    if (nash.empty()) {
      record.warnings.push_back("analyze.attach: the game has no known equilibrium");
    } else {
      record.spectral = spectral_report(*oracle, nash.front(), cfg.solver.gn, cfg.solver.convention);
    }
  }
  return record;
}

AnalyzeResult execute_analyze(const ExperimentConfig& cfg) {
  if (!cfg.game) throw ConfigError("$.game: analyze needs an analytic game");
  AnalyzeResult result;
  result.config = cfg;
  const OraclePtr oracle = make_game(*cfg.game);
  if (cfg.analyze.point) {
    result.point = *cfg.analyze.point;
  } else {
    const auto nash = oracle->nash_points();
    if (nash.empty()) throw ConfigError("$.analyze.point: the game has no known equilibrium");
    result.point = to_std(nash.front().values());
  }
  const ParamPoint p = point_for(*oracle, result.point);
  result.report = spectral_report(*oracle, p, cfg.solver.gn, cfg.solver.convention);
  if (cfg.analyze.measure) {
    std::vector<double> start = result.point;
    if (cfg.analyze.start) {
      start = *cfg.analyze.start;
    } else {
      for (double& s : start) s += 0.1;
    }
    result.contraction = contraction_experiment(*oracle, cfg.solver.gn, cfg.solver.convention,
                                                point_for(*oracle, start), cfg.analyze.iters);
  }
  return result;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

json to_json(const SpectralReport& r) {
  const StationaryClassification& c = r.classification;
  return {{"field_eigenvalues", eigen_list(r.field_eigenvalues)},
          {"update_eigenvalues", eigen_list(r.update_eigenvalues)},
          {"spectral_radius", r.spectral_radius},
          {"sigma", r.sigma},
          {"sigma_bound", optional_number(r.sigma_bound)},
          {"contraction", r.contraction},
          {"classification", std::string(to_string(c.classification))},
          {"hess_xx", std::string(to_string(c.hess_xx))},
          {"hess_yy", std::string(to_string(c.hess_yy))},
          {"blocks_semidefinite", c.blocks_semidefinite},
          {"eigen_semidefinite", c.eigen_semidefinite},
          {"verdicts_agree", c.verdicts_agree}};
}

json to_json(const AnalyzeResult& result) {
  json j = {{"config", config_to_json(result.config)},
            {"point", result.point},
            {"spectral", to_json(result.report)}};
  if (result.contraction) {
    j["contraction"] = {{"predicted", result.contraction->predicted},
                        {"measured", optional_number(result.contraction->measured)},
                        {"verdict", std::string(to_string(result.contraction->verdict))}};
  }
  return j;
}

json to_json(const RunRecord& record, bool mask_timing) {
  json rows = json::array();
  for (const TrajectoryRow& row : record.rows) rows.push_back(row_json(row, mask_timing));
  json j = {{"config", config_to_json(record.config)},
            {"verdict", std::string(to_string(record.verdict))},
            {"rows", rows},
            {"final_point", record.final_point},
            {"split", record.split},
            {"warnings", record.warnings}};
  j["spectral"] = record.spectral ? to_json(*record.spectral) : json(nullptr);
  return j;
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  std::string out = "iter,wall_time,field_norm,distance,value,metric\n";
  for (const TrajectoryRow& row : rows) {
    out += std::to_string(row.iter);
    out += ',' + format_double(row.wall_time);
    out += ',' + format_double(row.field_norm);
    out += ',' + (row.distance ? format_double(*row.distance) : std::string());
    out += ',' + format_double(row.value);
    out += ',' + (row.metric ? format_double(*row.metric) : std::string());
    out += '\n';
  }
  return out;
}

std::filesystem::path csv_path_for(const std::filesystem::path& json_path) {
  std::filesystem::path p = json_path;
  return p.replace_extension(".csv");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_record(const RunRecord& record, const std::filesystem::path& json_path) {
  write_text(json_path, to_json(record).dump(2) + "\n");
  write_text(csv_path_for(json_path), trajectory_csv(record.rows));
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snapshot) {
  const std::string header = snapshot.header.dump();
  std::string out(kSnapshotMagic, sizeof(kSnapshotMagic));
  put_u64(out, header.size());
  out += header;
  for (double x : snapshot.values) put_u64(out, std::bit_cast<std::uint64_t>(x));
  write_text(path, out);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kSnapshotMagic, 8) != 0) {
    throw std::runtime_error("'" + path.string() + "' is not a parameter snapshot");
  }
  const std::uint64_t header_len = get_u64(data + 8);
  if (header_len > bytes.size() - 16 || (bytes.size() - 16 - header_len) % 8 != 0) {
    throw std::runtime_error("'" + path.string() + "' is truncated");
  }
  Snapshot snap;
  snap.header = json::parse(bytes.substr(16, header_len));
  const std::size_t count = (bytes.size() - 16 - header_len) / 8;
  snap.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    snap.values[i] = std::bit_cast<double>(get_u64(data + 16 + header_len + 8 * i));
  }
  if (snap.header.contains("count") && snap.header["count"].get<std::size_t>() != count) {
    throw std::runtime_error("'" + path.string() + "' has a parameter count mismatch");
  }
  return snap;
}

Snapshot gan_snapshot(const RunRecord& record) {
  if (!record.config.gan) throw std::invalid_argument("snapshot needs a GAN run");
  const ToyGanConfig& g = *record.config.gan;
  Snapshot snap;
  snap.values = record.final_point;
  std::int64_t steps = 0;
  if (!record.rows.empty()) steps = record.rows.back().iter;
  snap.header = {{"format", "float64-le"},
                 {"count", record.final_point.size()},
                 {"split", record.split},
                 {"generator", mlp_json(generator_spec(g))},
                 {"discriminator", mlp_json(discriminator_spec(g))},
                 {"seed", g.seed},
                 {"steps", steps}};
  return snap;
}

}  // namespace minimax
