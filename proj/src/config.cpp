#include "minimax/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "minimax/convergence.hpp"
#include "minimax/errors.hpp"

namespace minimax {

using nlohmann::json;

std::string_view to_string(GameKind kind) {
  switch (kind) {
    case GameKind::Quadratic: return "quadratic";
    case GameKind::Bilinear: return "bilinear";
    case GameKind::DiracGan: return "dirac_gan";
  }
  return "?";
}

std::string_view to_string(DiracLoss loss) {
  return loss == DiracLoss::Logistic ? "logistic" : "linear";
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

std::string type_name(const json& j) { return j.type_name(); }

// Reads one JSON object, remembering which keys were consumed so leftovers can be rejected.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object, got " + type_name(j_));
  }

  std::string path(const std::string& key) const { return path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) fail(path(key), "missing required field");
    return *v;
  }

  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    return v == nullptr ? fallback : as_number(*v, path(key));
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const json* v = find(key);
    return v == nullptr ? fallback : as_integer(*v, path(key));
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) fail(path(key), "expected a boolean, got " + type_name(*v));
    return v->get<bool>();
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) fail(path(key), "expected a string, got " + type_name(*v));
    return v->get<std::string>();
  }

  void finish() const {
    std::string unknown;
    for (const auto& [key, value] : j_.items()) {
      if (seen_.count(key) == 0) unknown += (unknown.empty() ? "\"" : ", \"") + key + "\"";
    }
    if (!unknown.empty()) fail(path_, "unknown key(s) " + unknown);
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number, got " + type_name(v));
    return v.get<double>();
  }

  static std::int64_t as_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer, got " + type_name(v));
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      fail(path, "integer out of range");
    }
    return v.get<std::int64_t>();
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> number_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers, got " + type_name(v));
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(ObjectReader::as_number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<Index> width_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of integers, got " + type_name(v));
  std::vector<Index> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const std::int64_t w = ObjectReader::as_integer(v[i], p);
    if (w < 1) fail(p, "layer widths must be >= 1");
    out.push_back(static_cast<Index>(w));
  }
  return out;
}

template <typename Fn>
auto parse_enum(const std::string& path, const std::string& name, Fn&& parse) {
  try {
    return parse(name);
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

GameConfig parse_game(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  GameConfig g;
  const auto kind_name = r.string("kind");
  if (!kind_name) fail(r.path("kind"), "missing required field");
  const std::string& kind = *kind_name;
  if (kind == "quadratic") {
    g.kind = GameKind::Quadratic;
    g.a = r.number("a", 1.0);
    g.c = r.number("c", 1.0);
  } else if (kind == "bilinear") {
    g.kind = GameKind::Bilinear;
    g.a = 0.0;
    g.c = 0.0;
  } else if (kind == "dirac_gan") {
    g.kind = GameKind::DiracGan;
    g.a = 0.0;
    g.c = 0.0;
    g.B = {{1.0}};
    if (const auto loss = r.string("loss")) {
      if (*loss == "logistic") {
        g.loss = DiracLoss::Logistic;
      } else if (*loss == "linear") {
        g.loss = DiracLoss::Linear;
      } else {
        fail(r.path("loss"), "expected \"logistic\" or \"linear\", got \"" + *loss + "\"");
      }
    }
  } else {
    fail(r.path("kind"), "unknown game \"" + kind + "\" (quadratic, bilinear, dirac_gan)");
  }
  if (g.kind != GameKind::DiracGan) {
    const json* b = r.find("B");
    if (b != nullptr) {
      const std::string bp = r.path("B");
      if (!b->is_array() || b->empty()) fail(bp, "expected a non-empty array of rows");
      g.B.clear();
      for (std::size_t i = 0; i < b->size(); ++i) {
        g.B.push_back(number_array((*b)[i], bp + "[" + std::to_string(i) + "]"));
        if (g.B.back().empty() || g.B.back().size() != g.B.front().size()) {
          fail(bp, "rows must be non-empty and of equal length");
        }
      }
    } else if (g.kind == GameKind::Bilinear) {
      g.B = {{1.0}};
    }
  }
  r.finish();
  try {
    make_game(g);
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return g;
}

SolverConfig parse_solver(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  SolverConfig s;
  const auto kind = r.string("kind");
  if (!kind) fail(r.path("kind"), "missing required field");
  s.kind = parse_enum(r.path("kind"), *kind, [](const std::string& n) { return parse_solver_kind(n); });
  s.gn.lambda = r.number("lambda", 0.1);
  s.gn.step = r.number("step", 1e-5);
  s.baseline.gamma = r.number("gamma", s.baseline.gamma);
  s.baseline.eta = r.number("eta", s.baseline.eta);
  s.adaptive.beta2 = r.number("beta2", s.adaptive.beta2);
  s.adaptive.epsilon = r.number("epsilon", s.adaptive.epsilon);
  s.noise_std = r.number("noise_std", 0.0);
  r.finish();
  if (!(s.gn.lambda > 0.0) || !std::isfinite(s.gn.lambda)) {
    fail(r.path("lambda"), "must be finite and > 0 (invariant lambda > 0)");
  }
  if (!(s.gn.step > 0.0) || !std::isfinite(s.gn.step)) {
    fail(r.path("step"), "must be finite and > 0 (invariant h > 0)");
  }
  try {
    validate(s);
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return s;
}

StoppingRule parse_stop(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  StoppingRule s;
  s.tol = r.number("tol", s.tol);
  s.blowup = r.number("blowup", s.blowup);
  s.growth_guard = r.boolean("growth_guard", s.growth_guard);
  r.finish();
  if (!(s.tol >= 0.0)) fail(r.path("tol"), "must be >= 0");
  if (!(s.blowup > 0.0)) fail(r.path("blowup"), "must be > 0");
  return s;
}

AnalyzeOptions parse_analyze(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  AnalyzeOptions a;
  if (const json* v = r.find("point")) a.point = number_array(*v, r.path("point"));
  a.measure = r.boolean("measure", a.measure);
  a.iters = r.integer("iters", a.iters);
  if (const json* v = r.find("start")) a.start = number_array(*v, r.path("start"));
  a.attach = r.boolean("attach", a.attach);
  r.finish();
  if (a.iters < kContractionWindow + 1) {
    fail(r.path("iters"), "must be > " + std::to_string(kContractionWindow));
  }
  return a;
}

GanTarget parse_target(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  const auto kind = r.string("kind");
  if (!kind) fail(r.path("kind"), "missing required field");
  GanTarget target;
  if (*kind == "gaussian1d") {
    Gaussian1D g;
    g.mean = r.number("mean", g.mean);
    g.std = r.number("std", g.std);
    target = g;
  } else if (*kind == "ring2d") {
    Ring2D ring;
    ring.modes = static_cast<int>(r.integer("modes", ring.modes));
    ring.radius = r.number("radius", ring.radius);
    ring.mode_std = r.number("mode_std", ring.mode_std);
    target = ring;
  } else {
    fail(r.path("kind"), "unknown target \"" + *kind + "\" (gaussian1d, ring2d)");
  }
  r.finish();
  return target;
}

GanLoss parse_loss(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  GanLoss loss;
  const auto kind = r.string("kind");
  if (!kind) fail(r.path("kind"), "missing required field");
  loss.kind = parse_enum(r.path("kind"), *kind, [](const std::string& n) { return parse_gan_loss(n); });
  loss.clip = r.number("clip", loss.clip);
  loss.gp_lambda = r.number("gp_lambda", loss.gp_lambda);
  loss.fd_step = r.number("fd_step", loss.fd_step);
  r.finish();
  return loss;
}

ToyGanConfig parse_gan(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  ToyGanConfig g;
  if (const json* v = r.find("target")) g.target = parse_target(*v, r.path("target"));
  g.latent_dim = r.integer("latent_dim", g.latent_dim);
  g.batch_size = r.integer("batch_size", g.batch_size);
  if (const json* v = r.find("loss")) g.loss = parse_loss(*v, r.path("loss"));
  if (const json* v = r.find("generator_hidden")) {
    g.generator_hidden = width_array(*v, r.path("generator_hidden"));
  }
  if (const json* v = r.find("discriminator_hidden")) {
    g.discriminator_hidden = width_array(*v, r.path("discriminator_hidden"));
  }
  if (const auto act = r.string("activation")) {
    g.activation = parse_enum(r.path("activation"), *act, [](const std::string& n) { return parse_activation(n); });
  }
  g.leaky_slope = r.number("leaky_slope", g.leaky_slope);
  g.steps = r.integer("steps", g.steps);
  g.eval_every = r.integer("eval_every", g.eval_every);
  g.eval_samples = r.integer("eval_samples", g.eval_samples);
  g.blowup = r.number("blowup", g.blowup);
  r.finish();
  return g;
}

}  // namespace

bool GameConfig::operator==(const GameConfig& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case GameKind::Quadratic: return a == other.a && c == other.c && B == other.B;
    case GameKind::Bilinear: return B == other.B;
    case GameKind::DiracGan: return loss == other.loss;
  }
  return false;
}

OraclePtr make_game(const GameConfig& cfg) {
  switch (cfg.kind) {
    case GameKind::DiracGan:
      return make_dirac_gan(DiracGanSpec{cfg.loss});
    case GameKind::Quadratic:
    case GameKind::Bilinear: {
      if (cfg.B.empty() || cfg.B.front().empty()) throw DimensionError("B must be non-empty");
      Matrix b(static_cast<Index>(cfg.B.size()), static_cast<Index>(cfg.B.front().size()));
      for (Index i = 0; i < b.rows(); ++i) {
        if (cfg.B[i].size() != static_cast<std::size_t>(b.cols())) {
          throw DimensionError("B rows must have equal length");
        }
        for (Index j = 0; j < b.cols(); ++j) b(i, j) = cfg.B[i][j];
      }
      if (cfg.kind == GameKind::Bilinear) return make_bilinear(b);
      return make_quadratic(QuadraticGameSpec{cfg.a, cfg.c, b});
    }
  }
  throw std::logic_error("unknown game kind");
}

ExperimentConfig config_from_json(const json& j) {
  ObjectReader r(j, "$");
  ExperimentConfig cfg;
  const json* game = r.find("game");
  const json* gan = r.find("gan");
  if ((game == nullptr) == (gan == nullptr)) {
    fail("$", "exactly one of \"game\" and \"gan\" is required");
  }
  if (game != nullptr) cfg.game = parse_game(*game, "$.game");
  if (gan != nullptr) cfg.gan = parse_gan(*gan, "$.gan");
  cfg.solver = parse_solver(r.require("solver"), "$.solver");
  if (const auto conv = r.string("convention")) {
    cfg.convention = parse_enum("$.convention", *conv, [](const std::string& n) { return parse_convention(n); });
  }
  if (const json* v = r.find("init")) cfg.init = number_array(*v, "$.init");
  cfg.iters = r.integer("iters", cfg.iters);
  if (const json* v = r.find("stop")) cfg.stop = parse_stop(*v, "$.stop");
  if (const json* v = r.find("seed")) {
    if (!v->is_number_unsigned()) fail("$.seed", "expected a non-negative integer");
    cfg.seed = v->get<std::uint64_t>();
  }
  if (const json* v = r.find("analyze")) cfg.analyze = parse_analyze(*v, "$.analyze");
  r.finish();

  if (cfg.iters < 1) fail("$.iters", "must be >= 1");
  if (cfg.game) {
    const GameDims dims = make_game(*cfg.game)->dims();
    const auto expected = static_cast<std::size_t>(dims.m + dims.n);
    if (cfg.init && cfg.init->size() != expected) {
      fail("$.init", "expected " + std::to_string(expected) + " entries, got " +
                         std::to_string(cfg.init->size()));
    }
    if (cfg.analyze.point && cfg.analyze.point->size() != expected) {
      fail("$.analyze.point", "expected " + std::to_string(expected) + " entries");
    }
    if (cfg.analyze.start && cfg.analyze.start->size() != expected) {
      fail("$.analyze.start", "expected " + std::to_string(expected) + " entries");
    }
  }
  if (cfg.gan) {
    if (cfg.init) fail("$.init", "not used by GAN runs");
    cfg.gan->solver = cfg.solver;
    cfg.gan->seed = cfg.seed;
    try {
      validate(*cfg.gan);
    } catch (const std::invalid_argument& e) {
      fail("$.gan", e.what());
    }
  }
  cfg.solver.convention = cfg.convention.value_or(FieldConvention::PaperOriented);
  if (cfg.gan) cfg.gan->solver.convention = cfg.solver.convention;
  return cfg;
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("$: invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

namespace {

json target_to_json(const GanTarget& target) {
  if (const auto* g = std::get_if<Gaussian1D>(&target)) {
    return {{"kind", "gaussian1d"}, {"mean", g->mean}, {"std", g->std}};
  }
  const auto& r = std::get<Ring2D>(target);
  return {{"kind", "ring2d"}, {"modes", r.modes}, {"radius", r.radius}, {"mode_std", r.mode_std}};
}

}  // namespace

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  if (cfg.game) {
    const GameConfig& g = *cfg.game;
    json game = {{"kind", std::string(to_string(g.kind))}};
    if (g.kind == GameKind::Quadratic) {
      game["a"] = g.a;
      game["c"] = g.c;
    }
    if (g.kind == GameKind::DiracGan) {
      game["loss"] = std::string(to_string(g.loss));
    } else {
      game["B"] = g.B;
    }
    j["game"] = game;
  }
  if (cfg.gan) {
    const ToyGanConfig& g = *cfg.gan;
    j["gan"] = {
        {"target", target_to_json(g.target)},
        {"latent_dim", g.latent_dim},
        {"batch_size", g.batch_size},
        {"loss",
         {{"kind", std::string(to_string(g.loss.kind))},
          {"clip", g.loss.clip},
          {"gp_lambda", g.loss.gp_lambda},
          {"fd_step", g.loss.fd_step}}},
        {"generator_hidden", g.generator_hidden},
        {"discriminator_hidden", g.discriminator_hidden},
        {"activation", std::string(to_string(g.activation))},
        {"leaky_slope", g.leaky_slope},
        {"steps", g.steps},
        {"eval_every", g.eval_every},
        {"eval_samples", g.eval_samples},
        {"blowup", g.blowup},
    };
  }
  const SolverConfig& s = cfg.solver;
  j["solver"] = {{"kind", std::string(to_string(s.kind))},
                 {"lambda", s.gn.lambda},
                 {"step", s.gn.step},
                 {"gamma", s.baseline.gamma},
                 {"eta", s.baseline.eta},
                 {"beta2", s.adaptive.beta2},
                 {"epsilon", s.adaptive.epsilon},
                 {"noise_std", s.noise_std}};
  if (cfg.convention) j["convention"] = std::string(to_string(*cfg.convention));
  if (cfg.init) j["init"] = *cfg.init;
  j["iters"] = cfg.iters;
  j["stop"] = {{"tol", cfg.stop.tol},
               {"blowup", cfg.stop.blowup},
               {"growth_guard", cfg.stop.growth_guard}};
  j["seed"] = cfg.seed;
  json analyze = {{"measure", cfg.analyze.measure},
                  {"iters", cfg.analyze.iters},
                  {"attach", cfg.analyze.attach}};
  if (cfg.analyze.point) analyze["point"] = *cfg.analyze.point;
  if (cfg.analyze.start) analyze["start"] = *cfg.analyze.start;
  j["analyze"] = analyze;
  return j;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  return config_to_json(cfg).dump(2) + "\n";
}

ExperimentConfig resolve(ExperimentConfig cfg, FieldConvention fallback) {
  if (!cfg.convention) cfg.convention = fallback;
  cfg.solver.convention = *cfg.convention;
  if (cfg.gan) {
    cfg.gan->solver = cfg.solver;
    cfg.gan->seed = cfg.seed;
  }
  return cfg;
}

void set_seed(ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  if (cfg.gan) cfg.gan->seed = seed;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace minimax
