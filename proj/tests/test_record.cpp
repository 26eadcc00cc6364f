#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "minimax/record.hpp"
#include "test_util.hpp"

namespace minimax {
namespace {

using testing::TempDir;

ExperimentConfig game_config(const std::string& text) {
  return resolve(parse_config(text), FieldConvention::PaperOriented);
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1e-5), "1e-05");
  std::mt19937_64 rng(100);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
}

TEST(Record, GnRunConverges) {
  const ExperimentConfig cfg = game_config(
      R"({"game": {"kind": "quadratic"}, "solver": {"kind": "gn", "lambda": 0.5, "step": 0.1},
          "convention": "descent-ascent", "iters": 1000})");
  const RunRecord rec = execute_run(cfg);
  EXPECT_EQ(rec.verdict, Verdict::Converged);
  EXPECT_LE(rec.rows.back().field_norm, 1e-8);
  EXPECT_EQ(rec.split, 1);
  for (std::size_t i = 1; i < rec.rows.size(); ++i) EXPECT_GT(rec.rows[i].iter, rec.rows[i - 1].iter);
}

TEST(Record, CsvMatchesJsonExactly) {
  const ExperimentConfig cfg = game_config(
      R"({"game": {"kind": "dirac_gan"}, "solver": {"kind": "gn", "lambda": 0.1, "step": 0.05},
          "convention": "descent-ascent", "iters": 200, "init": [0.7, -0.4]})");
  const RunRecord rec = execute_run(cfg);
  TempDir dir("record");
  const auto json_path = dir / "run.json";
  write_record(rec, json_path);
  const nlohmann::json j = nlohmann::json::parse(testing::read_file(json_path));
  const auto csv = parse_csv(testing::read_file(csv_path_for(json_path)));
  ASSERT_EQ(csv.size(), rec.rows.size() + 1);
  EXPECT_EQ(csv[0], (std::vector<std::string>{"iter", "wall_time", "field_norm", "distance", "value", "metric"}));
  const auto& rows = j["rows"];
  for (std::size_t i = 0; i < rec.rows.size(); ++i) {
    const auto& cells = csv[i + 1];
    ASSERT_EQ(cells.size(), 6u);
    EXPECT_EQ(std::stoll(cells[0]), rows[i]["iter"].get<std::int64_t>());
    EXPECT_EQ(std::strtod(cells[1].c_str(), nullptr), rows[i]["wall_time"].get<double>());
    EXPECT_EQ(std::strtod(cells[2].c_str(), nullptr), rows[i]["field_norm"].get<double>());
    EXPECT_EQ(std::strtod(cells[3].c_str(), nullptr), rows[i]["distance"].get<double>());
    EXPECT_EQ(std::strtod(cells[4].c_str(), nullptr), rows[i]["value"].get<double>());
    EXPECT_TRUE(cells[5].empty());
    EXPECT_TRUE(rows[i]["metric"].is_null());
    EXPECT_EQ(rows[i]["field_norm"].get<double>(), rec.rows[i].field_norm);
  }
  EXPECT_EQ(parse_config(j["config"].dump()), cfg);
}

TEST(Record, MaskedJsonIsByteIdentical) {
  const ExperimentConfig cfg = game_config(
      R"({"game": {"kind": "quadratic", "B": [[0.5]]}, "solver": {"kind": "gn-adaptive", "lambda": 0.1,
          "step": 0.01, "epsilon": 0.2, "noise_std": 0.01}, "iters": 300, "seed": 9})");
  const std::string a = to_json(execute_run(cfg), true).dump(2);
  const std::string b = to_json(execute_run(cfg), true).dump(2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("\"wall_time\": 0."), std::string::npos);
}

TEST(Record, AttachSpectralReport) {
  const ExperimentConfig cfg = game_config(
      R"({"game": {"kind": "quadratic", "B": [[0.5]]}, "solver": {"kind": "gn", "lambda": 0.5, "step": 0.25},
          "convention": "descent-ascent", "iters": 10, "analyze": {"attach": true}})");
  const RunRecord rec = execute_run(cfg);
  ASSERT_TRUE(rec.spectral.has_value());
  const nlohmann::json j = to_json(rec);
  EXPECT_NEAR(j["spectral"]["spectral_radius"].get<double>(), 0.760345, 1e-6);
  EXPECT_EQ(j["spectral"]["sigma_bound"].get<double>(), 1.6);
  EXPECT_EQ(j["spectral"]["classification"], "nash-candidate");
}

TEST(Analyze, Examples) {
  const AnalyzeResult q = execute_analyze(game_config(
      R"({"game": {"kind": "quadratic", "B": [[0.5]]}, "solver": {"kind": "gn", "lambda": 0.5, "step": 0.25},
          "convention": "descent-ascent", "analyze": {"measure": true, "iters": 400}})"));
  EXPECT_NEAR(q.report.spectral_radius, 0.7603453162872774, 1e-12);
  EXPECT_TRUE(q.report.contraction);
  ASSERT_TRUE(q.contraction.has_value());
  ASSERT_TRUE(q.contraction->measured.has_value());
  EXPECT_NEAR(*q.contraction->measured / q.contraction->predicted, 1.0, 0.02);

  const AnalyzeResult b = execute_analyze(game_config(
      R"({"game": {"kind": "bilinear"}, "solver": {"kind": "gn", "lambda": 0.5, "step": 0.25},
          "convention": "descent-ascent"})"));
  EXPECT_EQ(b.report.classification.classification, Classification::Indeterminate);
  EXPECT_TRUE(to_json(b)["spectral"]["sigma_bound"].is_null());

  const AnalyzeResult po = execute_analyze(game_config(
      R"({"game": {"kind": "quadratic"}, "solver": {"kind": "gn", "lambda": 0.5, "step": 0.25},
          "convention": "paper"})"));
  EXPECT_FALSE(po.report.contraction);
  EXPECT_NEAR(po.report.spectral_radius, 1.25, 1e-12);
}

TEST(Snapshot, FormatAndErrors) {
  TempDir dir("snap");
  Snapshot s;
  s.header = {{"format", "float64-le"}, {"count", 3}};
  s.values = {1.5, -0.0, 1e-300};
  write_snapshot(dir / "a.bin", s);
  const std::string raw = testing::read_file(dir / "a.bin");
  EXPECT_EQ(raw.substr(0, 8), "MMXSNAP1");
  const std::string header = s.header.dump();
  EXPECT_EQ(raw.size(), 8 + 8 + header.size() + 3 * 8);
  EXPECT_EQ(static_cast<unsigned char>(raw[8]), header.size());
  // 1.5 = 0x3FF8000000000000, little-endian
  EXPECT_EQ(static_cast<unsigned char>(raw[16 + header.size() + 7]), 0x3F);
  EXPECT_EQ(static_cast<unsigned char>(raw[16 + header.size() + 6]), 0xF8);
  const Snapshot back = read_snapshot(dir / "a.bin");
  EXPECT_EQ(back.values, s.values);
  EXPECT_TRUE(std::signbit(back.values[1]));

  testing::write_file(dir / "bad.bin", "NOTSNAP!");
  EXPECT_THROW(read_snapshot(dir / "bad.bin"), std::runtime_error);
  testing::write_file(dir / "short.bin", raw.substr(0, raw.size() - 4));
  EXPECT_THROW(read_snapshot(dir / "short.bin"), std::runtime_error);
  EXPECT_THROW(read_snapshot(dir / "missing.bin"), std::runtime_error);
}

TEST(Record, WriteFailureThrows) {
  RunRecord rec;
  rec.config = game_config(R"({"game": {"kind": "quadratic"}, "solver": {"kind": "gn"}})");
  EXPECT_THROW(write_record(rec, "/nonexistent/dir/run.json"), std::runtime_error);
}

}  // namespace
}  // namespace minimax
