#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "test_support.hpp"

using namespace gip;
using namespace gip::testing;
using nlohmann::json;

namespace {

json square_doc(std::size_t count = 2000) {
  return json{{"format_version", 1},
              {"dimension", 2},
              {"mu", {{"atoms", {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}}, {"weights", {kPi / 2, kPi / 2, kPi / 2, kPi / 2}}}},
              {"lambda", {{"type", "uniform"}, {"value", 1}}},
              {"quadrature", {{"scheme", "uniform_angles"}, {"count", count}}},
              {"normalize_lambda", true}};
}

// Error message produced by parsing a mutated copy of the square instance.
template <class Mutate>
std::string parse_error(Mutate&& mutate) {
  auto doc = square_doc();
  mutate(doc);
  try {
    io::parse_instance(doc, "inst.json");
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("gip_test_" + name)).string();
}

}  // namespace

TEST(Instance, ParsesSquare) {
  const auto inst = io::parse_instance(square_doc());
  EXPECT_EQ(inst.dimension, 2u);
  EXPECT_EQ(inst.mu.size(), 4u);
  EXPECT_EQ(inst.lambda.size(), 2000u);
  EXPECT_TRUE(inst.normalize_lambda);
  EXPECT_NEAR(inst.lambda.total(), 2 * kPi, 1e-12);
}

TEST(Instance, DefaultsAndNormalization) {
  auto doc = square_doc();
  doc.erase("quadrature");
  doc.erase("normalize_lambda");
  doc["mu"]["atoms"][0] = {2.0, 0.0};  // normalized on load
  doc["lambda"]["value"] = 3.0;
  const auto inst = io::parse_instance(doc);
  EXPECT_EQ(inst.count, 100000u);
  EXPECT_EQ(inst.scheme, GridScheme::uniform_angles);
  EXPECT_FALSE(inst.normalize_lambda);
  EXPECT_NEAR(inst.lambda.total(), 6 * kPi, 1e-9);
  EXPECT_DOUBLE_EQ(inst.mu.atoms()[0][0], 1.0);
}

TEST(Instance, LambdaVariants) {
  auto caps = square_doc();
  caps["lambda"] = {{"type", "caps"},
                    {"base", 0.5},
                    {"caps", {{{"center", {0, 1}}, {"radius", 0.5}, {"value", 2.0}}}}};
  EXPECT_NEAR(io::parse_instance(caps).lambda.total(), 2 * kPi, 1e-12);
  auto table = square_doc(8);
  table["lambda"] = {{"type", "table"}, {"values", {1, 2, 3, 4, 5, 6, 7, 8}}};
  table["normalize_lambda"] = false;
  EXPECT_NEAR(io::parse_instance(table).lambda.total(), 36 * kPi / 4, 1e-12);
  const auto three = io::load_instance(GIP_SOURCE_DIR "/instances/octahedron.json");
  EXPECT_EQ(three.dimension, 3u);
  EXPECT_EQ(three.scheme, GridScheme::fibonacci);
}

TEST(Instance, ErrorsAreLocated) {
  EXPECT_EQ(parse_error([](json& d) { d["mu"]["weights"][2] = -1; }), "inst.json: /mu/weights/2: weight must be positive");
  EXPECT_EQ(parse_error([](json& d) { d["dimension"] = 4; }), "inst.json: /dimension: dimension must be 2 or 3");
  EXPECT_NE(parse_error([](json& d) { d["mu"]["atoms"][1] = {0, 0}; }).find("/mu/atoms/1"), std::string::npos);
  EXPECT_NE(parse_error([](json& d) { d["mu"]["atoms"][1] = {0, 1, 0}; }).find("/mu/atoms/1"), std::string::npos);
  EXPECT_NE(parse_error([](json& d) { d["mu"].erase("weights"); }).find("/mu"), std::string::npos);
  EXPECT_NE(parse_error([](json& d) { d["lambda"]["type"] = "gaussian"; }).find("/lambda/type"), std::string::npos);
  EXPECT_NE(parse_error([](json& d) { d["quadrature"]["scheme"] = "hex"; }).find("/quadrature/scheme"),
            std::string::npos);
  EXPECT_NE(parse_error([](json& d) { d["format_version"] = 7; }).find("/format_version"), std::string::npos);
  // Atoms inside a closed half-plane.
  EXPECT_NE(parse_error([](json& d) {
              d["mu"]["atoms"] = {{1, 0}, {0, 1}, {1, 1}};
              d["mu"]["weights"] = {1, 1, 1};
            }).find("/mu"),
            std::string::npos);
  EXPECT_THROW(io::load_instance(temp_path("missing.json")), Error);
}

TEST(Solution, RoundTripIsBitExact) {
  std::mt19937_64 rng(83);
  const auto g = grid(2, 2000);
  auto inst = io::parse_instance(square_doc());
  const auto pr = solvable_problem(rng, 2, 5, g);
  SolverConfig cfg;
  cfg.seed = 3;
  const auto rep = solve(pr.mu, pr.lam, cfg);
  const auto doc = io::solution_to_json(rep, cfg, inst);
  const auto path = temp_path("solution.json");
  io::write_json_file(path, doc);
  const auto back = io::load_solution(path);
  std::remove(path.c_str());
  EXPECT_EQ(back.polytope.alphas(), rep.final_P.alphas());
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(back.polytope.directions()[i][k], rep.final_P.directions()[i][k]);
  EXPECT_EQ(back.residual, rep.residual_inf);
  EXPECT_EQ(back.phi, rep.phi);
  EXPECT_EQ(back.radii_ratio, rep.radii_ratio);
  EXPECT_EQ(back.converged, rep.converged);
  ASSERT_TRUE(back.instance);
  EXPECT_EQ(back.instance->mu.weights(), inst.mu.weights());
  EXPECT_EQ(doc["format_version"], 1);
  EXPECT_EQ(doc["metadata"]["generator"], "gip");
  EXPECT_EQ(doc["config"]["seed"], 3);
}

TEST(Solution, RejectsInconsistentBetas) {
  const auto [mu, lam] = square(1000);
  const auto rep = solve(mu, lam);
  auto doc = io::solution_to_json(rep, {}, io::parse_instance(square_doc()));
  doc["betas"][1] = 2.0;
  try {
    io::parse_solution(doc, "sol.json");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("sol.json: /betas/1"), std::string::npos) << e.what();
  }
  doc.erase("format_version");
  EXPECT_THROW(io::parse_solution(doc, "sol.json"), Error);
}

TEST(TraceCsv, HeaderAndRows) {
  const auto [mu, lam] = square(1000);
  SolverConfig cfg;
  cfg.initial_alphas = std::vector<double>{1, 0.5, 1, 0.5};
  const auto rep = solve(mu, lam, cfg);
  const auto csv = io::trace_csv(rep);
  EXPECT_EQ(csv.rfind("iter,phi,residual_inf,min_alpha,max_alpha,cluster_count\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), rep.trace.size() + 1);
}

TEST(Export, SquareSvgHasFourEqualCells) {
  const auto p = canonicalize(DualPolytope::make(square_dirs(), {1, 1, 1, 1}));
  const auto svg = exporter::svg(p);
  EXPECT_NE(svg.find("id=\"polar\""), std::string::npos);
  EXPECT_NE(svg.find("id=\"body\""), std::string::npos);
  std::size_t cells = 0;
  for (std::size_t pos = 0; (pos = svg.find("data-length=\"", pos)) != std::string::npos; ++cells) {
    pos += 13;
    EXPECT_NEAR(std::stod(svg.substr(pos)), kPi / 2, 1e-6);
  }
  EXPECT_EQ(cells, 4u);
  EXPECT_THROW(exporter::obj(p), Error);
}

TEST(Export, OctahedronObj) {
  const DirectionSet cube({UnitVector({1, 0, 0}), UnitVector({-1, 0, 0}), UnitVector({0, 1, 0}),
                           UnitVector({0, -1, 0}), UnitVector({0, 0, 1}), UnitVector({0, 0, -1})});
  const auto p = canonicalize(DualPolytope::make(cube, std::vector<double>(6, 1.0)));
  const auto obj = exporter::obj(p);
  EXPECT_NE(obj.find("o polar_body"), std::string::npos);
  EXPECT_NE(obj.find("o body"), std::string::npos);
  std::size_t faces = 0, verts = 0;
  std::istringstream is(obj);
  for (std::string line; std::getline(is, line);) {
    if (line.rfind("f ", 0) == 0) ++faces;
    if (line.rfind("v ", 0) == 0) ++verts;
  }
  EXPECT_EQ(verts, 8u + 6u);  // cube polar body, octahedron body
  EXPECT_EQ(faces, 6u + 8u);
  EXPECT_THROW(exporter::svg(p), Error);
}
