#pragma once

// JSON instance and solution files (format_version 1) and the per-iteration
// trace CSV. Parse errors name the file and the JSON pointer at fault.

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gip/dual_polytope.hpp"
#include "gip/error.hpp"
#include "gip/measures.hpp"
#include "gip/solver.hpp"
#include "gip/sphere.hpp"

namespace gip::io {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

struct Instance {
  std::size_t dimension = 2;
  DiscreteMeasure mu;
  QuadratureMeasure lambda;
  GridScheme scheme = GridScheme::uniform_angles;
  std::size_t count = 0;
  bool normalize_lambda = false;
  json source;  // the parsed document, echoed into solution files
};

namespace detail {

/// Cursor into a JSON document that remembers its pointer for messages.
class Node {
 public:
  Node(const json& j, std::string origin, std::string path = "")
      : j_(&j), origin_(std::move(origin)), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& reason) const {
    throw Error(origin_ + ": " + (path_.empty() ? "/" : path_) + ": " + reason);
  }
  const json& raw() const { return *j_; }
  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

  Node at(const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    if (!j_->contains(key)) Node(*j_, origin_, path_ + "/" + key).fail("missing field");
    return Node((*j_)[key], origin_, path_ + "/" + key);
  }
  Node at(std::size_t i) const { return Node((*j_)[i], origin_, path_ + "/" + std::to_string(i)); }
  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }
  double number() const {
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("number is not finite");
    return v;
  }
  std::size_t count() const {
    if (!j_->is_number_integer() || j_->get<long long>() < 0) fail("expected a non-negative integer");
    return j_->get<std::size_t>();
  }
  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }
  std::vector<double> numbers() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i).number();
    return out;
  }
  /// Unit vector of the given dimension; nonzero inputs are normalized.
  UnitVector direction(std::size_t dim) const {
    auto c = numbers();
    if (c.size() != dim) fail("expected " + std::to_string(dim) + " coordinates");
    double n2 = 0.0;
    for (double x : c) n2 += x * x;
    if (!(n2 > 0.0)) fail("zero vector");
    return UnitVector::normalized(std::move(c));
  }

 private:
  const json* j_;
  std::string origin_;
  std::string path_;
};

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(path + ": invalid JSON: " + e.what());
  }
}

inline void check_version(const Node& root, bool required) {
  if (!root.has("format_version")) {
    if (required) root.at("format_version");
    return;
  }
  if (root.at("format_version").count() != static_cast<std::size_t>(kFormatVersion))
    root.at("format_version").fail("unsupported format version (expected 1)");
}

/// Rethrows library errors raised while building a measure with the
/// location of the offending field.
template <class F>
auto located(const Node& node, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    node.fail(e.what());
  }
}

}  // namespace detail

inline Instance parse_instance(const json& doc, const std::string& origin = "<instance>") {
  const detail::Node root(doc, origin);
  if (!doc.is_object()) root.fail("expected an object");
  detail::check_version(root, false);
  Instance inst;
  inst.source = doc;
  const auto dim_node = root.at("dimension");
  inst.dimension = dim_node.count();
  if (inst.dimension != 2 && inst.dimension != 3) dim_node.fail("dimension must be 2 or 3");
  const std::size_t n = inst.dimension;

  const auto mu_node = root.at("mu");
  const auto atoms_node = mu_node.at("atoms");
  std::vector<UnitVector> atoms;
  for (std::size_t i = 0; i < atoms_node.size(); ++i) atoms.push_back(atoms_node.at(i).direction(n));
  const auto weights_node = mu_node.at("weights");
  auto weights = weights_node.numbers();
  if (weights.size() != atoms.size()) weights_node.fail("expected one weight per atom");
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (!(weights[i] > 0.0)) weights_node.at(i).fail("weight must be positive");
  inst.mu = detail::located(mu_node, [&] { return DiscreteMeasure(DirectionSet(atoms), weights); });

  inst.scheme = n == 2 ? GridScheme::uniform_angles : GridScheme::fibonacci;
  inst.count = n == 2 ? 100000 : 200000;
  if (root.has("quadrature")) {
    const auto q = root.at("quadrature");
    if (q.has("scheme")) {
      const auto s = q.at("scheme");
      inst.scheme = detail::located(s, [&] { return grid_scheme_from_string(s.string()); });
    }
    if (q.has("count")) inst.count = q.at("count").count();
  }
  const auto grid = detail::located(root.has("quadrature") ? root.at("quadrature") : root, [&] {
    return std::make_shared<const QuadratureGrid>(build_grid(n, inst.count, inst.scheme));
  });

  const auto lam_node = root.at("lambda");
  const auto type_node = lam_node.at("type");
  const std::string type = type_node.string();
  if (type == "uniform") {
    const double v = lam_node.has("value") ? lam_node.at("value").number() : 1.0;
    if (!(v > 0.0)) lam_node.at("value").fail("density must be positive");
    inst.lambda = QuadratureMeasure::sample(grid, DensityModel::uniform(v));
  } else if (type == "table") {
    const auto vals_node = lam_node.at("values");
    auto vals = vals_node.numbers();
    if (vals.size() != grid->size())
      vals_node.fail("expected " + std::to_string(grid->size()) + " values (one per quadrature node)");
    inst.lambda = detail::located(vals_node, [&] { return QuadratureMeasure(grid, std::move(vals)); });
  } else if (type == "caps") {
    const double base = lam_node.has("base") ? lam_node.at("base").number() : 0.0;
    if (base < 0.0) lam_node.at("base").fail("base density must be non-negative");
    const auto caps_node = lam_node.at("caps");
    std::vector<Cap> caps;
    for (std::size_t i = 0; i < caps_node.size(); ++i) {
      const auto c = caps_node.at(i);
      Cap cap{c.at("center").direction(n), c.at("radius").number(), c.at("value").number()};
      if (!(cap.radius > 0.0 && cap.radius < std::numbers::pi)) c.at("radius").fail("radius must lie in (0, pi)");
      if (cap.value < 0.0) c.at("value").fail("cap value must be non-negative");
      caps.push_back(std::move(cap));
    }
    inst.lambda = detail::located(lam_node, [&] {
      return QuadratureMeasure::sample(grid, DensityModel::caps(base, std::move(caps)));
    });
  } else {
    type_node.fail("unknown lambda type '" + type + "' (expected uniform, table or caps)");
  }
  if (root.has("normalize_lambda")) inst.normalize_lambda = root.at("normalize_lambda").boolean();
  if (inst.normalize_lambda) inst.lambda = normalize_to(inst.lambda, total_mass(inst.mu));
  return inst;
}

inline Instance load_instance(const std::string& path) { return parse_instance(detail::read_json_file(path), path); }

inline json config_to_json(const SolverConfig& cfg) {
  return json{{"tol", cfg.tol},
              {"max_iters", cfg.max_iters},
              {"step_rule", to_string(cfg.step_rule)},
              {"gap_ratio", cfg.gap_ratio},
              {"seed", cfg.seed},
              {"rescale_recovery", cfg.rescale_recovery}};
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline json directions_to_json(const DirectionSet& dirs) {
  json out = json::array();
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    json row = json::array();
    for (double x : dirs[i]) row.push_back(x);
    out.push_back(std::move(row));
  }
  return out;
}

/// Everything but `metadata` is a deterministic function of the inputs.
inline json solution_to_json(const SolverReport& rep, const SolverConfig& cfg, const Instance& inst) {
  const auto& p = rep.final_P;
  json betas = json::array();
  for (double a : p.alphas()) betas.push_back(1.0 / a);
  json events = json::array();
  for (const auto& e : rep.rescale_events)
    events.push_back({{"iteration", e.iteration}, {"subset", e.subset.members()}, {"factor", e.factor}});
  return json{{"format_version", kFormatVersion},
              {"dimension", p.dim()},
              {"directions", directions_to_json(p.directions())},
              {"alphas", p.alphas()},
              {"betas", betas},
              {"residual", rep.residual_inf},
              {"phi", rep.phi},
              {"radii_ratio", rep.radii_ratio},
              {"uniform_alpha", rep.uniform_alpha_used ? json(*rep.uniform_alpha_used) : json(nullptr)},
              {"rescale_events", events},
              {"converged", rep.converged},
              {"warnings", rep.warnings},
              {"iterations", rep.iterations},
              {"cell_masses", rep.cell_masses},
              {"config", config_to_json(cfg)},
              {"instance", inst.source},
              {"metadata", {{"created_utc", utc_timestamp()}, {"generator", "gip"}}}};
}

struct Solution {
  DualPolytope polytope;
  double residual = 0.0;
  double phi = 0.0;
  double radii_ratio = 0.0;
  std::optional<double> uniform_alpha;
  bool converged = false;
  std::optional<Instance> instance;
  json source;
};

inline Solution parse_solution(const json& doc, const std::string& origin = "<solution>", bool load_instance = true) {
  const detail::Node root(doc, origin);
  if (!doc.is_object()) root.fail("expected an object");
  detail::check_version(root, true);
  Solution s;
  s.source = doc;
  const std::size_t n = root.at("dimension").count();
  const auto dirs_node = root.at("directions");
  std::vector<UnitVector> dirs;
  for (std::size_t i = 0; i < dirs_node.size(); ++i) dirs.push_back(dirs_node.at(i).direction(n));
  const auto alphas_node = root.at("alphas");
  const auto alphas = alphas_node.numbers();
  const auto betas_node = root.at("betas");
  const auto betas = betas_node.numbers();
  if (alphas.size() != dirs.size()) alphas_node.fail("expected one alpha per direction");
  if (betas.size() != alphas.size()) betas_node.fail("expected one beta per alpha");
  for (std::size_t i = 0; i < alphas.size(); ++i)
    if (std::abs(alphas[i] * betas[i] - 1.0) > 1e-12) betas_node.at(i).fail("beta is not 1/alpha");
  s.polytope = detail::located(alphas_node, [&] {
    return DualPolytope::make(DirectionSet(dirs), alphas).with_alphas(alphas, true);
  });
  s.residual = root.at("residual").number();
  s.phi = root.at("phi").number();
  s.radii_ratio = root.at("radii_ratio").number();
  if (root.has("uniform_alpha") && !doc["uniform_alpha"].is_null()) s.uniform_alpha = root.at("uniform_alpha").number();
  if (root.has("converged")) s.converged = root.at("converged").boolean();
  if (load_instance && root.has("instance")) s.instance = parse_instance(doc["instance"], origin + "#/instance");
  return s;
}

inline Solution load_solution(const std::string& path, bool with_instance = true) {
  return parse_solution(detail::read_json_file(path), path, with_instance);
}

inline void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot open file for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw Error(path + ": write failed");
}

inline std::string trace_csv(const SolverReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "iter,phi,residual_inf,min_alpha,max_alpha,cluster_count\n";
  for (const auto& r : rep.trace)
    os << r.iteration << ',' << r.phi << ',' << r.residual_inf << ',' << r.min_alpha << ',' << r.max_alpha << ','
       << r.cluster_count << '\n';
  return os.str();
}

}  // namespace gip::io
