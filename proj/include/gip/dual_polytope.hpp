#pragma once

// Polytopes P = (cap_i H^-(alpha_i, v_i))^* with fixed vertex directions v_i.
//
// The polar body P* = {x : x.v_i <= alpha_i} is what is stored; the primal
// body P has vertices beta_i v_i with beta_i = 1/alpha_i once alpha is
// canonical, i.e. each alpha_i equals the support value of P* at v_i.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gip/error.hpp"
#include "gip/linprog.hpp"
#include "gip/sphere.hpp"

namespace gip {

/// Nonempty subset of {0, ..., universe-1}, stored sorted.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::vector<std::size_t> members, std::size_t universe) : members_(std::move(members)), universe_(universe) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    if (members_.empty()) throw Error("IndexSet: empty");
    if (members_.back() >= universe_) throw Error("IndexSet: index out of range");
  }

  const std::vector<std::size_t>& members() const { return members_; }
  std::size_t universe() const { return universe_; }
  std::size_t size() const { return members_.size(); }
  bool contains(std::size_t i) const { return std::binary_search(members_.begin(), members_.end(), i); }
  /// Nonempty and not the full index set.
  bool proper() const { return !members_.empty() && members_.size() < universe_; }

  IndexSet complement() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < universe_; ++i)
      if (!contains(i)) out.push_back(i);
    return IndexSet(std::move(out), universe_);
  }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<std::size_t> members_;
  std::size_t universe_ = 0;
};

class DualPolytope {
 public:
  DualPolytope() = default;

  /// Validates positivity of alphas and that the directions are not
  /// contained in a closed hemisphere (origin interior to P and P*).
  static DualPolytope make(DirectionSet directions, std::vector<double> alphas) {
    if (directions.size() != alphas.size()) throw Error("DualPolytope: direction/alpha count mismatch");
    for (std::size_t i = 0; i < alphas.size(); ++i)
      if (!(alphas[i] > 0.0) || !std::isfinite(alphas[i]))
        throw Error("DualPolytope: alpha " + std::to_string(i) + " must be positive");
    if (directions.empty() || hemisphere_witness(directions))
      throw Error("DualPolytope: directions are contained in a closed hemisphere");
    DualPolytope p;
    p.dirs_ = std::move(directions);
    p.alphas_ = std::move(alphas);
    return p;
  }

  const DirectionSet& directions() const { return dirs_; }
  const std::vector<double>& alphas() const { return alphas_; }
  bool canonical() const { return canonical_; }
  std::size_t size() const { return alphas_.size(); }
  std::size_t dim() const { return dirs_.dim(); }

  /// Same directions, new coefficients. The caller vouches for positivity.
  DualPolytope with_alphas(std::vector<double> alphas, bool canonical) const {
    DualPolytope p;
    p.dirs_ = dirs_;
    p.alphas_ = std::move(alphas);
    p.canonical_ = canonical;
    return p;
  }

  /// The dilate aP, as a polytope: alphas divide by a.
  DualPolytope dilated(double a) const {
    if (!(a > 0.0)) throw Error("DualPolytope::dilated: factor must be positive");
    std::vector<double> al = alphas_;
    for (double& x : al) x /= a;
    return with_alphas(std::move(al), canonical_);
  }

  /// Rescaled so that max alpha = 1.
  DualPolytope normalized() const {
    const double mx = *std::max_element(alphas_.begin(), alphas_.end());
    return dilated(mx);
  }

 private:
  DirectionSet dirs_;
  std::vector<double> alphas_;
  bool canonical_ = false;
};

struct RhoPolar {
  double value = 0.0;
  std::size_t argmin = 0;
};

/// rho_{P*}(u) = min over u.v_i > 0 of alpha_i / (u.v_i); ties go to the
/// lowest index.
inline RhoPolar rho_polar(const DualPolytope& p, std::span<const double> u) {
  const auto& dirs = p.directions();
  const auto& al = p.alphas();
  RhoPolar best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < al.size(); ++i) {
    const double d = gip::dot(u, dirs[i]);
    if (d <= 0.0) continue;
    const double r = al[i] / d;
    if (r < best.value) best = {r, i};
  }
  if (!std::isfinite(best.value)) throw Error("rho_polar: no direction has positive inner product with u");
  return best;
}

/// beta_i = rho_P(v_i) = 1 / alpha_i on a canonical polytope.
inline std::vector<double> rho_primal_at_atoms(const DualPolytope& p) {
  if (!p.canonical()) throw Error("rho_primal_at_atoms: polytope is not canonical");
  std::vector<double> beta(p.size());
  for (std::size_t i = 0; i < beta.size(); ++i) beta[i] = 1.0 / p.alphas()[i];
  return beta;
}

/// Support value of P* in direction v_i: max x.v_i s.t. x.v_j <= alpha_j.
inline double polar_support(const DualPolytope& p, std::span<const double> direction) {
  const auto& dirs = p.directions();
  const std::size_t n = p.dim();
  lp::Problem prob;
  prob.cols = n;
  prob.objective.assign(direction.begin(), direction.end());
  std::vector<double> row(n);
  for (std::size_t j = 0; j < p.size(); ++j) {
    for (std::size_t k = 0; k < n; ++k) row[k] = dirs[j][k];
    prob.add_row(row, p.alphas()[j]);
  }
  const auto r = lp::maximize(prob);
  if (r.status != lp::Status::optimal)
    throw Error("canonicalize: support LP is unbounded (directions lie in a closed hemisphere)");
  return r.value;
}

/// Replaces each alpha_i by the support value of P* at v_i. P* is unchanged
/// as a set and no alpha increases.
inline DualPolytope canonicalize(const DualPolytope& p) {
  std::vector<double> al = p.alphas();
  for (std::size_t i = 0; i < al.size(); ++i) {
    const double h = polar_support(p, p.directions()[i]);
    // A tight facet reproduces alpha_i up to rounding; keep it exactly.
    if (h < al[i] * (1.0 - 1e-12)) al[i] = h;
  }
  return p.with_alphas(std::move(al), true);
}

enum class RescaleSide { complement, members };

/// Multiplies alphas on one side of I by a in (0, 1], then canonicalizes.
/// The unscaled side may also shrink: the scaled constraints can make some
/// of its facets degenerate.
inline DualPolytope partial_rescale(const DualPolytope& p, const IndexSet& set, double a, RescaleSide side) {
  if (!(a > 0.0 && a <= 1.0)) throw Error("partial_rescale: factor must lie in (0, 1]");
  if (set.universe() != p.size()) throw Error("partial_rescale: index set universe mismatch");
  std::vector<double> al = p.alphas();
  for (std::size_t i = 0; i < al.size(); ++i) {
    const bool member = set.contains(i);
    if (member == (side == RescaleSide::members)) al[i] *= a;
  }
  return canonicalize(p.with_alphas(std::move(al), false));
}

struct ExtremalStats {
  double U = 0.0;       // max over I
  double L = 0.0;       // min over I
  double U_star = 0.0;  // max over the complement
  double L_star = 0.0;  // min over the complement
};

inline ExtremalStats extremal_stats(const DualPolytope& p, const IndexSet& set) {
  if (!p.canonical()) throw Error("extremal_stats: polytope is not canonical");
  if (!set.proper() || set.universe() != p.size()) throw Error("extremal_stats: index set must be proper");
  ExtremalStats s{0.0, std::numeric_limits<double>::infinity(), 0.0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = p.alphas()[i];
    if (set.contains(i)) {
      s.U = std::max(s.U, a);
      s.L = std::min(s.L, a);
    } else {
      s.U_star = std::max(s.U_star, a);
      s.L_star = std::min(s.L_star, a);
    }
  }
  return s;
}

struct PolarVertex {
  std::vector<double> x;
  std::vector<std::size_t> active;  // constraints tight at x
};

namespace detail {

/// Solves the square system rows * x = rhs by Gaussian elimination with
/// partial pivoting; empty when (numerically) singular.
inline std::optional<std::vector<double>> solve_square(std::vector<double> a, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (std::abs(a[piv * n + c]) < 1e-10) return std::nullopt;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(rhs[c], rhs[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      rhs[r] -= f * rhs[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = rhs[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
    x[r] = s / a[r * n + r];
  }
  return x;
}

}  // namespace detail

/// Vertices of P* by brute force over n-subsets of constraints (n = 2, 3).
inline std::vector<PolarVertex> polar_vertices(const DualPolytope& p) {
  const std::size_t n = p.dim();
  const std::size_t m = p.size();
  if (n != 2 && n != 3) throw Error("polar_vertices: only dimensions 2 and 3 are supported");
  const auto& dirs = p.directions();
  const auto& al = p.alphas();
  const double scale = *std::max_element(al.begin(), al.end());
  const double tol = 1e-9 * scale;

  std::vector<PolarVertex> out;
  std::vector<std::size_t> idx(n);
  auto consider = [&] {
    std::vector<double> a(n * n), rhs(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t k = 0; k < n; ++k) a[r * n + k] = dirs[idx[r]][k];
      rhs[r] = al[idx[r]];
    }
    auto x = detail::solve_square(std::move(a), std::move(rhs));
    if (!x) return;
    for (std::size_t j = 0; j < m; ++j)
      if (gip::dot(*x, dirs[j]) > al[j] + tol) return;
    for (const auto& v : out) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < n; ++k) d2 += (v.x[k] - (*x)[k]) * (v.x[k] - (*x)[k]);
      if (std::sqrt(d2) <= 1e-8 * scale) return;
    }
    PolarVertex pv;
    pv.x = std::move(*x);
    for (std::size_t j = 0; j < m; ++j)
      if (std::abs(gip::dot(pv.x, dirs[j]) - al[j]) <= tol) pv.active.push_back(j);
    out.push_back(std::move(pv));
  };
  if (n == 2) {
    for (idx[0] = 0; idx[0] < m; ++idx[0])
      for (idx[1] = idx[0] + 1; idx[1] < m; ++idx[1]) consider();
  } else {
    for (idx[0] = 0; idx[0] < m; ++idx[0])
      for (idx[1] = idx[0] + 1; idx[1] < m; ++idx[1])
        for (idx[2] = idx[1] + 1; idx[2] < m; ++idx[2]) consider();
  }
  return out;
}

struct Radii {
  double r_P = 0.0;      // inradius of P about the origin
  double R_P = 0.0;      // outradius of P about the origin
  double r_polar = 0.0;  // inradius of P*
  double R_polar = 0.0;  // outradius of P*
  bool exact = true;     // false when R_polar came from the grid fallback
};

/// r_{P*} = min alpha (exact on canonical P); R_{P*} from vertex enumeration
/// for n = 2, 3. Otherwise, or if enumeration degenerates, R_{P*} is the
/// max of rho_polar over `fallback` nodes, which underestimates it.
inline Radii radii(const DualPolytope& p, const QuadratureGrid* fallback = nullptr) {
  if (!p.canonical()) throw Error("radii: polytope is not canonical");
  Radii r;
  r.r_polar = *std::min_element(p.alphas().begin(), p.alphas().end());
  bool have = false;
  if (p.dim() == 2 || p.dim() == 3) {
    const auto verts = polar_vertices(p);
    if (verts.size() >= p.dim() + 1) {
      for (const auto& v : verts) r.R_polar = std::max(r.R_polar, std::sqrt(gip::dot(v.x, v.x)));
      have = true;
    }
  }
  if (!have) {
    if (fallback == nullptr) throw Error("radii: vertex enumeration failed and no fallback grid given");
    for (std::size_t k = 0; k < fallback->size(); ++k)
      r.R_polar = std::max(r.R_polar, rho_polar(p, fallback->node(k)).value);
    r.exact = false;
  }
  r.r_P = 1.0 / r.R_polar;
  r.R_P = 1.0 / r.r_polar;
  return r;
}

/// Splits indices into scale clusters: alphas sorted descending are cut
/// wherever consecutive ratios exceed gap_ratio. Largest scale first.
inline std::vector<IndexSet> degeneracy_clusters(const DualPolytope& p, double gap_ratio = 10.0) {
  if (!(gap_ratio > 1.0)) throw Error("degeneracy_clusters: gap ratio must exceed 1");
  const auto& al = p.alphas();
  std::vector<std::size_t> order(al.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return al[a] > al[b]; });
  std::vector<IndexSet> out;
  std::vector<std::size_t> current{order.front()};
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (al[order[k - 1]] / al[order[k]] > gap_ratio) {
      out.emplace_back(std::move(current), al.size());
      current.clear();
    }
    current.push_back(order[k]);
  }
  out.emplace_back(std::move(current), al.size());
  return out;
}

}  // namespace gip
