#pragma once

// Independent reference computations for cross-checking the grid pipeline:
// exact Gauss image arcs on S^1 with adaptive 1-D quadrature, the arc form
// of Phi, dense parallel-set masses, and an exhaustive lattice maximizer of
// the surrogate F at small m.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gip/dual_polytope.hpp"
#include "gip/error.hpp"
#include "gip/gauss_image.hpp"
#include "gip/measures.hpp"
#include "gip/sphere.hpp"

namespace gip {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using AngularDensity = std::function<double(std::span<const double>)>;

struct ArcInterval {
  double begin = 0.0;  // radians, 0 <= begin < end <= 2 pi
  double end = 0.0;
};

/// Per-atom Gauss image cells on S^1 as angular intervals covering [0, 2pi).
/// A cell crossing angle 0 appears as two intervals.
struct ArcDecomposition {
  std::vector<std::vector<ArcInterval>> cells;

  double length(std::size_t i) const {
    double s = 0.0;
    for (const auto& iv : cells[i]) s += iv.end - iv.begin;
    return s;
  }
};

namespace detail {

inline double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

inline std::vector<double> angle_point(double th) { return {std::cos(th), std::sin(th)}; }

/// Adaptive Gauss-Kronrod integral of f over [a, b], split at the given
/// breakpoints (density jumps) so every piece is smooth.
inline double integrate_pieces(const std::function<double(double)>& f, double a, double b,
                               const std::vector<double>& breaks, double abs_tol = 1e-11) {
  std::vector<double> pts{a};
  for (double x : breaks)
    if (x > a && x < b) pts.push_back(x);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    if (pts[k + 1] - pts[k] <= 0.0) continue;
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, pts[k], pts[k + 1], 20, abs_tol, &err);
  }
  return total;
}

inline std::vector<double> density_breaks(const QuadratureMeasure& lam) {
  auto b = lam.model().angular_breakpoints();
  if (!lam.model().analytic()) {
    // Nearest-node tables jump halfway between nodes.
    std::vector<double> th;
    for (std::size_t k = 0; k < lam.size(); ++k) th.push_back(wrap_angle(std::atan2(lam.grid().node(k)[1], lam.grid().node(k)[0])));
    std::sort(th.begin(), th.end());
    for (std::size_t k = 0; k < th.size(); ++k) {
      const double next = k + 1 < th.size() ? th[k + 1] : th.front() + kTwoPi;
      b.push_back(wrap_angle(0.5 * (th[k] + next)));
    }
  }
  return b;
}

}  // namespace detail

/// Exact cells: candidate breakpoints are the pairwise equal-radius angles
/// and the edges of each half-plane of visibility; the argmin is constant
/// between consecutive candidates.
inline ArcDecomposition arc_cells(const DualPolytope& p) {
  if (p.dim() != 2) throw Error("arc_cells: only defined on S^1");
  if (!p.canonical()) throw Error("arc_cells: polytope is not canonical");
  const std::size_t m = p.size();
  const auto& al = p.alphas();
  std::vector<double> theta(m);
  for (std::size_t i = 0; i < m; ++i) theta[i] = std::atan2(p.directions()[i][1], p.directions()[i][0]);

  std::vector<double> cuts{0.0, kTwoPi};
  for (std::size_t i = 0; i < m; ++i) {
    cuts.push_back(detail::wrap_angle(theta[i] + 0.5 * std::numbers::pi));
    cuts.push_back(detail::wrap_angle(theta[i] - 0.5 * std::numbers::pi));
    for (std::size_t j = i + 1; j < m; ++j) {
      const double a = al[i] * std::cos(theta[j]) - al[j] * std::cos(theta[i]);
      const double b = al[i] * std::sin(theta[j]) - al[j] * std::sin(theta[i]);
      if (std::hypot(a, b) < 1e-300) continue;
      const double th = std::atan2(-a, b);
      cuts.push_back(detail::wrap_angle(th));
      cuts.push_back(detail::wrap_angle(th + std::numbers::pi));
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  ArcDecomposition out;
  out.cells.resize(m);
  std::size_t prev = m;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    if (b - a < 1e-15) continue;
    const auto owner = rho_polar(p, detail::angle_point(0.5 * (a + b))).argmin;
    if (owner == prev && !out.cells[owner].empty() && out.cells[owner].back().end == a) {
      out.cells[owner].back().end = b;
    } else {
      out.cells[owner].push_back({a, b});
    }
    prev = owner;
  }
  return out;
}

/// lambda(P, {v_i}) per atom by adaptive quadrature of the density over the
/// exact cells.
inline std::vector<double> arc_cell_masses(const DualPolytope& p, const AngularDensity& density,
                                           const std::vector<double>& breaks) {
  const auto cells = arc_cells(p);
  auto f = [&](double th) { return density(detail::angle_point(th)); };
  std::vector<double> out(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (const auto& iv : cells.cells[i]) out[i] += detail::integrate_pieces(f, iv.begin, iv.end, breaks);
  return out;
}

inline std::vector<double> arc_cell_masses(const DualPolytope& p, const QuadratureMeasure& lam) {
  return arc_cell_masses(p, lam.density_function(), detail::density_breaks(lam));
}

/// Phi with the lambda part integrated exactly cell by cell:
/// int log(alpha_i / cos(theta - theta_i)) d lambda over each cell.
inline FunctionalValue arc_phi(const DualPolytope& p, const DiscreteMeasure& mu, const AngularDensity& density,
                               const std::vector<double>& breaks) {
  if (mu.size() != p.size()) throw Error("arc_phi: polytope directions do not match mu atoms");
  const auto cells = arc_cells(p);
  FunctionalValue v;
  for (std::size_t i = 0; i < p.size(); ++i) {
    v.mu_part -= mu.weights()[i] * std::log(p.alphas()[i]);
    const double th_i = std::atan2(p.directions()[i][1], p.directions()[i][0]);
    const double log_a = std::log(p.alphas()[i]);
    auto f = [&](double th) { return density(detail::angle_point(th)) * (log_a - std::log(std::cos(th - th_i))); };
    for (const auto& iv : cells.cells[i]) v.lambda_part += detail::integrate_pieces(f, iv.begin, iv.end, breaks);
  }
  v.phi = v.mu_part + v.lambda_part;
  return v;
}

inline FunctionalValue arc_phi(const DualPolytope& p, const DiscreteMeasure& mu, const QuadratureMeasure& lam) {
  return arc_phi(p, mu, lam.density_function(), detail::density_breaks(lam));
}

/// lambda(omega_angle) on S^1: the density integrated over the union of open
/// arcs of half-width `angle` around the points of omega.
inline double dense_parallel_set_mass(const AngularDensity& density, const DirectionSet& omega, double angle,
                                      const std::vector<double>& breaks = {}) {
  if (!omega.empty() && omega.dim() != 2) throw Error("dense_parallel_set_mass: only defined on S^1");
  if (!(angle > 0.0 && angle < std::numbers::pi)) throw Error("dense_parallel_set_mass: angle outside (0, pi)");
  std::vector<ArcInterval> arcs;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const double a = detail::wrap_angle(std::atan2(omega[i][1], omega[i][0]) - angle);
    const double b = a + 2.0 * angle;
    if (b <= kTwoPi) {
      arcs.push_back({a, b});
    } else {
      arcs.push_back({a, kTwoPi});
      arcs.push_back({0.0, b - kTwoPi});
    }
  }
  std::sort(arcs.begin(), arcs.end(), [](const ArcInterval& x, const ArcInterval& y) { return x.begin < y.begin; });
  std::vector<ArcInterval> merged;
  for (const auto& a : arcs) {
    if (!merged.empty() && a.begin <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, a.end);
    } else {
      merged.push_back(a);
    }
  }
  auto f = [&](double th) { return density(detail::angle_point(th)); };
  double total = 0.0;
  for (const auto& a : merged) total += detail::integrate_pieces(f, a.begin, a.end, breaks, 1e-12);
  return total;
}

struct BruteForceResult {
  std::vector<double> t;  // t[0] = 0 gauge
  double F = 0.0;
  double resolution_bound = 0.0;  // upper bound on F_max - F over the refined cell
  std::size_t evaluations = 0;
};

inline constexpr std::size_t kBruteForceBudget = 10'000'000;

/// Exhaustive search of F over the lattice t in {0} x [-w, w]^{m-1}, then a
/// 10x finer lattice around the best point. Ties keep the lexicographically
/// smallest t.
inline BruteForceResult brute_force_maximize(const DiscreteMeasure& mu, const QuadratureMeasure& lam,
                                             double box_halfwidth, std::size_t points_per_dim) {
  const std::size_t m = mu.size();
  if (m > 6) throw Error("brute_force_maximize: at most 6 atoms");
  if (points_per_dim < 2) throw Error("brute_force_maximize: need at least 2 lattice points per dimension");
  if (!(box_halfwidth > 0.0)) throw Error("brute_force_maximize: box half-width must be positive");
  const std::size_t dims = m - 1;
  double budget = std::pow(static_cast<double>(points_per_dim), static_cast<double>(dims));
  if (budget > static_cast<double>(kBruteForceBudget))
    throw Error("brute_force_maximize: lattice exceeds the budget of 1e7 points");

  const SurrogateTable table(mu.atoms(), lam);
  const auto& w = mu.weights();
  BruteForceResult res;
  auto F = [&](const std::vector<double>& t) {
    ++res.evaluations;
    double v = table.lambda_part(t);
    for (std::size_t i = 0; i < m; ++i) v -= w[i] * t[i];
    return v;
  };

  // Scans center + h * (idx - (pts-1)/2) over all multi-indices.
  auto scan = [&](const std::vector<double>& center, double h, std::size_t pts) {
    std::vector<std::size_t> idx(dims, 0);
    std::vector<double> t(m, 0.0), best_t;
    double best = -std::numeric_limits<double>::infinity();
    const double mid = 0.5 * static_cast<double>(pts - 1);
    for (;;) {
      for (std::size_t d = 0; d < dims; ++d) t[d + 1] = center[d + 1] + h * (static_cast<double>(idx[d]) - mid);
      const double v = F(t);
      if (v > best) {
        best = v;
        best_t = t;
      }
      std::size_t d = dims;
      while (d > 0 && ++idx[d - 1] == pts) idx[--d] = 0;
      if (d == 0) break;
    }
    return std::make_pair(best_t, best);
  };

  const double h = 2.0 * box_halfwidth / static_cast<double>(points_per_dim - 1);
  auto [t1, f1] = scan(std::vector<double>(m, 0.0), h, points_per_dim);
  const double hf = h / 10.0;
  auto [t2, f2] = scan(t1, hf, 11);
  res.t = t2;
  res.F = f2;

  // F is concave, so F_max - F(t) <= |s| * dist within the fine cell; take
  // the largest supergradient seen at the point and its axis neighbours.
  auto sup_norm = [&](const std::vector<double>& t) {
    const auto e = table.evaluate(t);
    double s2 = 0.0;
    for (std::size_t i = 1; i < m; ++i) s2 += (e.cell_masses[i] - w[i]) * (e.cell_masses[i] - w[i]);
    return std::sqrt(s2);
  };
  double smax = sup_norm(t2);
  for (std::size_t d = 1; d < m; ++d)
    for (double sign : {-1.0, 1.0}) {
      auto tn = t2;
      tn[d] += sign * hf;
      smax = std::max(smax, sup_norm(tn));
    }
  res.resolution_bound = smax * hf * std::sqrt(static_cast<double>(dims)) / 2.0;
  return res;
}

}  // namespace gip
