#pragma once

// Radial Gauss image partition of the lambda grid, the Gauss image measure
// lambda(P, .) (purely atomic on the directions v_i), the functional
//
//     Phi(P) = int log rho_P dmu + int log rho_{P*} dlambda,
//
// and its concave surrogate in t = log(alpha):
//
//     F(t) = -sum_i mu_i t_i + sum_k w_k rho_k min_{i: u_k.v_i > 0} (t_i - log(u_k.v_i)).
//
// F equals Phi at canonical points and its supergradient is g - mu, where g
// are the Gauss image cell masses.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "gip/dual_polytope.hpp"
#include "gip/error.hpp"
#include "gip/measures.hpp"
#include "gip/parallel.hpp"

namespace gip {

struct GaussPartition {
  std::vector<std::uint32_t> assignment;  // atom index per grid node
  std::vector<double> cell_masses;        // g_i = lambda(P, {v_i})
};

struct FunctionalValue {
  double phi = 0.0;
  double mu_part = 0.0;
  double lambda_part = 0.0;
};

namespace detail {

inline void check_compatible(const DualPolytope& p, const QuadratureMeasure& lam) {
  if (p.dim() != lam.dim()) throw Error("polytope and lambda grid have different dimensions");
}

inline void check_compatible(const DualPolytope& p, const DiscreteMeasure& mu) {
  if (mu.size() != p.size() || mu.dim() != p.dim()) throw Error("polytope directions do not match mu atoms");
}

}  // namespace detail

/// Assigns every grid node to the rho_polar argmin and sums node masses per
/// atom.
inline GaussPartition compute_partition(const DualPolytope& p, const QuadratureMeasure& lam) {
  detail::check_compatible(p, lam);
  const auto& grid = lam.grid();
  const auto& nm = lam.node_mass();
  GaussPartition out;
  out.assignment.resize(lam.size());
  out.cell_masses = parallel::ordered_bucket_sum(lam.size(), p.size(), [&](std::size_t k, double* acc) {
    const auto r = rho_polar(p, grid.node(k));
    out.assignment[k] = static_cast<std::uint32_t>(r.argmin);
    acc[r.argmin] += nm[k];
  });
  return out;
}

/// Phi at a canonical polytope; the mu part uses rho_P(v_i) = 1/alpha_i.
inline FunctionalValue phi(const DualPolytope& p, const DiscreteMeasure& mu, const QuadratureMeasure& lam) {
  if (!p.canonical()) throw Error("phi: polytope is not canonical");
  detail::check_compatible(p, mu);
  detail::check_compatible(p, lam);
  FunctionalValue v;
  for (std::size_t i = 0; i < p.size(); ++i) v.mu_part -= mu.weights()[i] * std::log(p.alphas()[i]);
  const auto& grid = lam.grid();
  const auto& nm = lam.node_mass();
  v.lambda_part = parallel::ordered_sum(lam.size(), [&](std::size_t k) {
    return nm[k] == 0.0 ? 0.0 : nm[k] * std::log(rho_polar(p, grid.node(k)).value);
  });
  v.phi = v.mu_part + v.lambda_part;
  return v;
}

/// Precomputed -log(u_k.v_i) table (infinity where u_k.v_i <= 0) for fast
/// repeated evaluation of F and its supergradient at fixed directions.
class SurrogateTable {
 public:
  SurrogateTable(const DirectionSet& dirs, const QuadratureMeasure& lam)
      : m_(dirs.size()), nodes_(lam.size()), node_mass_(lam.node_mass()) {
    if (dirs.dim() != lam.dim()) throw Error("SurrogateTable: dimension mismatch");
    cost_.resize(m_ * nodes_);
    const auto& grid = lam.grid();
    for (std::size_t k = 0; k < nodes_; ++k) {
      const auto u = grid.node(k);
      bool any = false;
      for (std::size_t i = 0; i < m_; ++i) {
        const double d = gip::dot(u, dirs[i]);
        cost_[k * m_ + i] = d > 0.0 ? -std::log(d) : std::numeric_limits<double>::infinity();
        any = any || d > 0.0;
      }
      if (!any) throw Error("SurrogateTable: a grid node sees no direction (directions in a hemisphere?)");
    }
  }

  std::size_t atoms() const { return m_; }

  struct Evaluation {
    double lambda_part = 0.0;
    std::vector<double> cell_masses;
  };

  /// lambda part of F and the cell masses g at t.
  Evaluation evaluate(std::span<const double> t) const {
    if (t.size() != m_) throw Error("SurrogateTable: wrong number of coordinates");
    const std::size_t width = m_ + 1;
    auto sums = parallel::ordered_bucket_sum(nodes_, width, [&](std::size_t k, double* acc) {
      const double* c = cost_.data() + k * m_;
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double v = t[i] + c[i];
        if (v < best) {
          best = v;
          arg = i;
        }
      }
      const double w = node_mass_[k];
      if (w != 0.0) {
        acc[arg] += w;
        acc[m_] += w * best;
      }
    });
    Evaluation e;
    e.lambda_part = sums[m_];
    sums.pop_back();
    e.cell_masses = std::move(sums);
    return e;
  }

  /// lambda part only (no per-atom buckets).
  double lambda_part(std::span<const double> t) const {
    return parallel::ordered_sum(nodes_, [&](std::size_t k) {
      const double w = node_mass_[k];
      if (w == 0.0) return 0.0;
      const double* c = cost_.data() + k * m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) best = std::min(best, t[i] + c[i]);
      return w * best;
    });
  }

 private:
  std::size_t m_;
  std::size_t nodes_;
  std::vector<double> node_mass_;
  std::vector<double> cost_;
};

/// F(t); concave in t, equal to Phi at canonical exp(t) and below it
/// elsewhere.
inline double surrogate_objective(std::span<const double> t, const DiscreteMeasure& mu,
                                  const QuadratureMeasure& lam) {
  if (t.size() != mu.size()) throw Error("surrogate_objective: wrong number of coordinates");
  if (mu.dim() != lam.dim()) throw Error("surrogate_objective: dimension mismatch");
  double linear = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) linear -= mu.weights()[i] * t[i];
  const auto& dirs = mu.atoms();
  const auto& grid = lam.grid();
  const auto& nm = lam.node_mass();
  const double lam_part = parallel::ordered_sum(lam.size(), [&](std::size_t k) {
    if (nm[k] == 0.0) return 0.0;
    const auto u = grid.node(k);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double d = gip::dot(u, dirs[i]);
      if (d > 0.0) best = std::min(best, t[i] + -std::log(d));
    }
    return nm[k] * best;
  });
  return linear + lam_part;
}

/// Supergradient of F at t = log(alpha): g_i - mu_i.
inline std::vector<double> subgradient(const DualPolytope& p, const DiscreteMeasure& mu,
                                       const QuadratureMeasure& lam) {
  if (!p.canonical()) throw Error("subgradient: polytope is not canonical");
  detail::check_compatible(p, mu);
  auto g = compute_partition(p, lam).cell_masses;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] -= mu.weights()[i];
  return g;
}

struct PushforwardIntegral {
  double by_atoms = 0.0;  // sum_i f(v_i) g_i
  double by_nodes = 0.0;  // sum_k w_k rho_k f(v_{assignment[k]})
};

/// int f d lambda(P, .) computed both as an atomic sum and as a grid sum of
/// f composed with the Gauss image map.
inline PushforwardIntegral pushforward_integral(const DualPolytope& p, const QuadratureMeasure& lam,
                                                const std::function<double(std::size_t)>& f) {
  if (!p.canonical()) throw Error("pushforward_integral: polytope is not canonical");
  const auto part = compute_partition(p, lam);
  std::vector<double> fv(p.size());
  for (std::size_t i = 0; i < fv.size(); ++i) fv[i] = f(i);
  PushforwardIntegral out;
  for (std::size_t i = 0; i < fv.size(); ++i) out.by_atoms += fv[i] * part.cell_masses[i];
  const auto& nm = lam.node_mass();
  out.by_nodes = parallel::ordered_sum(lam.size(), [&](std::size_t k) { return nm[k] * fv[part.assignment[k]]; });
  return out;
}

}  // namespace gip
