#pragma once

// Unit-sphere geometry shared by every other module: directions, direction
// sets, quadrature grids, hemisphere containment, outer parallel sets and
// polar sets.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gip/error.hpp"
#include "gip/linprog.hpp"

namespace gip {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

/// Surface area of S^{n-1}.
inline double sphere_area(std::size_t n) {
  if (n == 2) return 2.0 * std::numbers::pi;
  if (n == 3) return 4.0 * std::numbers::pi;
  const double h = 0.5 * static_cast<double>(n);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

class UnitVector {
 public:
  static constexpr double kNormTolerance = 1e-12;

  UnitVector() = default;

  /// Takes coordinates that are already unit length (within 1e-12).
  explicit UnitVector(std::vector<double> coords) : c_(std::move(coords)) {
    if (c_.size() < 2) throw Error("UnitVector: dimension must be at least 2");
    const double norm = std::sqrt(gip::dot(c_, c_));
    if (std::abs(norm - 1.0) > kNormTolerance)
      throw Error("UnitVector: coordinates are not unit length (norm " + std::to_string(norm) + ")");
  }

  static UnitVector normalized(std::vector<double> coords) {
    const double norm = std::sqrt(gip::dot(coords, coords));
    if (!(norm > 0.0) || !std::isfinite(norm)) throw Error("UnitVector: cannot normalize zero vector");
    for (double& x : coords) x /= norm;
    return UnitVector(std::move(coords));
  }

  /// Point on S^1 at the given polar angle.
  static UnitVector from_angle(double theta) {
    return UnitVector::normalized({std::cos(theta), std::sin(theta)});
  }

  std::size_t dim() const { return c_.size(); }
  std::span<const double> coords() const { return c_; }
  double operator[](std::size_t k) const { return c_[k]; }
  operator std::span<const double>() const { return c_; }  // NOLINT(google-explicit-constructor)

 private:
  std::vector<double> c_;
};

/// Ordered set of pairwise distinct unit vectors of a common dimension.
class DirectionSet {
 public:
  static constexpr double kDistinctTolerance = 1e-9;

  DirectionSet() = default;

  explicit DirectionSet(const std::vector<UnitVector>& vs) {
    if (vs.empty()) return;
    dim_ = vs.front().dim();
    flat_.reserve(vs.size() * dim_);
    for (const auto& v : vs) {
      if (v.dim() != dim_) throw Error("DirectionSet: dimension mismatch among vectors");
      flat_.insert(flat_.end(), v.coords().begin(), v.coords().end());
    }
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) {
          const double d = (*this)[i][k] - (*this)[j][k];
          d2 += d * d;
        }
        if (std::sqrt(d2) < kDistinctTolerance)
          throw Error("DirectionSet: duplicate directions at indices " + std::to_string(i) + " and " +
                      std::to_string(j));
      }
  }

  std::size_t size() const { return dim_ == 0 ? 0 : flat_.size() / dim_; }
  bool empty() const { return size() == 0; }
  std::size_t dim() const { return dim_; }
  std::span<const double> operator[](std::size_t i) const { return {flat_.data() + i * dim_, dim_}; }
  UnitVector vector(std::size_t i) const {
    auto s = (*this)[i];
    return UnitVector::normalized({s.begin(), s.end()});
  }

  /// The directions with the given indices, in the given order.
  DirectionSet subset(std::span<const std::size_t> indices) const {
    DirectionSet out;
    out.dim_ = dim_;
    for (std::size_t i : indices) {
      auto s = (*this)[i];
      out.flat_.insert(out.flat_.end(), s.begin(), s.end());
    }
    return out;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> flat_;
};

enum class GridScheme { uniform_angles, fibonacci, latlong };

inline std::string to_string(GridScheme s) {
  switch (s) {
    case GridScheme::uniform_angles: return "uniform_angles";
    case GridScheme::fibonacci: return "fibonacci";
    case GridScheme::latlong: return "latlong";
  }
  return "?";
}

inline GridScheme grid_scheme_from_string(const std::string& s) {
  if (s == "uniform_angles") return GridScheme::uniform_angles;
  if (s == "fibonacci") return GridScheme::fibonacci;
  if (s == "latlong") return GridScheme::latlong;
  throw Error("unknown quadrature scheme '" + s + "'");
}

/// Nodes and surface weights discretizing spherical Lebesgue measure.
class QuadratureGrid {
 public:
  QuadratureGrid() = default;

  QuadratureGrid(std::size_t dim, std::vector<double> flat_nodes, std::vector<double> weights,
                 GridScheme scheme)
      : dim_(dim), nodes_(std::move(flat_nodes)), weights_(std::move(weights)), scheme_(scheme) {
    if (dim_ < 2 || nodes_.size() != dim_ * weights_.size())
      throw Error("QuadratureGrid: node/weight size mismatch");
    for (double w : weights_)
      if (!(w >= 0.0)) throw Error("QuadratureGrid: negative weight");
    spacing_ = compute_spacing();
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  std::span<const double> node(std::size_t k) const { return {nodes_.data() + k * dim_, dim_}; }
  const std::vector<double>& weights() const { return weights_; }
  GridScheme scheme() const { return scheme_; }
  double weight_sum() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
  }
  /// Characteristic node spacing: the largest angular gap on S^1, or the
  /// side of the largest weight patch on S^2.
  double spacing() const { return spacing_; }

 private:
  double compute_spacing() const {
    if (size() == 0) return 0.0;
    if (dim_ == 2) {
      std::vector<double> th(size());
      for (std::size_t k = 0; k < size(); ++k) th[k] = std::atan2(node(k)[1], node(k)[0]);
      std::sort(th.begin(), th.end());
      double gap = th.front() + 2.0 * std::numbers::pi - th.back();
      for (std::size_t k = 1; k < th.size(); ++k) gap = std::max(gap, th[k] - th[k - 1]);
      return gap;
    }
    return std::sqrt(*std::max_element(weights_.begin(), weights_.end()));
  }

  std::size_t dim_ = 0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  GridScheme scheme_ = GridScheme::uniform_angles;
  double spacing_ = 0.0;
};

/// Builds an equal- or exact-area quadrature grid on S^{n-1} for n = 2, 3.
inline QuadratureGrid build_grid(std::size_t n, std::size_t count, GridScheme scheme) {
  constexpr double pi = std::numbers::pi;
  if (count < 4) throw Error("build_grid: count must be at least 4");
  std::vector<double> nodes;
  std::vector<double> weights;
  if (n == 2) {
    nodes.reserve(2 * count);
    const double w = 2.0 * pi / static_cast<double>(count);
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (std::size_t k = 0; k < count; ++k) {
      double theta = 0.0;
      switch (scheme) {
        case GridScheme::uniform_angles: theta = w * static_cast<double>(k); break;
        case GridScheme::latlong: theta = w * (static_cast<double>(k) + 0.5); break;
        case GridScheme::fibonacci: {
          const double frac = std::fmod(golden * static_cast<double>(k), 1.0);
          theta = 2.0 * pi * frac;
          break;
        }
      }
      nodes.push_back(std::cos(theta));
      nodes.push_back(std::sin(theta));
    }
    weights.assign(count, w);
    return QuadratureGrid(2, std::move(nodes), std::move(weights), scheme);
  }
  if (n == 3 && scheme == GridScheme::fibonacci) {
    nodes.reserve(3 * count);
    const double golden_angle = pi * (3.0 - std::sqrt(5.0));
    for (std::size_t k = 0; k < count; ++k) {
      const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(count);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden_angle * static_cast<double>(k);
      nodes.push_back(r * std::cos(phi));
      nodes.push_back(r * std::sin(phi));
      nodes.push_back(z);
    }
    weights.assign(count, 4.0 * pi / static_cast<double>(count));
    return QuadratureGrid(3, std::move(nodes), std::move(weights), scheme);
  }
  if (n == 3 && scheme == GridScheme::latlong) {
    // Bands of equal polar width; each cell weight is its exact area.
    const auto bands = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(count) / 2.0))));
    const std::size_t per_band = std::max<std::size_t>(4, (count + bands - 1) / bands);
    const double dtheta = pi / static_cast<double>(bands);
    const double dphi = 2.0 * pi / static_cast<double>(per_band);
    for (std::size_t b = 0; b < bands; ++b) {
      const double t0 = dtheta * static_cast<double>(b);
      const double t1 = t0 + dtheta;
      const double tm = 0.5 * (t0 + t1);
      const double area = (std::cos(t0) - std::cos(t1)) * dphi;
      for (std::size_t j = 0; j < per_band; ++j) {
        const double phi = dphi * (static_cast<double>(j) + 0.5);
        nodes.push_back(std::sin(tm) * std::cos(phi));
        nodes.push_back(std::sin(tm) * std::sin(phi));
        nodes.push_back(std::cos(tm));
        weights.push_back(area);
      }
    }
    return QuadratureGrid(3, std::move(nodes), std::move(weights), scheme);
  }
  throw Error("build_grid: unsupported (dimension " + std::to_string(n) + ", scheme " + to_string(scheme) +
              ")");
}

namespace detail {

inline void check_dims(std::span<const double> u, const DirectionSet& omega) {
  if (!omega.empty() && u.size() != omega.dim()) throw Error("dimension mismatch between vector and set");
}

/// max target.u subject to v.u >= 0 for v in `members`, |u|_inf <= 1.
inline lp::Result cone_lp(const DirectionSet& dirs, std::span<const std::size_t> members,
                          std::span<const double> target) {
  const std::size_t n = dirs.dim();
  lp::Problem p;
  p.cols = n;
  p.objective.assign(target.begin(), target.end());
  std::vector<double> row(n);
  for (std::size_t i : members) {
    for (std::size_t k = 0; k < n; ++k) row[k] = -dirs[i][k];
    p.add_row(row, 0.0);
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::fill(row.begin(), row.end(), 0.0);
    row[k] = 1.0;
    p.add_row(row, 1.0);
    row[k] = -1.0;
    p.add_row(row, 1.0);
  }
  return lp::maximize(p);
}

}  // namespace detail

/// Witness u with u.v >= -1e-9 for every v in the selected directions, or
/// nothing when they are not contained in any closed hemisphere.
///
/// Solves max t s.t. v.u >= t, |u|_inf <= 1. A positive optimum gives an open
/// hemisphere. At optimum zero the origin is always feasible, so a nonzero
/// point of the cone {u : v.u >= 0} is searched along each +-e_k.
inline std::optional<UnitVector> hemisphere_witness(const DirectionSet& dirs,
                                                    std::span<const std::size_t> members) {
  if (members.empty()) throw Error("hemisphere_witness: empty direction set");
  const std::size_t n = dirs.dim();
  lp::Problem p;
  p.cols = n + 1;  // (u, t)
  p.objective.assign(n + 1, 0.0);
  p.objective[n] = 1.0;
  std::vector<double> row(n + 1);
  for (std::size_t i : members) {
    for (std::size_t k = 0; k < n; ++k) row[k] = -dirs[i][k];
    row[n] = 1.0;
    p.add_row(row, 0.0);
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::fill(row.begin(), row.end(), 0.0);
    row[k] = 1.0;
    p.add_row(row, 1.0);
    row[k] = -1.0;
    p.add_row(row, 1.0);
  }
  const auto res = lp::maximize(p);
  if (res.status != lp::Status::optimal) throw Error("hemisphere_witness: LP failed");

  auto accept = [&](std::vector<double> u) -> std::optional<UnitVector> {
    const double norm = std::sqrt(gip::dot(u, u));
    if (norm < 1e-9) return std::nullopt;
    for (double& x : u) x /= norm;
    for (std::size_t i : members)
      if (gip::dot(u, dirs[i]) < -1e-9) return std::nullopt;
    return UnitVector::normalized(std::move(u));
  };

  if (res.value > 1e-9) {
    std::vector<double> u(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(n));
    if (auto w = accept(std::move(u))) return w;
  }
  if (res.value < -1e-9) return std::nullopt;
  std::vector<double> target(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (double sign : {1.0, -1.0}) {
      std::fill(target.begin(), target.end(), 0.0);
      target[k] = sign;
      const auto r = detail::cone_lp(dirs, members, target);
      if (r.status == lp::Status::optimal && r.value > 1e-9)
        if (auto w = accept(r.x)) return w;
    }
  }
  return std::nullopt;
}

inline std::optional<UnitVector> hemisphere_witness(const DirectionSet& dirs) {
  std::vector<std::size_t> all(dirs.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return hemisphere_witness(dirs, all);
}

/// Membership in the open outer parallel set: max_v u.v > cos(angle).
inline bool in_outer_parallel_set(std::span<const double> u, const DirectionSet& omega, double angle) {
  if (!(angle > 0.0 && angle < std::numbers::pi)) throw Error("in_outer_parallel_set: angle outside (0, pi)");
  detail::check_dims(u, omega);
  const double c = std::cos(angle);
  for (std::size_t i = 0; i < omega.size(); ++i)
    if (gip::dot(u, omega[i]) > c) return true;
  return false;
}

/// Membership in the polar set: u.v <= 0 for every v in omega.
inline bool in_polar_set(std::span<const double> u, const DirectionSet& omega) {
  if (omega.empty()) throw Error("in_polar_set: empty set");
  detail::check_dims(u, omega);
  for (std::size_t i = 0; i < omega.size(); ++i)
    if (gip::dot(u, omega[i]) > 1e-12) return false;
  return true;
}

/// Whether `v` lies in the closed convex cone generated by the selected
/// directions (equivalently in their spherical convex hull). Farkas: v is
/// outside iff some u has u.w <= 0 on the generators and u.v > 0.
inline bool in_generated_cone(std::span<const double> v, const DirectionSet& dirs,
                              std::span<const std::size_t> generators) {
  const std::size_t n = dirs.dim();
  lp::Problem p;
  p.cols = n;
  p.objective.assign(v.begin(), v.end());
  std::vector<double> row(n);
  for (std::size_t i : generators) {
    for (std::size_t k = 0; k < n; ++k) row[k] = dirs[i][k];
    p.add_row(row, 0.0);
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::fill(row.begin(), row.end(), 0.0);
    row[k] = 1.0;
    p.add_row(row, 1.0);
    row[k] = -1.0;
    p.add_row(row, 1.0);
  }
  const auto r = lp::maximize(p);
  return r.status == lp::Status::optimal && r.value <= 1e-9;
}

}  // namespace gip
