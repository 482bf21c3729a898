#pragma once

// The two measures of a problem instance: a discrete target measure with
// atoms on the sphere, and an absolutely continuous measure represented by
// density samples on a fixed quadrature grid. Every lambda-mass anywhere in
// the library is a grid sum over QuadratureMeasure::node_mass().

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "gip/error.hpp"
#include "gip/parallel.hpp"
#include "gip/sphere.hpp"

namespace gip {

/// mu = sum_i weights[i] * delta_{atoms[i]}, not concentrated on a closed
/// hemisphere.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  DiscreteMeasure(DirectionSet atoms, std::vector<double> weights)
      : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.size() != weights_.size()) throw Error("DiscreteMeasure: atom/weight count mismatch");
    for (std::size_t i = 0; i < weights_.size(); ++i)
      if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
        throw Error("DiscreteMeasure: weight " + std::to_string(i) + " is not positive");
    if (atoms_.size() < atoms_.dim() + 1)
      throw Error("DiscreteMeasure: need at least n+1 atoms");
    if (hemisphere_witness(atoms_)) throw Error("DiscreteMeasure: atoms are contained in a closed hemisphere");
  }

  const DirectionSet& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  std::size_t dim() const { return atoms_.dim(); }

 private:
  DirectionSet atoms_;
  std::vector<double> weights_;
};

struct Cap {
  UnitVector center;
  double radius = 0.0;  // angular radius
  double value = 0.0;   // density added inside the cap
};

/// Pointwise description of a density, kept alongside its grid samples so
/// that oracles can integrate it at higher resolution.
class DensityModel {
 public:
  enum class Kind { uniform, table, caps, function };

  static DensityModel uniform(double value = 1.0) {
    DensityModel d;
    d.kind_ = Kind::uniform;
    d.base_ = value;
    return d;
  }
  static DensityModel table() {
    DensityModel d;
    d.kind_ = Kind::table;
    return d;
  }
  /// base + sum of cap values over caps containing u (open caps).
  static DensityModel caps(double base, std::vector<Cap> caps) {
    DensityModel d;
    d.kind_ = Kind::caps;
    d.base_ = base;
    d.caps_ = std::move(caps);
    return d;
  }
  /// Arbitrary density; `discontinuities` counts jump points (S^1) or jump
  /// curves (S^2) and feeds the quadrature tolerance.
  static DensityModel function(std::function<double(std::span<const double>)> f,
                               std::size_t discontinuities = 0) {
    DensityModel d;
    d.kind_ = Kind::function;
    d.fn_ = std::move(f);
    d.discontinuities_ = discontinuities;
    return d;
  }

  Kind kind() const { return kind_; }
  bool analytic() const { return kind_ != Kind::table; }
  const std::vector<Cap>& cap_list() const { return caps_; }
  double base() const { return base_; }
  double scale() const { return scale_; }

  DensityModel scaled(double factor) const {
    DensityModel d = *this;
    d.scale_ *= factor;
    return d;
  }

  double operator()(std::span<const double> u) const {
    switch (kind_) {
      case Kind::uniform: return scale_ * base_;
      case Kind::caps: {
        double v = base_;
        for (const auto& c : caps_)
          if (gip::dot(u, c.center) > std::cos(c.radius)) v += c.value;
        return scale_ * v;
      }
      case Kind::function: return scale_ * fn_(u);
      case Kind::table: break;
    }
    throw Error("DensityModel: table densities have no pointwise form");
  }

  std::size_t discontinuity_count(std::size_t dim) const {
    if (kind_ == Kind::caps) return dim == 2 ? 2 * caps_.size() : caps_.size();
    return discontinuities_;
  }

  /// Jump angles on S^1 (cap edges), in [0, 2pi).
  std::vector<double> angular_breakpoints() const {
    std::vector<double> out;
    if (kind_ != Kind::caps) return out;
    for (const auto& c : caps_) {
      if (c.center.dim() != 2) continue;
      const double th = std::atan2(c.center[1], c.center[0]);
      for (double e : {th - c.radius, th + c.radius}) {
        double a = std::fmod(e, 2.0 * std::numbers::pi);
        if (a < 0) a += 2.0 * std::numbers::pi;
        out.push_back(a);
      }
    }
    return out;
  }

 private:
  Kind kind_ = Kind::uniform;
  double base_ = 1.0;
  double scale_ = 1.0;
  std::vector<Cap> caps_;
  std::function<double(std::span<const double>)> fn_;
  std::size_t discontinuities_ = 0;
};

/// Absolutely continuous measure: density samples at the nodes of a shared,
/// immutable quadrature grid.
class QuadratureMeasure {
 public:
  QuadratureMeasure() = default;

  QuadratureMeasure(std::shared_ptr<const QuadratureGrid> grid, std::vector<double> density,
                    DensityModel model = DensityModel::table())
      : grid_(std::move(grid)), density_(std::move(density)), model_(std::move(model)) {
    if (!grid_) throw Error("QuadratureMeasure: missing grid");
    if (density_.size() != grid_->size()) throw Error("QuadratureMeasure: density/grid size mismatch");
    node_mass_.resize(density_.size());
    for (std::size_t k = 0; k < density_.size(); ++k) {
      if (!(density_[k] >= 0.0) || !std::isfinite(density_[k]))
        throw Error("QuadratureMeasure: density at node " + std::to_string(k) + " is negative or not finite");
      node_mass_[k] = grid_->weights()[k] * density_[k];
      max_density_ = std::max(max_density_, density_[k]);
    }
    total_ = parallel::ordered_sum(node_mass_.size(), [&](std::size_t k) { return node_mass_[k]; });
    if (!(total_ > 0.0) || !std::isfinite(total_)) throw Error("QuadratureMeasure: total mass must be positive");
  }

  /// Samples an analytic density model at the grid nodes.
  static QuadratureMeasure sample(std::shared_ptr<const QuadratureGrid> grid, const DensityModel& model) {
    std::vector<double> dens(grid->size());
    for (std::size_t k = 0; k < dens.size(); ++k) dens[k] = model(grid->node(k));
    return QuadratureMeasure(std::move(grid), std::move(dens), model);
  }

  const QuadratureGrid& grid() const { return *grid_; }
  const std::shared_ptr<const QuadratureGrid>& grid_ptr() const { return grid_; }
  const std::vector<double>& density() const { return density_; }
  /// weight * density per node.
  const std::vector<double>& node_mass() const { return node_mass_; }
  const DensityModel& model() const { return model_; }
  double total() const { return total_; }
  double max_density() const { return max_density_; }
  std::size_t dim() const { return grid_->dim(); }
  std::size_t size() const { return density_.size(); }

  /// Pointwise density: the analytic model when there is one, otherwise the
  /// value of the nearest node (S^1 only).
  std::function<double(std::span<const double>)> density_function() const {
    if (model_.analytic()) {
      DensityModel m = model_;
      return [m](std::span<const double> u) { return m(u); };
    }
    if (dim() != 2) throw Error("density_function: table densities are only interpolated on S^1");
    std::vector<std::pair<double, double>> pts(size());
    for (std::size_t k = 0; k < size(); ++k)
      pts[k] = {std::atan2(grid_->node(k)[1], grid_->node(k)[0]), density_[k]};
    std::sort(pts.begin(), pts.end());
    return [pts = std::move(pts)](std::span<const double> u) {
      const double th = std::atan2(u[1], u[0]);
      auto it = std::lower_bound(pts.begin(), pts.end(), std::make_pair(th, -1.0));
      auto circ = [](double a, double b) {
        const double d = std::abs(a - b);
        return std::min(d, 2.0 * std::numbers::pi - d);
      };
      const auto& hi = it == pts.end() ? pts.front() : *it;
      const auto& lo = it == pts.begin() ? pts.back() : *(it - 1);
      return circ(th, lo.first) <= circ(th, hi.first) ? lo.second : hi.second;
    };
  }

 private:
  std::shared_ptr<const QuadratureGrid> grid_;
  std::vector<double> density_;
  std::vector<double> node_mass_;
  DensityModel model_;
  double total_ = 0.0;
  double max_density_ = 0.0;
};

inline double total_mass(const DiscreteMeasure& mu) {
  double s = 0.0;
  for (double w : mu.weights()) s += w;
  return s;
}

inline double total_mass(const QuadratureMeasure& lam) { return lam.total(); }

/// Rescales the density so that the total mass equals target_mass.
inline QuadratureMeasure normalize_to(const QuadratureMeasure& lam, double target_mass) {
  if (!(target_mass > 0.0)) throw Error("normalize_to: target mass must be positive");
  const double factor = target_mass / lam.total();
  std::vector<double> dens = lam.density();
  for (double& d : dens) d *= factor;
  return QuadratureMeasure(lam.grid_ptr(), std::move(dens), lam.model().scaled(factor));
}

/// lambda(omega_angle): grid mass of nodes u with max_{v in omega} u.v > cos(angle).
inline double parallel_set_mass(const QuadratureMeasure& lam, const DirectionSet& omega, double angle) {
  if (!(angle > 0.0 && angle < std::numbers::pi)) throw Error("parallel_set_mass: angle outside (0, pi)");
  if (!omega.empty() && omega.dim() != lam.dim()) throw Error("parallel_set_mass: dimension mismatch");
  const double c = std::cos(angle);
  const auto& grid = lam.grid();
  const auto& nm = lam.node_mass();
  return parallel::ordered_sum(lam.size(), [&](std::size_t k) {
    const auto u = grid.node(k);
    for (std::size_t i = 0; i < omega.size(); ++i)
      if (gip::dot(u, omega[i]) > c) return nm[k];
    return 0.0;
  });
}

/// Shared tolerance for comparing grid masses of sets bounded by at most
/// `atoms` cell or arc boundaries: the mass that can sit in one node layer
/// along those boundaries (plus density jumps).
inline double quadrature_tolerance(const QuadratureMeasure& lam, std::size_t atoms) {
  const auto& grid = lam.grid();
  const double jumps = static_cast<double>(lam.model().discontinuity_count(grid.dim()));
  const double m = static_cast<double>(atoms);
  if (grid.dim() == 2) return lam.max_density() * grid.spacing() * (2.0 * m + jumps);
  return lam.max_density() * grid.spacing() * 0.5 * std::numbers::pi * (m + jumps);
}

}  // namespace gip
