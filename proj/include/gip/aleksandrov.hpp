#pragma once

// Checkers for the weak and classical Aleksandrov relations between a
// discrete measure mu and a grid-backed measure lambda.
//
// For discrete mu only atom subsets matter: mu(omega) = mu(omega ∩ atoms), and
// omega^I_{pi/2 - alpha} only grows with omega. So the weak relation at alpha
// is decided by the subsets I whose atoms lie in a closed hemisphere.
//
// Exhaustive mode enumerates all such I (m <= 20). The family is built from
// the maximal sets {i : u.v_i >= 0} over the finitely many extreme witness
// directions u, then closed downward. Grid masses of all parallel sets come
// from one histogram of per-node atom masks and a subset-sum transform.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gip/dual_polytope.hpp"
#include "gip/error.hpp"
#include "gip/gauss_image.hpp"
#include "gip/measures.hpp"
#include "gip/sphere.hpp"

namespace gip {

inline constexpr std::size_t kExhaustiveAtomLimit = 20;
inline constexpr std::size_t kHeuristicAtomLimit = 64;

enum class Verdict { holds, fails, indeterminate };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "?";
}

struct SubsetSlack {
  IndexSet subset;
  double slack = 0.0;  // lambda(omega^I_{pi/2 - alpha}) - mu(omega^I)
};

struct WeakAleksandrovReport {
  bool holds = false;
  Verdict verdict = Verdict::fails;
  double alpha = 0.0;                 // angle tested
  std::optional<double> uniform_alpha;  // set by find_uniform_alpha
  std::vector<SubsetSlack> per_subset;  // smallest slacks first
  bool per_subset_truncated = false;
  std::size_t subsets_checked = 0;
  double min_slack = 0.0;
  bool masses_balanced = false;
  double mass_gap = 0.0;  // mu(S) - lambda(S)
  double epsilon = 0.0;
  bool heuristic = false;
};

struct WeakCheckOptions {
  bool heuristic = false;  // forced on above kExhaustiveAtomLimit atoms
  std::uint64_t seed = 0;
  std::size_t samples = 1000;
  std::optional<double> epsilon;  // defaults to quadrature_tolerance
  std::size_t report_limit = 4096;
};

/// Bitmask enumeration of the atom subsets contained in a closed hemisphere
/// (entry [mask] is 1 iff the atoms in mask admit a hemisphere witness).
inline std::vector<std::uint8_t> contained_subsets(const DirectionSet& atoms) {
  const std::size_t m = atoms.size();
  const std::size_t n = atoms.dim();
  if (m > kExhaustiveAtomLimit) throw Error("contained_subsets: too many atoms for exhaustive enumeration");
  const std::size_t full = std::size_t{1} << m;
  std::vector<std::uint8_t> ok(full, 0);

  auto mark = [&](std::span<const double> u) {
    std::size_t mask = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (gip::dot(u, atoms[i]) >= -1e-9) mask |= std::size_t{1} << i;
    ok[mask] = 1;
  };

  if (n == 2) {
    for (std::size_t i = 0; i < m; ++i) {
      const double x = atoms[i][0], y = atoms[i][1];
      mark(std::vector<double>{-y, x});
      mark(std::vector<double>{y, -x});
    }
  } else if (n == 3) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        const auto a = atoms[i];
        const auto b = atoms[j];
        std::vector<double> c{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
        const double norm = std::sqrt(gip::dot(c, c));
        if (norm < 1e-12) continue;
        for (double& x : c) x /= norm;
        mark(c);
        for (double& x : c) x = -x;
        mark(c);
      }
    // Covers sets whose witness cone has no extreme ray among the pairs.
    for (std::size_t i = 0; i < m; ++i) mark(atoms[i]);
  } else {
    if (m > 12) throw Error("contained_subsets: dimension > 3 supports at most 12 atoms");
    for (std::size_t mask = 1; mask < full; ++mask) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < m; ++i)
        if (mask >> i & 1U) members.push_back(i);
      if (hemisphere_witness(atoms, members)) ok[mask] = 1;
    }
  }
  for (std::size_t b = 0; b < m; ++b) {
    const std::size_t bit = std::size_t{1} << b;
    for (std::size_t mask = 0; mask < full; ++mask)
      if ((mask & bit) && ok[mask]) ok[mask ^ bit] = 1;
  }
  ok[0] = 0;
  return ok;
}

inline std::vector<std::size_t> mask_members(std::uint64_t mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; mask != 0; ++i, mask >>= 1)
    if (mask & 1U) out.push_back(i);
  return out;
}

/// Reusable weak-relation evaluator for fixed (atoms, weights, lambda). The
/// node/atom inner products are computed once; each angle costs one masking
/// pass over the grid.
class WeakChecker {
 public:
  WeakChecker(const DirectionSet& atoms, std::vector<double> weights, const QuadratureMeasure& lam,
              WeakCheckOptions opts = {})
      : atoms_(atoms), weights_(std::move(weights)), lam_(&lam), opts_(opts) {
    m_ = atoms_.size();
    if (m_ == 0 || weights_.size() != m_) throw Error("check_weak: atom/weight count mismatch");
    if (atoms_.dim() != lam.dim()) throw Error("check_weak: dimension mismatch");
    if (m_ > kHeuristicAtomLimit) throw Error("check_weak: more than 64 atoms are not supported");
    if (m_ > kExhaustiveAtomLimit && !opts_.heuristic)
      throw Error("check_weak: " + std::to_string(m_) +
                  " atoms exceed the exhaustive limit of 20; enable heuristic mode");
    heuristic_ = opts_.heuristic;
    epsilon_ = opts_.epsilon.value_or(quadrature_tolerance(lam, m_));
    mu_total_ = 0.0;
    for (double w : weights_) mu_total_ += w;

    const auto& grid = lam.grid();
    dots_.resize(lam.size() * m_);
    for (std::size_t k = 0; k < lam.size(); ++k)
      for (std::size_t i = 0; i < m_; ++i) dots_[k * m_ + i] = gip::dot(grid.node(k), atoms_[i]);

    if (heuristic_) {
      build_heuristic_family();
    } else {
      const auto ok = contained_subsets(atoms_);
      for (std::size_t mask = 1; mask < ok.size(); ++mask)
        if (ok[mask]) family_.push_back(mask);
    }
  }

  double epsilon() const { return epsilon_; }
  const std::vector<std::uint64_t>& family() const { return family_; }

  /// Grid masses lambda({u : mask(u) ∩ I = ∅}) for every I in the family,
  /// where mask(u) = {i : u.v_i > threshold}.
  std::vector<double> missed_mass(double threshold) const {
    const auto& nm = lam_->node_mass();
    std::vector<double> out(family_.size(), 0.0);
    if (!heuristic_) {
      const std::size_t full = std::size_t{1} << m_;
      std::vector<double> hist(full, 0.0);
      for (std::size_t k = 0; k < nm.size(); ++k) hist[node_mask(k, threshold)] += nm[k];
      // Subset sums: hist[J] <- sum over masks contained in J.
      for (std::size_t b = 0; b < m_; ++b) {
        const std::size_t bit = std::size_t{1} << b;
        for (std::size_t mask = 0; mask < full; ++mask)
          if (mask & bit) hist[mask] += hist[mask ^ bit];
      }
      const std::size_t all = full - 1;
      for (std::size_t f = 0; f < family_.size(); ++f) out[f] = hist[all & ~family_[f]];
      return out;
    }
    std::map<std::uint64_t, double> hist;
    for (std::size_t k = 0; k < nm.size(); ++k) hist[node_mask(k, threshold)] += nm[k];
    for (std::size_t f = 0; f < family_.size(); ++f)
      for (const auto& [mask, mass] : hist)
        if ((mask & family_[f]) == 0) out[f] += mass;
    return out;
  }

  WeakAleksandrovReport report(double alpha) const {
    if (!(alpha > 0.0 && alpha < 0.5 * std::numbers::pi)) throw Error("check_weak: alpha outside (0, pi/2)");
    WeakAleksandrovReport r;
    r.alpha = alpha;
    r.epsilon = epsilon_;
    r.heuristic = heuristic_;
    r.mass_gap = mu_total_ - lam_->total();
    r.masses_balanced = std::abs(r.mass_gap) <= epsilon_;
    // omega_{pi/2 - alpha} = {u : u.v > cos(pi/2 - alpha) = sin(alpha)}
    const auto missed = missed_mass(std::sin(alpha));
    std::vector<SubsetSlack> all;
    all.reserve(family_.size());
    r.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < family_.size(); ++f) {
      double mu_i = 0.0;
      for (std::size_t i : mask_members(family_[f])) mu_i += weights_[i];
      const double slack = (lam_->total() - missed[f]) - mu_i;
      r.min_slack = std::min(r.min_slack, slack);
      all.push_back({IndexSet(mask_members(family_[f]), m_), slack});
    }
    r.subsets_checked = all.size();
    std::stable_sort(all.begin(), all.end(),
                     [](const SubsetSlack& a, const SubsetSlack& b) { return a.slack < b.slack; });
    if (all.size() > opts_.report_limit) {
      all.resize(64);
      r.per_subset_truncated = true;
    }
    r.per_subset = std::move(all);
    if (!r.masses_balanced || r.min_slack < -2.0 * epsilon_) {
      r.verdict = Verdict::fails;
    } else if (r.min_slack >= -epsilon_) {
      r.verdict = Verdict::holds;
    } else {
      r.verdict = Verdict::indeterminate;
    }
    r.holds = r.verdict == Verdict::holds;
    return r;
  }

 private:
  std::uint64_t node_mask(std::size_t k, double threshold) const {
    std::uint64_t mask = 0;
    const double* d = dots_.data() + k * m_;
    for (std::size_t i = 0; i < m_; ++i)
      if (d[i] > threshold) mask |= std::uint64_t{1} << i;
    return mask;
  }

  void build_heuristic_family() {
    std::mt19937_64 rng(opts_.seed);
    std::normal_distribution<double> normal;
    std::vector<std::uint64_t> fam;
    for (std::size_t i = 0; i < m_; ++i) fam.push_back(std::uint64_t{1} << i);
    std::vector<double> u(atoms_.dim());
    for (std::size_t s = 0; s < opts_.samples; ++s) {
      for (double& x : u) x = normal(rng);
      std::uint64_t mask = 0;
      for (std::size_t i = 0; i < m_; ++i)
        if (gip::dot(u, atoms_[i]) >= 0.0) mask |= std::uint64_t{1} << i;
      if (mask != 0) fam.push_back(mask);
    }
    std::sort(fam.begin(), fam.end());
    fam.erase(std::unique(fam.begin(), fam.end()), fam.end());
    family_ = std::move(fam);
  }

  DirectionSet atoms_;
  std::vector<double> weights_;
  const QuadratureMeasure* lam_;
  WeakCheckOptions opts_;
  std::size_t m_ = 0;
  bool heuristic_ = false;
  double epsilon_ = 0.0;
  double mu_total_ = 0.0;
  std::vector<double> dots_;
  std::vector<std::uint64_t> family_;
};

inline WeakAleksandrovReport check_weak(const DiscreteMeasure& mu, const QuadratureMeasure& lam, double alpha,
                                        WeakCheckOptions opts = {}) {
  return WeakChecker(mu.atoms(), mu.weights(), lam, opts).report(alpha);
}

inline constexpr double kUniformAlphaResolution = 1e-4;

/// Largest alpha in (0, pi/2) passing the weak check, by bisection.
/// Relies on monotonicity: parallel sets grow as alpha decreases.
inline WeakAleksandrovReport find_uniform_alpha_report(const WeakChecker& checker) {
  const double lo_limit = kUniformAlphaResolution;
  const double hi_limit = 0.5 * std::numbers::pi - kUniformAlphaResolution;
  auto at_lo = checker.report(lo_limit);
  if (!at_lo.holds) return at_lo;
  auto at_hi = checker.report(hi_limit);
  if (at_hi.holds) {
    at_hi.uniform_alpha = hi_limit;
    return at_hi;
  }
  double lo = lo_limit, hi = hi_limit;
  WeakAleksandrovReport best = std::move(at_lo);
  while (hi - lo > kUniformAlphaResolution) {
    const double mid = 0.5 * (lo + hi);
    auto r = checker.report(mid);
    if (r.holds) {
      lo = mid;
      best = std::move(r);
    } else {
      hi = mid;
    }
  }
  best.uniform_alpha = lo;
  return best;
}

inline std::optional<double> find_uniform_alpha(const DiscreteMeasure& mu, const QuadratureMeasure& lam,
                                                WeakCheckOptions opts = {}) {
  return find_uniform_alpha_report(WeakChecker(mu.atoms(), mu.weights(), lam, opts)).uniform_alpha;
}

struct ClassicalReport {
  Verdict verdict = Verdict::fails;
  bool masses_balanced = false;
  double worst_margin = 0.0;  // min over omega of mu(S) - mu(omega) - lambda(omega*)
  std::optional<IndexSet> worst_set;
  std::size_t sets_checked = 0;
  double epsilon = 0.0;
  bool holds() const { return verdict == Verdict::holds; }
};

inline constexpr std::size_t kClassicalExhaustiveLimit = 14;

/// Classical relation mu(omega) + lambda(omega*) < mu(S) on test sets omega,
/// each given by finite generators and standing for their spherical convex
/// hull. mu(omega) counts every atom in that hull. Without test sets the
/// hemisphere-contained atom subsets are used.
inline ClassicalReport check_classical(const DiscreteMeasure& mu, const QuadratureMeasure& lam,
                                       const std::vector<DirectionSet>& test_sets = {},
                                       std::optional<double> epsilon = std::nullopt) {
  const auto& atoms = mu.atoms();
  const std::size_t m = mu.size();
  ClassicalReport r;
  r.epsilon = epsilon.value_or(quadrature_tolerance(lam, m));
  const double mu_total = total_mass(mu);
  r.masses_balanced = std::abs(mu_total - lam.total()) <= r.epsilon;
  r.worst_margin = std::numeric_limits<double>::infinity();

  const auto& grid = lam.grid();
  const auto& nm = lam.node_mass();
  auto polar_mass = [&](const DirectionSet& gens) {
    return parallel::ordered_sum(lam.size(), [&](std::size_t k) {
      return in_polar_set(grid.node(k), gens) ? nm[k] : 0.0;
    });
  };
  auto hull_mass = [&](const DirectionSet& gens) {
    std::vector<std::size_t> all(gens.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      if (in_generated_cone(atoms[j], gens, all)) s += mu.weights()[j];
    return s;
  };

  if (!test_sets.empty()) {
    for (const auto& set : test_sets) {
      if (set.empty() || set.dim() != mu.dim()) throw Error("check_classical: malformed test set");
      if (!hemisphere_witness(set)) throw Error("check_classical: test set is not contained in a closed hemisphere");
      const double margin = mu_total - hull_mass(set) - polar_mass(set);
      if (margin < r.worst_margin) r.worst_margin = margin;
      ++r.sets_checked;
    }
  } else {
    std::vector<std::uint64_t> family;
    if (m <= kClassicalExhaustiveLimit) {
      const auto ok = contained_subsets(atoms);
      for (std::size_t mask = 1; mask < ok.size(); ++mask)
        if (ok[mask]) family.push_back(mask);
    } else {
      WeakCheckOptions o;
      o.heuristic = true;
      family = WeakChecker(atoms, mu.weights(), lam, o).family();
    }
    // lambda(omega*) for all sets at once: nodes whose positive-side atom
    // mask misses I.
    std::map<std::uint64_t, double> hist;
    for (std::size_t k = 0; k < lam.size(); ++k) {
      std::uint64_t mask = 0;
      for (std::size_t i = 0; i < m; ++i)
        if (gip::dot(grid.node(k), atoms[i]) > 1e-12) mask |= std::uint64_t{1} << i;
      hist[mask] += nm[k];
    }
    for (std::uint64_t fam : family) {
      const auto members = mask_members(fam);
      double mu_hull = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        if ((fam >> j & 1U) || in_generated_cone(atoms[j], atoms, members)) mu_hull += mu.weights()[j];
      }
      double lam_polar = 0.0;
      for (const auto& [mask, mass] : hist)
        if ((mask & fam) == 0) lam_polar += mass;
      const double margin = mu_total - mu_hull - lam_polar;
      if (margin < r.worst_margin) {
        r.worst_margin = margin;
        r.worst_set = IndexSet(members, m);
      }
      ++r.sets_checked;
    }
  }
  if (!r.masses_balanced || r.worst_margin < -r.epsilon) {
    r.verdict = Verdict::fails;
  } else if (r.worst_margin > r.epsilon) {
    r.verdict = Verdict::holds;
  } else {
    r.verdict = Verdict::indeterminate;
  }
  return r;
}

struct NecessityReport {
  bool passed = false;
  double radius_ratio = 0.0;    // r_P / R_P
  double alpha_bound = 0.0;     // pi/2 - arccos(r_P / R_P)
  WeakAleksandrovReport at_bound;  // tested at alpha_bound - slack
  std::optional<double> uniform_alpha;
};

/// Checks that lambda(P, .) is weak Aleksandrov related to lambda, at the
/// angle pi/2 - arccos(r_P/R_P) guaranteed for any body with the origin
/// interior, less an optional slack.
inline NecessityReport necessity_check(const DualPolytope& p, const QuadratureMeasure& lam, double slack = 0.0,
                                       WeakCheckOptions opts = {}) {
  if (!p.canonical()) throw Error("necessity_check: polytope is not canonical");
  const auto g = compute_partition(p, lam).cell_masses;
  if (p.size() > kExhaustiveAtomLimit) opts.heuristic = true;
  WeakChecker checker(p.directions(), g, lam, opts);
  NecessityReport out;
  const auto rad = radii(p, &lam.grid());
  out.radius_ratio = rad.r_P / rad.R_P;
  out.alpha_bound = 0.5 * std::numbers::pi - std::acos(std::min(1.0, out.radius_ratio));
  const double probe = std::clamp(out.alpha_bound - slack, kUniformAlphaResolution,
                                  0.5 * std::numbers::pi - kUniformAlphaResolution);
  out.at_bound = checker.report(probe);
  out.uniform_alpha = find_uniform_alpha_report(checker).uniform_alpha;
  out.passed = out.at_bound.holds && out.uniform_alpha.has_value();
  return out;
}

}  // namespace gip
