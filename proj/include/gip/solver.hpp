#pragma once

// Supergradient ascent on the concave surrogate F(t), t = log(alpha), with
// max-alpha normalization, scale-cluster monitoring, partial-rescaling
// recovery and the radius-ratio improvement loop.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gip/aleksandrov.hpp"
#include "gip/dual_polytope.hpp"
#include "gip/error.hpp"
#include "gip/gauss_image.hpp"
#include "gip/measures.hpp"
#include "gip/sphere.hpp"

namespace gip {

enum class StepRule { polyak, diminishing, fixed };

inline std::string to_string(StepRule r) {
  switch (r) {
    case StepRule::polyak: return "polyak";
    case StepRule::diminishing: return "diminishing";
    case StepRule::fixed: return "fixed";
  }
  return "?";
}

inline StepRule step_rule_from_string(const std::string& s) {
  if (s == "polyak") return StepRule::polyak;
  if (s == "diminishing") return StepRule::diminishing;
  if (s == "fixed") return StepRule::fixed;
  throw Error("unknown step rule '" + s + "'");
}

/// Largest log(max alpha / min alpha) the ascent will step to. Beyond it the
/// iterates are treated as diverging: F is unbounded above exactly when no
/// solution exists, and exp(t) would soon underflow.
inline constexpr double kMaxLogScaleRange = 600.0;

struct SolverConfig {
  double tol = 1e-3;  // residual threshold as a fraction of mu(S)
  std::size_t max_iters = 10000;
  StepRule step_rule = StepRule::polyak;
  double gap_ratio = 10.0;
  std::uint64_t seed = 0;  // 0: all alphas 1; otherwise log-uniform jitter
  bool rescale_recovery = true;
  std::optional<double> step_size;  // eta_0; defaults to m / mu(S)
  std::size_t stall_window = 200;
  std::optional<std::vector<double>> initial_alphas;  // overrides seed
  std::optional<double> uniform_alpha;  // skips the bisection when given
  // Extra iterations after reaching tol with harmonic steps eta_0/(k+1),
  // keeping the best F among iterates still within tol. Moves toward the
  // grid maximizer of F, which the residual cannot resolve below one node.
  std::size_t polish_iters = 0;
};

struct RescaleEvent {
  std::size_t iteration = 0;
  IndexSet subset;  // the rescaled (large-scale) side
  double factor = 1.0;
};

struct TraceRow {
  std::size_t iteration = 0;
  double phi = 0.0;
  double residual_inf = 0.0;
  double min_alpha = 0.0;
  double max_alpha = 0.0;
  std::size_t cluster_count = 0;
};

struct SolverReport {
  DualPolytope final_P;
  std::vector<double> cell_masses;
  double residual_inf = 0.0;
  double phi = 0.0;
  std::vector<double> phi_trace;
  std::vector<TraceRow> trace;
  std::vector<RescaleEvent> rescale_events;
  std::vector<IndexSet> clusters;
  double radii_ratio = 0.0;
  std::optional<double> uniform_alpha_used;
  bool converged = false;
  bool scales_diverged = false;
  std::size_t iterations = 0;
  std::vector<std::string> warnings;
  double epsilon = 0.0;
};

struct RecoveryResult {
  DualPolytope polytope;
  bool applied = false;
  std::string reason;  // why nothing was applied
  IndexSet subset;     // rescaled side I
  double factor = 1.0;
  ExtremalStats before;
  ExtremalStats after;
  double claimed_L_star = 0.0;  // (L*/U*) L sin(alpha)
  double phi_before = 0.0;
  double phi_after = 0.0;
  bool postconditions_hold = false;
};

namespace detail {

inline std::vector<double> log_alphas(const DualPolytope& p) {
  std::vector<double> t(p.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::log(p.alphas()[i]);
  return t;
}

inline DualPolytope polytope_from_log(const DualPolytope& shape, const std::vector<double>& t) {
  std::vector<double> al(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) al[i] = std::exp(t[i]);
  return canonicalize(shape.with_alphas(std::move(al), false)).normalized();
}

inline double inf_norm_diff(const std::vector<double>& g, const std::vector<double>& mu) {
  double r = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) r = std::max(r, std::abs(g[i] - mu[i]));
  return r;
}

inline std::optional<double> uniform_alpha_for(const DiscreteMeasure& mu, const QuadratureMeasure& lam) {
  WeakCheckOptions o;
  o.heuristic = mu.size() > kExhaustiveAtomLimit;
  return find_uniform_alpha(mu, lam, o);
}

}  // namespace detail

/// Recovery for a split I (large scales) / complement (small
/// scales, hemisphere-contained) with U*/L < sin(alpha), shrinks the alphas
/// of I by a = U*/(L sin(alpha)) and renormalizes to max alpha = 1, which
/// lifts L* to (L*/U*) L sin(alpha) while keeping L.
inline RecoveryResult rescale_recovery_step(const DualPolytope& p, const DiscreteMeasure& mu,
                                            const QuadratureMeasure& lam, double uniform_alpha,
                                            double gap_ratio = 10.0,
                                            std::optional<IndexSet> forced_split = std::nullopt) {
  RecoveryResult r{p, false, "", IndexSet({0}, p.size()), 1.0, {}, {}, 0.0, 0.0, 0.0, false};
  if (!p.canonical()) throw Error("rescale_recovery_step: polytope is not canonical");
  const double mx = *std::max_element(p.alphas().begin(), p.alphas().end());
  if (std::abs(mx - 1.0) > 1e-12) throw Error("rescale_recovery_step: polytope must have max alpha = 1");
  if (!(uniform_alpha > 0.0 && uniform_alpha < 0.5 * std::numbers::pi))
    throw Error("rescale_recovery_step: uniform alpha outside (0, pi/2)");
  const double s = std::sin(uniform_alpha);

  std::vector<IndexSet> candidates;
  if (forced_split) {
    candidates.push_back(*forced_split);
  } else {
    // Splits between consecutive clusters; the smallest complement first.
    const auto clusters = degeneracy_clusters(p, gap_ratio);
    for (std::size_t cut = clusters.size() - 1; cut >= 1; --cut) {
      std::vector<std::size_t> members;
      for (std::size_t c = 0; c < cut; ++c)
        members.insert(members.end(), clusters[c].members().begin(), clusters[c].members().end());
      candidates.emplace_back(std::move(members), p.size());
    }
  }
  if (candidates.empty()) {
    r.reason = "single scale cluster";
    return r;
  }
  const IndexSet* chosen = nullptr;
  for (const auto& set : candidates) {
    if (!set.proper()) continue;
    const auto st = extremal_stats(p, set);
    if (!(st.U_star / st.L < s)) continue;
    if (!hemisphere_witness(p.directions(), set.complement().members())) continue;
    chosen = &set;
    break;
  }
  if (chosen == nullptr) {
    r.reason = "no split with a hemisphere-contained complement and U*/L < sin(alpha)";
    return r;
  }
  r.subset = *chosen;
  r.before = extremal_stats(p, *chosen);
  r.factor = r.before.U_star / (r.before.L * s);
  const auto rescaled = partial_rescale(p, *chosen, r.factor, RescaleSide::members).normalized();
  r.polytope = rescaled;
  r.applied = true;
  r.after = extremal_stats(rescaled, *chosen);
  r.claimed_L_star = r.before.L_star / r.before.U_star * r.before.L * s;
  r.phi_before = phi(p, mu, lam).phi;
  r.phi_after = phi(rescaled, mu, lam).phi;
  const double eps = quadrature_tolerance(lam, p.size());
  r.postconditions_hold = r.phi_after >= r.phi_before - eps && r.after.L_star >= r.claimed_L_star - 1e-9 &&
                          std::abs(r.after.L - r.before.L) <= 1e-9;
  return r;
}

inline SolverReport solve(const DiscreteMeasure& mu, const QuadratureMeasure& lam, const SolverConfig& cfg = {}) {
  if (!(cfg.tol > 0.0)) throw Error("solve: tol must be positive");
  if (cfg.max_iters < 1) throw Error("solve: max_iters must be at least 1");
  if (mu.dim() != lam.dim()) throw Error("solve: mu and lambda live on different spheres");
  const std::size_t m = mu.size();
  const double mass = total_mass(mu);
  const double eps = quadrature_tolerance(lam, m);
  if (std::abs(mass - lam.total()) > eps)
    throw Error("solve: total masses differ by " + std::to_string(mass - lam.total()) +
                " (more than the quadrature tolerance); rescale lambda with normalize_to");

  SolverReport rep;
  rep.epsilon = eps;
  rep.uniform_alpha_used = cfg.uniform_alpha ? cfg.uniform_alpha : detail::uniform_alpha_for(mu, lam);
  if (!rep.uniform_alpha_used)
    rep.warnings.push_back("weak Aleksandrov check failed: no uniform alpha; a solution may not exist");

  std::vector<double> alphas(m, 1.0);
  if (cfg.initial_alphas) {
    if (cfg.initial_alphas->size() != m) throw Error("solve: initial alphas have the wrong length");
    alphas = *cfg.initial_alphas;
  } else if (cfg.seed != 0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);
    for (double& a : alphas) a = std::exp(jitter(rng));
  }
  DualPolytope p = canonicalize(DualPolytope::make(mu.atoms(), alphas)).normalized();
  const SurrogateTable table(mu.atoms(), lam);
  const auto& w = mu.weights();
  const double eta0 = cfg.step_size.value_or(static_cast<double>(m) / mass);
  const double target = cfg.tol * mass;

  auto evaluate = [&](const DualPolytope& q, std::vector<double>& g) {
    const auto t = detail::log_alphas(q);
    auto e = table.evaluate(t);
    double f = e.lambda_part;
    for (std::size_t i = 0; i < m; ++i) f -= w[i] * t[i];
    g = std::move(e.cell_masses);
    return f;
  };

  std::vector<double> g;
  double f = evaluate(p, g);
  double delta = -1.0;  // Polyak gap estimate F* - F; set on first use
  DualPolytope best = p;
  std::vector<double> best_g = g;
  double best_f = f;
  double best_res = detail::inf_norm_diff(g, w);

  std::size_t it = 0;
  for (;; ++it) {
    const double res = detail::inf_norm_diff(g, w);
    const auto clusters = degeneracy_clusters(p, cfg.gap_ratio);
    rep.phi_trace.push_back(f);
    rep.trace.push_back({it, f, res, *std::min_element(p.alphas().begin(), p.alphas().end()),
                         *std::max_element(p.alphas().begin(), p.alphas().end()), clusters.size()});
    if (res < best_res || (res == best_res && f > best_f)) {
      best = p;
      best_g = g;
      best_f = f;
      best_res = res;
    }
    if (res <= target) {
      rep.converged = true;
      break;
    }
    if (it >= cfg.max_iters) break;

    // Recovery when progress stalls on a multi-scale body.
    if (cfg.rescale_recovery && rep.uniform_alpha_used && clusters.size() >= 2 && it >= cfg.stall_window &&
        rep.phi_trace[it] - rep.phi_trace[it - cfg.stall_window] < eps &&
        (rep.rescale_events.empty() || it - rep.rescale_events.back().iteration >= cfg.stall_window)) {
      const auto rec = rescale_recovery_step(p, mu, lam, *rep.uniform_alpha_used, cfg.gap_ratio);
      if (rec.applied) {
        rep.rescale_events.push_back({it, rec.subset, rec.factor});
        p = rec.polytope;
        f = evaluate(p, g);
        delta = -1.0;
        continue;
      }
    }

    std::vector<double> s(m);
    double s2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      s[i] = g[i] - w[i];
      s2 += s[i] * s[i];
    }
    double eta = eta0;
    switch (cfg.step_rule) {
      case StepRule::fixed: break;
      case StepRule::diminishing: eta = eta0 / std::sqrt(static_cast<double>(it + 1)); break;
      case StepRule::polyak:
        if (delta < 0.0) delta = eta0 * s2;
        eta = delta / s2;
        break;
    }
    auto t = detail::log_alphas(p);
    for (std::size_t i = 0; i < m; ++i) t[i] += eta * s[i];
    const auto [t_lo, t_hi] = std::minmax_element(t.begin(), t.end());
    if (*t_hi - *t_lo > kMaxLogScaleRange) {
      rep.scales_diverged = true;
      rep.warnings.push_back("scales diverged (max/min alpha above e^" +
                             std::to_string(static_cast<int>(kMaxLogScaleRange)) + "); no solution at this resolution");
      break;
    }
    DualPolytope next = detail::polytope_from_log(p, t);
    std::vector<double> g_next;
    const double f_next = evaluate(next, g_next);
    if (cfg.step_rule == StepRule::polyak) {
      if (f_next < f) {
        delta *= 0.5;  // overshoot: lower the estimate of F* - F and retry
        if (delta * 1e12 < eta0 * s2 * 1e-6) delta = eta0 * s2;  // restart a collapsed level
        continue;
      }
      delta *= 1.2;
    }
    p = std::move(next);
    g = std::move(g_next);
    f = f_next;
  }

  if (rep.converged && cfg.polish_iters > 0) {
    DualPolytope q = p;
    std::vector<double> gq = g;
    for (std::size_t k = 0; k < cfg.polish_iters; ++k) {
      auto t = detail::log_alphas(q);
      for (std::size_t i = 0; i < m; ++i) t[i] += eta0 / static_cast<double>(k + 1) * (gq[i] - w[i]);
      q = detail::polytope_from_log(q, t);
      const double fq = evaluate(q, gq);
      const double rq = detail::inf_norm_diff(gq, w);
      ++it;
      rep.phi_trace.push_back(fq);
      rep.trace.push_back({it, fq, rq, *std::min_element(q.alphas().begin(), q.alphas().end()), 1.0,
                           degeneracy_clusters(q, cfg.gap_ratio).size()});
      if (rq <= target && fq > f) {
        p = q;
        g = gq;
        f = fq;
      }
    }
  }
  if (!rep.converged) {
    p = best;
    g = best_g;
    f = best_f;
    rep.warnings.push_back("did not reach tolerance; returning the iterate with the smallest residual");
  }
  rep.iterations = it;
  rep.final_P = p;
  rep.cell_masses = g;
  rep.residual_inf = detail::inf_norm_diff(g, w);
  rep.phi = f;
  rep.clusters = degeneracy_clusters(p, cfg.gap_ratio);
  const auto rad = radii(p, &lam.grid());
  rep.radii_ratio = rad.r_P / rad.R_P;
  return rep;
}

struct RatioLoopResult {
  DualPolytope polytope;
  double residual_inf = 0.0;
  bool residual_ok = false;
  std::size_t passes = 0;
  std::size_t k = 0;  // largest hemisphere-contained prefix of ascending alphas
  double gamma = 0.0;
  double radii_ratio = 0.0;
  double bound_stated = 0.0;    // sin(alpha)^k / gamma
  double bound_provable = 0.0;  // gamma sin(alpha)^k
  bool prefix_condition = false;
  std::optional<double> uniform_alpha;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<std::size_t> ascending_order(const DualPolytope& p) {
  std::vector<std::size_t> order(p.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p.alphas()[a] < p.alphas()[b]; });
  return order;
}

inline std::size_t contained_prefix(const DualPolytope& p, const std::vector<std::size_t>& order) {
  std::size_t k = 0;
  for (std::size_t l = 1; l <= order.size(); ++l) {
    std::vector<std::size_t> prefix(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(l));
    if (!hemisphere_witness(p.directions(), prefix)) break;
    k = l;
  }
  return k;
}

}  // namespace detail

/// Repeats recovery on prefixes of the ascending alphas until every ratio
/// alpha_(l)/alpha_(l+1), l <= k, is at least sin(alpha_unif), re-solving
/// when the residual drifts, and reports the radius bound.
inline RatioLoopResult ratio_improvement_loop(const DualPolytope& solution, const DiscreteMeasure& mu,
                                              const QuadratureMeasure& lam, const SolverConfig& cfg = {}) {
  RatioLoopResult out;
  out.polytope = canonicalize(solution).normalized();
  const double mass = total_mass(mu);
  const double target = cfg.tol * mass;
  auto residual = [&](const DualPolytope& q) {
    return detail::inf_norm_diff(compute_partition(q, lam).cell_masses, mu.weights());
  };
  out.residual_inf = residual(out.polytope);
  if (out.residual_inf > target) throw Error("ratio_improvement_loop: input is not a solution at tolerance");
  out.uniform_alpha = cfg.uniform_alpha ? cfg.uniform_alpha : detail::uniform_alpha_for(mu, lam);
  if (!out.uniform_alpha) throw Error("ratio_improvement_loop: no uniform weak Aleksandrov alpha");
  const double s = std::sin(*out.uniform_alpha);
  const std::size_t m = mu.size();

  for (std::size_t guard = 0; guard < 4 * m; ++guard) {
    const auto order = detail::ascending_order(out.polytope);
    const std::size_t k = detail::contained_prefix(out.polytope, order);
    const auto& al = out.polytope.alphas();
    std::optional<std::size_t> bad;
    for (std::size_t l = 1; l <= k && l < m; ++l)
      if (al[order[l - 1]] / al[order[l]] < s) {
        bad = l;
        break;
      }
    if (!bad) break;
    IndexSet large(std::vector<std::size_t>(order.begin() + static_cast<std::ptrdiff_t>(*bad), order.end()), m);
    const auto rec = rescale_recovery_step(out.polytope, mu, lam, *out.uniform_alpha, cfg.gap_ratio, large);
    if (!rec.applied) {
      out.warnings.push_back("recovery precondition failed: " + rec.reason);
      break;
    }
    ++out.passes;
    DualPolytope next = rec.polytope;
    double res = residual(next);
    if (res > target) {
      SolverConfig polish = cfg;
      polish.initial_alphas = next.alphas();
      polish.uniform_alpha = out.uniform_alpha;
      polish.rescale_recovery = false;
      const auto rep = solve(mu, lam, polish);
      if (rep.residual_inf > target) {
        out.warnings.push_back("residual not restored after recovery; keeping the previous solution");
        break;
      }
      next = rep.final_P;
      res = rep.residual_inf;
    }
    out.polytope = next;
    out.residual_inf = res;
  }

  const auto order = detail::ascending_order(out.polytope);
  out.k = detail::contained_prefix(out.polytope, order);
  const auto& al = out.polytope.alphas();
  out.prefix_condition = true;
  for (std::size_t l = 1; l <= out.k && l < m; ++l)
    if (al[order[l - 1]] / al[order[l]] < s - 1e-12) out.prefix_condition = false;
  // gamma = min over nodes u of max over the first k+1 atoms of u.v_i.
  const std::size_t head = std::min(out.k + 1, m);
  const auto& grid = lam.grid();
  out.gamma = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < grid.size(); ++n) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < head; ++j) best = std::max(best, gip::dot(grid.node(n), mu.atoms()[order[j]]));
    out.gamma = std::min(out.gamma, best);
  }
  const double sk = std::pow(s, static_cast<double>(out.k));
  out.bound_stated = sk / out.gamma;
  out.bound_provable = out.gamma * sk;
  const auto rad = radii(out.polytope, &grid);
  out.radii_ratio = rad.r_P / rad.R_P;
  out.residual_ok = out.residual_inf <= target;
  return out;
}

}  // namespace gip
