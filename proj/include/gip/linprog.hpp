#pragma once

// Dense simplex for the small LPs that show up in sphere geometry:
//
//     maximize c.x  subject to  A x <= b,  x free,  b >= 0.
//
// b >= 0 makes x = 0 feasible, so the slack basis is a feasible start and no
// phase one is needed. Bland's rule prevents cycling on the degenerate
// pivots that hemisphere and cone problems produce.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gip::lp {

enum class Status { optimal, unbounded, iteration_limit };

struct Result {
  Status status = Status::optimal;
  std::vector<double> x;
  double value = 0.0;
};

/// Row-major constraint matrix with `cols` columns.
struct Problem {
  std::size_t cols = 0;
  std::vector<double> objective;  // size cols
  std::vector<double> a;          // rows * cols
  std::vector<double> b;          // rows

  std::size_t rows() const { return b.size(); }

  void add_row(const std::vector<double>& row, double rhs) {
    if (row.size() != cols) throw std::invalid_argument("lp: row width mismatch");
    a.insert(a.end(), row.begin(), row.end());
    b.push_back(rhs);
  }
};

inline Result maximize(const Problem& p, double eps = 1e-12) {
  const std::size_t m = p.rows();
  const std::size_t n = p.cols;
  if (p.objective.size() != n || p.a.size() != m * n)
    throw std::invalid_argument("lp: inconsistent problem dimensions");
  for (double rhs : p.b)
    if (!(rhs >= 0.0)) throw std::invalid_argument("lp: right-hand side must be nonnegative");

  // Columns: x+ (n), x- (n), slacks (m), rhs.
  const std::size_t width = 2 * n + m + 1;
  const std::size_t rhs = width - 1;
  std::vector<double> t((m + 1) * width, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return t[r * width + c]; };

  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      at(r, j) = p.a[r * n + j];
      at(r, n + j) = -p.a[r * n + j];
    }
    at(r, 2 * n + r) = 1.0;
    at(r, rhs) = p.b[r];
  }
  // Objective row stores reduced costs c_j - z_j; positive entries improve.
  for (std::size_t j = 0; j < n; ++j) {
    at(m, j) = p.objective[j];
    at(m, n + j) = -p.objective[j];
  }

  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) basis[r] = 2 * n + r;

  Result out;
  const std::size_t max_pivots = 50 * (m + 2 * n + 10);
  std::size_t pivots = 0;
  for (;; ++pivots) {
    if (pivots > max_pivots) {
      out.status = Status::iteration_limit;
      break;
    }
    std::size_t enter = width;
    for (std::size_t j = 0; j < rhs; ++j) {
      if (at(m, j) > eps) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;

    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
      const double coef = at(r, enter);
      if (coef <= eps) continue;
      const double ratio = at(r, rhs) / coef;
      if (ratio < best_ratio - 1e-15 ||
          (std::abs(ratio - best_ratio) <= 1e-15 && leave < m && basis[r] < basis[leave])) {
        best_ratio = ratio;
        leave = r;
      }
    }
    if (leave == m) {
      out.status = Status::unbounded;
      return out;
    }

    const double piv = at(leave, enter);
    for (std::size_t c = 0; c < width; ++c) at(leave, c) /= piv;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) at(r, c) -= f * at(leave, c);
    }
    basis[leave] = enter;
  }

  std::vector<double> split(2 * n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (basis[r] < 2 * n) split[basis[r]] = at(r, rhs);
  out.x.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) out.x[j] = split[j] - split[n + j];
  out.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) out.value += p.objective[j] * out.x[j];
  return out;
}

}  // namespace gip::lp
