#pragma once

// Static artifacts: an SVG drawing for S^1 solutions (P*, P, atom rays and
// Gauss image arcs) and an OBJ mesh pair for S^2 solutions.

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "gip/dual_polytope.hpp"
#include "gip/error.hpp"
#include "gip/oracles.hpp"

namespace gip::exporter {

namespace detail {

using Vec3 = std::array<double, 3>;

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Orders points (indices into pts) counter-clockwise seen from `normal`.
inline void sort_around(std::vector<std::size_t>& ids, const std::vector<Vec3>& pts, const Vec3& normal) {
  Vec3 c{0, 0, 0};
  for (auto i : ids)
    for (int k = 0; k < 3; ++k) c[k] += pts[i][k] / static_cast<double>(ids.size());
  Vec3 helper = std::abs(normal[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 e1 = cross(normal, helper);
  const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  for (double& x : e1) x /= n1;
  const Vec3 e2 = cross(normal, e1);
  auto angle = [&](std::size_t i) {
    double x = 0, y = 0;
    for (int k = 0; k < 3; ++k) {
      x += (pts[i][k] - c[k]) * e1[k];
      y += (pts[i][k] - c[k]) * e2[k];
    }
    return std::atan2(y, x);
  };
  std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return angle(a) < angle(b); });
}

inline std::string polyline(const std::vector<std::array<double, 2>>& pts, double scale, double cx, double cy) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  for (const auto& p : pts) os << cx + scale * p[0] << ',' << cy - scale * p[1] << ' ';
  return os.str();
}

}  // namespace detail

/// SVG of P* (blue), P (red), atom rays and the Gauss image cells drawn as
/// arcs of the unit circle, one colour per atom.
inline std::string svg(const DualPolytope& p) {
  if (p.dim() != 2) throw Error("svg export: only two-dimensional solutions");
  const auto verts = polar_vertices(p);
  std::vector<std::array<double, 2>> polar, body;
  for (const auto& v : verts) polar.push_back({v.x[0], v.x[1]});
  for (std::size_t i = 0; i < p.size(); ++i)
    body.push_back({p.directions()[i][0] / p.alphas()[i], p.directions()[i][1] / p.alphas()[i]});
  auto by_angle = [](const auto& a, const auto& b) { return std::atan2(a[1], a[0]) < std::atan2(b[1], b[0]); };
  std::sort(polar.begin(), polar.end(), by_angle);
  std::sort(body.begin(), body.end(), by_angle);

  double extent = 1.0;
  for (const auto& q : polar) extent = std::max(extent, std::hypot(q[0], q[1]));
  for (const auto& q : body) extent = std::max(extent, std::hypot(q[0], q[1]));
  const double size = 600.0, c = size / 2.0, scale = 0.45 * size / extent;

  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
     << size << ' ' << size << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<polygon id=\"polar\" points=\"" << detail::polyline(polar, scale, c, c)
     << "\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\"/>\n";
  os << "<polygon id=\"body\" points=\"" << detail::polyline(body, scale, c, c)
     << "\" fill=\"none\" stroke=\"#b22222\" stroke-width=\"2\"/>\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto d = p.directions()[i];
    os << "<line class=\"atom\" x1=\"" << c << "\" y1=\"" << c << "\" x2=\"" << c + scale * extent * d[0] << "\" y2=\""
       << c - scale * extent * d[1] << "\" stroke=\"#555\" stroke-dasharray=\"4 3\"/>\n";
  }
  const auto cells = arc_cells(p);
  const double r = scale;  // unit circle
  for (std::size_t i = 0; i < p.size(); ++i) {
    const int hue = static_cast<int>(360.0 * static_cast<double>(i) / static_cast<double>(p.size()));
    if (cells.cells[i].empty()) continue;
    // One path per atom; a cell wrapping past angle 0 becomes two subpaths.
    os << "<path class=\"cell\" data-atom=\"" << i << "\" data-length=\"" << std::setprecision(9) << cells.length(i)
       << std::setprecision(3) << "\" d=\"";
    for (const auto& iv : cells.cells[i]) {
      const double x0 = c + r * std::cos(iv.begin), y0 = c - r * std::sin(iv.begin);
      const double x1 = c + r * std::cos(iv.end), y1 = c - r * std::sin(iv.end);
      const int large = iv.end - iv.begin > std::numbers::pi ? 1 : 0;
      os << "M " << x0 << ' ' << y0 << " A " << r << ' ' << r << " 0 " << large << " 0 " << x1 << ' ' << y1 << ' ';
    }
    os << "\" fill=\"none\" stroke=\"hsl(" << hue << ",70%,45%)\" stroke-width=\"5\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// OBJ with two objects: the polar body P* (faces from tight constraints)
/// and P (vertices v_i / alpha_i, faces from the vertices of P*).
inline std::string obj(const DualPolytope& p) {
  if (p.dim() != 3) throw Error("obj export: only three-dimensional solutions");
  const auto verts = polar_vertices(p);
  std::vector<detail::Vec3> pv;
  for (const auto& v : verts) pv.push_back({v.x[0], v.x[1], v.x[2]});
  std::vector<detail::Vec3> bv;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto d = p.directions()[i];
    bv.push_back({d[0] / p.alphas()[i], d[1] / p.alphas()[i], d[2] / p.alphas()[i]});
  }

  std::ostringstream os;
  os << std::setprecision(17);
  os << "# gip export\no polar_body\n";
  for (const auto& v : pv) os << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  for (std::size_t j = 0; j < p.size(); ++j) {
    std::vector<std::size_t> face;
    for (std::size_t k = 0; k < verts.size(); ++k)
      if (std::find(verts[k].active.begin(), verts[k].active.end(), j) != verts[k].active.end()) face.push_back(k);
    if (face.size() < 3) continue;
    const auto d = p.directions()[j];
    detail::sort_around(face, pv, {d[0], d[1], d[2]});
    os << 'f';
    for (auto k : face) os << ' ' << k + 1;
    os << '\n';
  }
  os << "o body\n";
  for (const auto& v : bv) os << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  const std::size_t offset = pv.size();
  for (std::size_t k = 0; k < verts.size(); ++k) {
    std::vector<std::size_t> face = verts[k].active;
    if (face.size() < 3) continue;
    detail::sort_around(face, bv, pv[k]);
    os << 'f';
    for (auto i : face) os << ' ' << offset + i + 1;
    os << '\n';
  }
  return os.str();
}

}  // namespace gip::exporter
