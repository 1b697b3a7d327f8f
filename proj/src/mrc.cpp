#include "opc/mrc.hpp"

#include <algorithm>
#include <cmath>

#include "nlohmann/json.hpp"

namespace opc {

namespace {

struct AxisSeg {
  bool horizontal;
  double lo, hi;   // span along the segment direction
  double off;      // perpendicular position (midline)
  double vel_perp; // outward velocity component on the perpendicular axis
};

AxisSeg axis_view(const Segment& s) {
  AxisSeg v;
  v.horizontal = s.dir.x != 0.0;
  if (v.horizontal) {
    v.lo = std::min(s.start.x, s.end.x);
    v.hi = std::max(s.start.x, s.end.x);
    v.off = s.start.y;
    v.vel_perp = s.vel.y;
  } else {
    v.lo = std::min(s.start.y, s.end.y);
    v.hi = std::max(s.start.y, s.end.y);
    v.off = s.start.x;
    v.vel_perp = s.vel.x;
  }
  return v;
}

}  // namespace

std::vector<CheckPair> extract_check_pairs(const SegmentSet& segset,
                                           const MrcRuleSet& rules,
                                           double search_radius) {
  (void)rules;
  std::vector<CheckPair> pairs;
  const int n = segset.count();
  std::vector<AxisSeg> views(n);
  for (int i = 0; i < n; ++i) views[i] = axis_view(segset.segments[i]);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const AxisSeg& a = views[i];
      const AxisSeg& b = views[j];
      if (a.horizontal != b.horizontal) continue;
      const double overlap = std::min(a.hi, b.hi) - std::max(a.lo, b.lo);
      if (overlap <= 0.0) continue;
      const double gap = std::abs(b.off - a.off);
      if (gap <= 0.0 || gap > search_radius) continue;
      const double sign = b.off > a.off ? 1.0 : -1.0;
      CheckPair p;
      p.seg_a = i;
      p.seg_b = j;
      p.axis = a.horizontal ? 1 : 0;
      p.gap = gap;
      if (a.vel_perp == sign && b.vel_perp == -sign) {
        p.kind = CheckKind::Spacing;  // outward faces meet across empty space
      } else if (a.vel_perp == -sign && b.vel_perp == sign) {
        p.kind = CheckKind::Width;  // material spans the gap
      } else {
        continue;  // same-facing, no rule between them
      }
      pairs.push_back(p);
    }
  }
  return pairs;
}

double gate_factor(double proj_delta, double d_const, double beta) {
  return 1.0 / (1.0 + std::exp(-beta * (proj_delta - d_const)));
}

Point velocity_gate(const Point& v, double proj_delta, double d_const, double beta) {
  const double tau = gate_factor(proj_delta, d_const, beta);
  return Point{v.x * tau, v.y * tau};
}

namespace {

struct Edge {
  bool horizontal;
  double lo, hi, off;
};

// Maximal boundary edges of the merged geometry, collinear runs fused.
std::vector<Edge> boundary_edges(const SegmentSet& geo) {
  std::vector<Edge> edges;
  for (const Polygon& poly : to_polygons(geo)) {
    const auto& v = poly.vertices;
    const int n = static_cast<int>(v.size());
    for (int i = 0; i < n; ++i) {
      const Point& a = v[i];
      const Point& b = v[(i + 1) % n];
      Edge e;
      e.horizontal = a.y == b.y;
      if (e.horizontal) {
        e.lo = std::min(a.x, b.x);
        e.hi = std::max(a.x, b.x);
        e.off = a.y;
      } else {
        e.lo = std::min(a.y, b.y);
        e.hi = std::max(a.y, b.y);
        e.off = a.x;
      }
      edges.push_back(e);
    }
  }
  return edges;
}

// Even-odd point-in-polygon over the full edge list (downward ray, half-open
// in the span coordinate).
bool point_inside(const std::vector<Edge>& edges, double px, double py) {
  int crossings = 0;
  for (const auto& e : edges) {
    if (!e.horizontal) continue;
    if (e.lo <= px && px < e.hi && e.off < py) crossings++;
  }
  return (crossings & 1) != 0;
}

}  // namespace

std::vector<Violation> check_violations(const SegmentSet& mask_geometry,
                                        const MrcRuleSet& rules) {
  std::vector<Violation> out;
  const auto edges = boundary_edges(mask_geometry);
  const int n = static_cast<int>(edges.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Edge& a = edges[i];
      const Edge& b = edges[j];
      if (a.horizontal != b.horizontal) continue;
      const double lo = std::max(a.lo, b.lo);
      const double hi = std::min(a.hi, b.hi);
      if (hi - lo <= 0.0) continue;
      const double gap = std::abs(b.off - a.off);
      if (gap <= 0.0) continue;

      // only adjacent facing pairs: skip if another parallel edge sits
      // strictly between them over the shared span
      const double o_lo = std::min(a.off, b.off), o_hi = std::max(a.off, b.off);
      bool blocked = false;
      for (int k = 0; k < n && !blocked; ++k) {
        if (k == i || k == j) continue;
        const Edge& c = edges[k];
        if (c.horizontal != a.horizontal) continue;
        if (c.off <= o_lo || c.off >= o_hi) continue;
        if (std::min(c.hi, hi) - std::max(c.lo, lo) > 0.0) blocked = true;
      }
      if (blocked) continue;

      const double mid_span = (lo + hi) / 2.0;
      const double mid_off = (a.off + b.off) / 2.0;
      const bool inside = a.horizontal ? point_inside(edges, mid_span, mid_off)
                                       : point_inside(edges, mid_off, mid_span);
      const double required = inside ? rules.min_width : rules.min_spacing;
      if (gap < required) {
        Violation v;
        v.kind = inside ? CheckKind::Width : CheckKind::Spacing;
        v.axis = a.horizontal ? 1 : 0;
        v.measured = gap;
        v.required = required;
        if (a.horizontal) {
          v.x0 = lo; v.x1 = hi; v.y0 = o_lo; v.y1 = o_hi;
        } else {
          v.y0 = lo; v.y1 = hi; v.x0 = o_lo; v.x1 = o_hi;
        }
        out.push_back(v);
      }
    }
  }
  return out;
}

std::string violations_to_json(const std::vector<Violation>& violations) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : violations) {
    arr.push_back({{"kind", v.kind == CheckKind::Spacing ? "spacing" : "width"},
                   {"axis", v.axis == 0 ? "x" : "y"},
                   {"measured", v.measured},
                   {"required", v.required},
                   {"span", {v.x0, v.y0, v.x1, v.y1}}});
  }
  return arr.dump(2);
}

}  // namespace opc
