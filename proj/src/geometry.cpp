#include "opc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace opc {

double round_half_away(double v) {
  // std::round already rounds halves away from zero on every platform.
  return std::round(v);
}

namespace {

bool is_horizontal(const Point& a, const Point& b) { return a.y == b.y && a.x != b.x; }
bool is_vertical(const Point& a, const Point& b) { return a.x == b.x && a.y != b.y; }

bool seg_horizontal(const Segment& s) { return s.dir.x != 0.0; }

}  // namespace

void validate_polygon(const Polygon& p) {
  const auto& v = p.vertices;
  const int n = static_cast<int>(v.size());
  if (n < 4) throw GeometryError("polygon needs at least 4 vertices");
  for (int i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    if (!std::isfinite(a.x) || !std::isfinite(a.y))
      throw GeometryError("non-finite vertex");
    if (a.x == b.x && a.y == b.y) throw GeometryError("degenerate zero-length edge");
    if (!is_horizontal(a, b) && !is_vertical(a, b))
      throw GeometryError("non-Manhattan edge");
  }
  for (int i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    const Point& c = v[(i + 2) % n];
    if (is_horizontal(a, b) == is_horizontal(b, c))
      throw GeometryError("consecutive edges must alternate horizontal/vertical");
  }
}

namespace {

// Partition of [0, length] symmetric about the midpoint. An edge no longer
// than 2*seg_length splits once at the midpoint; longer edges tile outward
// from the midpoint in seg_length steps, leaving (possibly short) end pieces.
std::vector<double> partition_edge(double length, double seg_length, double min_len) {
  std::vector<double> cuts;
  cuts.push_back(0.0);
  if (length <= 2.0 * seg_length) {
    cuts.push_back(length / 2.0);
  } else {
    const double half = length / 2.0;
    const int n = static_cast<int>(std::floor(half / seg_length));
    const double r = half - n * seg_length;
    std::vector<double> left;
    if (r > 0.0) left.push_back(r);
    for (int i = 1; i <= n; ++i) left.push_back(r + i * seg_length);
    if (r > 0.0 && r < min_len && left.size() >= 2) left.erase(left.begin());
    for (double c : left) cuts.push_back(c);
    // mirror about the midpoint; `left` ends exactly at half
    for (int i = static_cast<int>(left.size()) - 2; i >= 0; --i)
      cuts.push_back(length - left[i]);
  }
  cuts.push_back(length);
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

Point outward_normal(const Point& dir) {
  // Right of travel: interior is on the left for CCW (filled) rings and on
  // the left for CW hole rings as well, since material sits outside the hole.
  return Point{dir.y, -dir.x};
}

}  // namespace

SegmentSet segment_edges(const std::vector<Polygon>& polygons, double seg_length,
                         double min_seg_length) {
  if (seg_length <= 0.0) throw GeometryError("seg_length must be positive");
  SegmentSet out;
  for (int pi = 0; pi < static_cast<int>(polygons.size()); ++pi) {
    const Polygon& poly = polygons[pi];
    validate_polygon(poly);
    const auto& v = poly.vertices;
    const int n = static_cast<int>(v.size());
    std::vector<int> ring;
    int order = 0;
    for (int e = 0; e < n; ++e) {
      const Point a = v[e];
      const Point b = v[(e + 1) % n];
      const double len = std::abs(b.x - a.x) + std::abs(b.y - a.y);
      const Point dir{(b.x - a.x) / len, (b.y - a.y) / len};
      const auto cuts = partition_edge(len, seg_length, min_seg_length);
      const int pieces = static_cast<int>(cuts.size()) - 1;
      for (int k = 0; k < pieces; ++k) {
        Segment s;
        s.start = Point{a.x + dir.x * cuts[k], a.y + dir.y * cuts[k]};
        s.end = Point{a.x + dir.x * cuts[k + 1], a.y + dir.y * cuts[k + 1]};
        s.dir = dir;
        s.vel = outward_normal(dir);
        s.is_corner = (k == 0 || k == pieces - 1);
        s.polygon_id = pi;
        s.order_in_ring = order++;
        s.edge_id = e;
        ring.push_back(out.count());
        out.segments.push_back(s);
      }
    }
    out.rings.push_back(std::move(ring));
    out.ring_is_sraf.push_back(false);
  }
  return out;
}

void assign_velocities(SegmentSet& segset) {
  for (auto& s : segset.segments) s.vel = outward_normal(s.dir);
}

SegmentSet ste_round(const SegmentSet& segset) {
  SegmentSet out = segset;
  for (auto& s : out.segments) {
    s.start.x = round_half_away(s.start.x);
    s.start.y = round_half_away(s.start.y);
    s.end.x = round_half_away(s.end.x);
    s.end.y = round_half_away(s.end.y);
  }
  return out;
}

SegmentSet merge_corners(const SegmentSet& rounded) {
  SegmentSet out = rounded;
  for (const auto& ring : out.rings) {
    const int n = static_cast<int>(ring.size());
    for (int i = 0; i < n; ++i) {
      Segment& a = out.segments[ring[i]];
      Segment& b = out.segments[ring[(i + 1) % n]];
      if (a.edge_id == b.edge_id) continue;  // same-edge neighbors keep their jog
      const bool ah = seg_horizontal(a);
      const bool bh = seg_horizontal(b);
      if (ah == bh)
        throw GeometryError("adjacent corner segments with identical orientation");
      const Segment& sv = ah ? b : a;
      const Segment& sh = ah ? a : b;
      const Point p{sv.start.x, sh.start.y};
      a.end = p;
      b.start = p;
    }
  }
  return out;
}

std::vector<std::vector<Point>> ring_polylines(const SegmentSet& merged) {
  std::vector<std::vector<Point>> rings;
  rings.reserve(merged.rings.size());
  for (const auto& ring : merged.rings) {
    std::vector<Point> verts;
    for (int idx : ring) {
      const Segment& s = merged.segments[idx];
      if (!verts.empty()) {
        const Point& prev = verts.back();
        if (prev != s.start) {
          if (prev.x != s.start.x && prev.y != s.start.y)
            throw GeometryError("unclosed ring: neighbor endpoints share no axis");
          verts.push_back(s.start);
        }
      } else {
        verts.push_back(s.start);
      }
      verts.push_back(s.end);
    }
    if (verts.size() >= 2 && verts.back() == verts.front()) verts.pop_back();
    if (!verts.empty()) {
      const Point& last = verts.back();
      const Point& first = verts.front();
      if (last.x != first.x && last.y != first.y)
        throw GeometryError("unclosed ring: closing edge is not axis-aligned");
    }
    rings.push_back(std::move(verts));
  }
  return rings;
}

std::vector<Polygon> to_polygons(const SegmentSet& merged) {
  std::vector<Polygon> polys;
  for (auto& verts : ring_polylines(merged)) {
    std::vector<Point> clean;
    for (const Point& p : verts) {
      if (!clean.empty() && clean.back() == p) continue;
      clean.push_back(p);
    }
    while (clean.size() >= 2 && clean.back() == clean.front()) clean.pop_back();
    // merge collinear runs
    std::vector<Point> out;
    const int n = static_cast<int>(clean.size());
    for (int i = 0; i < n; ++i) {
      const Point& a = clean[(i + n - 1) % n];
      const Point& b = clean[i];
      const Point& c = clean[(i + 1) % n];
      const bool collinear = (a.x == b.x && b.x == c.x) || (a.y == b.y && b.y == c.y);
      if (!collinear) out.push_back(b);
    }
    if (out.size() >= 4) polys.push_back(Polygon{std::move(out)});
  }
  return polys;
}

}  // namespace opc
