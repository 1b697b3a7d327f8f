#include "opc/raster.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "opc/parallel.hpp"

namespace opc {

bool check_cross(const Point& p, const Segment& s) {
  const double v1x = p.x - s.start.x;
  const double v1y = p.y - s.start.y;
  const double v2x = p.x - s.end.x;
  const double v2y = p.y - s.end.y;
  const double cross = v1x * v2y - v1y * v2x;
  const bool cond1 = (v1x < 0) && (v2x >= 0) && (cross < 0);
  const bool cond2 = (v1x >= 0) && (v2x < 0) && (cross > 0);
  return cond1 || cond2;
}

namespace {

struct HEdge {
  int x0, x1;  // half-open [x0, x1)
  int y;
};

// Horizontal boundary edges of the merged set, jog connectors included.
std::vector<HEdge> horizontal_edges(const SegmentSet& merged, int w, int h,
                                    RasterStats* stats) {
  std::vector<HEdge> edges;
  for (const auto& verts : ring_polylines(merged)) {
    const int n = static_cast<int>(verts.size());
    for (int i = 0; i < n; ++i) {
      const Point& a = verts[i];
      const Point& b = verts[(i + 1) % n];
      if (a.y != b.y || a.x == b.x) continue;
      int x0 = static_cast<int>(std::min(a.x, b.x));
      int x1 = static_cast<int>(std::max(a.x, b.x));
      const int y = static_cast<int>(a.y);
      if (x0 < 0 || x1 > w || y < 0 || y >= h) {
        if (stats) stats->clamped_edges++;
        x0 = std::clamp(x0, 0, w);
        x1 = std::clamp(x1, 0, w);
      }
      if (x0 < x1) edges.push_back({x0, x1, y});
    }
  }
  return edges;
}

}  // namespace

MaskGrid rasterize(const SegmentSet& merged, int w, int h, RasterStats* stats) {
  MaskGrid mask(w, h, 0.0);
  const auto edges = horizontal_edges(merged, w, h, stats);
  if (edges.empty()) return mask;

  int bx0 = w, bx1 = 0;
  for (const auto& e : edges) {
    bx0 = std::min(bx0, e.x0);
    bx1 = std::max(bx1, e.x1);
  }

  // Column-wise crossing counts: an edge at height y toggles parity for every
  // pixel (x, py) with x in its span and py > y, which is exactly the
  // check_cross predicate summed per pixel. Prefix sums keep it O(E*span + WH).
  std::vector<std::vector<int>> column_marks(static_cast<size_t>(bx1 - bx0));
  for (const auto& e : edges) {
    const int mark = std::clamp(e.y + 1, 0, h);
    if (mark >= h) continue;  // no pixel row strictly above
    for (int x = e.x0; x < e.x1; ++x) column_marks[x - bx0].push_back(mark);
  }

  parallel_for(bx1 - bx0, [&](int begin, int end) {
    for (int ci = begin; ci < end; ++ci) {
      const auto& marks = column_marks[ci];
      if (marks.empty()) continue;
      const int x = bx0 + ci;
      std::vector<int> delta(h + 1, 0);
      for (int m : marks) delta[m]++;
      int count = 0;
      for (int y = 0; y < h; ++y) {
        count += delta[y];
        if (count & 1) mask.at(x, y) = 1.0;
      }
    }
  });
  return mask;
}

EdgeGradient compute_edge_gradients(const RealGrid& dl_dm, const SegmentSet& merged,
                                    bool mean_over_segment, RasterStats* stats) {
  EdgeGradient out;
  out.rows.assign(merged.segments.size(), {0.0, 0.0, 0.0, 0.0});
  for (size_t i = 0; i < merged.segments.size(); ++i) {
    const Segment& s = merged.segments[i];
    // Probe the first pixel outside the mask along +v. With the half-open
    // raster convention (inside spans [min_x, max_x) x (min_y, max_y]) the
    // floored midpoint already sits outside for bottom/right edges but inside
    // for top/left ones, hence the one-pixel shift there.
    const int ox = s.vel.x < 0 ? -1 : 0;
    const int oy = s.vel.y > 0 ? 1 : 0;
    double g_mid = 0.0;
    if (mean_over_segment) {
      const int x0 = static_cast<int>(std::floor(std::min(s.start.x, s.end.x))) + ox;
      const int x1 = static_cast<int>(std::floor(std::max(s.start.x, s.end.x))) + ox;
      const int y0 = static_cast<int>(std::floor(std::min(s.start.y, s.end.y))) + oy;
      const int y1 = static_cast<int>(std::floor(std::max(s.start.y, s.end.y))) + oy;
      double sum = 0.0;
      int cnt = 0;
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
          if (dl_dm.in_bounds(x, y)) {
            sum += dl_dm.at(x, y);
            cnt++;
          }
      if (cnt > 0) g_mid = sum / cnt;
      else if (stats) stats->out_of_bounds_midpoints++;
    } else {
      const int mx = static_cast<int>(std::floor((s.start.x + s.end.x) / 2.0)) + ox;
      const int my = static_cast<int>(std::floor((s.start.y + s.end.y) / 2.0)) + oy;
      if (dl_dm.in_bounds(mx, my)) {
        g_mid = dl_dm.at(mx, my);
      } else if (stats) {
        stats->out_of_bounds_midpoints++;
      }
    }
    out.rows[i] = {g_mid * s.vel.x, g_mid * s.vel.y, g_mid * s.vel.x, g_mid * s.vel.y};
  }
  return out;
}

SegmentSet apply_step(const SegmentSet& segset, const EdgeGradient& grads, double lr) {
  SegmentSet out = segset;
  for (size_t i = 0; i < out.segments.size(); ++i) {
    const auto& g = grads.rows[i];
    if (!std::isfinite(g[0]) || !std::isfinite(g[1]) || !std::isfinite(g[2]) ||
        !std::isfinite(g[3]))
      continue;
    Segment& s = out.segments[i];
    s.start.x -= lr * g[0];
    s.start.y -= lr * g[1];
    s.end.x -= lr * g[2];
    s.end.y -= lr * g[3];
  }
  return out;
}

}  // namespace opc
