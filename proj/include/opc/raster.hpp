#pragma once

#include <array>
#include <vector>

#include "opc/geometry.hpp"
#include "opc/grid.hpp"

namespace opc {

struct RasterStats {
  int clamped_edges = 0;
  int out_of_bounds_midpoints = 0;
};

// True iff a ray from p crosses horizontal segment s, using the cross-product
// predicate: with v1 = p - start, v2 = p - end,
//   (v1.x < 0 && v2.x >= 0 && cross < 0) || (v1.x >= 0 && v2.x < 0 && cross > 0).
// Net effect for a horizontal segment: min_x <= p.x < max_x and seg_y < p.y.
bool check_cross(const Point& p, const Segment& s);

// Even-odd rasterization of merged edge parameters onto a W x H binary grid.
// Only horizontal boundary edges are tested; pixels are sampled at integer
// lattice points. Deterministic and independent of thread count (integer
// crossing counts only).
MaskGrid rasterize(const SegmentSet& merged, int w, int h, RasterStats* stats = nullptr);

// Per-segment gradient rows, mirroring the [N_s, 2, 2] segment tensor:
// rows[i] = {g1x, g1y, g2x, g2y}, both endpoints identical and parallel to
// the segment velocity.
struct EdgeGradient {
  std::vector<std::array<double, 4>> rows;
};

// Picks dL/dM at each segment's floored midpoint, shifted to the first pixel
// outside the mask along the outward velocity, and projects it onto the
// velocity. mean_over_segment averages dL/dM over the segment's (shifted)
// pixel footprint instead (experimental mode, off by default).
EdgeGradient compute_edge_gradients(const RealGrid& dl_dm, const SegmentSet& merged,
                                    bool mean_over_segment = false,
                                    RasterStats* stats = nullptr);

// Gradient-descent update: every endpoint moves by -lr * grad, i.e. strictly
// along its velocity axis. Non-finite gradients skip the segment.
SegmentSet apply_step(const SegmentSet& segset, const EdgeGradient& grads, double lr);

}  // namespace opc
