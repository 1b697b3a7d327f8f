#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace opc {

struct GeometryError : std::runtime_error {
  explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

// Closed Manhattan ring; the edge from back() to front() is implicit.
// Counter-clockwise winding = filled material, clockwise = hole.
struct Polygon {
  std::vector<Point> vertices;
};

struct Segment {
  Point start;
  Point end;
  Point dir;       // unit axis vector along the segment
  Point vel;       // unit axis vector, perpendicular to dir, outward from material
  bool is_corner = false;
  int polygon_id = 0;
  int order_in_ring = 0;
  int edge_id = 0;  // index of the originating polygon edge, per ring
};

struct SegmentSet {
  std::vector<Segment> segments;
  std::vector<std::vector<int>> rings;   // per ring, ordered segment indices
  std::vector<bool> ring_is_sraf;        // parallel to rings; empty = all false

  int count() const { return static_cast<int>(segments.size()); }
  bool sraf_ring(int r) const {
    return r < static_cast<int>(ring_is_sraf.size()) && ring_is_sraf[r];
  }
};

double round_half_away(double v);

void validate_polygon(const Polygon& p);

// Splits every polygon edge into segments of at most seg_length, symmetric
// about the edge midpoint. An edge no longer than 2*seg_length yields exactly
// two segments split at its midpoint. Leftover end pieces shorter than
// min_seg_length are merged into their in-edge neighbor.
SegmentSet segment_edges(const std::vector<Polygon>& polygons, double seg_length,
                         double min_seg_length = 0.0);

// Recomputes outward-normal velocities from segment directions and ring winding.
void assign_velocities(SegmentSet& segset);

// Rounds every coordinate to the integer grid (half away from zero). The
// backward contract is the identity: gradients measured on the rounded
// geometry apply unchanged to the continuous parameters.
SegmentSet ste_round(const SegmentSet& segset);

// Re-closes rings at original polygon corners: for each pair of consecutive
// segments from different edges, the shared endpoint becomes
// (x of the vertical segment, y of the horizontal segment).
SegmentSet merge_corners(const SegmentSet& rounded);

// Closed vertex loops per ring, with implicit jog connectors between
// neighboring same-direction segments made explicit.
std::vector<std::vector<Point>> ring_polylines(const SegmentSet& merged);

// Collinear-merged output polygons from merged segments.
std::vector<Polygon> to_polygons(const SegmentSet& merged);

}  // namespace opc
