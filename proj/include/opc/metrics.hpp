#pragma once

#include <string>
#include <vector>

#include "opc/grid.hpp"
#include "opc/loss.hpp"

namespace opc {

struct MetricsReport {
  double l2 = 0.0;        // nm^2
  double pvb = 0.0;       // nm^2
  int epe_count = 0;
  int shots = 0;
  double tat_seconds = 0.0;
  double initial_l2 = 0.0;  // hard-threshold L2 before optimization
};

// Hamming distance between two binary images (squared L2 on {0,1} grids).
double metric_l2(const RealGrid& z_nom_binary, const RealGrid& target);

double metric_pvb(const RealGrid& z_max_binary, const RealGrid& z_min_binary);

// Number of EPE samples where the printed contour deviates from the target
// edge by more than th_epe pixels along the edge normal (strict >). Scan
// length is capped at 2*th_epe.
int metric_epe(const RealGrid& z_nom_binary, const RealGrid& target,
               const EpeSamplePlan& plan);

struct Rect {
  int x0, y0, x1, y1;  // half-open [x0,x1) x [y0,y1)
};

// Greedy horizontal-slab decomposition: row runs merged downward while their
// x-extents match. Union reproduces the mask exactly.
std::vector<Rect> decompose_rectangles(const RealGrid& mask);

int shot_count(const RealGrid& mask);

std::string metrics_to_json(const MetricsReport& report);

}  // namespace opc
