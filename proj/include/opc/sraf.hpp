#pragma once

#include <vector>

#include "opc/geometry.hpp"
#include "opc/grid.hpp"
#include "opc/litho.hpp"

namespace opc {

struct SrafSeed {
  int cx = 0, cy = 0;   // low-resolution pixel center
  double score = 0.0;   // dL2/dM at the seed (negative = mask helps)
};

struct SrafConfig {
  int max_srafs = 64;
  double seed_size = 20.0;           // initial rectangle edge, full-res nm
  int upsample = 4;                  // low-res to full-res scale factor
  double clearance = 40.0;           // full-res nm to main pattern and peers
                                     // (default matches MrcRuleSet::min_spacing)
  double min_surviving_width = 10.0; // prune below this width, full-res nm
};

// Gradient-guided seeding on the low-resolution problem: simulate the target
// as its own mask, take the L2 image gradient, and greedily pick local minima
// (strongest mask-addition benefit) in the empty field, respecting clearance.
// Deterministic for fixed inputs.
std::vector<SrafSeed> generate_sraf_seeds(const RealGrid& lowres_target,
                                          const KernelSet& lowres_kernels,
                                          const SrafConfig& config, double alpha,
                                          double i_th);

// Seed rectangles as full-resolution polygons (counter-clockwise).
std::vector<Polygon> seeds_to_polygons(const std::vector<SrafSeed>& seeds,
                                       const SrafConfig& config);

}  // namespace opc
