#pragma once

#include <vector>

#include "opc/geometry.hpp"
#include "opc/grid.hpp"
#include "opc/litho.hpp"

namespace opc {

struct EpeSample {
  int x = 0, y = 0;        // boundary pixel on the target edge
  bool horizontal = false;  // sample lies on a horizontal target edge
  int inward_x = 0, inward_y = 0;  // unit step toward the target interior
};

struct EpeSamplePlan {
  std::vector<EpeSample> samples;
  int th_epe = 15;
  double gamma = 50.0;
};

// One sample per target segment midpoint, excluding segments whose midpoint
// sits within th_epe pixels of an original polygon corner.
EpeSamplePlan make_epe_plan(const SegmentSet& target_segments, int th_epe, double gamma,
                            int w, int h);

double loss_l2(const RealGrid& z_nom, const RealGrid& target);
double loss_pvb(const RealGrid& z_max, const RealGrid& z_min);

// Window sums of D = (Z - T)^2 around each sample: along y for horizontal
// edge samples, along x for vertical ones. Indices clamp at image borders.
std::vector<double> epe_distance_sums(const RealGrid& z_nom, const RealGrid& target,
                                      const EpeSamplePlan& plan);

double loss_epe(const std::vector<double>& d_sums, double gamma);

RealGrid grad_l2(const RealGrid& z_nom, const RealGrid& target, const LithoSim& sim,
                 const LithoSim::Fields& fields, double alpha);

RealGrid grad_pvb(const CornerImages& corners, const LithoSim& sim,
                  const LithoSim::Fields& fields, double alpha);

RealGrid grad_epe(const RealGrid& z_nom, const RealGrid& target,
                  const EpeSamplePlan& plan, const LithoSim& sim,
                  const LithoSim::Fields& fields, double alpha, double gamma);

struct LossWeights {
  double w1 = 1.0, w2 = 0.9, w3 = 100.0;
};

struct LossBundle {
  double l2 = 0.0, pvb = 0.0, epe = 0.0, total = 0.0;
  RealGrid dl_dm;
};

LossBundle total_loss_and_grad(const CornerImages& corners, const RealGrid& target,
                               const EpeSamplePlan& plan, const LossWeights& weights,
                               const LithoSim& sim, const LithoSim::Fields& fields,
                               double alpha, double gamma);

}  // namespace opc
