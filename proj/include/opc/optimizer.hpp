#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opc/geometry.hpp"
#include "opc/grid.hpp"
#include "opc/litho.hpp"
#include "opc/loss.hpp"
#include "opc/metrics.hpp"
#include "opc/mrc.hpp"
#include "opc/sraf.hpp"

namespace opc {

struct OptimizerConfig {
  int iterations = 100;
  double learning_rate = 1.0;   // px per unit gradient
  double seg_length = 80.0;     // nm
  double alpha = 50.0, beta = 50.0, gamma = 50.0;
  LossWeights weights;          // (1, 0.9, 100)
  int th_epe = 15;
  double i_th = 0.225;
  std::vector<ProcessCorner> corners = {{0.98}, {1.0}, {1.02}};
  bool mrc_enabled = true;
  bool sraf_enabled = false;
  uint64_t seed = 0;
  double max_shift = 2.0;       // px per step, gradient clipping
  int width = 0, height = 0;    // 0 = derive from layout
  MrcRuleSet rules;
  SrafConfig sraf;
  bool early_stop = false;
  bool mean_segment_gradient = false;
};

struct IterationLog {
  int iter = 0;
  double l2 = 0.0, pvb = 0.0, epe = 0.0, total = 0.0;
  double max_displacement = 0.0;
  int gate_activations = 0;
};

struct OptimizeResult {
  SegmentSet final_segments;   // merged, rounded
  MaskGrid final_mask;
  MaskGrid target_mask;
  std::vector<Polygon> final_polygons;
  MetricsReport metrics;
  std::vector<IterationLog> log;
  std::vector<SrafSeed> seeds;  // empty unless SRAFs were used
};

// The full loop: round -> merge corners -> rasterize -> simulate -> loss,
// then image gradient -> edge gradients -> MRC gating -> gradient step.
// Metrics use the hard-threshold resist, computed once at the end.
OptimizeResult optimize(const std::vector<Polygon>& target, const OptimizerConfig& config,
                        const KernelSet& kernels);

// Same loop with SRAF seed rectangles joining the segment set. SRAFs that
// print at nominal dose or collapse below the width floor are pruned.
OptimizeResult optimize_with_srafs(const std::vector<Polygon>& target,
                                   const std::vector<SrafSeed>& seeds,
                                   const OptimizerConfig& config,
                                   const KernelSet& kernels);

struct RunOverrides {
  std::optional<std::string> layout;
  std::optional<std::string> kernels;
  std::optional<std::string> out_dir;
};

// Loads layout + kernels + rules from a JSON config file, runs optimize, and
// writes mask.pgm, geometry.json, metrics.json, convergence.csv to the output
// directory. Returns a process exit status.
int run_from_config(const std::string& config_path, const RunOverrides& overrides = {});

OptimizerConfig parse_config_json(const std::string& json_text);

}  // namespace opc
