#include "opc/loss.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace opc {

EpeSamplePlan make_epe_plan(const SegmentSet& target_segments, int th_epe, double gamma,
                            int w, int h) {
  if (th_epe < 1) throw ConfigError("th_epe must be at least 1");
  EpeSamplePlan plan;
  plan.th_epe = th_epe;
  plan.gamma = gamma;
  for (const auto& ring : target_segments.rings) {
    // edge extents, for corner exclusion
    std::map<int, std::pair<Point, Point>> edge_ends;
    for (int idx : ring) {
      const Segment& s = target_segments.segments[idx];
      auto it = edge_ends.find(s.edge_id);
      if (it == edge_ends.end()) {
        edge_ends[s.edge_id] = {s.start, s.end};
      } else {
        it->second.second = s.end;
      }
    }
    for (int idx : ring) {
      const Segment& s = target_segments.segments[idx];
      const double mx = (s.start.x + s.end.x) / 2.0;
      const double my = (s.start.y + s.end.y) / 2.0;
      const auto& ends = edge_ends[s.edge_id];
      const double d0 = std::abs(mx - ends.first.x) + std::abs(my - ends.first.y);
      const double d1 = std::abs(mx - ends.second.x) + std::abs(my - ends.second.y);
      if (std::min(d0, d1) < th_epe) continue;
      EpeSample sample;
      sample.x = static_cast<int>(std::floor(mx));
      sample.y = static_cast<int>(std::floor(my));
      if (sample.x < 0 || sample.x >= w || sample.y < 0 || sample.y >= h) continue;
      sample.horizontal = s.dir.x != 0.0;
      sample.inward_x = static_cast<int>(-s.vel.x);
      sample.inward_y = static_cast<int>(-s.vel.y);
      plan.samples.push_back(sample);
    }
  }
  return plan;
}

double loss_l2(const RealGrid& z_nom, const RealGrid& target) {
  if (z_nom.width() != target.width() || z_nom.height() != target.height())
    throw ConfigError("loss_l2 shape mismatch");
  double sum = 0.0;
  for (size_t i = 0; i < z_nom.size(); ++i) {
    const double d = z_nom[i] - target[i];
    sum += d * d;
  }
  return sum;
}

double loss_pvb(const RealGrid& z_max, const RealGrid& z_min) {
  return loss_l2(z_max, z_min);
}

std::vector<double> epe_distance_sums(const RealGrid& z_nom, const RealGrid& target,
                                      const EpeSamplePlan& plan) {
  std::vector<double> sums;
  sums.reserve(plan.samples.size());
  const int w = z_nom.width(), h = z_nom.height();
  for (const auto& s : plan.samples) {
    double acc = 0.0;
    for (int k = -plan.th_epe; k <= plan.th_epe; ++k) {
      int x = s.x, y = s.y;
      if (s.horizontal)
        y = std::clamp(s.y + k, 0, h - 1);
      else
        x = std::clamp(s.x + k, 0, w - 1);
      const double d = z_nom.at(x, y) - target.at(x, y);
      acc += d * d;
    }
    sums.push_back(acc);
  }
  return sums;
}

double loss_epe(const std::vector<double>& d_sums, double gamma) {
  double total = 0.0;
  for (double d : d_sums) total += 1.0 / (1.0 + std::exp(-gamma * d));
  return total;
}

RealGrid grad_l2(const RealGrid& z_nom, const RealGrid& target, const LithoSim& sim,
                 const LithoSim::Fields& fields, double alpha) {
  RealGrid p(z_nom.width(), z_nom.height());
  for (size_t i = 0; i < p.size(); ++i) p[i] = 2.0 * (z_nom[i] - target[i]);
  return sim.backprop(p, z_nom, 1.0, alpha, fields);
}

RealGrid grad_pvb(const CornerImages& corners, const LithoSim& sim,
                  const LithoSim::Fields& fields, double alpha) {
  const int w = corners.z_max.width(), h = corners.z_max.height();
  RealGrid p_min(w, h), p_max(w, h);
  for (size_t i = 0; i < p_min.size(); ++i) {
    const double d = corners.z_min[i] - corners.z_max[i];
    p_min[i] = 2.0 * d;   // dL/dZ_min
    p_max[i] = -2.0 * d;  // dL/dZ_max
  }
  RealGrid g = sim.backprop(p_min, corners.z_min, corners.dose_min, alpha, fields);
  const RealGrid g_max =
      sim.backprop(p_max, corners.z_max, corners.dose_max, alpha, fields);
  for (size_t i = 0; i < g.size(); ++i) g[i] += g_max[i];
  return g;
}

RealGrid grad_epe(const RealGrid& z_nom, const RealGrid& target,
                  const EpeSamplePlan& plan, const LithoSim& sim,
                  const LithoSim::Fields& fields, double alpha, double gamma) {
  const int w = z_nom.width(), h = z_nom.height();
  const auto sums = epe_distance_sums(z_nom, target, plan);
  RealGrid p(w, h, 0.0);
  for (size_t si = 0; si < plan.samples.size(); ++si) {
    const auto& s = plan.samples[si];
    const double sig = 1.0 / (1.0 + std::exp(-gamma * sums[si]));
    const double coef = gamma * sig * (1.0 - sig);
    for (int k = -plan.th_epe; k <= plan.th_epe; ++k) {
      int x = s.x, y = s.y;
      if (s.horizontal)
        y = std::clamp(s.y + k, 0, h - 1);
      else
        x = std::clamp(s.x + k, 0, w - 1);
      p.at(x, y) += coef * 2.0 * (z_nom.at(x, y) - target.at(x, y));
    }
  }
  return sim.backprop(p, z_nom, 1.0, alpha, fields);
}

LossBundle total_loss_and_grad(const CornerImages& corners, const RealGrid& target,
                               const EpeSamplePlan& plan, const LossWeights& weights,
                               const LithoSim& sim, const LithoSim::Fields& fields,
                               double alpha, double gamma) {
  if (weights.w1 == 0.0 && weights.w2 == 0.0 && weights.w3 == 0.0)
    throw ConfigError("loss weights must not all be zero");
  LossBundle out;
  out.l2 = loss_l2(corners.z_nom, target);
  out.pvb = loss_pvb(corners.z_max, corners.z_min);
  out.epe = loss_epe(epe_distance_sums(corners.z_nom, target, plan), gamma);
  out.total = weights.w1 * out.l2 + weights.w2 * out.pvb + weights.w3 * out.epe;

  out.dl_dm = RealGrid(target.width(), target.height(), 0.0);
  if (weights.w1 != 0.0) {
    const RealGrid g = grad_l2(corners.z_nom, target, sim, fields, alpha);
    for (size_t i = 0; i < g.size(); ++i) out.dl_dm[i] += weights.w1 * g[i];
  }
  if (weights.w2 != 0.0) {
    const RealGrid g = grad_pvb(corners, sim, fields, alpha);
    for (size_t i = 0; i < g.size(); ++i) out.dl_dm[i] += weights.w2 * g[i];
  }
  if (weights.w3 != 0.0) {
    const RealGrid g = grad_epe(corners.z_nom, target, plan, sim, fields, alpha, gamma);
    for (size_t i = 0; i < g.size(); ++i) out.dl_dm[i] += weights.w3 * g[i];
  }
  return out;
}

}  // namespace opc
