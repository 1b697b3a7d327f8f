#include "opc/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "nlohmann/json.hpp"

namespace opc {

double metric_l2(const RealGrid& z_nom_binary, const RealGrid& target) {
  if (z_nom_binary.width() != target.width() ||
      z_nom_binary.height() != target.height())
    throw ConfigError("metric_l2 shape mismatch");
  double count = 0.0;
  for (size_t i = 0; i < z_nom_binary.size(); ++i)
    if ((z_nom_binary[i] > 0.5) != (target[i] > 0.5)) count += 1.0;
  return count;
}

double metric_pvb(const RealGrid& z_max_binary, const RealGrid& z_min_binary) {
  return metric_l2(z_max_binary, z_min_binary);
}

int metric_epe(const RealGrid& z_nom_binary, const RealGrid& target,
               const EpeSamplePlan& plan) {
  const int cap = 2 * plan.th_epe;
  int violations = 0;
  for (const auto& s : plan.samples) {
    // boundary-adjacent interior pixel
    int qx = s.x, qy = s.y;
    if (!(target.in_bounds(qx, qy) && target.at(qx, qy) > 0.5)) {
      qx += s.inward_x;
      qy += s.inward_y;
    }
    if (!target.in_bounds(qx, qy)) continue;
    int deviation = 0;
    if (z_nom_binary.at(qx, qy) < 0.5) {
      // under-print: count missing pixels marching inward
      int x = qx, y = qy;
      while (deviation < cap && z_nom_binary.in_bounds(x, y) &&
             z_nom_binary.at(x, y) < 0.5) {
        deviation++;
        x += s.inward_x;
        y += s.inward_y;
      }
    } else {
      // over-print: count printed pixels marching outward past the edge
      int x = qx - s.inward_x, y = qy - s.inward_y;
      while (deviation < cap && z_nom_binary.in_bounds(x, y) &&
             z_nom_binary.at(x, y) > 0.5) {
        deviation++;
        x -= s.inward_x;
        y -= s.inward_y;
      }
    }
    if (deviation > plan.th_epe) violations++;
  }
  return violations;
}

std::vector<Rect> decompose_rectangles(const RealGrid& mask) {
  const int w = mask.width(), h = mask.height();
  std::vector<Rect> done;
  std::vector<Rect> active;  // open slabs from the previous row
  for (int y = 0; y < h; ++y) {
    std::vector<Rect> runs;
    int x = 0;
    while (x < w) {
      if (mask.at(x, y) > 0.5) {
        const int x0 = x;
        while (x < w && mask.at(x, y) > 0.5) ++x;
        runs.push_back({x0, y, x, y + 1});
      } else {
        ++x;
      }
    }
    std::vector<Rect> next;
    for (const auto& r : runs) {
      bool merged = false;
      for (auto& a : active) {
        if (a.x0 == r.x0 && a.x1 == r.x1 && a.y1 == y) {
          next.push_back({a.x0, a.y0, a.x1, y + 1});
          a.y1 = -1;  // consumed
          merged = true;
          break;
        }
      }
      if (!merged) next.push_back(r);
    }
    for (const auto& a : active)
      if (a.y1 != -1) done.push_back(a);
    active = std::move(next);
  }
  for (const auto& a : active) done.push_back(a);
  return done;
}

int shot_count(const RealGrid& mask) {
  return static_cast<int>(decompose_rectangles(mask).size());
}

std::string metrics_to_json(const MetricsReport& r) {
  nlohmann::json j{{"l2", r.l2},
                   {"pvb", r.pvb},
                   {"epe_count", r.epe_count},
                   {"shots", r.shots},
                   {"tat_seconds", r.tat_seconds},
                   {"initial_l2", r.initial_l2}};
  return j.dump(2);
}

}  // namespace opc
