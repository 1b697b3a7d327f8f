#include "opc/sraf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opc/loss.hpp"

namespace opc {

namespace {

// Chebyshev distance to the nearest target pixel, two-pass sweep.
Grid<int> chebyshev_distance(const RealGrid& target) {
  const int w = target.width(), h = target.height();
  const int inf = w + h + 2;
  Grid<int> d(w, h, inf);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (target.at(x, y) > 0.5) d.at(x, y) = 0;
  auto relax = [&](int x, int y, int nx, int ny) {
    if (nx < 0 || nx >= w || ny < 0 || ny >= h) return;
    d.at(x, y) = std::min(d.at(x, y), d.at(nx, ny) + 1);
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      relax(x, y, x - 1, y);
      relax(x, y, x, y - 1);
      relax(x, y, x - 1, y - 1);
      relax(x, y, x + 1, y - 1);
    }
  for (int y = h - 1; y >= 0; --y)
    for (int x = w - 1; x >= 0; --x) {
      relax(x, y, x + 1, y);
      relax(x, y, x, y + 1);
      relax(x, y, x + 1, y + 1);
      relax(x, y, x - 1, y + 1);
    }
  return d;
}

}  // namespace

std::vector<SrafSeed> generate_sraf_seeds(const RealGrid& lowres_target,
                                          const KernelSet& lowres_kernels,
                                          const SrafConfig& config, double alpha,
                                          double i_th) {
  const int w = lowres_target.width(), h = lowres_target.height();
  LithoSim sim(lowres_kernels, w, h);
  const auto fields = sim.simulate_full(lowres_target);
  const RealGrid z = resist_sigmoid(fields.intensity, alpha, i_th);
  const RealGrid grad = grad_l2(z, lowres_target, sim, fields, alpha);

  const auto dist = chebyshev_distance(lowres_target);
  const double up = config.upsample;
  const int clearance_lr = static_cast<int>(
      std::ceil((config.clearance + config.seed_size / 2.0) / up));
  const int separation_lr =
      static_cast<int>(std::ceil((config.clearance + config.seed_size) / up));

  std::vector<SrafSeed> candidates;
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      if (dist.at(x, y) < clearance_lr) continue;
      const double g = grad.at(x, y);
      if (g >= -1e-12) continue;  // negative, and above FFT round-off
      bool is_min = true;
      for (int dy = -1; dy <= 1 && is_min; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (grad.at(x + dx, y + dy) < g) {
            is_min = false;
            break;
          }
        }
      if (is_min) candidates.push_back({x, y, g});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const SrafSeed& a, const SrafSeed& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.cy != b.cy) return a.cy < b.cy;
    return a.cx < b.cx;
  });

  std::vector<SrafSeed> seeds;
  if (candidates.empty()) return seeds;
  // drop numerical dust: anything weaker than 1e-6 of the best candidate is
  // FFT round-off, not a real imaging minimum
  const double floor = candidates.front().score * 1e-6;
  for (const auto& c : candidates) {
    if (static_cast<int>(seeds.size()) >= config.max_srafs) break;
    if (c.score > floor) break;
    bool clear = true;
    for (const auto& s : seeds) {
      // Euclidean, not Chebyshev: the metric must be rotation-invariant so a
      // symmetric minima ring is kept or culled as a whole
      const double dx = s.cx - c.cx, dy = s.cy - c.cy;
      if (std::hypot(dx, dy) < separation_lr) {
        clear = false;
        break;
      }
    }
    if (clear) seeds.push_back(c);
  }
  return seeds;
}

std::vector<Polygon> seeds_to_polygons(const std::vector<SrafSeed>& seeds,
                                       const SrafConfig& config) {
  std::vector<Polygon> polys;
  const double up = config.upsample;
  const double half = config.seed_size / 2.0;
  for (const auto& s : seeds) {
    const double cx = s.cx * up + up / 2.0;
    const double cy = s.cy * up + up / 2.0;
    const double x0 = std::round(cx - half), x1 = std::round(cx + half);
    const double y0 = std::round(cy - half), y1 = std::round(cy + half);
    polys.push_back(Polygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}});
  }
  return polys;
}

}  // namespace opc
