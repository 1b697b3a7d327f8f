#include "opc/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace opc::fixtures {

namespace {

Polygon rect(double x0, double y0, double x1, double y1, bool ccw = true) {
  if (ccw) return Polygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
  return Polygon{{{x0, y0}, {x0, y1}, {x1, y1}, {x1, y0}}};
}

}  // namespace

Fixture make_fixture(const std::string& name, double scale) {
  const double s = scale;
  Fixture f;
  f.name = name;
  if (name == "square") {
    f.layout.push_back(rect(56, 56, 56 + s, 56 + s));
  } else if (name == "lines") {
    const double w = s / 2.0, len = 3.0 * s, x0 = s / 2.0, y0 = s / 2.0;
    for (int i = 0; i < 3; ++i)
      f.layout.push_back(rect(x0 + i * s, y0, x0 + i * s + w, y0 + len));
  } else if (name == "contact") {
    f.layout.push_back(rect(s, s, 2.0 * s, 2.0 * s));
  } else if (name == "comb") {
    // base bar with three teeth
    const double t = s / 4.0;
    f.layout.push_back(Polygon{{{0, 0},
                                {5 * t, 0},
                                {5 * t, t},
                                {4 * t, t},
                                {4 * t, 3 * t},
                                {3 * t, 3 * t},
                                {3 * t, t},
                                {2 * t, t},
                                {2 * t, 3 * t},
                                {t, 3 * t},
                                {t, t},
                                {0, t}}});
  } else if (name == "staircase") {
    f.layout.push_back(Polygon{{{0, 0},
                                {3 * s, 0},
                                {3 * s, s},
                                {2 * s, s},
                                {2 * s, 2 * s},
                                {s, 2 * s},
                                {s, 3 * s},
                                {0, 3 * s}}});
  } else if (name == "donut") {
    f.layout.push_back(rect(s / 2, s / 2, s / 2 + 3 * s, s / 2 + 3 * s, true));
    f.layout.push_back(rect(s / 2 + s, s / 2 + s, s / 2 + 2 * s, s / 2 + 2 * s, false));
  } else if (name == "square_lines") {
    // 512-px clip layout: one square plus three vertical lines
    f.layout.push_back(rect(60, 156, 260, 356));
    for (int i = 0; i < 3; ++i)
      f.layout.push_back(rect(300 + i * 120, 116, 360 + i * 120, 396));
  } else {
    throw GeometryError("unknown fixture: " + name);
  }
  return f;
}

namespace {

int pick(std::mt19937_64& rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

}  // namespace

std::vector<Polygon> random_layout(uint64_t seed, int w, int h) {
  std::mt19937_64 rng(seed);
  std::vector<Polygon> polys;
  const int shapes = pick(rng, 1, 3);
  for (int s = 0; s < shapes; ++s) {
    const int kind = pick(rng, 0, 2);
    if (kind == 0) {  // rectangle
      const int x0 = pick(rng, 0, w - 5), y0 = pick(rng, 0, h - 5);
      const int x1 = pick(rng, x0 + 3, std::min(w - 1, x0 + w / 2));
      const int y1 = pick(rng, y0 + 3, std::min(h - 1, y0 + h / 2));
      polys.push_back(rect(x0, y0, x1, y1));
    } else if (kind == 1) {  // histogram polygon
      const int cols = pick(rng, 2, 5);
      std::set<int> xs;
      while (static_cast<int>(xs.size()) < cols + 1)
        xs.insert(pick(rng, 2, w - 3));
      std::vector<int> bx(xs.begin(), xs.end());
      const int y0 = pick(rng, 2, h / 2);
      std::vector<int> heights(cols);
      int prev = 0;
      for (int c = 0; c < cols; ++c) {
        int hh;
        do {
          hh = pick(rng, 2, h - y0 - 2);
        } while (hh == prev);
        heights[c] = hh;
        prev = hh;
      }
      std::vector<Point> v;
      v.push_back({double(bx[0]), double(y0)});
      for (int c = 0; c < cols; ++c) {
        v.push_back({double(bx[c]), double(y0 + heights[c])});
        v.push_back({double(bx[c + 1]), double(y0 + heights[c])});
      }
      v.push_back({double(bx[cols]), double(y0)});
      polys.push_back(Polygon{std::move(v)});
    } else {  // donut
      const int x0 = pick(rng, 0, w - 12), y0 = pick(rng, 0, h - 12);
      const int x1 = pick(rng, x0 + 9, std::min(w - 1, x0 + w / 2 + 9));
      const int y1 = pick(rng, y0 + 9, std::min(h - 1, y0 + h / 2 + 9));
      polys.push_back(rect(x0, y0, x1, y1));
      const int ix0 = x0 + pick(rng, 2, (x1 - x0) / 3);
      const int iy0 = y0 + pick(rng, 2, (y1 - y0) / 3);
      const int ix1 = x1 - pick(rng, 2, (x1 - x0) / 3);
      const int iy1 = y1 - pick(rng, 2, (y1 - y0) / 3);
      if (ix1 > ix0 && iy1 > iy0) polys.push_back(rect(ix0, iy0, ix1, iy1, false));
    }
  }
  return polys;
}

MaskGrid oracle_rasterize(const std::vector<Polygon>& polygons, int w, int h) {
  MaskGrid mask(w, h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int crossings = 0;
      for (const auto& poly : polygons) {
        const int n = static_cast<int>(poly.vertices.size());
        for (int i = 0; i < n; ++i) {
          const Point& a = poly.vertices[i];
          const Point& b = poly.vertices[(i + 1) % n];
          if (a.y != b.y) continue;  // vertical edges never cross a vertical ray
          const double lo = std::min(a.x, b.x), hi = std::max(a.x, b.x);
          if (lo <= x && x < hi && a.y < y) crossings++;
        }
      }
      if (crossings % 2 == 1) mask.at(x, y) = 1.0;
    }
  }
  return mask;
}

ComplexGrid oracle_convolve(const RealGrid& mask,
                            const std::vector<std::complex<float>>& kernel, int ksize) {
  const int w = mask.width(), h = mask.height();
  const int c = ksize / 2;
  ComplexGrid out(w, h, {0.0, 0.0});
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::complex<double> acc{0.0, 0.0};
      for (int ky = 0; ky < ksize; ++ky)
        for (int kx = 0; kx < ksize; ++kx) {
          const int sx = ((x - (kx - c)) % w + w) % w;
          const int sy = ((y - (ky - c)) % h + h) % h;
          const std::complex<float> kv = kernel[static_cast<size_t>(ky) * ksize + kx];
          acc += mask.at(sx, sy) * std::complex<double>(kv.real(), kv.imag());
        }
      out.at(x, y) = acc;
    }
  return out;
}

std::vector<double> oracle_fd_gradient(
    const std::function<double(const RealGrid&)>& loss_fn, const RealGrid& mask,
    const std::vector<std::pair<int, int>>& pixels, double epsilon) {
  std::vector<double> grads;
  grads.reserve(pixels.size());
  RealGrid m = mask;
  for (const auto& [x, y] : pixels) {
    const double orig = m.at(x, y);
    m.at(x, y) = orig + epsilon;
    const double hi = loss_fn(m);
    m.at(x, y) = orig - epsilon;
    const double lo = loss_fn(m);
    m.at(x, y) = orig;
    grads.push_back((hi - lo) / (2.0 * epsilon));
  }
  return grads;
}

}  // namespace opc::fixtures
