#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "opc/geometry.hpp"
#include "opc/grid.hpp"

namespace opc::fixtures {

struct Fixture {
  std::string name;
  std::vector<Polygon> layout;
};

// Deterministic named layouts: square, lines, contact, comb, staircase, donut.
// scale controls the feature size in nm (e.g. square(400) is 400x400).
Fixture make_fixture(const std::string& name, double scale);

// Seeded random Manhattan layout (rectangles, histogram polygons, donuts)
// fitting inside a w x h clip.
std::vector<Polygon> random_layout(uint64_t seed, int w, int h);

// Sequential even-odd point-in-polygon rasterization. Reference for the
// parallel rasterizer; intentionally brute force, no culling, no sharing of
// raster code. Convention: pixel (x, y) is inside iff a downward ray crosses
// an odd number of horizontal polygon edges (half-open [min_x, max_x) span,
// strict edge_y < y).
MaskGrid oracle_rasterize(const std::vector<Polygon>& polygons, int w, int h);

// Direct O(N^2 K^2) periodic convolution, reference for spectral convolution.
ComplexGrid oracle_convolve(const RealGrid& mask,
                            const std::vector<std::complex<float>>& kernel, int ksize);

// Central finite differences of an arbitrary scalar loss at listed pixels.
std::vector<double> oracle_fd_gradient(
    const std::function<double(const RealGrid&)>& loss_fn, const RealGrid& mask,
    const std::vector<std::pair<int, int>>& pixels, double epsilon);

}  // namespace opc::fixtures
