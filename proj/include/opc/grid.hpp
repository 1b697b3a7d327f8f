#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace opc {

// Row-major 2D grid addressed as (x, y), x in [0, W), y in [0, H).
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int w, int h, T init = T{}) : w_(w), h_(h), v_(static_cast<size_t>(w) * h, init) {}

  int width() const { return w_; }
  int height() const { return h_; }
  size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  T& at(int x, int y) { return v_[static_cast<size_t>(y) * w_ + x]; }
  const T& at(int x, int y) const { return v_[static_cast<size_t>(y) * w_ + x]; }
  T& operator[](size_t i) { return v_[i]; }
  const T& operator[](size_t i) const { return v_[i]; }

  bool in_bounds(int x, int y) const { return x >= 0 && x < w_ && y >= 0 && y < h_; }

  T* data() { return v_.data(); }
  const T* data() const { return v_.data(); }

  bool operator==(const Grid&) const = default;

 private:
  int w_ = 0, h_ = 0;
  std::vector<T> v_;
};

using RealGrid = Grid<double>;
using ComplexGrid = Grid<std::complex<double>>;

// Masks hold raster transmission values; exactly {0,1} after rasterization.
using MaskGrid = RealGrid;

}  // namespace opc
