#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opc/geometry.hpp"
#include "opc/grid.hpp"
#include "opc/litho.hpp"
#include "opc/mrc.hpp"

namespace opc {

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Layout {
  std::vector<Polygon> polygons;
  int width = 0;   // clip size in px; 0 = derive from bounding box
  int height = 0;
};

// Layout JSON: {"width": W, "height": H, "polygons": [[[x,y],...], ...]}
// Vertices are integer nanometers; counter-clockwise rings are filled,
// clockwise rings are holes.
Layout load_layout(const std::string& path);
void save_layout(const Layout& layout, const std::string& path);

// Kernel binary: uint32 N_k, uint32 K, N_k float64 weights, then N_k K*K
// complex pairs (float32 real, float32 imag), all little-endian.
KernelSet load_kernels(const std::string& path);
void save_kernels(const KernelSet& kernels, const std::string& path);

MrcRuleSet load_rules(const std::string& path);

// PGM P5, 8-bit, values 0/255, rows top to bottom (y = 0 first).
void save_pgm(const RealGrid& mask, const std::string& path);
RealGrid load_pgm(const std::string& path);

// Raw row-major binary of uint8 0/1 values, documented byte order.
void save_raw(const RealGrid& mask, const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace opc
