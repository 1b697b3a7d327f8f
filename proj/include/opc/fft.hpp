#pragma once

#include "opc/grid.hpp"

namespace opc {

// Unnormalized forward 2D DFT.
ComplexGrid fft2(const ComplexGrid& in);

// Inverse 2D DFT, normalized by 1/(W*H).
ComplexGrid ifft2(const ComplexGrid& in);

}  // namespace opc
