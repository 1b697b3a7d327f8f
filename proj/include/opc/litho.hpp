#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "opc/grid.hpp"

namespace opc {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct KernelSet {
  int size = 0;                                         // K, odd
  std::vector<std::vector<std::complex<float>>> kernels;  // N_k grids of K*K
  std::vector<double> weights;                          // sigma_i, descending
  std::string label;

  int count() const { return static_cast<int>(kernels.size()); }
};

struct ProcessCorner {
  double dose_scale = 1.0;
  int defocus_kernel_index = -1;  // index into alternate kernel sets, -1 = nominal
};

// Deterministic seeded low-pass kernel stack standing in for an external
// lithography recipe. Radially symmetric complex Gaussians with geometrically
// decaying weights; normalized so a full-clear mask images to intensity 1.
KernelSet make_synthetic_kernels(int size, int n_k, double na_proxy, uint64_t seed);

// SOCS imaging engine for one kernel set and image size. Kernel spectra are
// precomputed; simulate calls are pure and safe to run concurrently.
class LithoSim {
 public:
  LithoSim(const KernelSet& kernels, int w, int h);

  struct Fields {
    RealGrid intensity;                  // I = sum_i sigma_i |M (x) h_i|^2
    std::vector<ComplexGrid> amplitudes;  // per-kernel M (x) h_i
  };

  Fields simulate_full(const RealGrid& mask) const;
  RealGrid simulate(const RealGrid& mask) const;

  // Image-domain gradient through one resist channel: for pixel-weight field
  // p = dL/dZ and resist image z = sigmoid(alpha*(dose*I - Ith)), returns
  //   sum_i sigma_i { h_i' (x) [p . alpha dose z(1-z) . (M (x) h_i)^*] + conj pair },
  // which is real by conjugate symmetry. Accumulation order is kernel-major.
  RealGrid backprop(const RealGrid& p, const RealGrid& z, double dose, double alpha,
                    const Fields& fields) const;

  int width() const { return w_; }
  int height() const { return h_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  int w_, h_;
  std::vector<double> weights_;
  std::vector<ComplexGrid> kernel_fft_;       // FFT of padded h_i
  std::vector<ComplexGrid> flip_kernel_fft_;  // FFT of padded h_i' (180-degree flip)
};

RealGrid simulate(const RealGrid& mask, const KernelSet& kernels);

RealGrid resist_hard(const RealGrid& intensity, double i_th);
RealGrid resist_sigmoid(const RealGrid& intensity, double alpha, double i_th);

struct CornerImages {
  RealGrid z_nom, z_max, z_min;
  double dose_nom = 1.0, dose_max = 1.0, dose_min = 1.0;
};

// Sigmoid resist images at the nominal / max-dose / min-dose corners. Dose is
// applied as I * dose_scale before thresholding. A corner may reference an
// alternate (defocus) kernel set; the nominal corner (dose 1.0) is required.
CornerImages simulate_corners(const RealGrid& mask, const KernelSet& kernels,
                              const std::vector<ProcessCorner>& corners, double alpha,
                              double i_th,
                              const std::vector<KernelSet>* alternates = nullptr);

// Same from a precomputed intensity field (dose-only corners).
CornerImages corner_resists(const RealGrid& intensity,
                            const std::vector<ProcessCorner>& corners, double alpha,
                            double i_th);

}  // namespace opc
