#include "opc/litho.hpp"

#include <cassert>
#include <cmath>
#include <random>

#include "opc/fft.hpp"

namespace opc {

namespace {

// Uniform double in [0,1) straight from the engine's 64-bit output, so kernel
// bytes are identical across platforms.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

ComplexGrid pad_kernel(const std::vector<std::complex<float>>& k, int ksize, int w, int h,
                       bool flip) {
  ComplexGrid out(w, h, {0.0, 0.0});
  const int c = ksize / 2;
  for (int ky = 0; ky < ksize; ++ky) {
    for (int kx = 0; kx < ksize; ++kx) {
      int dx = kx - c, dy = ky - c;
      if (flip) {
        dx = -dx;
        dy = -dy;
      }
      const int x = ((dx % w) + w) % w;
      const int y = ((dy % h) + h) % h;
      const std::complex<float> v = k[static_cast<size_t>(ky) * ksize + kx];
      out.at(x, y) += std::complex<double>(v.real(), v.imag());
    }
  }
  return out;
}

}  // namespace

KernelSet make_synthetic_kernels(int size, int n_k, double na_proxy, uint64_t seed) {
  if (size < 1 || size % 2 == 0) throw ConfigError("kernel size must be odd and positive");
  if (n_k < 1) throw ConfigError("need at least one kernel");
  if (na_proxy <= 0.0) throw ConfigError("na_proxy must be positive");

  std::mt19937_64 rng(seed);
  KernelSet ks;
  ks.size = size;
  ks.label = "synthetic";
  const int c = size / 2;
  const double s_base = static_cast<double>(size) / (6.0 * na_proxy);

  const double decay = 0.55;
  std::vector<std::vector<std::complex<double>>> raw(n_k);
  std::vector<std::complex<double>> sums(n_k);
  for (int i = 0; i < n_k; ++i) {
    ks.weights.push_back(std::pow(decay, i));
    // band-limited low-pass profile: sinc radial lobes (sign-alternating side
    // lobes, like a coherent aperture response) under a Gaussian envelope
    // first-zero radius; 2x the Gaussian scale so the main-lobe FWHM matches
    // a plain Gaussian of width s_base (sinc concentrates energy more tightly)
    const double a = 2.0 * s_base * (1.0 + 0.35 * i);
    const double env_s = 1.5 * a;
    // seeded quadratic phase, defocus-like; kernel stays radially symmetric
    const double phase = (i == 0) ? 0.0 : (uniform01(rng) - 0.5) * 1.2;
    raw[i].resize(static_cast<size_t>(size) * size);
    std::complex<double> sum{0.0, 0.0};
    for (int ky = 0; ky < size; ++ky) {
      for (int kx = 0; kx < size; ++kx) {
        const double dx = kx - c, dy = ky - c;
        const double r2 = dx * dx + dy * dy;
        const double r = std::sqrt(r2);
        const double x = 3.14159265358979323846 * r / a;
        const double lobes = r == 0.0 ? 1.0 : std::sin(x) / x;
        const double env = lobes * std::exp(-r2 / (2.0 * env_s * env_s));
        const std::complex<double> v =
            env * std::exp(std::complex<double>(0.0, phase * r2 / (c * c + 1.0)));
        raw[i][static_cast<size_t>(ky) * size + kx] = v;
        sum += v;
      }
    }
    sums[i] = sum;
  }

  // Scale amplitudes so a full-clear mask images to intensity exactly 1:
  // sum_i sigma_i |t * sum(h_i)|^2 = 1.
  double energy = 0.0;
  for (int i = 0; i < n_k; ++i) energy += ks.weights[i] * std::norm(sums[i]);
  const double t = 1.0 / std::sqrt(energy);
  for (int i = 0; i < n_k; ++i) {
    std::vector<std::complex<float>> k(raw[i].size());
    for (size_t j = 0; j < raw[i].size(); ++j) {
      const std::complex<double> v = raw[i][j] * t;
      k[j] = std::complex<float>(static_cast<float>(v.real()), static_cast<float>(v.imag()));
    }
    ks.kernels.push_back(std::move(k));
  }
  return ks;
}

LithoSim::LithoSim(const KernelSet& kernels, int w, int h) : w_(w), h_(h) {
  if (w < 1 || h < 1) throw ConfigError("image dimensions must be positive");
  if (kernels.count() < 1) throw ConfigError("empty kernel set");
  if (kernels.size > w || kernels.size > h)
    throw ConfigError("kernel larger than image");
  if (static_cast<int>(kernels.weights.size()) != kernels.count())
    throw ConfigError("kernel/weight count mismatch");
  weights_ = kernels.weights;
  for (int i = 0; i < kernels.count(); ++i) {
    kernel_fft_.push_back(fft2(pad_kernel(kernels.kernels[i], kernels.size, w, h, false)));
    flip_kernel_fft_.push_back(fft2(pad_kernel(kernels.kernels[i], kernels.size, w, h, true)));
  }
}

LithoSim::Fields LithoSim::simulate_full(const RealGrid& mask) const {
  if (mask.width() != w_ || mask.height() != h_)
    throw ConfigError("mask size does not match simulator");
  ComplexGrid mc(w_, h_);
  for (size_t i = 0; i < mask.size(); ++i) mc[i] = {mask[i], 0.0};
  const ComplexGrid mf = fft2(mc);

  Fields f;
  f.intensity = RealGrid(w_, h_, 0.0);
  for (size_t k = 0; k < kernel_fft_.size(); ++k) {
    ComplexGrid prod(w_, h_);
    for (size_t i = 0; i < prod.size(); ++i) prod[i] = mf[i] * kernel_fft_[k][i];
    ComplexGrid amp = ifft2(prod);
    for (size_t i = 0; i < amp.size(); ++i)
      f.intensity[i] += weights_[k] * std::norm(amp[i]);
    f.amplitudes.push_back(std::move(amp));
  }
  return f;
}

RealGrid LithoSim::simulate(const RealGrid& mask) const {
  return simulate_full(mask).intensity;
}

RealGrid LithoSim::backprop(const RealGrid& p, const RealGrid& z, double dose,
                            double alpha, const Fields& fields) const {
  RealGrid out(w_, h_, 0.0);
  RealGrid w(w_, h_);
  for (size_t i = 0; i < w.size(); ++i) w[i] = p[i] * alpha * dose * z[i] * (1.0 - z[i]);
  for (size_t k = 0; k < flip_kernel_fft_.size(); ++k) {
    ComplexGrid f(w_, h_);
    const ComplexGrid& amp = fields.amplitudes[k];
    for (size_t i = 0; i < f.size(); ++i) f[i] = w[i] * std::conj(amp[i]);
    ComplexGrid ff = fft2(f);
    for (size_t i = 0; i < ff.size(); ++i) ff[i] *= flip_kernel_fft_[k][i];
    const ComplexGrid conv = ifft2(ff);
    // conv + its conjugate route; imaginary parts cancel exactly
    for (size_t i = 0; i < conv.size(); ++i)
      out[i] += weights_[k] * 2.0 * conv[i].real();
  }
  return out;
}

RealGrid simulate(const RealGrid& mask, const KernelSet& kernels) {
  return LithoSim(kernels, mask.width(), mask.height()).simulate(mask);
}

RealGrid resist_hard(const RealGrid& intensity, double i_th) {
  RealGrid z(intensity.width(), intensity.height());
  for (size_t i = 0; i < z.size(); ++i) z[i] = intensity[i] > i_th ? 1.0 : 0.0;
  return z;
}

RealGrid resist_sigmoid(const RealGrid& intensity, double alpha, double i_th) {
  RealGrid z(intensity.width(), intensity.height());
  for (size_t i = 0; i < z.size(); ++i)
    z[i] = 1.0 / (1.0 + std::exp(-alpha * (intensity[i] - i_th)));
  return z;
}

CornerImages corner_resists(const RealGrid& intensity,
                            const std::vector<ProcessCorner>& corners, double alpha,
                            double i_th) {
  const ProcessCorner* nom = nullptr;
  const ProcessCorner* hi = nullptr;
  const ProcessCorner* lo = nullptr;
  for (const auto& c : corners) {
    if (c.dose_scale <= 0.0) throw ConfigError("dose_scale must be positive");
    if (c.dose_scale == 1.0) nom = &c;
    if (!hi || c.dose_scale > hi->dose_scale) hi = &c;
    if (!lo || c.dose_scale < lo->dose_scale) lo = &c;
  }
  if (!nom) throw ConfigError("corner list must include the nominal corner (dose 1.0)");

  auto resist_at = [&](double dose) {
    RealGrid scaled(intensity.width(), intensity.height());
    for (size_t i = 0; i < scaled.size(); ++i) scaled[i] = intensity[i] * dose;
    return resist_sigmoid(scaled, alpha, i_th);
  };
  CornerImages out;
  out.z_nom = resist_at(1.0);
  out.z_max = resist_at(hi->dose_scale);
  out.z_min = resist_at(lo->dose_scale);
  out.dose_max = hi->dose_scale;
  out.dose_min = lo->dose_scale;
  return out;
}

CornerImages simulate_corners(const RealGrid& mask, const KernelSet& kernels,
                              const std::vector<ProcessCorner>& corners, double alpha,
                              double i_th, const std::vector<KernelSet>* alternates) {
  bool uses_defocus = false;
  for (const auto& c : corners)
    if (c.defocus_kernel_index >= 0) uses_defocus = true;
  const RealGrid nominal_intensity = simulate(mask, kernels);
  if (!uses_defocus) return corner_resists(nominal_intensity, corners, alpha, i_th);

  const ProcessCorner* nom = nullptr;
  const ProcessCorner* hi = nullptr;
  const ProcessCorner* lo = nullptr;
  for (const auto& c : corners) {
    if (c.dose_scale == 1.0 && c.defocus_kernel_index < 0) nom = &c;
    if (!hi || c.dose_scale > hi->dose_scale) hi = &c;
    if (!lo || c.dose_scale < lo->dose_scale) lo = &c;
  }
  if (!nom) throw ConfigError("corner list must include the nominal corner (dose 1.0)");

  auto intensity_for = [&](const ProcessCorner& c) {
    if (c.defocus_kernel_index < 0) return nominal_intensity;
    if (!alternates || c.defocus_kernel_index >= static_cast<int>(alternates->size()))
      throw ConfigError("defocus kernel index without matching kernel set");
    return simulate(mask, (*alternates)[c.defocus_kernel_index]);
  };
  auto resist_for = [&](const ProcessCorner& c) {
    RealGrid intensity = intensity_for(c);
    for (size_t i = 0; i < intensity.size(); ++i) intensity[i] *= c.dose_scale;
    return resist_sigmoid(intensity, alpha, i_th);
  };
  CornerImages out;
  out.z_nom = resist_for(*nom);
  out.z_max = resist_for(*hi);
  out.z_min = resist_for(*lo);
  out.dose_max = hi->dose_scale;
  out.dose_min = lo->dose_scale;
  return out;
}

}  // namespace opc
