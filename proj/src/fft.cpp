#include "opc/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace opc {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

ComplexGrid transform(const ComplexGrid& in, int sign) {
  const int w = in.width(), h = in.height();
  ComplexGrid out(w, h);
  // std::complex<double> is layout-compatible with fftw_complex.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_2d(h, w, src, dst, sign, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

ComplexGrid fft2(const ComplexGrid& in) { return transform(in, FFTW_FORWARD); }

ComplexGrid ifft2(const ComplexGrid& in) {
  ComplexGrid out = transform(in, FFTW_BACKWARD);
  const double norm = 1.0 / (static_cast<double>(in.width()) * in.height());
  for (size_t i = 0; i < out.size(); ++i) out[i] *= norm;
  return out;
}

}  // namespace opc
