#include "fft.hpp"

#include <mutex>
#include <new>

namespace mfa::detail {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(n);
  spectrum_ = fftw_alloc_complex(n / 2 + 1);
  if (!real_ || !spectrum_) throw std::bad_alloc();
  const int len = static_cast<int>(n);
  forward_ = fftw_plan_dft_r2c_1d(len, real_, spectrum_, FFTW_ESTIMATE);
  // c2r destroys its input by default; keep the spectrum intact.
  backward_ = fftw_plan_dft_c2r_1d(len, spectrum_, real_, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(forward_);
  fftw_destroy_plan(backward_);
  fftw_free(real_);
  fftw_free(spectrum_);
}

void RealFft::forward() { fftw_execute(forward_); }
void RealFft::backward() { fftw_execute(backward_); }

ComplexFft::ComplexFft(std::size_t n) : n_(n) {
  std::lock_guard lock(planner_mutex());
  data_ = fftw_alloc_complex(n);
  if (!data_) throw std::bad_alloc();
  plan_ = fftw_plan_dft_1d(static_cast<int>(n), data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
}

ComplexFft::~ComplexFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan_);
  fftw_free(data_);
}

void ComplexFft::forward() { fftw_execute(plan_); }

}  // namespace mfa::detail
