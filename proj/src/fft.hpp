#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include <fftw3.h>

namespace mfa::detail {

/// Real-to-complex / complex-to-real transform pair of a fixed length backed
/// by FFTW. Planning is serialized (the FFTW planner is not reentrant);
/// execution on distinct instances is thread-safe. The inverse is unnormalized.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t bins() const noexcept { return n_ / 2 + 1; }

  std::span<double> real() noexcept { return {real_, n_}; }
  std::span<std::complex<double>> spectrum() noexcept {
    return {reinterpret_cast<std::complex<double>*>(spectrum_), bins()};
  }

  /// real() -> spectrum()
  void forward();
  /// spectrum() -> real(), scaled by n.
  void backward();

 private:
  std::size_t n_;
  double* real_ = nullptr;
  fftw_complex* spectrum_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

/// Complex DFT of fixed length, forward sign -1.
class ComplexFft {
 public:
  explicit ComplexFft(std::size_t n);
  ~ComplexFft();
  ComplexFft(const ComplexFft&) = delete;
  ComplexFft& operator=(const ComplexFft&) = delete;

  std::span<std::complex<double>> data() noexcept {
    return {reinterpret_cast<std::complex<double>*>(data_), n_};
  }
  void forward();

 private:
  std::size_t n_;
  fftw_complex* data_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace mfa::detail
