#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <fftw3.h>

#include "tgk/error.hpp"
#include "tgk/tensor.hpp"

namespace tgk {
namespace {

enum class Kind { forward, backward, real_forward, real_backward };

// FFTW planning is not thread safe, execution is. Plans are created once per
// (length, batch, kind) with FFTW_ESTIMATE | FFTW_UNALIGNED so that the same
// codelets run for every buffer and results do not depend on alignment.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(index_t n, index_t batch, Kind kind) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(n, batch, kind);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const int len = static_cast<int>(n);
    const int howmany = static_cast<int>(batch);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::vector<cdouble> scratch(static_cast<std::size_t>(n * batch));
    std::vector<double> real(static_cast<std::size_t>(n * batch));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = nullptr;
    switch (kind) {
      case Kind::forward:
      case Kind::backward:
        plan = fftw_plan_many_dft(1, &len, howmany, buf, nullptr, howmany, 1, buf, nullptr,
                                  howmany, 1, kind == Kind::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                  flags);
        break;
      case Kind::real_forward:
        plan = fftw_plan_many_dft_r2c(1, &len, howmany, real.data(), nullptr, howmany, 1, buf,
                                      nullptr, howmany, 1, flags);
        break;
      case Kind::real_backward:
        plan = fftw_plan_many_dft_c2r(1, &len, howmany, buf, nullptr, howmany, 1, real.data(),
                                      nullptr, howmany, 1, flags);
        break;
    }
    if (plan == nullptr) throw Error("fftw: failed to create plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<index_t, index_t, Kind>, fftw_plan> plans_;
};

PlanCache& plans() {
  static PlanCache cache;
  return cache;
}

// In-place transform of every tube of a face-major buffer.
void transform_tubes(cdouble* data, index_t face_size, index_t n, Kind kind) {
  if (n == 1) return;
  fftw_plan plan = plans().get(n, face_size, kind);
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace

FourierTensor3 fft_mode3(const Tensor3& t) {
  FourierTensor3 f(t.dims());
  auto src = t.data();
  auto dst = f.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = cdouble(src[i], 0.0);
  transform_tubes(f.raw(), t.rows() * t.cols(), t.depth(), Kind::forward);
  return f;
}

FourierTensor3 rfft_mode3(const Tensor3& t) {
  const index_t n = t.depth();
  const index_t face_size = t.rows() * t.cols();
  FourierTensor3 f(t.rows(), t.cols(), n / 2 + 1);
  if (n == 1) {
    f.flat().real() = t.flat();
    return f;
  }
  fftw_plan plan = plans().get(n, face_size, Kind::real_forward);
  fftw_execute_dft_r2c(plan, const_cast<double*>(t.raw()), reinterpret_cast<fftw_complex*>(f.raw()));
  return f;
}

Tensor3 irfft_mode3(const FourierTensor3& half, index_t n) {
  if (half.depth() != n / 2 + 1) throw DimensionError("irfft_mode3: half spectrum depth must be n/2 + 1");
  const index_t face_size = half.rows() * half.cols();
  Tensor3 t(half.rows(), half.cols(), n);
  if (n == 1) {
    t.flat() = half.flat().real();
    return t;
  }
  // c2r overwrites its input.
  FourierTensor3 work = half;
  fftw_plan plan = plans().get(n, face_size, Kind::real_backward);
  fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(work.raw()), t.raw());
  t *= 1.0 / static_cast<double>(n);
  return t;
}

double conjugate_symmetry_defect(const FourierTensor3& f) {
  const index_t n = f.depth();
  double total = 0.0;
  double defect = 0.0;
  for (index_t k = 0; k < n; ++k) {
    const index_t partner = (n - k) % n;
    total += f.face(k).squaredNorm();
    defect += (f.face(k) - f.face(partner).conjugate()).squaredNorm();
  }
  if (total == 0.0) return 0.0;
  // Each asymmetric pair is counted twice.
  return std::sqrt(0.5 * defect / total);
}

Tensor3 ifft_mode3(const FourierTensor3& f) {
  if (conjugate_symmetry_defect(f) > 1e-8) {
    throw FourierSymmetryError("ifft_mode3: Fourier faces are not conjugate symmetric");
  }
  FourierTensor3 work = f;
  transform_tubes(work.raw(), f.rows() * f.cols(), f.depth(), Kind::backward);

  Tensor3 t(f.dims());
  const double scale = 1.0 / static_cast<double>(f.depth());
  auto src = work.data();
  auto dst = t.data();
  double imag_sq = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = src[i].real() * scale;
    const double im = src[i].imag() * scale;
    imag_sq += im * im;
  }
  // Parseval: ||t||^2 = ||f||^2 / n.
  const double ref_sq = f.flat().squaredNorm() * scale;
  if (imag_sq > 1e-20 * ref_sq) {
    throw FourierSymmetryError("ifft_mode3: imaginary residue above 1e-10 relative");
  }
  return t;
}

}  // namespace tgk
