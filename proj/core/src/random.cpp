#include "tgk/random.hpp"

#include <cmath>
#include <numbers>

namespace tgk {

double GaussianStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log1p(-u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Tensor3 random_normal(Dims dims, GaussianStream& rng) {
  Tensor3 t(dims);
  for (auto& v : t.data()) v = rng.next();
  return t;
}

}  // namespace tgk
