#pragma once

#include <cstdint>
#include <random>

#include "tgk/tensor.hpp"

namespace tgk {

/// Standard normal draws with a platform-independent definition:
/// std::mt19937_64 (fully specified by the standard), 53-bit uniforms
/// u = (x >> 11) * 2^-53, and the Box-Muller transform emitting
/// sqrt(-2 ln(1 - u1)) * cos(2 pi u2) then the matching sin term.
/// std::normal_distribution is avoided because its algorithm differs
/// between standard libraries.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed = 0) : engine_(seed) {}

  double uniform();
  double next();

  bool operator==(const GaussianStream&) const = default;

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Tensor of i.i.d. standard normal entries, filled in storage order.
Tensor3 random_normal(Dims dims, GaussianStream& rng);

}  // namespace tgk
