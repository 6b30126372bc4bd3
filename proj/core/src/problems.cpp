#include "tgk/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tgk/error.hpp"
#include "tgk/random.hpp"

namespace tgk {

std::string_view blur_variant_name(BlurVariant v) {
  return v == BlurVariant::symmetric ? "symmetric" : "circulant";
}

BlurVariant parse_blur_variant(std::string_view name) {
  if (name == "symmetric" || name == "example1") return BlurVariant::symmetric;
  if (name == "circulant" || name == "example2") return BlurVariant::circulant;
  throw Error("unknown blur variant '" + std::string(name) +
              "' (symmetric|circulant, or example1|example2)");
}

void BlurSpec::validate() const {
  if (n_pixels < 1) throw Error("blur: n_pixels must be positive");
  if (!(sigma > 0.0)) throw Error("blur: sigma must be positive");
  if (band < 1 || band > n_pixels) throw Error("blur: band must lie in [1, n_pixels]");
}

Eigen::MatrixXd blur_matrix(const BlurSpec& spec) {
  spec.validate();
  const index_t n = spec.n_pixels;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  for (index_t i = 0; i < spec.band; ++i) {
    const double d = static_cast<double>(i);
    z(i) = std::exp(-d * d / (2.0 * spec.sigma * spec.sigma));
  }
  const double scale = 1.0 / (spec.sigma * std::sqrt(2.0 * std::numbers::pi));
  Eigen::MatrixXd a(n, n);
  for (index_t j = 0; j < n; ++j) {
    for (index_t i = 0; i < n; ++i) {
      const index_t off = spec.variant == BlurVariant::symmetric ? std::abs(i - j)
                                                                 : ((j - i) % n + n) % n;
      a(i, j) = scale * z(off);
    }
  }
  return a;
}

Tensor3 build_blur(const BlurSpec& spec) {
  const Eigen::MatrixXd a = blur_matrix(spec);
  const index_t n = spec.n_pixels;
  Tensor3 t(n, n, n);
  for (index_t k = 0; k < n; ++k) {
    const double s = a(k, 0);
    if (s != 0.0) t.face(k) = s * a;
  }
  return t;
}

SpdOperator build_covariance_m(index_t rows, index_t depth, double omega) {
  if (!(omega > 0.0)) throw Error("covariance: omega must be positive");
  Eigen::MatrixXd lt = Eigen::MatrixXd::Zero(rows, rows);
  for (index_t i = 0; i < rows; ++i) {
    lt(i, i) = 0.5;
    if (i + 1 < rows) lt(i, i + 1) = -0.5;
  }
  Eigen::MatrixXd face = lt.transpose() * lt;
  face.diagonal().array() += omega;
  return SpdOperator::spatial(face, depth);
}

Eigen::MatrixXd second_difference(index_t size, int gamma) {
  if (gamma != 1 && gamma != 2) throw Error("regularizer: gamma must be 1 or 2");
  Eigen::MatrixXd lt = Eigen::MatrixXd::Zero(size, size);
  for (index_t i = 0; i < size; ++i) {
    lt(i, i) = 2.0;
    if (i > 0) lt(i, i - 1) = -1.0;
    if (i + 1 < size) lt(i, i + 1) = -1.0;
  }
  lt(0, 0) = gamma;
  lt(size - 1, size - 1) = gamma;
  return lt;
}

SpdOperator build_reg_d(index_t size, index_t depth, int gamma, double alpha) {
  if (!(alpha > 0.0)) throw Error("regularizer: alpha must be positive");
  const Eigen::MatrixXd lt = second_difference(size, gamma);
  Eigen::MatrixXd face = lt.transpose() * lt;
  face.diagonal().array() += alpha;
  face *= 0.25;
  return SpdOperator::spatial(face, depth);
}

NoiseSample gen_noise(const Tensor3& b_true, const SpdOperator& m, const NoiseSpec& spec) {
  if (!(spec.level >= 0.0)) throw Error("noise: level must be nonnegative");
  NoiseSample out;
  out.slice_delta.assign(static_cast<std::size_t>(b_true.cols()), 0.0);
  if (spec.level == 0.0) {
    out.e = Tensor3(b_true.dims());
    return out;
  }
  GaussianStream rng(spec.seed);
  Tensor3 e1 = random_normal(b_true.dims(), rng);
  const double e1_norm = fro_norm(e1);
  out.rho = spec.level * fro_norm(b_true) / e1_norm;
  out.delta = out.rho * e1_norm;
  for (index_t j = 0; j < b_true.cols(); ++j) {
    out.slice_delta[static_cast<std::size_t>(j)] = out.rho * fro_norm(e1.lateral(j));
  }
  e1 *= out.rho;
  out.e = m.apply_factor_transpose(e1);
  return out;
}

Tensor3 twist(const Eigen::MatrixXd& img) {
  if (img.size() == 0) throw DimensionError("twist: empty image");
  Tensor3 t(img.rows(), 1, img.cols());
  t.flat() = img;
  return t;
}

Eigen::MatrixXd squeeze(const Tensor3& slice) {
  if (slice.cols() != 1) throw DimensionError("squeeze: expects a lateral slice");
  return slice.flat();
}

Tensor3 multi_twist(std::span<const Eigen::MatrixXd> imgs) {
  if (imgs.empty()) throw DimensionError("multi_twist: no images");
  const index_t rows = imgs.front().rows();
  const index_t cols = imgs.front().cols();
  Tensor3 t(rows, static_cast<index_t>(imgs.size()), cols);
  for (std::size_t j = 0; j < imgs.size(); ++j) {
    if (imgs[j].rows() != rows || imgs[j].cols() != cols) {
      throw DimensionError("multi_twist: images differ in size");
    }
    t.set_lateral(static_cast<index_t>(j), twist(imgs[j]));
  }
  return t;
}

std::vector<Eigen::MatrixXd> multi_squeeze(const Tensor3& t) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(t.cols()));
  for (index_t j = 0; j < t.cols(); ++j) out.push_back(squeeze(t.lateral(j)));
  return out;
}

Metrics metrics(const Tensor3& x, const Tensor3& x_true) {
  if (x.dims() != x_true.dims()) throw DimensionError("metrics: dims differ");
  Metrics out;
  const double diff = fro_norm(x - x_true);
  out.relative_error = diff / fro_norm(x_true);
  out.mse = diff * diff / static_cast<double>(x.size());
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : x_true.data()) peak = std::max(peak, v);
  out.psnr = out.mse == 0.0 ? std::numeric_limits<double>::infinity()
                            : 10.0 * std::log10(peak * peak / out.mse);
  return out;
}

namespace {

struct Ellipse {
  double value, a, b, x0, y0, phi_deg;
};

// Modified (higher contrast) Shepp-Logan parameters.
constexpr Ellipse kSheppLogan[] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},         {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},     {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},        {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},      {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
};

double axis(index_t i, index_t size) {
  const double half = 0.5 * static_cast<double>(size - 1);
  return half == 0.0 ? 0.0 : (static_cast<double>(i) - half) / half;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double blob(double x, double y, double cx, double cy, double r) {
  const double dx = x - cx;
  const double dy = y - cy;
  return std::exp(-(dx * dx + dy * dy) / (2.0 * r * r));
}

}  // namespace

Eigen::MatrixXd shepp_logan(index_t size) {
  if (size < 1) throw Error("shepp_logan: size must be positive");
  Eigen::MatrixXd img = Eigen::MatrixXd::Zero(size, size);
  for (index_t r = 0; r < size; ++r) {
    const double y = -axis(r, size);
    for (index_t c = 0; c < size; ++c) {
      const double x = axis(c, size);
      double v = 0.0;
      for (const Ellipse& e : kSheppLogan) {
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double xr = (x - e.x0) * std::cos(phi) + (y - e.y0) * std::sin(phi);
        const double yr = -(x - e.x0) * std::sin(phi) + (y - e.y0) * std::cos(phi);
        if ((xr / e.a) * (xr / e.a) + (yr / e.b) * (yr / e.b) <= 1.0) v += e.value;
      }
      img(r, c) = clamp01(v);
    }
  }
  return img;
}

std::array<Eigen::MatrixXd, 3> color_scene(index_t size) {
  if (size < 1) throw Error("color_scene: size must be positive");
  std::array<Eigen::MatrixXd, 3> ch;
  for (auto& m : ch) m.resize(size, size);
  for (index_t r = 0; r < size; ++r) {
    const double y = axis(r, size);
    for (index_t c = 0; c < size; ++c) {
      const double x = axis(c, size);
      const double shade = 0.15 + 0.1 * (x + 1.0);
      const double red = blob(x, y, -0.35, -0.2, 0.32) + 0.7 * blob(x, y, 0.45, 0.5, 0.2);
      const double green = blob(x, y, 0.3, -0.3, 0.28) + 0.5 * blob(x, y, -0.5, 0.55, 0.22);
      const double yellow = 0.8 * blob(x, y, 0.0, 0.3, 0.18);
      ch[0](r, c) = clamp01(shade + 0.8 * red + yellow);
      ch[1](r, c) = clamp01(shade + 0.7 * green + 0.9 * yellow + 0.2 * red);
      ch[2](r, c) = clamp01(0.5 * shade + 0.25 * green + 0.1 * red);
    }
  }
  return ch;
}

std::vector<Eigen::MatrixXd> video_frames(index_t size, int count) {
  if (size < 1 || count < 1) throw Error("video_frames: size and count must be positive");
  std::vector<Eigen::MatrixXd> frames;
  const double step = 2.0 / static_cast<double>(size);
  for (int f = 0; f < count; ++f) {
    const double t = step * f;
    Eigen::MatrixXd img(size, size);
    for (index_t r = 0; r < size; ++r) {
      const double y = axis(r, size);
      for (index_t c = 0; c < size; ++c) {
        const double x = axis(c, size);
        double v = 0.2 + 0.05 * std::sin(6.0 * x) * std::cos(4.0 * y);
        if (std::abs(x - (-0.4 + 2.0 * t)) < 0.2 && std::abs(y + 0.3) < 0.15) v += 0.6;
        v += 0.7 * blob(x, y, 0.35 - t, 0.35, 0.15);
        if ((x - 0.1) * (x - 0.1) + (y - 0.1 - t) * (y - 0.1 - t) < 0.04) v += 0.3;
        img(r, c) = clamp01(v);
      }
    }
    frames.push_back(std::move(img));
  }
  return frames;
}

}  // namespace tgk
