#include "tgk_cli/formats.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

#include "tgk/error.hpp"

namespace tgk::cli {
namespace {

template <class T>
void put_le(std::string& out, T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(const std::string& in, std::size_t offset) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, in.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const std::filesystem::path& path, const std::string& bytes) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write to " + path.string());
}

// Reads the next header token of a PNM file, skipping whitespace and comments.
std::string pnm_token(const std::string& s, std::size_t& pos) {
  for (;;) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos < s.size() && s[pos] == '#') {
      while (pos < s.size() && s[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  const std::size_t start = pos;
  while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (start == pos) throw FormatError("truncated image header");
  return s.substr(start, pos - start);
}

long pnm_number(const std::string& s, std::size_t& pos) {
  const std::string tok = pnm_token(s, pos);
  if (!std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
      tok.size() > 9) {
    throw FormatError("bad number '" + tok + "' in image header");
  }
  return std::stol(tok);
}

}  // namespace

void write_t3b(const std::filesystem::path& path, const Tensor3& t) {
  std::string out = "T3B1";
  out.reserve(16 + 8 * static_cast<std::size_t>(t.size()));
  put_le(out, static_cast<std::uint32_t>(t.rows()));
  put_le(out, static_cast<std::uint32_t>(t.cols()));
  put_le(out, static_cast<std::uint32_t>(t.depth()));
  for (double v : t.data()) put_le(out, v);
  spit(path, out);
}

Tensor3 read_t3b(const std::filesystem::path& path) {
  const std::string in = slurp(path);
  if (in.size() < 16 || in.compare(0, 4, "T3B1") != 0) {
    throw FormatError(path.string() + ": not a T3B1 file");
  }
  const Dims d{get_le<std::uint32_t>(in, 4), get_le<std::uint32_t>(in, 8),
               get_le<std::uint32_t>(in, 12)};
  if (d.rows == 0 || d.cols == 0 || d.depth == 0) throw FormatError(path.string() + ": zero dim");
  const std::size_t count = static_cast<std::size_t>(d.size());
  if (in.size() != 16 + 8 * count) throw FormatError(path.string() + ": size does not match dims");
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) data[i] = get_le<double>(in, 16 + 8 * i);
  return Tensor3(d, std::move(data));
}

unsigned char quantize(double v) {
  const double c = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
  // nearbyint honors the default round-to-nearest-even mode.
  return static_cast<unsigned char>(std::nearbyint(c * 255.0));
}

Image read_pnm(const std::filesystem::path& path) {
  const std::string s = slurp(path);
  std::size_t pos = 0;
  const std::string magic = pnm_token(s, pos);
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw FormatError(path.string() + ": only binary PGM (P5) and PPM (P6) are supported");
  }
  const long width = pnm_number(s, pos);
  const long height = pnm_number(s, pos);
  const long maxval = pnm_number(s, pos);
  if (width <= 0 || height <= 0) throw FormatError(path.string() + ": bad image size");
  if (maxval <= 0 || maxval > 255) throw FormatError(path.string() + ": only 8-bit images");
  if (pos >= s.size() || !std::isspace(static_cast<unsigned char>(s[pos]))) {
    throw FormatError(path.string() + ": malformed header");
  }
  ++pos;
  const std::size_t need = static_cast<std::size_t>(width * height * channels);
  if (s.size() - pos < need) throw FormatError(path.string() + ": truncated pixel data");

  Image img;
  img.planes.assign(static_cast<std::size_t>(channels), Eigen::MatrixXd(height, width));
  const double scale = 1.0 / static_cast<double>(maxval);
  for (long r = 0; r < height; ++r) {
    for (long c = 0; c < width; ++c) {
      for (int ch = 0; ch < channels; ++ch) {
        const auto byte = static_cast<unsigned char>(s[pos++]);
        img.planes[static_cast<std::size_t>(ch)](r, c) = byte * scale;
      }
    }
  }
  return img;
}

void write_pnm(const std::filesystem::path& path, const Image& img) {
  const std::size_t channels = img.planes.size();
  if (channels != 1 && channels != 3) throw FormatError("write_pnm: need 1 or 3 planes");
  const index_t h = img.rows();
  const index_t w = img.cols();
  std::string out = (channels == 1 ? "P5\n" : "P6\n") + std::to_string(w) + " " +
                    std::to_string(h) + "\n255\n";
  for (index_t r = 0; r < h; ++r) {
    for (index_t c = 0; c < w; ++c) {
      for (const auto& p : img.planes) out.push_back(static_cast<char>(quantize(p(r, c))));
    }
  }
  spit(path, out);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_meta(const std::filesystem::path& path, const Meta& meta) {
  std::string out;
  for (const auto& [k, v] : meta) out += k + "=" + v + "\n";
  spit(path, out);
}

Meta read_meta(const std::filesystem::path& path) {
  std::istringstream in(slurp(path));
  Meta meta;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(path.string() + ": line without '='");
    meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return meta;
}

std::string meta_string(const Meta& meta, const std::string& key) {
  const auto it = meta.find(key);
  if (it == meta.end()) throw FormatError("metadata is missing '" + key + "'");
  return it->second;
}

double meta_double(const Meta& meta, const std::string& key) {
  const std::string v = meta_string(meta, key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw FormatError("");
    return d;
  } catch (const std::exception&) {
    throw FormatError("metadata '" + key + "' is not a number: " + v);
  }
}

std::string csv_header() {
  return "method,reg,noise_level,slice,k,mu,discrepancy,psnr,relerr,cpu_secs";
}

std::string csv_line(const ReportRow& r) {
  return r.method + "," + r.reg + "," + r.noise_level + "," + r.slice + "," + r.k + "," + r.mu +
         "," + r.discrepancy + "," + r.psnr + "," + r.relerr + "," + r.cpu_secs;
}

void write_report(const std::filesystem::path& path, const std::vector<ReportRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) out += csv_line(r) + "\n";
  spit(path, out);
}

}  // namespace tgk::cli
