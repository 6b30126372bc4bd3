#pragma once

// On-disk formats of the command line tool.
//
// T3B: "T3B1", three little-endian uint32 dims (rows, cols, depth), then
//      rows*cols*depth little-endian float64 values in storage order.
// PGM (P5) / PPM (P6): 8-bit, scaled to [0, 1] on read; written by clamping
//      to [0, 1], scaling by 255 and rounding half to even.
// Metadata sidecar: "key=value" lines, keys sorted.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tgk/tensor.hpp"

namespace tgk::cli {

void write_t3b(const std::filesystem::path& path, const Tensor3& t);
Tensor3 read_t3b(const std::filesystem::path& path);

struct Image {
  /// One plane for gray images, three (R, G, B) for color.
  std::vector<Eigen::MatrixXd> planes;
  index_t rows() const { return planes.front().rows(); }
  index_t cols() const { return planes.front().cols(); }
};

Image read_pnm(const std::filesystem::path& path);
/// Writes P5 for one plane and P6 for three.
void write_pnm(const std::filesystem::path& path, const Image& img);
/// 8-bit quantization used by write_pnm.
unsigned char quantize(double v);

using Meta = std::map<std::string, std::string>;

void write_meta(const std::filesystem::path& path, const Meta& meta);
Meta read_meta(const std::filesystem::path& path);
/// Round-tripping decimal ("%.17g").
std::string format_double(double v);
double meta_double(const Meta& meta, const std::string& key);
std::string meta_string(const Meta& meta, const std::string& key);

/// CSV report with the fixed column set
/// method,reg,noise_level,slice,k,mu,discrepancy,psnr,relerr,cpu_secs.
struct ReportRow {
  std::string method;
  std::string reg;
  std::string noise_level;
  std::string slice;
  std::string k;
  std::string mu;
  std::string discrepancy;
  std::string psnr;
  std::string relerr;
  std::string cpu_secs;
};

std::string csv_header();
std::string csv_line(const ReportRow& row);
void write_report(const std::filesystem::path& path, const std::vector<ReportRow>& rows);

}  // namespace tgk::cli
