#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace noiselab {

// Image in (C, H, W) layout; the flattening convention is fixed once here
// and shared by every statistic.
struct ImageTensor {
  int C = 0, H = 0, W = 0;
  std::vector<double> v;  // C*H*W

  ImageTensor() = default;
  ImageTensor(int c, int h, int w);
  ImageTensor(int c, int h, int w, std::vector<double> values);

  double at(int c, int i, int j) const {
    return v[(static_cast<std::size_t>(c) * H + i) * W + j];
  }
  double& at(int c, int i, int j) {
    return v[(static_cast<std::size_t>(c) * H + i) * W + j];
  }
  std::size_t size() const { return v.size(); }
};

// Mean of all pixel intensities across channels.
double mean_pixel(const ImageTensor& img);

// Mean over pixels of 0.299 R + 0.587 G + 0.114 B; requires C == 3.
double brightness(const ImageTensor& img);

// 100 * (mean of the top floor(H/2) rows - mean of the rest); with odd H
// the middle row belongs to the bottom half. Requires H >= 2.
double contrast(const ImageTensor& img);

// Brightness-weighted vertical center of mass, rows indexed from 1, over
// the channel-mean grayscale. Errors on zero total mass.
double centroid_row(const ImageTensor& img);

// Sample Pearson correlation; errors when either input is constant.
double pearson_standard(std::span<const double> x, std::span<const double> y);

// Subtracts the group mean image over all 2K pair members, then applies the
// standard correlation per pair.
std::vector<double> pearson_centralized(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>&
        pairs);

// 1-D empirical Wasserstein-1 via the quantile-function integral.
double wasserstein1(std::span<const double> a, std::span<const double> b);

// SSIM with an 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03, unit
// dynamic range, averaged over channels; a single global window is used
// when min(H, W) < 11.
double ssim(const ImageTensor& a, const ImageTensor& b);

// Raw little-endian float64 values at <prefix>.bin plus a JSON sidecar
// {C, H, W} at <prefix>.json.
void save_image(const ImageTensor& img, const std::string& prefix);
ImageTensor load_image(const std::string& prefix);

// Plain CSV, one row per pixel in (C,H,W) flattening order; the header
// carries the shape as value_CxHxW.
void save_image_csv(const ImageTensor& img, const std::string& path);
ImageTensor load_image_csv(const std::string& path);

// One CSV row per (image id, statistic) for the named statistics.
void write_statistics_csv(const std::vector<std::string>& ids,
                          const std::vector<ImageTensor>& images,
                          const std::vector<std::string>& statistics,
                          const std::string& path);

}  // namespace noiselab
