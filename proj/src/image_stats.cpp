#include "noiselab/image_stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "noiselab/csv.hpp"

namespace noiselab {

namespace {

constexpr double kSsimC1 = 0.01 * 0.01;  // (K1 * L)^2 with L = 1
constexpr double kSsimC2 = 0.03 * 0.03;
constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;

double ssim_term(double mx, double my, double sxx, double syy, double sxy) {
  return ((2.0 * mx * my + kSsimC1) * (2.0 * sxy + kSsimC2)) /
         ((mx * mx + my * my + kSsimC1) * (sxx + syy + kSsimC2));
}

// Valid-window SSIM for one channel plane.
double ssim_channel(const ImageTensor& a, const ImageTensor& b, int c) {
  const int H = a.H, W = a.W;
  const int r = kSsimWindow / 2;

  double kernel[kSsimWindow];
  double ksum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double x = i - r;
    kernel[i] = std::exp(-0.5 * x * x / (kSsimSigma * kSsimSigma));
    ksum += kernel[i];
  }
  for (double& k : kernel) k /= ksum;

  double total = 0.0;
  std::size_t count = 0;
  for (int ci = r; ci < H - r; ++ci) {
    for (int cj = r; cj < W - r; ++cj) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int di = -r; di <= r; ++di) {
        for (int dj = -r; dj <= r; ++dj) {
          const double w = kernel[di + r] * kernel[dj + r];
          const double xa = a.at(c, ci + di, cj + dj);
          const double xb = b.at(c, ci + di, cj + dj);
          mx += w * xa;
          my += w * xb;
          sxx += w * xa * xa;
          syy += w * xb * xb;
          sxy += w * xa * xb;
        }
      }
      sxx -= mx * mx;
      syy -= my * my;
      sxy -= mx * my;
      total += ssim_term(mx, my, sxx, syy, sxy);
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

double ssim_global(const ImageTensor& a, const ImageTensor& b) {
  const double n = static_cast<double>(a.size());
  double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mx += a.v[i];
    my += b.v[i];
    sxx += a.v[i] * a.v[i];
    syy += b.v[i] * b.v[i];
    sxy += a.v[i] * b.v[i];
  }
  mx /= n;
  my /= n;
  sxx = sxx / n - mx * mx;
  syy = syy / n - my * my;
  sxy = sxy / n - mx * my;
  return ssim_term(mx, my, sxx, syy, sxy);
}

}  // namespace

ImageTensor::ImageTensor(int c, int h, int w)
    : C(c), H(h), W(w), v(static_cast<std::size_t>(c) * h * w, 0.0) {
  if (c < 1 || h < 1 || w < 1) {
    throw std::invalid_argument("ImageTensor: shape must be positive");
  }
}

ImageTensor::ImageTensor(int c, int h, int w, std::vector<double> values)
    : C(c), H(h), W(w), v(std::move(values)) {
  if (c < 1 || h < 1 || w < 1) {
    throw std::invalid_argument("ImageTensor: shape must be positive");
  }
  if (v.size() != static_cast<std::size_t>(c) * h * w) {
    throw std::invalid_argument("ImageTensor: value count mismatch");
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("ImageTensor: non-finite value");
    }
  }
}

double mean_pixel(const ImageTensor& img) {
  double s = 0.0;
  for (double x : img.v) s += x;
  return s / static_cast<double>(img.size());
}

double brightness(const ImageTensor& img) {
  if (img.C != 3) throw std::invalid_argument("brightness: needs C == 3");
  double s = 0.0;
  for (int i = 0; i < img.H; ++i) {
    for (int j = 0; j < img.W; ++j) {
      s += 0.299 * img.at(0, i, j) + 0.587 * img.at(1, i, j) +
           0.114 * img.at(2, i, j);
    }
  }
  return s / (static_cast<double>(img.H) * img.W);
}

double contrast(const ImageTensor& img) {
  if (img.H < 2) throw std::invalid_argument("contrast: needs H >= 2");
  const int top_rows = img.H / 2;
  double top = 0.0, bottom = 0.0;
  for (int c = 0; c < img.C; ++c) {
    for (int i = 0; i < img.H; ++i) {
      for (int j = 0; j < img.W; ++j) {
        (i < top_rows ? top : bottom) += img.at(c, i, j);
      }
    }
  }
  top /= static_cast<double>(img.C) * top_rows * img.W;
  bottom /= static_cast<double>(img.C) * (img.H - top_rows) * img.W;
  return 100.0 * (top - bottom);
}

double centroid_row(const ImageTensor& img) {
  double mass = 0.0, weighted = 0.0;
  for (int i = 0; i < img.H; ++i) {
    for (int j = 0; j < img.W; ++j) {
      double m = 0.0;
      for (int c = 0; c < img.C; ++c) m += img.at(c, i, j);
      m /= img.C;
      mass += m;
      weighted += (i + 1) * m;
    }
  }
  if (mass <= 0.0) {
    throw std::invalid_argument("centroid_row: zero-mass image");
  }
  return weighted / mass;
}

double pearson_standard(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("pearson_standard: need equal lengths >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::invalid_argument("pearson_standard: constant input");
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> pearson_centralized(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>&
        pairs) {
  if (pairs.empty()) {
    throw std::invalid_argument("pearson_centralized: empty group");
  }
  const std::size_t d = pairs.front().first.size();
  std::vector<double> mu(d, 0.0);
  for (const auto& [x, y] : pairs) {
    if (x.size() != d || y.size() != d) {
      throw std::invalid_argument("pearson_centralized: size mismatch");
    }
    for (std::size_t j = 0; j < d; ++j) mu[j] += x[j] + y[j];
  }
  for (double& m : mu) m /= 2.0 * static_cast<double>(pairs.size());

  std::vector<double> out;
  out.reserve(pairs.size());
  std::vector<double> cx(d), cy(d);
  for (const auto& [x, y] : pairs) {
    for (std::size_t j = 0; j < d; ++j) {
      cx[j] = x[j] - mu[j];
      cy[j] = y[j] - mu[j];
    }
    out.push_back(pearson_standard(cx, cy));
  }
  return out;
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("wasserstein1: empty sample");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  if (sa.size() == sb.size()) {
    double s = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) s += std::abs(sa[i] - sb[i]);
    return s / static_cast<double>(sa.size());
  }

  // integral of |F_a - F_b| over the merged support
  std::vector<double> all;
  all.reserve(sa.size() + sb.size());
  all.insert(all.end(), sa.begin(), sa.end());
  all.insert(all.end(), sb.begin(), sb.end());
  std::sort(all.begin(), all.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < all.size(); ++i) {
    const double delta = all[i + 1] - all[i];
    if (delta == 0.0) continue;
    const double fa =
        static_cast<double>(std::upper_bound(sa.begin(), sa.end(), all[i]) -
                            sa.begin()) /
        static_cast<double>(sa.size());
    const double fb =
        static_cast<double>(std::upper_bound(sb.begin(), sb.end(), all[i]) -
                            sb.begin()) /
        static_cast<double>(sb.size());
    s += std::abs(fa - fb) * delta;
  }
  return s;
}

double ssim(const ImageTensor& a, const ImageTensor& b) {
  if (a.C != b.C || a.H != b.H || a.W != b.W) {
    throw std::invalid_argument("ssim: shape mismatch");
  }
  if (std::min(a.H, a.W) < kSsimWindow) return ssim_global(a, b);
  double s = 0.0;
  for (int c = 0; c < a.C; ++c) s += ssim_channel(a, b, c);
  return s / a.C;
}

void save_image(const ImageTensor& img, const std::string& prefix) {
  static_assert(std::endian::native == std::endian::little,
                "serializer assumes a little-endian host");
  std::ofstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + prefix + ".bin");
  bin.write(reinterpret_cast<const char*>(img.v.data()),
            static_cast<std::streamsize>(img.v.size() * sizeof(double)));
  if (!bin) throw std::runtime_error("short write to " + prefix + ".bin");
  nlohmann::json meta{{"C", img.C}, {"H", img.H}, {"W", img.W}};
  std::ofstream side(prefix + ".json");
  if (!side) throw std::runtime_error("cannot open " + prefix + ".json");
  side << meta.dump(2) << "\n";
}

ImageTensor load_image(const std::string& prefix) {
  std::ifstream side(prefix + ".json");
  if (!side) throw std::runtime_error("cannot open " + prefix + ".json");
  const nlohmann::json meta = nlohmann::json::parse(side);
  ImageTensor img(meta.at("C").get<int>(), meta.at("H").get<int>(),
                  meta.at("W").get<int>());
  std::ifstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + prefix + ".bin");
  bin.read(reinterpret_cast<char*>(img.v.data()),
           static_cast<std::streamsize>(img.v.size() * sizeof(double)));
  if (bin.gcount() !=
      static_cast<std::streamsize>(img.v.size() * sizeof(double))) {
    throw std::runtime_error("image payload mismatch: " + prefix);
  }
  return img;
}

void save_image_csv(const ImageTensor& img, const std::string& path) {
  CsvWriter csv(path, {"value_" + std::to_string(img.C) + "x" +
                       std::to_string(img.H) + "x" + std::to_string(img.W)});
  for (double v : img.v) csv.write_row({csv_num(v)});
}

ImageTensor load_image_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  std::getline(in, header);
  int C = 0, H = 0, W = 0;
  if (std::sscanf(header.c_str(), "value_%dx%dx%d", &C, &H, &W) != 3) {
    throw std::runtime_error("image CSV header must carry the shape: " + path);
  }
  ImageTensor img(C, H, W);
  std::string line;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (i >= img.v.size()) {
      throw std::runtime_error("image CSV has too many rows: " + path);
    }
    img.v[i++] = std::stod(line);
  }
  if (i != img.v.size()) {
    throw std::runtime_error("image CSV has too few rows: " + path);
  }
  return img;
}

void write_statistics_csv(const std::vector<std::string>& ids,
                          const std::vector<ImageTensor>& images,
                          const std::vector<std::string>& statistics,
                          const std::string& path) {
  if (ids.size() != images.size()) {
    throw std::invalid_argument("write_statistics_csv: id/image mismatch");
  }
  CsvWriter csv(path, {"image", "statistic", "value"});
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (const auto& name : statistics) {
      double value;
      if (name == "mean_pixel") {
        value = mean_pixel(images[i]);
      } else if (name == "brightness") {
        value = brightness(images[i]);
      } else if (name == "contrast") {
        value = contrast(images[i]);
      } else if (name == "centroid_row") {
        value = centroid_row(images[i]);
      } else {
        throw std::invalid_argument("unknown statistic '" + name + "'");
      }
      csv.write_row({ids[i], name, csv_num(value)});
    }
  }
}

}  // namespace noiselab
