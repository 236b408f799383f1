#include "vgpnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vgpnn/error.hpp"
#include "vgpnn/nnfield.hpp"

namespace vgpnn {

VideoTensor to_grayscale(const VideoTensor& v) {
  if (v.c() == 1) return v;
  if (v.c() != 3) throw std::invalid_argument("to_grayscale: expected 1 or 3 channels");
  VideoTensor g(v.shape(), 1);
  const std::size_t n = static_cast<std::size_t>(v.shape().voxels());
  for (std::size_t i = 0; i < n; ++i) {
    const float* p = v.data().data() + 3 * i;
    g.data()[i] = static_cast<float>(0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]);
  }
  return g;
}

double diversity_index(const VideoTensor& input, std::span<const VideoTensor> samples) {
  if (samples.size() < 2) throw std::invalid_argument("diversity_index: at least two samples required");
  for (const auto& s : samples)
    if (s.shape() != samples[0].shape() || s.c() != samples[0].c())
      throw std::invalid_argument("diversity_index: samples must share one shape");

  const VideoTensor gin = to_grayscale(input);
  double mean = 0.0;
  for (float v : gin.data()) mean += v;
  mean /= static_cast<double>(gin.size());
  double var = 0.0;
  for (float v : gin.data()) var += (v - mean) * (v - mean);
  const double input_std = std::sqrt(var / static_cast<double>(gin.size()));
  if (!(input_std > 0.0)) throw DataError("diversity_index: input video is constant");

  std::vector<VideoTensor> gray;
  gray.reserve(samples.size());
  for (const auto& s : samples) gray.push_back(to_grayscale(s));
  const std::size_t n = gray[0].size();
  const double m = static_cast<double>(gray.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double mu = 0.0;
    for (const auto& g : gray) mu += g.data()[i];
    mu /= m;
    double ss = 0.0;
    for (const auto& g : gray) ss += (g.data()[i] - mu) * (g.data()[i] - mu);
    acc += std::sqrt(ss / m);
  }
  return acc / static_cast<double>(n) / input_std;
}

double coherence_audit(const VideoTensor& y, const VideoTensor& x, PatchSpec spec) {
  if (y.c() != x.c()) throw std::invalid_argument("coherence_audit: channel mismatch");
  const PatchGrid yg = unfold(y, spec);
  const PatchGrid xg = unfold(x, spec);
  const NNField f = exhaustive_nnf(yg, xg, WeightField::uniform(xg.dims()));
  return *std::max_element(f.cost.begin(), f.cost.end());
}

double psnr(const VideoTensor& a, const VideoTensor& b) {
  if (a.shape() != b.shape() || a.c() != b.c()) throw std::invalid_argument("psnr: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a.data()[i]) - b.data()[i];
    s += d * d;
  }
  const double mse = s / static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(4.0 / mse);
}

}  // namespace vgpnn
