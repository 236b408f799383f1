#pragma once

// Synthetic inputs and independent reference implementations shared by the
// unit and acceptance suites. The oracles here deliberately avoid the
// library's own code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "vgpnn/pyramid.hpp"
#include "vgpnn/random.hpp"
#include "vgpnn/video.hpp"

namespace vgpnn::testing {

// Uniform [lo, hi) values addressed by element index.
inline VideoTensor random_video(int t, int h, int w, int c, std::uint64_t seed, float lo = -1.0f, float hi = 1.0f) {
  VideoTensor v(t, h, w, c);
  const CounterRng rng(seed);
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto b = rng.block(i);
    v.data()[i] = lo + (hi - lo) * static_cast<float>(unit_open(b[0]));
  }
  return v;
}

// Smooth random texture with a drifting grating: natural-video-like content
// with both spatial structure and motion.
inline VideoTensor textured_clip(int t, int h, int w, std::uint64_t seed) {
  const VideoTensor coarse = random_video(std::max(2, t / 3), std::max(2, h / 6), std::max(2, w / 6), 3, seed);
  VideoTensor v = resize_tricubic(coarse, {t, h, w});
  for (int f = 0; f < t; ++f)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int ch = 0; ch < 3; ++ch) {
          const double g = 0.35 * std::sin(2.0 * std::numbers::pi * (x - 1.5 * f) / 9.0 + 0.7 * ch) *
                           std::cos(2.0 * std::numbers::pi * y / 13.0);
          v.at(f, y, x, ch) = static_cast<float>(std::clamp(0.8 * v.at(f, y, x, ch) + g, -1.0, 1.0));
        }
  return v;
}

// Shape sequence of the pyramid stopping rule, stepped one level at a time.
inline std::vector<Shape3> shape_recurrence_oracle(Shape3 s, double r_s, double r_t, int min_t, int min_s) {
  std::vector<Shape3> out{s};
  auto next = [](int d, double r, int m) {
    int n = static_cast<int>(std::floor(d * r + 0.5));  // positive values: half away from zero
    if (n >= d) n = d - 1;
    return n < m ? m : n;
  };
  bool t_min = s.t == min_t;
  bool s_min = std::min(s.h, s.w) == min_s;
  while (!(t_min && s_min)) {
    Shape3 n = s;
    if (!t_min) n.t = next(s.t, r_t, min_t);
    if (!s_min) {
      n.h = next(s.h, r_s, min_s);
      n.w = next(s.w, r_s, min_s);
    }
    s = n;
    out.push_back(s);
    t_min = s.t == min_t;
    s_min = std::min(s.h, s.w) == min_s;
  }
  return out;
}

// Catmull-Rom value at x, written out piecewise.
inline double catmull_rom(double x) {
  x = std::fabs(x);
  if (x < 1.0) return 1.5 * x * x * x - 2.5 * x * x + 1.0;
  if (x < 2.0) return -0.5 * x * x * x + 2.5 * x * x - 4.0 * x + 2.0;
  return 0.0;
}

// Resampled value of a 1-D signal at output index i (antialiased when shrinking,
// edge-replicated borders, normalized kernel sum).
inline double kernel_sum_1d(const std::vector<double>& s, int out_len, int i) {
  const int in = static_cast<int>(s.size());
  const double scale = static_cast<double>(out_len) / in;
  const double stretch = std::min(1.0, scale);
  const double center = (i + 0.5) * in / out_len - 0.5;
  double num = 0.0, den = 0.0;
  for (int j = -3 * in; j < 4 * in; ++j) {
    const double wgt = catmull_rom((center - j) * stretch);
    if (wgt == 0.0) continue;
    num += wgt * s[std::clamp(j, 0, in - 1)];
    den += wgt;
  }
  return num / den;
}

// Brute-force weighted nearest neighbour over flattened patches.
struct BruteMatch {
  std::size_t key;
  double cost;
};

inline std::vector<float> flat_patch(const VideoTensor& v, int t, int y, int x, int pt, int ph, int pw) {
  std::vector<float> p;
  for (int a = 0; a < pt; ++a)
    for (int b = 0; b < ph; ++b)
      for (int c = 0; c < pw; ++c)
        for (int ch = 0; ch < v.c(); ++ch) p.push_back(v.at(t + a, y + b, x + c, ch));
  return p;
}

inline double mse(const std::vector<float>& a, const std::vector<float>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (static_cast<double>(a[i]) - b[i]) * (static_cast<double>(a[i]) - b[i]);
  return s / static_cast<double>(a.size());
}

inline std::vector<std::vector<float>> all_patches(const VideoTensor& v, int pt, int ph, int pw) {
  std::vector<std::vector<float>> out;
  for (int t = 0; t + pt <= v.t(); ++t)
    for (int y = 0; y + ph <= v.h(); ++y)
      for (int x = 0; x + pw <= v.w(); ++x) out.push_back(flat_patch(v, t, y, x, pt, ph, pw));
  return out;
}

inline std::vector<BruteMatch> brute_nnf(const std::vector<std::vector<float>>& queries,
                                         const std::vector<std::vector<float>>& keys, const std::vector<double>& w) {
  std::vector<BruteMatch> out;
  for (const auto& q : queries) {
    BruteMatch best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t j = 0; j < keys.size(); ++j) {
      const double c = w[j] * mse(q, keys[j]);
      if (c < best.cost) best = {j, c};
    }
    out.push_back(best);
  }
  return out;
}

inline double total(const std::vector<BruteMatch>& m) {
  double s = 0.0;
  for (const auto& b : m) s += b.cost;
  return s;
}

}  // namespace vgpnn::testing
