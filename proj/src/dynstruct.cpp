#include "vgpnn/dynstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vgpnn/error.hpp"
#include "vgpnn/metrics.hpp"
#include "vgpnn/parallel.hpp"

namespace vgpnn {

VideoTensor flow_magnitude(const VideoTensor& flow) {
  if (flow.c() != 2) throw std::invalid_argument("flow_magnitude: flow must have 2 channels");
  if (!all_finite(flow)) throw std::invalid_argument("flow_magnitude: non-finite flow");
  VideoTensor m(flow.shape(), 1);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const float u = flow.data()[2 * i], v = flow.data()[2 * i + 1];
    m.data()[i] = std::sqrt(u * u + v * v);
  }
  return m;
}

namespace {

int nearest(double v, const std::vector<double>& centers) {
  int best = 0;
  double bd = std::abs(v - centers[0]);
  for (int i = 1; i < static_cast<int>(centers.size()); ++i) {
    const double d = std::abs(v - centers[i]);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

struct Lloyd {
  std::vector<double> centers;
  std::vector<double> sse;
  bool reduced = false;
};

Lloyd fit(std::vector<float> data, int k) {
  if (k < 1) throw std::invalid_argument("kmeans_quantize: k must be >= 1");
  if (data.empty()) throw std::invalid_argument("kmeans_quantize: empty field");
  std::vector<float> sorted = data;
  std::sort(sorted.begin(), sorted.end());
  std::vector<float> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  Lloyd r;
  if (static_cast<std::size_t>(k) > distinct.size()) {
    k = static_cast<int>(distinct.size());
    r.reduced = true;
  }
  auto quantiles = [k](const std::vector<float>& v) {
    std::vector<double> c(k);
    for (int i = 0; i < k; ++i) {
      auto idx = static_cast<std::size_t>((i + 0.5) / k * static_cast<double>(v.size()));
      c[i] = v[std::min(idx, v.size() - 1)];
    }
    return c;
  };
  r.centers = quantiles(sorted);
  if (std::adjacent_find(r.centers.begin(), r.centers.end()) != r.centers.end()) r.centers = quantiles(distinct);

  std::vector<int> label(data.size(), -1);
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const int l = nearest(data[i], r.centers);
      changed |= l != label[i];
      label[i] = l;
    }
    std::vector<double> sum(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      sum[label[i]] += data[i];
      ++count[label[i]];
    }
    for (int c = 0; c < k; ++c)
      if (count[c] > 0) r.centers[c] = sum[c] / static_cast<double>(count[c]);
    double sse = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double d = data[i] - r.centers[label[i]];
      sse += d * d;
    }
    r.sse.push_back(sse);
    if (!changed) break;
  }
  std::sort(r.centers.begin(), r.centers.end());
  return r;
}

DynField make_field(const VideoTensor& m, const Lloyd& fit) {
  DynField f;
  f.values = quantize_with_centers(m, fit.centers);
  f.k = static_cast<int>(fit.centers.size());
  f.k_reduced = fit.reduced;
  f.centers = fit.centers;
  f.sse = fit.sse;
  return f;
}

void check_scalar(const VideoTensor& m) {
  if (m.c() != 1) throw std::invalid_argument("kmeans_quantize: expected a single-channel field");
}

}  // namespace

VideoTensor quantize_with_centers(const VideoTensor& magnitudes, const std::vector<double>& centers) {
  check_scalar(magnitudes);
  if (centers.empty()) throw std::invalid_argument("quantize_with_centers: no centers");
  VideoTensor out(magnitudes.shape(), 1);
  const double k = static_cast<double>(centers.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data()[i] = static_cast<float>((nearest(magnitudes.data()[i], centers) + 1) / k);
  return out;
}

DynField kmeans_quantize(const VideoTensor& magnitudes, int k) {
  check_scalar(magnitudes);
  const auto d = magnitudes.data();
  return make_field(magnitudes, fit(std::vector<float>(d.begin(), d.end()), k));
}

std::pair<DynField, DynField> kmeans_quantize_joint(const VideoTensor& a, const VideoTensor& b, int k) {
  check_scalar(a);
  check_scalar(b);
  std::vector<float> all(a.data().begin(), a.data().end());
  all.insert(all.end(), b.data().begin(), b.data().end());
  const Lloyd joint = fit(std::move(all), k);
  return {make_field(a, joint), make_field(b, joint)};
}

VideoTensor block_flow(const VideoTensor& v, int block, int radius) {
  if (block < 1 || block % 2 == 0) throw std::invalid_argument("block_flow: block size must be odd");
  if (radius < 1) throw std::invalid_argument("block_flow: radius must be >= 1");
  if (v.t() < 2) throw DataError("block_flow: need at least two frames");
  const VideoTensor g = to_grayscale(v);
  const int H = g.h(), W = g.w(), half = block / 2;
  const int tiles_y = (H + block - 1) / block, tiles_x = (W + block - 1) / block;
  VideoTensor flow(v.shape(), 2);
  auto px = [&](int t, int y, int x) { return g.at(t, std::clamp(y, 0, H - 1), std::clamp(x, 0, W - 1)); };

  parallel_for(static_cast<std::size_t>(v.t() - 1) * tiles_y, [&](std::size_t begin, std::size_t end) {
    for (std::size_t job = begin; job < end; ++job) {
      const int t = static_cast<int>(job / tiles_y);
      const int ty = static_cast<int>(job % tiles_y);
      for (int tx = 0; tx < tiles_x; ++tx) {
        const int cy = std::min(ty * block + half, H - 1), cx = std::min(tx * block + half, W - 1);
        double best = std::numeric_limits<double>::infinity();
        int best_r2 = 0, bu = 0, bv = 0;
        for (int dy = -radius; dy <= radius; ++dy)
          for (int dx = -radius; dx <= radius; ++dx) {
            double ssd = 0.0;
            for (int i = -half; i <= half; ++i)
              for (int j = -half; j <= half; ++j) {
                const double d = px(t, cy + i, cx + j) - px(t + 1, cy + i + dy, cx + j + dx);
                ssd += d * d;
              }
            const int r2 = dx * dx + dy * dy;
            if (ssd < best || (ssd == best && r2 < best_r2)) {
              best = ssd;
              best_r2 = r2;
              bu = dx;
              bv = dy;
            }
          }
        for (int y = ty * block; y < std::min(H, (ty + 1) * block); ++y)
          for (int x = tx * block; x < std::min(W, (tx + 1) * block); ++x) {
            flow.at(t, y, x, 0) = static_cast<float>(bu);
            flow.at(t, y, x, 1) = static_cast<float>(bv);
          }
      }
    }
  });
  const int last = v.t() - 1;
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      for (int ch = 0; ch < 2; ++ch) flow.at(last, y, x, ch) = flow.at(last - 1, y, x, ch);
  return flow;
}

}  // namespace vgpnn
