#include "vgpnn/video.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "vgpnn/parallel.hpp"
#include "vgpnn/random.hpp"

namespace vgpnn {

std::ostream& operator<<(std::ostream& os, const Shape3& s) {
  return os << s.t << "x" << s.h << "x" << s.w;
}

std::string to_string(const Shape3& s) {
  std::ostringstream os;
  os << s;
  return os.str();
}

VideoTensor::VideoTensor(int t, int h, int w, int c, float fill) : t_(t), h_(h), w_(w), c_(c) {
  if (t < 1 || h < 1 || w < 1 || c < 1) throw std::invalid_argument("VideoTensor: dimensions must be >= 1");
  if (!std::isfinite(fill)) throw std::invalid_argument("VideoTensor: non-finite fill value");
  data_.assign(static_cast<std::size_t>(t) * h * w * c, fill);
}

VideoTensor::VideoTensor(Shape3 shape, int c, std::vector<float> data)
    : t_(shape.t), h_(shape.h), w_(shape.w), c_(c), data_(std::move(data)) {
  if (!shape.valid() || c < 1) throw std::invalid_argument("VideoTensor: dimensions must be >= 1");
  if (data_.size() != static_cast<std::size_t>(shape.voxels()) * c)
    throw std::invalid_argument("VideoTensor: data length does not match t*h*w*c");
  if (!all_finite(*this)) throw std::invalid_argument("VideoTensor: non-finite data");
}

bool all_finite(const VideoTensor& v) {
  return std::all_of(v.data().begin(), v.data().end(), [](float x) { return std::isfinite(x); });
}

double cubic_kernel(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

namespace {

struct Taps {
  std::vector<int> offset;  // first tap index into `index`/`weight` for each output sample
  std::vector<int> index;
  std::vector<double> weight;
};

Taps make_taps(int in, int out) {
  Taps taps;
  const double scale = static_cast<double>(out) / in;
  const double stretch = scale < 1.0 ? scale : 1.0;
  const double support = 2.0 / stretch;
  taps.offset.reserve(out + 1);
  for (int i = 0; i < out; ++i) {
    taps.offset.push_back(static_cast<int>(taps.index.size()));
    const double center = (i + 0.5) / scale - 0.5;
    const int lo = static_cast<int>(std::floor(center - support));
    const int hi = static_cast<int>(std::ceil(center + support));
    const std::size_t first = taps.weight.size();
    double sum = 0.0;
    for (int j = lo; j <= hi; ++j) {
      double wgt = cubic_kernel((center - j) * stretch);
      if (wgt == 0.0) continue;
      taps.index.push_back(std::clamp(j, 0, in - 1));
      taps.weight.push_back(wgt);
      sum += wgt;
    }
    for (std::size_t k = first; k < taps.weight.size(); ++k) taps.weight[k] /= sum;
  }
  taps.offset.push_back(static_cast<int>(taps.index.size()));
  return taps;
}

// Resamples along one axis. The tensor is viewed as [outer][axis][inner].
std::vector<float> resample_axis(const std::vector<float>& src, std::size_t outer, int in, int out,
                                 std::size_t inner) {
  std::vector<float> dst(outer * out * inner);
  const Taps taps = make_taps(in, out);
  parallel_for(outer * out, [&](std::size_t begin, std::size_t end) {
    std::vector<double> acc(inner);
    for (std::size_t row = begin; row < end; ++row) {
      const std::size_t o = row / out;
      const int i = static_cast<int>(row % out);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int k = taps.offset[i]; k < taps.offset[i + 1]; ++k) {
        const float* s = src.data() + (o * in + taps.index[k]) * inner;
        const double wgt = taps.weight[k];
        for (std::size_t e = 0; e < inner; ++e) acc[e] += wgt * s[e];
      }
      float* d = dst.data() + row * inner;
      for (std::size_t e = 0; e < inner; ++e) d[e] = static_cast<float>(acc[e]);
    }
  });
  return dst;
}

}  // namespace

VideoTensor resize_tricubic(const VideoTensor& v, Shape3 target) {
  if (v.empty()) throw std::invalid_argument("resize_tricubic: empty input");
  if (!target.valid()) throw std::invalid_argument("resize_tricubic: target dimensions must be >= 1");
  if (!all_finite(v)) throw std::invalid_argument("resize_tricubic: non-finite input");
  if (target == v.shape()) return v;

  const int c = v.c();
  std::vector<float> lo(c, std::numeric_limits<float>::max());
  std::vector<float> hi(c, std::numeric_limits<float>::lowest());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int ch = static_cast<int>(i % c);
    lo[ch] = std::min(lo[ch], v.data()[i]);
    hi[ch] = std::max(hi[ch], v.data()[i]);
  }

  std::vector<float> buf(v.data().begin(), v.data().end());
  Shape3 cur = v.shape();
  if (target.t != cur.t) {
    buf = resample_axis(buf, 1, cur.t, target.t, static_cast<std::size_t>(cur.h) * cur.w * c);
    cur.t = target.t;
  }
  if (target.h != cur.h) {
    buf = resample_axis(buf, cur.t, cur.h, target.h, static_cast<std::size_t>(cur.w) * c);
    cur.h = target.h;
  }
  if (target.w != cur.w) {
    buf = resample_axis(buf, static_cast<std::size_t>(cur.t) * cur.h, cur.w, target.w, c);
    cur.w = target.w;
  }
  for (std::size_t i = 0; i < buf.size(); ++i) {
    const int ch = static_cast<int>(i % c);
    buf[i] = std::clamp(buf[i], lo[ch], hi[ch]);
  }
  return VideoTensor(target, c, std::move(buf));
}

VideoTensor make_replicated_noise(int h, int w, int c, int t, double std, std::uint64_t seed) {
  if (!(std >= 0.0) || !std::isfinite(std)) throw std::invalid_argument("make_replicated_noise: std must be >= 0");
  VideoTensor out(t, h, w, c);
  const std::size_t slab = static_cast<std::size_t>(h) * w * c;
  if (std > 0.0) {
    const CounterRng rng(seed);
    float* first = out.data().data();
    for (std::size_t i = 0; i < slab; i += 2) {
      auto bits = rng.block(i / 2);
      auto [z0, z1] = box_muller(bits[0], bits[1]);
      first[i] = static_cast<float>(std * z0);
      if (i + 1 < slab) first[i + 1] = static_cast<float>(std * z1);
    }
    for (int f = 1; f < t; ++f) std::copy(first, first + slab, first + f * slab);
  }
  return out;
}

VideoTensor add(const VideoTensor& a, const VideoTensor& b) {
  if (a.shape() != b.shape() || a.c() != b.c()) throw std::invalid_argument("add: shape mismatch");
  VideoTensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

VideoTensor concat_channels(const VideoTensor& a, const VideoTensor& b) {
  if (a.shape() != b.shape()) throw std::invalid_argument("concat_channels: spatio-temporal shape mismatch");
  VideoTensor out(a.shape(), a.c() + b.c());
  const std::size_t n = static_cast<std::size_t>(a.shape().voxels());
  for (std::size_t v = 0; v < n; ++v) {
    float* d = out.data().data() + v * out.c();
    std::copy_n(a.data().data() + v * a.c(), a.c(), d);
    std::copy_n(b.data().data() + v * b.c(), b.c(), d + a.c());
  }
  return out;
}

VideoTensor slice_channels(const VideoTensor& v, int first, int count) {
  if (first < 0 || count < 1 || first + count > v.c()) throw std::invalid_argument("slice_channels: bad channel range");
  VideoTensor out(v.shape(), count);
  const std::size_t n = static_cast<std::size_t>(v.shape().voxels());
  for (std::size_t i = 0; i < n; ++i)
    std::copy_n(v.data().data() + i * v.c() + first, count, out.data().data() + i * count);
  return out;
}

}  // namespace vgpnn
