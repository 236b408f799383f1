#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace vgpnn {

// Spatio-temporal extent (frames, rows, columns).
struct Shape3 {
  int t = 1;
  int h = 1;
  int w = 1;

  auto operator<=>(const Shape3&) const = default;
  long long voxels() const { return static_cast<long long>(t) * h * w; }
  bool valid() const { return t >= 1 && h >= 1 && w >= 1; }
};

std::ostream& operator<<(std::ostream& os, const Shape3& s);
std::string to_string(const Shape3& s);

// Dense T x H x W x C video, row-major with channels innermost.
// RGB content lives in [-1, 1].
class VideoTensor {
 public:
  VideoTensor() = default;
  VideoTensor(int t, int h, int w, int c, float fill = 0.0f);
  VideoTensor(Shape3 shape, int c, float fill = 0.0f) : VideoTensor(shape.t, shape.h, shape.w, c, fill) {}
  // Throws std::invalid_argument unless data.size() == t*h*w*c and all values are finite.
  VideoTensor(Shape3 shape, int c, std::vector<float> data);

  int t() const { return t_; }
  int h() const { return h_; }
  int w() const { return w_; }
  int c() const { return c_; }
  Shape3 shape() const { return {t_, h_, w_}; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::size_t index(int t, int y, int x, int ch = 0) const {
    return ((static_cast<std::size_t>(t) * h_ + y) * w_ + x) * c_ + ch;
  }
  float at(int t, int y, int x, int ch = 0) const { return data_[index(t, y, x, ch)]; }
  float& at(int t, int y, int x, int ch = 0) { return data_[index(t, y, x, ch)]; }

  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }
  const float* frame_ptr(int t) const { return data_.data() + index(t, 0, 0); }

  bool operator==(const VideoTensor& o) const = default;

 private:
  int t_ = 0, h_ = 0, w_ = 0, c_ = 0;
  std::vector<float> data_;
};

bool all_finite(const VideoTensor& v);

// Separable cubic resampling to `target` (channels unchanged). Axes are
// processed in the fixed order t, h, w. The kernel is Catmull-Rom (a = -0.5);
// when an axis shrinks the kernel is stretched by the inverse scale
// (antialiased, as in MATLAB imresize). Borders replicate edge samples.
// Output values are clamped to the input's per-channel [min, max].
// An axis whose size is unchanged is copied verbatim.
VideoTensor resize_tricubic(const VideoTensor& v, Shape3 target);

// Catmull-Rom cubic kernel.
double cubic_kernel(double x);

// One h x w x c slab of N(0, std^2) draws from a Philox stream keyed by
// `seed`, replicated to all t frames.
VideoTensor make_replicated_noise(int h, int w, int c, int t, double std, std::uint64_t seed);

// Elementwise a + b (shapes must match).
VideoTensor add(const VideoTensor& a, const VideoTensor& b);

// Channel concatenation [a || b] (spatio-temporal shapes must match).
VideoTensor concat_channels(const VideoTensor& a, const VideoTensor& b);

// Copies channel range [first, first + count).
VideoTensor slice_channels(const VideoTensor& v, int first, int count);

}  // namespace vgpnn
