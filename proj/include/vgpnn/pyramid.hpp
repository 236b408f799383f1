#pragma once

#include <vector>

#include "vgpnn/video.hpp"

namespace vgpnn {

// Per-axis downscaling factors. Height and width must share one factor.
struct ScaleFactors {
  double r_h = 0.82;
  double r_w = 0.82;
  double r_t = 0.87;

  static ScaleFactors uniform(double r) { return {r, r, r}; }
  // Throws std::invalid_argument unless every factor is in (0, 1) and r_h == r_w.
  void validate() const;
};

struct Pyramid {
  std::vector<VideoTensor> levels;  // 0 = input, back() = coarsest
  ScaleFactors factors;
  int min_t = 3;
  int min_s = 15;

  int coarsest() const { return static_cast<int>(levels.size()) - 1; }
  std::vector<Shape3> shapes() const;
};

// Level shapes for an input of shape `input`. Every dimension shrinks by its
// factor (rounded half away from zero, and by at least one sample) and is
// clamped to its minimum; a group (temporal, or spatial = min(h, w)) that
// reaches its minimum stays fixed while the other group keeps shrinking.
// The sequence ends once both groups sit at their minima.
std::vector<Shape3> pyramid_shapes(Shape3 input, const ScaleFactors& factors, int min_t, int min_s);

// levels[n + 1] = resize_tricubic(levels[n], pyramid_shapes(...)[n + 1]).
Pyramid build_pyramid(const VideoTensor& v, const ScaleFactors& factors, int min_t, int min_s);

// Resizes `v` through the given shape sequence (shapes[0] must be v's shape).
std::vector<VideoTensor> build_levels(const VideoTensor& v, const std::vector<Shape3>& shapes);

// Shape of level n for a companion video whose finest shape is `finest`, so
// that it follows the same per-level scale as `reference` (e.g. a retarget
// guess or a generated output). Each dimension is at least `floor`.
Shape3 companion_shape(Shape3 finest, Shape3 reference_level, Shape3 reference_finest, Shape3 floor);

long long round_half_away(double x);

}  // namespace vgpnn
