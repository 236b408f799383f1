#include "vgpnn/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vgpnn {

void ScaleFactors::validate() const {
  auto ok = [](double r) { return r > 0.0 && r < 1.0; };
  if (!ok(r_h) || !ok(r_w) || !ok(r_t)) throw std::invalid_argument("ScaleFactors: factors must lie in (0, 1)");
  if (r_h != r_w) throw std::invalid_argument("ScaleFactors: r_h must equal r_w");
}

std::vector<Shape3> Pyramid::shapes() const {
  std::vector<Shape3> out;
  out.reserve(levels.size());
  for (const auto& l : levels) out.push_back(l.shape());
  return out;
}

long long round_half_away(double x) { return static_cast<long long>(std::round(x)); }

namespace {

int shrink(int d, double r, int minimum) {
  long long next = std::min<long long>(d - 1, round_half_away(d * r));
  return static_cast<int>(std::max<long long>(minimum, next));
}

}  // namespace

std::vector<Shape3> pyramid_shapes(Shape3 input, const ScaleFactors& factors, int min_t, int min_s) {
  factors.validate();
  if (min_t < 1 || min_s < 1) throw std::invalid_argument("pyramid: minima must be >= 1");
  if (!input.valid()) throw std::invalid_argument("pyramid: invalid input shape");
  if (input.t < min_t || std::min(input.h, input.w) < min_s)
    throw std::invalid_argument("pyramid: input " + to_string(input) + " is smaller than the minimal size");

  std::vector<Shape3> shapes{input};
  for (;;) {
    const Shape3 s = shapes.back();
    const bool temporal_done = s.t <= min_t;
    const bool spatial_done = std::min(s.h, s.w) <= min_s;
    if (temporal_done && spatial_done) break;
    Shape3 next = s;
    if (!temporal_done) next.t = shrink(s.t, factors.r_t, min_t);
    if (!spatial_done) {
      next.h = shrink(s.h, factors.r_h, min_s);
      next.w = shrink(s.w, factors.r_w, min_s);
    }
    shapes.push_back(next);
  }
  return shapes;
}

std::vector<VideoTensor> build_levels(const VideoTensor& v, const std::vector<Shape3>& shapes) {
  if (shapes.empty() || shapes.front() != v.shape()) throw std::invalid_argument("build_levels: shape sequence must start at the input shape");
  std::vector<VideoTensor> levels;
  levels.reserve(shapes.size());
  levels.push_back(v);
  for (std::size_t n = 1; n < shapes.size(); ++n) levels.push_back(resize_tricubic(levels.back(), shapes[n]));
  return levels;
}

Pyramid build_pyramid(const VideoTensor& v, const ScaleFactors& factors, int min_t, int min_s) {
  Pyramid p;
  p.factors = factors;
  p.min_t = min_t;
  p.min_s = min_s;
  p.levels = build_levels(v, pyramid_shapes(v.shape(), factors, min_t, min_s));
  return p;
}

Shape3 companion_shape(Shape3 finest, Shape3 reference_level, Shape3 reference_finest, Shape3 floor) {
  auto scale = [](int f, int level, int ref, int lo) {
    if (level == ref) return std::max(f, lo);
    long long v = round_half_away(static_cast<double>(f) * level / ref);
    return static_cast<int>(std::max<long long>({v, lo, 1}));
  };
  return {scale(finest.t, reference_level.t, reference_finest.t, floor.t),
          scale(finest.h, reference_level.h, reference_finest.h, floor.h),
          scale(finest.w, reference_level.w, reference_finest.w, floor.w)};
}

}  // namespace vgpnn
