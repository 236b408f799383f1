#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vgpnn/video.hpp"

namespace vgpnn {

// 3-D patch extent (frames, rows, columns); stride is always 1.
struct PatchSpec {
  int t = 3;
  int h = 7;
  int w = 7;

  bool operator==(const PatchSpec&) const = default;
  int volume() const { return t * h * w; }
  bool fits(Shape3 s) const { return t <= s.t && h <= s.h && w <= s.w; }
};

// Top-left-front corner of a patch.
struct GridPos {
  int t = 0;
  int y = 0;
  int x = 0;

  bool operator==(const GridPos&) const = default;
};

// Number of valid stride-1 patch positions along each axis.
Shape3 grid_dims(Shape3 source, PatchSpec spec);

// Lazy view of every valid patch of a tensor. Holds a pointer to the source,
// which must outlive the grid; patches are materialized only on request.
class PatchGrid {
 public:
  PatchGrid(const VideoTensor& source, PatchSpec spec);

  const VideoTensor& source() const { return *source_; }
  PatchSpec spec() const { return spec_; }
  Shape3 dims() const { return dims_; }
  int channels() const { return source_->c(); }
  std::size_t count() const { return static_cast<std::size_t>(dims_.voxels()); }
  std::size_t patch_length() const { return static_cast<std::size_t>(spec_.volume()) * source_->c(); }

  std::size_t linear(GridPos p) const {
    return (static_cast<std::size_t>(p.t) * dims_.h + p.y) * dims_.w + p.x;
  }
  GridPos position(std::size_t i) const {
    const int x = static_cast<int>(i % dims_.w);
    i /= dims_.w;
    return {static_cast<int>(i / dims_.h), static_cast<int>(i % dims_.h), x};
  }
  bool contains(GridPos p) const {
    return p.t >= 0 && p.y >= 0 && p.x >= 0 && p.t < dims_.t && p.y < dims_.h && p.x < dims_.w;
  }

  // Flattened patch in (t, y, x, c) order.
  void copy_patch(GridPos p, std::span<float> out) const;
  std::vector<float> patch(GridPos p) const;

 private:
  const VideoTensor* source_;
  PatchSpec spec_;
  Shape3 dims_;
};

// Throws std::invalid_argument when the spec does not fit inside v.
PatchGrid unfold(const VideoTensor& v, PatchSpec spec);

struct PlacedPatch {
  GridPos pos;
  std::vector<float> values;  // length spec.volume() * c
};

// Per-voxel, per-channel median over every patch value covering the voxel.
// Even counts average the two central order statistics. Throws DataError if
// some voxel is covered by no patch.
VideoTensor fold_median(std::span<const PlacedPatch> patches, PatchSpec spec, Shape3 out_shape, int c);

// Fold of gathered patches without materializing them: the patch suggested
// for query position p is the patch of `values` at sources[linear(p)], where
// query positions range over grid_dims(out_shape, spec). Equivalent to
// fold_median over {(p, values patch at sources[p])}.
VideoTensor fold_gathered(const VideoTensor& values, std::span<const GridPos> sources, PatchSpec spec,
                          Shape3 out_shape);

// In-place median of a non-empty buffer (reorders it).
float median_inplace(std::span<float> values);

}  // namespace vgpnn
