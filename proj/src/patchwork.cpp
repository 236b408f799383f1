#include "vgpnn/patchwork.hpp"

#include <algorithm>
#include <stdexcept>

#include "vgpnn/error.hpp"
#include "vgpnn/parallel.hpp"

namespace vgpnn {

Shape3 grid_dims(Shape3 source, PatchSpec spec) {
  return {source.t - spec.t + 1, source.h - spec.h + 1, source.w - spec.w + 1};
}

PatchGrid::PatchGrid(const VideoTensor& source, PatchSpec spec)
    : source_(&source), spec_(spec), dims_(grid_dims(source.shape(), spec)) {
  if (spec.t < 1 || spec.h < 1 || spec.w < 1) throw std::invalid_argument("PatchSpec: dimensions must be >= 1");
  if (source.empty() || !spec.fits(source.shape()))
    throw std::invalid_argument("unfold: patch " + std::to_string(spec.t) + "x" + std::to_string(spec.h) + "x" +
                                std::to_string(spec.w) + " does not fit video " + to_string(source.shape()));
}

void PatchGrid::copy_patch(GridPos p, std::span<float> out) const {
  const int c = source_->c();
  const std::size_t run = static_cast<std::size_t>(spec_.w) * c;
  float* d = out.data();
  for (int dt = 0; dt < spec_.t; ++dt)
    for (int dy = 0; dy < spec_.h; ++dy) {
      const float* s = source_->data().data() + source_->index(p.t + dt, p.y + dy, p.x);
      d = std::copy_n(s, run, d);
    }
}

std::vector<float> PatchGrid::patch(GridPos p) const {
  std::vector<float> out(patch_length());
  copy_patch(p, out);
  return out;
}

PatchGrid unfold(const VideoTensor& v, PatchSpec spec) { return PatchGrid(v, spec); }

float median_inplace(std::span<float> values) {
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const float upper = values[mid];
  if (n % 2 == 1) return upper;
  const float lower = *std::max_element(values.begin(), values.begin() + mid);
  return (lower + upper) * 0.5f;
}

VideoTensor fold_median(std::span<const PlacedPatch> patches, PatchSpec spec, Shape3 out_shape, int c) {
  if (!out_shape.valid() || c < 1) throw std::invalid_argument("fold_median: invalid output shape");
  if (!spec.fits(out_shape)) throw std::invalid_argument("fold_median: patch does not fit output");
  const Shape3 g = grid_dims(out_shape, spec);
  const std::size_t len = static_cast<std::size_t>(spec.volume()) * c;

  // Bucket patches by grid position.
  std::vector<std::vector<std::size_t>> at(static_cast<std::size_t>(g.voxels()));
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const GridPos p = patches[i].pos;
    if (p.t < 0 || p.y < 0 || p.x < 0 || p.t >= g.t || p.y >= g.h || p.x >= g.w)
      throw std::invalid_argument("fold_median: patch position outside the grid");
    if (patches[i].values.size() != len) throw std::invalid_argument("fold_median: patch length mismatch");
    at[(static_cast<std::size_t>(p.t) * g.h + p.y) * g.w + p.x].push_back(i);
  }

  VideoTensor out(out_shape, c);
  std::vector<float> buf;
  for (int t = 0; t < out_shape.t; ++t)
    for (int y = 0; y < out_shape.h; ++y)
      for (int x = 0; x < out_shape.w; ++x)
        for (int ch = 0; ch < c; ++ch) {
          buf.clear();
          for (int dt = 0; dt < spec.t; ++dt) {
            const int pt = t - dt;
            if (pt < 0 || pt >= g.t) continue;
            for (int dy = 0; dy < spec.h; ++dy) {
              const int py = y - dy;
              if (py < 0 || py >= g.h) continue;
              for (int dx = 0; dx < spec.w; ++dx) {
                const int px = x - dx;
                if (px < 0 || px >= g.w) continue;
                const std::size_t offset = ((static_cast<std::size_t>(dt) * spec.h + dy) * spec.w + dx) * c + ch;
                for (std::size_t i : at[(static_cast<std::size_t>(pt) * g.h + py) * g.w + px])
                  buf.push_back(patches[i].values[offset]);
              }
            }
          }
          if (buf.empty())
            throw DataError("fold_median: voxel (" + std::to_string(t) + "," + std::to_string(y) + "," +
                            std::to_string(x) + ") is not covered by any patch");
          out.at(t, y, x, ch) = median_inplace(buf);
        }
  return out;
}

VideoTensor fold_gathered(const VideoTensor& values, std::span<const GridPos> sources, PatchSpec spec,
                          Shape3 out_shape) {
  if (!spec.fits(out_shape) || !spec.fits(values.shape()))
    throw std::invalid_argument("fold_gathered: patch does not fit");
  const Shape3 g = grid_dims(out_shape, spec);
  if (sources.size() != static_cast<std::size_t>(g.voxels()))
    throw std::invalid_argument("fold_gathered: one source per query position required");
  const Shape3 vg = grid_dims(values.shape(), spec);
  for (const GridPos& s : sources)
    if (s.t < 0 || s.y < 0 || s.x < 0 || s.t >= vg.t || s.y >= vg.h || s.x >= vg.w)
      throw std::invalid_argument("fold_gathered: source position outside the value grid");

  const int c = values.c();
  VideoTensor out(out_shape, c);
  const std::size_t rows = static_cast<std::size_t>(out_shape.t) * out_shape.h;
  parallel_for(rows, [&](std::size_t begin, std::size_t end) {
    std::vector<float> buf(static_cast<std::size_t>(spec.volume()) * c);
    for (std::size_t row = begin; row < end; ++row) {
      const int t = static_cast<int>(row / out_shape.h);
      const int y = static_cast<int>(row % out_shape.h);
      const int dt_lo = std::max(0, t - (g.t - 1)), dt_hi = std::min(spec.t - 1, t);
      const int dy_lo = std::max(0, y - (g.h - 1)), dy_hi = std::min(spec.h - 1, y);
      for (int x = 0; x < out_shape.w; ++x) {
        const int dx_lo = std::max(0, x - (g.w - 1)), dx_hi = std::min(spec.w - 1, x);
        // Channel-major buffer: channel ch occupies [ch * stride, ch * stride + n).
        const std::size_t stride = static_cast<std::size_t>(spec.volume());
        std::size_t n = 0;
        for (int dt = dt_lo; dt <= dt_hi; ++dt)
          for (int dy = dy_lo; dy <= dy_hi; ++dy) {
            const std::size_t qrow = (static_cast<std::size_t>(t - dt) * g.h + (y - dy)) * g.w;
            for (int dx = dx_lo; dx <= dx_hi; ++dx) {
              const GridPos s = sources[qrow + (x - dx)];
              const float* v = values.data().data() + values.index(s.t + dt, s.y + dy, s.x + dx);
              for (int ch = 0; ch < c; ++ch) buf[ch * stride + n] = v[ch];
              ++n;
            }
          }
        for (int ch = 0; ch < c; ++ch)
          out.at(t, y, x, ch) = median_inplace(std::span<float>(buf.data() + ch * stride, n));
      }
    }
  });
  return out;
}

}  // namespace vgpnn
