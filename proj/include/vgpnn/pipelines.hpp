#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vgpnn/pyramid.hpp"
#include "vgpnn/vpnn.hpp"

namespace vgpnn {

struct PipelineConfig {
  ScaleFactors factors{0.82, 0.82, 0.87};
  int min_t = 3;
  int min_s = 15;
  double noise_std = 3.0;
  std::optional<Shape3> out_shape;  // generate only; default is the input shape with temporal_shrink applied
  PatchSpec spec_small{3, 5, 5};
  PatchSpec spec_large{3, 7, 7};
  int em_iters_small = 1;
  int em_iters_large = 5;
  long long voxel_threshold = 3'000'000;
  std::optional<double> alpha;  // completeness weight; retarget/inpaint/analogies use 1 when unset
  double temporal_shrink = 0.9;
  double aux_max_scale_fraction = 0.5;
  int single_em_finest_levels = 0;  // this many finest levels run one EM iteration
  bool noisy_coarse_keys = false;   // generate: coarsest keys are x_N + z instead of x_N
  Solver solver = Solver::patchmatch;
  std::vector<int> steps{8, 4, 1};
  int passes_per_step = 5;

  // Video analogies, all-pairs setting: factor 0.9, minima 3 / 20, one EM
  // iteration, 3x5x5 patches, alpha = 1.
  static PipelineConfig analogies_all_pairs();
  // Sketch-to-video: factor 0.78, minima 5 / 35, three EM iterations (one on
  // the two finest levels), 3x5x5 patches, alpha = 1.
  static PipelineConfig analogies_sketch();

  void validate() const;
};

struct LevelPlan {
  PatchSpec spec;
  int em_iters;
};

// Patch size and EM count for pyramid level `level` (0 = finest) whose
// output has `out_shape`: large patches / em_iters_large up to
// voxel_threshold output voxels, small patches / em_iters_small above it.
LevelPlan plan_level(const PipelineConfig& cfg, Shape3 out_shape, int level);

VideoTensor generate(const VideoTensor& x, const PipelineConfig& cfg, std::uint64_t seed);

VideoTensor retarget(const VideoTensor& x, Shape3 target, const PipelineConfig& cfg, std::uint64_t seed = 0);

// Occlusion mask plus colour cues for conditional inpainting.
struct CueMask {
  Shape3 shape;
  std::vector<std::uint8_t> mask;  // 1 = occluded, row-major t, y, x
  VideoTensor cue;                 // RGB, meaningful on occluded voxels

  // mask tensor: c = 1, nonzero = occluded.
  static CueMask from_tensors(const VideoTensor& mask, const VideoTensor& cue);
  std::size_t occluded() const;
};

// The pyramid is deepened until the occluded region's bounding box fits in
// one patch at the coarsest level (going below the configured minima if
// needed). Keys and values only come from patches clear of the (dilated)
// mask; unmasked voxels of the result are copied from x.
VideoTensor inpaint(const VideoTensor& x, const CueMask& cue, const PipelineConfig& cfg, std::uint64_t seed = 0);

// Layout from content C, appearance and dynamics from style S. dyn_c/dyn_s
// are single-channel dynamic-structure fields in [0, 1] shaped like C and S.
VideoTensor analogies(const VideoTensor& C, const VideoTensor& S, const VideoTensor& dyn_c, const VideoTensor& dyn_s,
                      const PipelineConfig& cfg, std::uint64_t seed = 0);

// Pyramid depth inpaint() would use, and the per-level occlusion masks.
struct InpaintPlan {
  std::vector<Shape3> shapes;
  std::vector<std::vector<std::uint8_t>> masks;  // per level, before dilation
};
InpaintPlan plan_inpaint(Shape3 input, const std::vector<std::uint8_t>& mask, const PipelineConfig& cfg);

// Occupancy-preserving downscale: a coarse voxel is set when any fine voxel
// it covers is set.
std::vector<std::uint8_t> downscale_mask(const std::vector<std::uint8_t>& mask, Shape3 from, Shape3 to);
std::vector<std::uint8_t> dilate_mask(const std::vector<std::uint8_t>& mask, Shape3 shape, int radius);
// 1 for key positions whose patch avoids every set voxel.
std::vector<std::uint8_t> clean_patch_positions(const std::vector<std::uint8_t>& mask, Shape3 shape, PatchSpec spec);

}  // namespace vgpnn
