#pragma once

#include <span>

#include "vgpnn/patchwork.hpp"

namespace vgpnn {

// Luma with weights 0.299 / 0.587 / 0.114 for 3-channel input; single-channel
// input is returned unchanged.
VideoTensor to_grayscale(const VideoTensor& v);

// Mean over voxels of the per-voxel (population) std across samples, in
// grayscale, divided by the (population) std of the input's grayscale voxels.
// Needs >= 2 equally shaped samples and a non-constant input.
double diversity_index(const VideoTensor& input, std::span<const VideoTensor> samples);

// Max over patches of y of the smallest MSE to any patch of x (exhaustive).
// Zero iff every patch of y occurs in x.
double coherence_audit(const VideoTensor& y, const VideoTensor& x, PatchSpec spec);

// 10 log10(peak^2 / MSE) with peak = 2 (the [-1, 1] range); +inf when equal.
double psnr(const VideoTensor& a, const VideoTensor& b);

}  // namespace vgpnn
