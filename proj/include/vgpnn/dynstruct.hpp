#pragma once

#include <vector>

#include "vgpnn/video.hpp"

namespace vgpnn {

// Flow fields are VideoTensors with c = 2 holding (u, v) in pixels per frame.

// Per-voxel sqrt(u^2 + v^2); single-channel result.
VideoTensor flow_magnitude(const VideoTensor& flow);

struct DynField {
  VideoTensor values;           // c = 1, each value label / k with label in 1..k
  int k = 1;                    // bins actually used
  bool k_reduced = false;       // requested k exceeded the distinct value count
  std::vector<double> centers;  // ascending; centers[label - 1]
  std::vector<double> sse;      // within-cluster SSE after every Lloyd iteration
};

// 1-D k-means (Lloyd, at most 50 iterations or until assignments settle).
// Centers start at the (i + 0.5) / k quantiles of the data (falling back to
// quantiles of the distinct values if those coincide); clusters are
// relabelled 1..k by ascending center. Deterministic.
DynField kmeans_quantize(const VideoTensor& magnitudes, int k);

// Fits one set of bins to the magnitudes of both videos together so their
// dynamic structures share a scale.
std::pair<DynField, DynField> kmeans_quantize_joint(const VideoTensor& a, const VideoTensor& b, int k);

// Values label / k for the nearest center (ties to the lower center).
VideoTensor quantize_with_centers(const VideoTensor& magnitudes, const std::vector<double>& centers);

// Exhaustive block matching on grayscale frames: for each block x block tile
// the displacement within +-radius minimizing SSD against the next frame
// (ties prefer the smaller displacement). Every voxel of a tile takes its
// tile's flow; the last frame repeats the previous frame's flow.
VideoTensor block_flow(const VideoTensor& v, int block, int radius);

}  // namespace vgpnn
