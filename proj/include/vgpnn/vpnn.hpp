#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vgpnn/nnfield.hpp"

namespace vgpnn {

enum class Solver { patchmatch, exhaustive };

struct VpnnConfig {
  PatchSpec spec{3, 7, 7};
  int em_iters = 5;
  std::optional<double> alpha;  // absent: uniform key weights
  Solver solver = Solver::patchmatch;
  std::uint64_t seed = 0;
  std::vector<int> steps{8, 4, 1};
  int passes_per_step = 5;

  void validate() const;
};

// Solves the NNF with the configured solver.
NNField solve_nnf(const PatchGrid& q, const PatchGrid& k, const WeightField& w, const VpnnConfig& cfg,
                  std::uint64_t seed, KeyMask allowed = {});

// Completeness weights: for every key, the distance to its closest query
// (found by an NNF pass from keys to queries with uniform weights) gives
// W(j) = 1 / (alpha + min_l D(Q_l, K_j)).
WeightField key_rareness(const PatchGrid& q, const PatchGrid& k, double alpha, const VpnnConfig& cfg,
                         std::uint64_t seed);
WeightField key_rareness(const PatchGrid& q, const PatchGrid& k, double alpha, std::uint64_t seed);

// Query -> key correspondences of a vpnn_step; V patches are gathered at field.match.
struct VpnnTrace {
  NNField field;
};

// One match-and-replace pass: every patch of Q is matched against K and
// replaced by the V patch at the matched position; the replacements are
// folded by per-voxel median into a video of Q's extent with V's channels.
// Q and K must have the same channel count; K and V the same extent.
VideoTensor vpnn_step(const VideoTensor& Q, const VideoTensor& K, const VideoTensor& V, const VpnnConfig& cfg,
                      KeyMask allowed = {}, VpnnTrace* trace = nullptr);

// EM-like refinement at one scale: the first pass uses (guess, k_first, x_n),
// later passes use (previous output, x_n, x_n).
VideoTensor run_scale(const VideoTensor& x_n, const VideoTensor& guess, const VideoTensor& k_first,
                      const VpnnConfig& cfg);

}  // namespace vgpnn
