#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vgpnn/patchwork.hpp"

namespace vgpnn {

// One positive weight per key grid position. A query i matched to key j
// pays W(j) * D(Q_i, K_j).
class WeightField {
 public:
  WeightField() = default;
  // Throws std::invalid_argument unless weights.size() == dims.voxels() and
  // every weight is positive and finite.
  WeightField(Shape3 dims, std::vector<double> weights);
  static WeightField uniform(Shape3 dims, double value = 1.0);

  Shape3 dims() const { return dims_; }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> values() const { return w_; }

 private:
  Shape3 dims_;
  std::vector<double> w_;
};

struct NNField {
  Shape3 query_dims;
  Shape3 key_dims;
  std::vector<GridPos> match;  // per query grid position (row-major t, y, x)
  std::vector<double> cost;    // W(match) * D(Q, K(match))

  double total_cost() const;
};

// Optional per-key admissibility (1 = may be matched); empty means all keys.
using KeyMask = std::span<const std::uint8_t>;

// Mean of squared componentwise differences.
double patch_mse(std::span<const float> a, std::span<const float> b);

// W * MSE between query patch qp and key patch kp, evaluated with the same
// arithmetic the solvers use, so it reproduces NNField::cost exactly.
double weighted_patch_cost(const PatchGrid& q, GridPos qp, const PatchGrid& k, GridPos kp, double weight);

// Brute force: every query scans every admissible key in linear order and
// keeps the first minimum (ties go to the smallest key index).
NNField exhaustive_nnf(const PatchGrid& q, const PatchGrid& k, const WeightField& w, KeyMask allowed = {});

struct PatchMatchParams {
  std::uint64_t seed = 0;
  std::vector<int> steps{8, 4, 1};  // jump-flood propagation distances
  int passes_per_step = 5;
  // Called after every iteration with the current field.
  std::function<void(int iteration, const NNField&)> on_iteration;
};

// Randomized PatchMatch with per-key weights. Per iteration, each query
// tries: the matches of its 6 axis neighbours at distance `step`, each
// unshifted, shifted back by `step`, and shifted with a uniform {-1,0,1}^3
// jitter, plus one random-search sample around its current match with
// radius extent >> iteration (at least 1). Candidates are accepted only on strict improvement, against
// the previous iteration's field (double buffered), so results do not depend
// on thread count.
NNField patchmatch_nnf(const PatchGrid& q, const PatchGrid& k, const WeightField& w,
                       const PatchMatchParams& params, KeyMask allowed = {});

// Tries every candidate key for every query of `field`, accepting strict
// improvements in candidate order.
void refine_nnf(const PatchGrid& q, const PatchGrid& k, const WeightField& w, NNField& field,
                std::span<const GridPos> candidates);

}  // namespace vgpnn
