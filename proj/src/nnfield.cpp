#include "vgpnn/nnfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "vgpnn/error.hpp"
#include "vgpnn/parallel.hpp"
#include "vgpnn/random.hpp"

namespace vgpnn {

WeightField::WeightField(Shape3 dims, std::vector<double> weights) : dims_(dims), w_(std::move(weights)) {
  if (!dims.valid() || w_.size() != static_cast<std::size_t>(dims.voxels()))
    throw std::invalid_argument("WeightField: one weight per key position required");
  for (double v : w_)
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("WeightField: weights must be positive and finite");
}

WeightField WeightField::uniform(Shape3 dims, double value) {
  return WeightField(dims, std::vector<double>(static_cast<std::size_t>(dims.voxels()), value));
}

double NNField::total_cost() const { return std::accumulate(cost.begin(), cost.end(), 0.0); }

double patch_mse(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw std::invalid_argument("patch_mse: length mismatch");
  if (a.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Weighted patch distance between two tensors with early termination. A
// patch is p_t * p_h contiguous runs of p_w * c floats. Partial sums only
// grow, so abandoning a candidate once its partial cost reaches `best`
// never changes which candidate wins.
class CostKernel {
 public:
  CostKernel(const PatchGrid& q, const PatchGrid& k)
      : qd_(q.source().data().data()),
        kd_(k.source().data().data()),
        q_row_(static_cast<std::size_t>(q.source().w()) * q.channels()),
        q_frame_(q_row_ * q.source().h()),
        k_row_(static_cast<std::size_t>(k.source().w()) * k.channels()),
        k_frame_(k_row_ * k.source().h()),
        c_(q.channels()),
        pt_(q.spec().t),
        ph_(q.spec().h),
        run_(q.spec().w * q.channels()),
        n_(static_cast<float>(q.patch_length())) {
    if (!(q.spec() == k.spec())) throw std::invalid_argument("nnf: query and key patch specs differ");
    if (q.channels() != k.channels()) throw std::invalid_argument("nnf: query and key channel counts differ");
  }

  std::size_t q_offset(GridPos p) const { return p.t * q_frame_ + p.y * q_row_ + static_cast<std::size_t>(p.x) * c_; }
  std::size_t k_offset(GridPos p) const { return p.t * k_frame_ + p.y * k_row_ + static_cast<std::size_t>(p.x) * c_; }

  // Returns weight * mse, or +inf once the running cost reaches `best`.
  double cost(std::size_t qo, std::size_t ko, double weight, double best) const {
    float partial = 0.0f;
    for (int dt = 0; dt < pt_; ++dt) {
      const float* qf = qd_ + qo + dt * q_frame_;
      const float* kf = kd_ + ko + dt * k_frame_;
      for (int dy = 0; dy < ph_; ++dy) {
        const float* a = qf + dy * q_row_;
        const float* b = kf + dy * k_row_;
        float s0 = 0.0f, s1 = 0.0f, s2 = 0.0f, s3 = 0.0f;
        int i = 0;
        for (; i + 4 <= run_; i += 4) {
          const float d0 = a[i] - b[i], d1 = a[i + 1] - b[i + 1];
          const float d2 = a[i + 2] - b[i + 2], d3 = a[i + 3] - b[i + 3];
          s0 += d0 * d0;
          s1 += d1 * d1;
          s2 += d2 * d2;
          s3 += d3 * d3;
        }
        for (; i < run_; ++i) {
          const float d = a[i] - b[i];
          s0 += d * d;
        }
        partial += (s0 + s1) + (s2 + s3);
      }
      if (weight * static_cast<double>(partial / n_) >= best) return kInf;
    }
    return weight * static_cast<double>(partial / n_);
  }

 private:
  const float* qd_;
  const float* kd_;
  std::size_t q_row_, q_frame_, k_row_, k_frame_;
  int c_, pt_, ph_, run_;
  float n_;
};

void check_grids(const PatchGrid& q, const PatchGrid& k, const WeightField& w, KeyMask allowed) {
  if (q.count() == 0 || k.count() == 0) throw std::invalid_argument("nnf: empty patch grid");
  if (w.dims() != k.dims()) throw std::invalid_argument("nnf: weight field does not match the key grid");
  if (!allowed.empty() && allowed.size() != k.count()) throw std::invalid_argument("nnf: key mask size mismatch");
}

std::vector<std::uint32_t> admissible_keys(const PatchGrid& k, KeyMask allowed) {
  std::vector<std::uint32_t> keys;
  keys.reserve(k.count());
  for (std::size_t j = 0; j < k.count(); ++j)
    if (allowed.empty() || allowed[j]) keys.push_back(static_cast<std::uint32_t>(j));
  if (keys.empty()) throw DataError("nnf: no admissible key patches");
  return keys;
}

GridPos clamp_to(GridPos p, Shape3 d) {
  return {std::clamp(p.t, 0, d.t - 1), std::clamp(p.y, 0, d.h - 1), std::clamp(p.x, 0, d.w - 1)};
}

}  // namespace

double weighted_patch_cost(const PatchGrid& q, GridPos qp, const PatchGrid& k, GridPos kp, double weight) {
  CostKernel kernel(q, k);
  if (!q.contains(qp) || !k.contains(kp)) throw std::invalid_argument("weighted_patch_cost: position outside grid");
  return kernel.cost(kernel.q_offset(qp), kernel.k_offset(kp), weight, kInf);
}

NNField exhaustive_nnf(const PatchGrid& q, const PatchGrid& k, const WeightField& w, KeyMask allowed) {
  check_grids(q, k, w, allowed);
  const CostKernel kernel(q, k);
  const std::vector<std::uint32_t> keys = admissible_keys(k, allowed);
  std::vector<std::size_t> key_offset(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) key_offset[i] = kernel.k_offset(k.position(keys[i]));

  NNField f{q.dims(), k.dims(), std::vector<GridPos>(q.count()), std::vector<double>(q.count())};
  parallel_for(q.count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t qo = kernel.q_offset(q.position(i));
      double best = kInf;
      std::uint32_t arg = keys[0];
      for (std::size_t j = 0; j < keys.size(); ++j) {
        const double c = kernel.cost(qo, key_offset[j], w[keys[j]], best);
        if (c < best) {
          best = c;
          arg = keys[j];
        }
      }
      f.match[i] = k.position(arg);
      f.cost[i] = best;
    }
  });
  return f;
}

void refine_nnf(const PatchGrid& q, const PatchGrid& k, const WeightField& w, NNField& field,
                std::span<const GridPos> candidates) {
  check_grids(q, k, w, {});
  if (field.match.size() != q.count()) throw std::invalid_argument("refine_nnf: field does not match the query grid");
  const CostKernel kernel(q, k);
  parallel_for(q.count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t qo = kernel.q_offset(q.position(i));
      for (const GridPos& cand : candidates) {
        if (!k.contains(cand)) continue;
        const double c = kernel.cost(qo, kernel.k_offset(cand), w[k.linear(cand)], field.cost[i]);
        if (c < field.cost[i]) {
          field.cost[i] = c;
          field.match[i] = cand;
        }
      }
    }
  });
}

NNField patchmatch_nnf(const PatchGrid& q, const PatchGrid& k, const WeightField& w, const PatchMatchParams& params,
                       KeyMask allowed) {
  check_grids(q, k, w, allowed);
  if (params.steps.empty() || params.passes_per_step < 1)
    throw std::invalid_argument("patchmatch_nnf: the iteration schedule is empty");
  for (int s : params.steps)
    if (s < 1) throw std::invalid_argument("patchmatch_nnf: propagation steps must be >= 1");

  const CostKernel kernel(q, k);
  const std::vector<std::uint32_t> keys = admissible_keys(k, allowed);
  const Shape3 qd = q.dims();
  const Shape3 kd = k.dims();
  const CounterRng root(params.seed);
  const CounterRng init_rng = root.split(0);
  const CounterRng iter_rng = root.split(1);
  auto admissible = [&](std::size_t j) { return allowed.empty() || allowed[j] != 0; };

  NNField cur{qd, kd, std::vector<GridPos>(q.count()), std::vector<double>(q.count())};
  parallel_for(q.count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto bits = init_rng.block(i);
      const std::uint32_t j = keys[bounded(bits[0], bits[1], keys.size())];
      cur.match[i] = k.position(j);
      cur.cost[i] = kernel.cost(kernel.q_offset(q.position(i)), kernel.k_offset(cur.match[i]), w[j], kInf);
    }
  });

  static constexpr int kAxis[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  NNField next = cur;
  const int iterations = static_cast<int>(params.steps.size()) * params.passes_per_step;
  for (int it = 0; it < iterations; ++it) {
    const int step = params.steps[it / params.passes_per_step];
    const int shift = std::min(it, 30);
    const int rt = std::max(1, kd.t >> shift), ry = std::max(1, kd.h >> shift), rx = std::max(1, kd.w >> shift);
    parallel_for(q.count(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const GridPos p = q.position(i);
        const std::size_t qo = kernel.q_offset(p);
        GridPos best = cur.match[i];
        double best_cost = cur.cost[i];
        auto consider = [&](GridPos cand) {
          cand = clamp_to(cand, kd);
          if (cand == best) return;
          const std::size_t j = k.linear(cand);
          if (!admissible(j)) return;
          const double c = kernel.cost(qo, kernel.k_offset(cand), w[j], best_cost);
          if (c < best_cost) {
            best_cost = c;
            best = cand;
          }
        };
        std::array<std::uint32_t, 12> bits{};
        for (int b = 0; b < 3; ++b) {
          auto blk = iter_rng.block(i, static_cast<std::uint64_t>(it) * 4 + b);
          std::copy(blk.begin(), blk.end(), bits.begin() + 4 * b);
        }
        for (int d = 0; d < 6; ++d) {
          const GridPos nb{p.t + kAxis[d][0] * step, p.y + kAxis[d][1] * step, p.x + kAxis[d][2] * step};
          if (!q.contains(nb)) continue;
          const GridPos m = cur.match[q.linear(nb)];
          const GridPos shifted{m.t - kAxis[d][0] * step, m.y - kAxis[d][1] * step, m.x - kAxis[d][2] * step};
          consider(shifted);
          consider(m);
          const std::uint32_t j = static_cast<std::uint32_t>(bounded(bits[d], 0, 27));
          const int jt = static_cast<int>(j / 9) - 1, jy = static_cast<int>(j / 3 % 3) - 1, jx = static_cast<int>(j % 3) - 1;
          consider({shifted.t + jt, shifted.y + jy, shifted.x + jx});
        }
        auto offset = [](std::uint32_t b, int r) { return static_cast<int>(bounded(b, 0, 2 * r + 1)) - r; };
        consider({best.t + offset(bits[6], rt), best.y + offset(bits[7], ry), best.x + offset(bits[8], rx)});
        next.match[i] = best;
        next.cost[i] = best_cost;
      }
    });
    std::swap(cur, next);
    if (params.on_iteration) params.on_iteration(it, cur);
  }
  return cur;
}

}  // namespace vgpnn
