#include "vgpnn/vpnn.hpp"

#include <stdexcept>

#include "vgpnn/random.hpp"

namespace vgpnn {

void VpnnConfig::validate() const {
  if (spec.t < 1 || spec.h < 1 || spec.w < 1) throw std::invalid_argument("VpnnConfig: invalid patch spec");
  if (em_iters < 1) throw std::invalid_argument("VpnnConfig: em_iters must be >= 1");
  if (alpha && !(*alpha > 0.0)) throw std::invalid_argument("VpnnConfig: alpha must be > 0");
  if (solver == Solver::patchmatch && (steps.empty() || passes_per_step < 1))
    throw std::invalid_argument("VpnnConfig: empty PatchMatch schedule");
}

NNField solve_nnf(const PatchGrid& q, const PatchGrid& k, const WeightField& w, const VpnnConfig& cfg,
                  std::uint64_t seed, KeyMask allowed) {
  if (cfg.solver == Solver::exhaustive) return exhaustive_nnf(q, k, w, allowed);
  PatchMatchParams params;
  params.seed = seed;
  params.steps = cfg.steps;
  params.passes_per_step = cfg.passes_per_step;
  return patchmatch_nnf(q, k, w, params, allowed);
}

WeightField key_rareness(const PatchGrid& q, const PatchGrid& k, double alpha, const VpnnConfig& cfg,
                         std::uint64_t seed) {
  if (!(alpha > 0.0)) throw std::invalid_argument("key_rareness: alpha must be > 0");
  const NNField reverse = solve_nnf(k, q, WeightField::uniform(q.dims()), cfg, seed);
  std::vector<double> w(k.count());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = 1.0 / (alpha + reverse.cost[j]);
  return WeightField(k.dims(), std::move(w));
}

WeightField key_rareness(const PatchGrid& q, const PatchGrid& k, double alpha, std::uint64_t seed) {
  VpnnConfig cfg;
  return key_rareness(q, k, alpha, cfg, seed);
}

VideoTensor vpnn_step(const VideoTensor& Q, const VideoTensor& K, const VideoTensor& V, const VpnnConfig& cfg,
                      KeyMask allowed, VpnnTrace* trace) {
  cfg.validate();
  if (K.shape() != V.shape()) throw std::invalid_argument("vpnn_step: K and V must have the same shape");
  if (Q.c() != K.c()) throw std::invalid_argument("vpnn_step: Q and K must have the same channel count");
  const PatchGrid qg = unfold(Q, cfg.spec);
  const PatchGrid kg = unfold(K, cfg.spec);
  const CounterRng rng(cfg.seed);
  const WeightField w = cfg.alpha ? key_rareness(qg, kg, *cfg.alpha, cfg, rng.split(1).key())
                                  : WeightField::uniform(kg.dims());
  NNField field = solve_nnf(qg, kg, w, cfg, rng.split(2).key(), allowed);
  VideoTensor out = fold_gathered(V, field.match, cfg.spec, Q.shape());
  if (trace) trace->field = std::move(field);
  return out;
}

VideoTensor run_scale(const VideoTensor& x_n, const VideoTensor& guess, const VideoTensor& k_first,
                      const VpnnConfig& cfg) {
  cfg.validate();
  if (k_first.shape() != x_n.shape() || k_first.c() != x_n.c())
    throw std::invalid_argument("run_scale: k_first must match x_n");
  const CounterRng rng(cfg.seed);
  VpnnConfig step = cfg;
  step.seed = rng.split(0).key();
  VideoTensor y = vpnn_step(guess, k_first, x_n, step);
  for (int i = 1; i < cfg.em_iters; ++i) {
    step.seed = rng.split(static_cast<std::uint64_t>(i)).key();
    y = vpnn_step(y, x_n, x_n, step);
  }
  return y;
}

}  // namespace vgpnn
