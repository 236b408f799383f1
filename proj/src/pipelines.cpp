#include "vgpnn/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vgpnn/error.hpp"
#include "vgpnn/random.hpp"

namespace vgpnn {

PipelineConfig PipelineConfig::analogies_all_pairs() {
  PipelineConfig c;
  c.factors = ScaleFactors::uniform(0.9);
  c.min_t = 3;
  c.min_s = 20;
  c.spec_small = c.spec_large = {3, 5, 5};
  c.em_iters_small = c.em_iters_large = 1;
  c.alpha = 1.0;
  return c;
}

PipelineConfig PipelineConfig::analogies_sketch() {
  PipelineConfig c;
  c.factors = ScaleFactors::uniform(0.78);
  c.min_t = 5;
  c.min_s = 35;
  c.spec_small = c.spec_large = {3, 5, 5};
  c.em_iters_small = 1;
  c.em_iters_large = 3;
  c.single_em_finest_levels = 2;
  c.alpha = 1.0;
  return c;
}

void PipelineConfig::validate() const {
  factors.validate();
  if (min_t < 1 || min_s < 1) throw std::invalid_argument("PipelineConfig: minima must be >= 1");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw std::invalid_argument("PipelineConfig: noise_std must be >= 0");
  if (voxel_threshold <= 0) throw std::invalid_argument("PipelineConfig: voxel_threshold must be > 0");
  if (em_iters_small < 1 || em_iters_large < 1) throw std::invalid_argument("PipelineConfig: EM iterations must be >= 1");
  if (alpha && !(*alpha > 0.0)) throw std::invalid_argument("PipelineConfig: alpha must be > 0");
  if (!(temporal_shrink > 0.0 && temporal_shrink <= 1.0))
    throw std::invalid_argument("PipelineConfig: temporal_shrink must lie in (0, 1]");
  if (!(aux_max_scale_fraction > 0.0 && aux_max_scale_fraction <= 1.0))
    throw std::invalid_argument("PipelineConfig: aux_max_scale_fraction must lie in (0, 1]");
  for (const PatchSpec& s : {spec_small, spec_large})
    if (s.t < 1 || s.h < 1 || s.w < 1) throw std::invalid_argument("PipelineConfig: invalid patch spec");
  if (out_shape && !out_shape->valid()) throw std::invalid_argument("PipelineConfig: invalid output shape");
}

LevelPlan plan_level(const PipelineConfig& cfg, Shape3 out_shape, int level) {
  LevelPlan p = out_shape.voxels() > cfg.voxel_threshold ? LevelPlan{cfg.spec_small, cfg.em_iters_small}
                                                         : LevelPlan{cfg.spec_large, cfg.em_iters_large};
  if (level < cfg.single_em_finest_levels) p.em_iters = 1;
  return p;
}

namespace {

Shape3 patch_floor(const PipelineConfig& cfg) {
  return {std::max(cfg.spec_small.t, cfg.spec_large.t), std::max(cfg.spec_small.h, cfg.spec_large.h),
          std::max(cfg.spec_small.w, cfg.spec_large.w)};
}

VpnnConfig level_config(const PipelineConfig& cfg, const LevelPlan& plan, std::optional<double> alpha,
                        std::uint64_t seed) {
  VpnnConfig v;
  v.spec = plan.spec;
  v.em_iters = plan.em_iters;
  v.alpha = alpha;
  v.solver = cfg.solver;
  v.seed = seed;
  v.steps = cfg.steps;
  v.passes_per_step = cfg.passes_per_step;
  return v;
}

void require_fit(PatchSpec spec, Shape3 s, const char* what) {
  if (!spec.fits(s))
    throw DataError(std::string(what) + ": patch " + std::to_string(spec.t) + "x" + std::to_string(spec.h) + "x" +
                    std::to_string(spec.w) + " does not fit level shape " + to_string(s));
}

void require_minima(Shape3 s, const PipelineConfig& cfg, const char* what) {
  if (s.t < cfg.min_t || std::min(s.h, s.w) < cfg.min_s)
    throw DataError(std::string(what) + ": shape " + to_string(s) + " is below the pyramid minima (" +
                    std::to_string(cfg.min_t) + " frames, " + std::to_string(cfg.min_s) + " pixels)");
}

// Coarse-to-fine driver shared by generation and retargeting: the coarsest
// guess is supplied, finer guesses are upscaled outputs and the first-pass
// keys are the upscaled coarser input.
VideoTensor coarse_to_fine(const Pyramid& pyr, const std::vector<Shape3>& out_shapes, VideoTensor coarsest_guess,
                           VideoTensor coarsest_keys, const PipelineConfig& cfg, std::optional<double> alpha,
                           const CounterRng& rng) {
  const int N = pyr.coarsest();
  VideoTensor y;
  for (int n = N; n >= 0; --n) {
    const LevelPlan plan = plan_level(cfg, out_shapes[n], n);
    require_fit(plan.spec, out_shapes[n], "pipeline");
    require_fit(plan.spec, pyr.levels[n].shape(), "pipeline");
    const VpnnConfig vc = level_config(cfg, plan, alpha, rng.split(static_cast<std::uint64_t>(n)).key());
    if (n == N) {
      y = run_scale(pyr.levels[n], coarsest_guess, coarsest_keys, vc);
    } else {
      const VideoTensor guess = resize_tricubic(y, out_shapes[n]);
      const VideoTensor keys = resize_tricubic(pyr.levels[n + 1], pyr.levels[n].shape());
      y = run_scale(pyr.levels[n], guess, keys, vc);
    }
  }
  return y;
}

}  // namespace

VideoTensor generate(const VideoTensor& x, const PipelineConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  require_minima(x.shape(), cfg, "generate");
  const Pyramid pyr = build_pyramid(x, cfg.factors, cfg.min_t, cfg.min_s);
  Shape3 out0 = cfg.out_shape.value_or(
      Shape3{static_cast<int>(round_half_away(cfg.temporal_shrink * x.t())), x.h(), x.w()});
  if (!out0.valid()) throw DataError("generate: degenerate output shape " + to_string(out0));

  const Shape3 floor = patch_floor(cfg);
  const std::vector<Shape3> shapes = pyr.shapes();
  std::vector<Shape3> out_shapes;
  for (const Shape3& s : shapes) out_shapes.push_back(companion_shape(out0, s, shapes[0], floor));

  const CounterRng rng(seed);
  const CounterRng noise_rng = rng.split(0x6e6f697365ull);
  const VideoTensor& xN = pyr.levels.back();
  const Shape3 oN = out_shapes.back();
  VideoTensor guess = add(resize_tricubic(xN, oN), make_replicated_noise(oN.h, oN.w, x.c(), oN.t, cfg.noise_std,
                                                                        noise_rng.split(0).key()));
  VideoTensor keys = xN;
  if (cfg.noisy_coarse_keys)
    keys = add(xN, make_replicated_noise(xN.h(), xN.w(), x.c(), xN.t(), cfg.noise_std, noise_rng.split(1).key()));
  return coarse_to_fine(pyr, out_shapes, std::move(guess), std::move(keys), cfg, std::nullopt, rng);
}

VideoTensor retarget(const VideoTensor& x, Shape3 target, const PipelineConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  require_minima(x.shape(), cfg, "retarget");
  if (!target.valid()) throw DataError("retarget: invalid target shape");
  require_minima(target, cfg, "retarget target");
  const Pyramid pyr = build_pyramid(x, cfg.factors, cfg.min_t, cfg.min_s);
  const std::vector<Shape3> shapes = pyr.shapes();
  const Shape3 floor = patch_floor(cfg);
  std::vector<Shape3> guess_shapes;
  for (const Shape3& s : shapes) guess_shapes.push_back(companion_shape(target, s, shapes[0], floor));
  guess_shapes[0] = target;
  const std::vector<VideoTensor> guess = build_levels(resize_tricubic(x, target), guess_shapes);
  return coarse_to_fine(pyr, guess_shapes, guess.back(), pyr.levels.back(), cfg, cfg.alpha.value_or(1.0),
                        CounterRng(seed));
}

// ---------------------------------------------------------------------------
// Inpainting

CueMask CueMask::from_tensors(const VideoTensor& mask, const VideoTensor& cue) {
  if (mask.c() != 1) throw DataError("inpaint: mask must have one channel");
  CueMask m;
  m.shape = mask.shape();
  m.mask.resize(static_cast<std::size_t>(m.shape.voxels()));
  for (std::size_t i = 0; i < m.mask.size(); ++i) m.mask[i] = mask.data()[i] != 0.0f ? 1 : 0;
  m.cue = cue;
  return m;
}

std::size_t CueMask::occluded() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1)); }

std::vector<std::uint8_t> downscale_mask(const std::vector<std::uint8_t>& mask, Shape3 from, Shape3 to) {
  // Fine footprint [lo, hi) of coarse cell i along one axis.
  auto footprint = [](int i, int n_to, int n_from) {
    const int lo = static_cast<int>(static_cast<long long>(i) * n_from / n_to);
    const int hi = static_cast<int>((static_cast<long long>(i + 1) * n_from + n_to - 1) / n_to);
    return std::pair{lo, std::max(hi, lo + 1)};
  };
  std::vector<std::uint8_t> out(static_cast<std::size_t>(to.voxels()), 0);
  for (int t = 0; t < to.t; ++t) {
    const auto [t0, t1] = footprint(t, to.t, from.t);
    for (int y = 0; y < to.h; ++y) {
      const auto [y0, y1] = footprint(y, to.h, from.h);
      for (int x = 0; x < to.w; ++x) {
        const auto [x0, x1] = footprint(x, to.w, from.w);
        bool any = false;
        for (int a = t0; a < t1 && !any; ++a)
          for (int b = y0; b < y1 && !any; ++b)
            for (int c = x0; c < x1 && !any; ++c) any = mask[(static_cast<std::size_t>(a) * from.h + b) * from.w + c];
        out[(static_cast<std::size_t>(t) * to.h + y) * to.w + x] = any ? 1 : 0;
      }
    }
  }
  return out;
}

std::vector<std::uint8_t> dilate_mask(const std::vector<std::uint8_t>& mask, Shape3 s, int radius) {
  std::vector<std::uint8_t> out(mask.size(), 0);
  for (int t = 0; t < s.t; ++t)
    for (int y = 0; y < s.h; ++y)
      for (int x = 0; x < s.w; ++x) {
        if (!mask[(static_cast<std::size_t>(t) * s.h + y) * s.w + x]) continue;
        for (int a = std::max(0, t - radius); a <= std::min(s.t - 1, t + radius); ++a)
          for (int b = std::max(0, y - radius); b <= std::min(s.h - 1, y + radius); ++b)
            for (int c = std::max(0, x - radius); c <= std::min(s.w - 1, x + radius); ++c)
              out[(static_cast<std::size_t>(a) * s.h + b) * s.w + c] = 1;
      }
  return out;
}

std::vector<std::uint8_t> clean_patch_positions(const std::vector<std::uint8_t>& mask, Shape3 s, PatchSpec spec) {
  // 3-D summed-volume table with a zero border.
  const int T = s.t + 1, H = s.h + 1, W = s.w + 1;
  std::vector<int> sum(static_cast<std::size_t>(T) * H * W, 0);
  auto S = [&](int t, int y, int x) -> int& { return sum[(static_cast<std::size_t>(t) * H + y) * W + x]; };
  for (int t = 1; t < T; ++t)
    for (int y = 1; y < H; ++y)
      for (int x = 1; x < W; ++x)
        S(t, y, x) = mask[(static_cast<std::size_t>(t - 1) * s.h + (y - 1)) * s.w + (x - 1)] + S(t - 1, y, x) +
                     S(t, y - 1, x) + S(t, y, x - 1) - S(t - 1, y - 1, x) - S(t - 1, y, x - 1) -
                     S(t, y - 1, x - 1) + S(t - 1, y - 1, x - 1);
  const Shape3 g = grid_dims(s, spec);
  std::vector<std::uint8_t> ok(static_cast<std::size_t>(g.voxels()));
  for (int t = 0; t < g.t; ++t)
    for (int y = 0; y < g.h; ++y)
      for (int x = 0; x < g.w; ++x) {
        const int t1 = t + spec.t, y1 = y + spec.h, x1 = x + spec.w;
        const int inside = S(t1, y1, x1) - S(t, y1, x1) - S(t1, y, x1) - S(t1, y1, x) + S(t, y, x1) + S(t, y1, x) +
                           S(t1, y, x) - S(t, y, x);
        ok[(static_cast<std::size_t>(t) * g.h + y) * g.w + x] = inside == 0 ? 1 : 0;
      }
  return ok;
}

namespace {

struct Box {
  int t0, t1, y0, y1, x0, x1;
};

std::optional<Box> bounding_box(const std::vector<std::uint8_t>& mask, Shape3 s) {
  std::optional<Box> b;
  for (int t = 0; t < s.t; ++t)
    for (int y = 0; y < s.h; ++y)
      for (int x = 0; x < s.w; ++x) {
        if (!mask[(static_cast<std::size_t>(t) * s.h + y) * s.w + x]) continue;
        if (!b) b = Box{t, t, y, y, x, x};
        b->t0 = std::min(b->t0, t), b->t1 = std::max(b->t1, t);
        b->y0 = std::min(b->y0, y), b->y1 = std::max(b->y1, y);
        b->x0 = std::min(b->x0, x), b->x1 = std::max(b->x1, x);
      }
  return b;
}

bool fits_one_patch(const std::vector<std::uint8_t>& mask, Shape3 s, PatchSpec spec) {
  auto b = bounding_box(mask, s);
  return !b || (b->t1 - b->t0 + 1 <= spec.t && b->y1 - b->y0 + 1 <= spec.h && b->x1 - b->x0 + 1 <= spec.w);
}

// Overwrites the voxels outside `mask` with `src`.
void restore_unmasked(VideoTensor& y, const VideoTensor& src, const std::vector<std::uint8_t>& mask) {
  const int c = y.c();
  for (std::size_t v = 0; v < mask.size(); ++v)
    if (!mask[v]) std::copy_n(src.data().data() + v * c, c, y.data().data() + v * c);
}

}  // namespace

InpaintPlan plan_inpaint(Shape3 input, const std::vector<std::uint8_t>& mask, const PipelineConfig& cfg) {
  auto try_shapes = [&](const std::vector<Shape3>& shapes, InpaintPlan& plan) {
    plan = {};
    for (std::size_t n = 0; n < shapes.size(); ++n) {
      plan.shapes.push_back(shapes[n]);
      plan.masks.push_back(n == 0 ? mask : downscale_mask(mask, input, shapes[n]));
      const PatchSpec spec = plan_level(cfg, shapes[n], static_cast<int>(n)).spec;
      if (fits_one_patch(plan.masks.back(), shapes[n], spec)) return true;
    }
    return false;
  };
  InpaintPlan plan;
  if (try_shapes(pyramid_shapes(input, cfg.factors, cfg.min_t, cfg.min_s), plan)) return plan;
  // Standard minima reached first: keep shrinking down to the patch size.
  const Shape3 floor = patch_floor(cfg);
  const int min_t = std::min(cfg.min_t, floor.t);
  const int min_s = std::min(cfg.min_s, std::max(floor.h, floor.w));
  try_shapes(pyramid_shapes(input, cfg.factors, min_t, min_s), plan);
  return plan;
}

VideoTensor inpaint(const VideoTensor& x, const CueMask& cue, const PipelineConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const Shape3 s0 = x.shape();
  if (cue.shape != s0 || cue.mask.size() != static_cast<std::size_t>(s0.voxels()))
    throw DataError("inpaint: mask shape " + to_string(cue.shape) + " does not match video " + to_string(s0));
  if (cue.cue.shape() != s0 || cue.cue.c() != x.c()) throw DataError("inpaint: cue missing or misshaped");
  const std::size_t occluded = cue.occluded();
  if (occluded == 0) throw DataError("inpaint: mask is empty");
  if (occluded == cue.mask.size()) throw DataError("inpaint: mask covers the entire video");
  for (std::size_t v = 0; v < cue.mask.size(); ++v)
    if (cue.mask[v])
      for (int ch = 0; ch < x.c(); ++ch) {
        const float c = cue.cue.data()[v * x.c() + ch];
        if (c < -1.0f || c > 1.0f) throw DataError("inpaint: cue missing (out of [-1, 1]) on occluded voxel");
      }

  VideoTensor composite = x;
  for (std::size_t v = 0; v < cue.mask.size(); ++v)
    if (cue.mask[v]) std::copy_n(cue.cue.data().data() + v * x.c(), x.c(), composite.data().data() + v * x.c());

  const InpaintPlan plan = plan_inpaint(s0, cue.mask, cfg);
  const std::vector<VideoTensor> x_levels = build_levels(x, plan.shapes);
  const std::vector<VideoTensor> cue_levels = build_levels(composite, plan.shapes);
  const int N = static_cast<int>(plan.shapes.size()) - 1;

  std::vector<VideoTensor> input(plan.shapes.size());
  for (int n = 0; n <= N; ++n) {
    input[n] = x_levels[n];
    const int c = x.c();
    for (std::size_t v = 0; v < plan.masks[n].size(); ++v)
      if (plan.masks[n][v]) std::copy_n(cue_levels[n].data().data() + v * c, c, input[n].data().data() + v * c);
  }

  const CounterRng rng(seed);
  const std::optional<double> alpha = cfg.alpha.value_or(1.0);
  VideoTensor y;
  for (int n = N; n >= 0; --n) {
    const Shape3 s = plan.shapes[n];
    const LevelPlan lp = plan_level(cfg, s, n);
    require_fit(lp.spec, s, "inpaint");
    const std::vector<std::uint8_t> keep_out = dilate_mask(plan.masks[n], s, 1);
    const std::vector<std::uint8_t> allowed = clean_patch_positions(keep_out, s, lp.spec);
    if (std::find(allowed.begin(), allowed.end(), 1) == allowed.end())
      throw DataError("inpaint: no unoccluded patch left at pyramid level " + std::to_string(n));

    const CounterRng level_rng = rng.split(static_cast<std::uint64_t>(n));
    VpnnConfig vc = level_config(cfg, lp, alpha, 0);
    VideoTensor q = n == N ? input[n] : resize_tricubic(y, s);
    VideoTensor k = n == N ? input[n] : resize_tricubic(input[n + 1], s);
    for (int i = 0; i < lp.em_iters; ++i) {
      vc.seed = level_rng.split(static_cast<std::uint64_t>(i)).key();
      y = vpnn_step(q, i == 0 ? k : input[n], input[n], vc, allowed);
      restore_unmasked(y, input[n], plan.masks[n]);
      q = y;
    }
  }
  restore_unmasked(y, x, cue.mask);
  return y;
}

// ---------------------------------------------------------------------------
// Video analogies

VideoTensor analogies(const VideoTensor& C, const VideoTensor& S, const VideoTensor& dyn_c, const VideoTensor& dyn_s,
                      const PipelineConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (dyn_c.shape() != C.shape() || dyn_c.c() != 1)
    throw DataError("analogies: content dynamic structure must be single-channel with the content's shape");
  if (dyn_s.shape() != S.shape() || dyn_s.c() != 1)
    throw DataError("analogies: style dynamic structure must be single-channel with the style's shape");
  for (const VideoTensor* d : {&dyn_c, &dyn_s})
    for (float v : d->data())
      if (v < 0.0f || v > 1.0f) throw DataError("analogies: dynamic structure values must lie in [0, 1]");
  require_minima(S.shape(), cfg, "analogies style");
  require_minima(C.shape(), cfg, "analogies content");

  const Pyramid style = build_pyramid(S, cfg.factors, cfg.min_t, cfg.min_s);
  const std::vector<Shape3> shapes = style.shapes();
  const std::vector<VideoTensor> dyn_s_levels = build_levels(dyn_s, shapes);
  const Shape3 floor = patch_floor(cfg);
  std::vector<Shape3> content_shapes;
  for (const Shape3& s : shapes) content_shapes.push_back(companion_shape(C.shape(), s, shapes[0], floor));
  content_shapes[0] = C.shape();
  const std::vector<VideoTensor> dyn_c_levels = build_levels(dyn_c, content_shapes);

  const int N = style.coarsest();
  const CounterRng rng(seed);
  const std::optional<double> alpha = cfg.alpha.value_or(1.0);
  VideoTensor y;
  for (int n = N; n >= 0; --n) {
    const LevelPlan lp = plan_level(cfg, content_shapes[n], n);
    require_fit(lp.spec, content_shapes[n], "analogies");
    require_fit(lp.spec, shapes[n], "analogies");
    const CounterRng level_rng = rng.split(static_cast<std::uint64_t>(n));
    VpnnConfig vc = level_config(cfg, lp, alpha, level_rng.key());
    const VideoTensor& Sn = style.levels[n];
    const bool aux = (N - n) <= cfg.aux_max_scale_fraction * N;
    if (!aux) {
      y = run_scale(Sn, resize_tricubic(y, content_shapes[n]), resize_tricubic(style.levels[n + 1], shapes[n]), vc);
      continue;
    }
    const VideoTensor keys = concat_channels(dyn_s_levels[n], Sn);
    for (int i = 0; i < lp.em_iters; ++i) {
      vc.seed = level_rng.split(static_cast<std::uint64_t>(i)).key();
      if (n == N && i == 0) {
        y = vpnn_step(dyn_c_levels[n], dyn_s_levels[n], Sn, vc);
      } else {
        const VideoTensor prev = i == 0 ? resize_tricubic(y, content_shapes[n]) : y;
        y = vpnn_step(concat_channels(dyn_c_levels[n], prev), keys, Sn, vc);
      }
    }
  }
  return y;
}

}  // namespace vgpnn
