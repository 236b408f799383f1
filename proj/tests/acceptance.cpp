// Acceptance suite: one PASS/FAIL line per criterion.

#include <sys/resource.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "support.hpp"
#include "vgpnn/dynstruct.hpp"
#include "vgpnn/metrics.hpp"
#include "vgpnn/nnfield.hpp"
#include "vgpnn/pipelines.hpp"

using namespace vgpnn;
using namespace vgpnn::testing;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. PatchMatch vs exhaustive, uniform weights.
Outcome oracle_equivalence() {
  double worst = 0.0, pm_time = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const VideoTensor q = random_video(6, 24, 24, 3, 1000 + s);
    const VideoTensor k = random_video(6, 24, 24, 3, 2000 + s);
    const PatchGrid qg(q, {3, 5, 5}), kg(k, {3, 5, 5});
    const WeightField w = WeightField::uniform(kg.dims());
    const double exact = exhaustive_nnf(qg, kg, w).total_cost();
    const auto t0 = Clock::now();
    const double approx = patchmatch_nnf(qg, kg, w, {.seed = s}).total_cost();
    pm_time += seconds_since(t0);
    worst = std::max(worst, approx / exact);
  }
  return {worst <= 1.05 && pm_time < 10.0, fmt("worst ratio %.4f, patchmatch time %.2f s", worst, pm_time)};
}

// 2. Same with rareness weights (alpha = 1).
Outcome weighted_oracle_equivalence() {
  double worst = 0.0, max_rel = 0.0;
  VpnnConfig exact_cfg;
  exact_cfg.solver = Solver::exhaustive;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const VideoTensor q = random_video(6, 24, 24, 3, 3000 + s);
    const VideoTensor k = random_video(6, 24, 24, 3, 4000 + s);
    const PatchGrid qg(q, {3, 5, 5}), kg(k, {3, 5, 5});
    const WeightField w = key_rareness(qg, kg, 1.0, exact_cfg, s);
    const double exact = exhaustive_nnf(qg, kg, w).total_cost();
    const double approx = patchmatch_nnf(qg, kg, w, {.seed = s}).total_cost();
    worst = std::max(worst, approx / exact);
    if (s < 2) {
      const auto qs = all_patches(q, 3, 5, 5);
      const auto ks = all_patches(k, 3, 5, 5);
      for (std::size_t j = 0; j < ks.size(); ++j) {
        double best = INFINITY;
        for (const auto& qp : qs) best = std::min(best, mse(ks[j], qp));
        const double expect = 1.0 / (1.0 + best);
        max_rel = std::max(max_rel, std::abs(w[j] - expect) / expect);
      }
    }
  }
  // Weights agree with the enumeration up to float accumulation rounding.
  return {worst <= 1.05 && max_rel <= 1e-6,
          fmt("worst ratio %.4f, max relative weight error %.2e", worst, max_rel)};
}

// 3. fold_median(unfold(x)) == x.
Outcome round_trip() {
  const PatchSpec specs[] = {{1, 3, 3}, {3, 5, 5}, {3, 7, 7}};
  int ok = 0;
  for (int i = 0; i < 20; ++i) {
    const PatchSpec spec = specs[i % 3];
    const VideoTensor x = random_video(3 + i % 4, 7 + i % 5, 8 + i % 6, 1 + i % 3, 500 + i);
    const PatchGrid g(x, spec);
    std::vector<PlacedPatch> placed;
    for (std::size_t p = 0; p < g.count(); ++p) placed.push_back({g.position(p), g.patch(g.position(p))});
    ok += fold_median(placed, spec, x.shape(), x.c()) == x;
  }
  return {ok == 20, fmt("%d/20 bit-exact", ok)};
}

// 4. Generation with zero noise reproduces the input.
Outcome degenerate_generation() {
  const VideoTensor x = textured_clip(13, 72, 128, 5);
  PipelineConfig c;
  c.noise_std = 0.0;
  c.temporal_shrink = 1.0;
  const auto t0 = Clock::now();
  const VideoTensor y = generate(x, c, 0);
  const double secs = seconds_since(t0);
  const double p = psnr(y, x);
  return {p >= 35.0 && secs < 300.0, fmt("PSNR %.2f dB, %.1f s", p, secs)};
}

VideoTensor motion_dyn(const VideoTensor& v) { return kmeans_quantize(flow_magnitude(block_flow(v, 9, 4)), 5).values; }

// 5. Every pipeline is reproducible.
Outcome determinism() {
  const VideoTensor x = textured_clip(8, 32, 40, 9);
  const PipelineConfig c;
  std::vector<std::string> same;
  const bool gen = generate(x, c, 3) == generate(x, c, 3);
  const bool ret = retarget(x, {8, 32, 28}, c, 3) == retarget(x, {8, 32, 28}, c, 3);
  CueMask cue{x.shape(), std::vector<std::uint8_t>(x.shape().voxels(), 0), VideoTensor(x.shape(), 3)};
  for (int t = 2; t < 6; ++t)
    for (int yy = 10; yy < 18; ++yy)
      for (int xx = 12; xx < 20; ++xx) {
        cue.mask[(static_cast<std::size_t>(t) * 32 + yy) * 40 + xx] = 1;
        cue.cue.at(t, yy, xx, 2) = 1.0f;
      }
  const bool inp = inpaint(x, cue, c, 3) == inpaint(x, cue, c, 3);
  const VideoTensor s = textured_clip(8, 32, 36, 10);
  PipelineConfig a = PipelineConfig::analogies_all_pairs();
  const VideoTensor dc = motion_dyn(x), ds = motion_dyn(s);
  const bool ana = analogies(x, s, dc, ds, a, 3) == analogies(x, s, dc, ds, a, 3);
  return {gen && ret && inp && ana, fmt("generate %d, retarget %d, inpaint %d, analogies %d", gen, ret, inp, ana)};
}

// 6. Diversity across seeds.
Outcome diversity() {
  const VideoTensor x = textured_clip(13, 72, 128, 5);
  PipelineConfig c;
  c.noise_std = 3.0;
  std::vector<VideoTensor> samples;
  for (std::uint64_t s = 0; s < 10; ++s) samples.push_back(generate(x, c, s));
  int distinct = 0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j) distinct += samples[i] != samples[j];
  const double index = diversity_index(x, samples);
  const std::vector<VideoTensor> copies(10, samples[0]);
  const double zero = diversity_index(x, copies);
  return {index > 0.1 && distinct == 45 && zero == 0.0,
          fmt("index %.3f, %d/45 distinct pairs, identical copies %.3g", index, distinct, zero)};
}

// 7. Retargeting output is made of input patches.
Outcome coherence() {
  const VideoTensor x = textured_clip(8, 32, 32, 21);
  PipelineConfig c;
  c.solver = Solver::exhaustive;
  const VideoTensor y = retarget(x, {8, 32, 24}, c, 0);
  const double audit = coherence_audit(y, x, c.spec_large);
  return {audit <= 1e-6, fmt("coherence audit %.3g", audit)};
}

// 8. Runtime and memory grow linearly with the output size.
struct Measurement {
  double seconds = 0.0;
  long rss_kb = 0;
};

int scaling_child(int t, int h, int w) {
  rusage before{};
  getrusage(RUSAGE_SELF, &before);
  const VideoTensor x = textured_clip(t, h, w, 5);
  PipelineConfig c;
  c.temporal_shrink = 1.0;
  const auto t0 = Clock::now();
  const VideoTensor y = generate(x, c, 0);
  const double secs = seconds_since(t0);
  rusage after{};
  getrusage(RUSAGE_SELF, &after);
  std::printf("%.6f %ld\n", secs, after.ru_maxrss - before.ru_maxrss);
  return y.t() == t ? 0 : 1;
}

std::optional<Measurement> measure(int t, int h, int w) {
  const std::string cmd = fmt("/proc/%d/exe --scaling-child %d %d %d", static_cast<int>(getpid()), t, h, w);
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return std::nullopt;
  Measurement m;
  const int n = std::fscanf(p, "%lf %ld", &m.seconds, &m.rss_kb);
  if (pclose(p) != 0 || n != 2) return std::nullopt;
  return m;
}

Outcome runtime_scaling() {
  const Shape3 sizes[] = {{13, 72, 128}, {13, 144, 256}, {13, 288, 512}};
  std::vector<Measurement> ms;
  for (const Shape3& s : sizes) {
    const auto m = measure(s.t, s.h, s.w);
    if (!m) return {false, "measurement child failed"};
    ms.push_back(*m);
  }
  bool ok = true;
  std::ostringstream d;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (i > 0) d << "; ";
    d << sizes[i] << ": " << fmt("%.1f s, %ld KiB", ms[i].seconds, ms[i].rss_kb);
    if (i == 0) continue;
    const double v = static_cast<double>(sizes[i].voxels()) / sizes[i - 1].voxels();
    const double tr = ms[i].seconds / ms[i - 1].seconds / v;
    const double mr = static_cast<double>(ms[i].rss_kb) / ms[i - 1].rss_kb / v;
    ok = ok && tr >= 0.5 && tr <= 2.0 && mr >= 0.5 && mr <= 2.0;
    d << fmt(", time/linear %.2f, memory/linear %.2f", tr, mr);
  }
  return {ok, d.str()};
}

// 9. Colour cues steer inpainting.
Outcome inpainting_steering() {
  const int T = 10, H = 48, W = 64;
  const float red[3] = {0.8f, -0.8f, -0.8f}, green[3] = {-0.8f, 0.8f, -0.8f};
  const VideoTensor tex = random_video(T, H, W, 3, 4, -0.1f, 0.1f);
  VideoTensor x(T, H, W, 3);
  for (int f = 0; f < T; ++f)
    for (int y = 0; y < H; ++y)
      for (int xx = 0; xx < W; ++xx)
        for (int c = 0; c < 3; ++c) x.at(f, y, xx, c) = (xx < W / 2 ? red[c] : green[c]) + tex.at(f, y, xx, c);
  CueMask cue{x.shape(), std::vector<std::uint8_t>(x.shape().voxels(), 0), VideoTensor(x.shape(), 3)};
  for (int f = 0; f < T; ++f)
    for (int y = 16; y < 32; ++y)
      for (int xx = 8; xx < 24; ++xx) {
        cue.mask[(static_cast<std::size_t>(f) * H + y) * W + xx] = 1;
        for (int c = 0; c < 3; ++c) cue.cue.at(f, y, xx, c) = green[c];
      }
  const VideoTensor y = inpaint(x, cue, PipelineConfig{}, 0);
  std::size_t filled = 0, greener = 0;
  bool unmasked_equal = true;
  for (std::size_t v = 0; v < cue.mask.size(); ++v) {
    if (!cue.mask[v]) {
      for (int c = 0; c < 3; ++c) unmasked_equal &= y.data()[v * 3 + c] == x.data()[v * 3 + c];
      continue;
    }
    double dr = 0.0, dg = 0.0;
    for (int c = 0; c < 3; ++c) {
      dr += std::pow(y.data()[v * 3 + c] - red[c], 2);
      dg += std::pow(y.data()[v * 3 + c] - green[c], 2);
    }
    ++filled;
    greener += dg < dr;
  }
  const double frac = static_cast<double>(greener) / filled;
  return {frac >= 0.9 && unmasked_equal, fmt("cue-coloured fraction %.3f, unmasked bit-equal %d", frac, unmasked_equal)};
}

// 10. Analogies transfer the content's motion layout.
Outcome analogies_structure() {
  const int T = 10, H = 48, W = 64, S = 12, speed = 3;
  VideoTensor content(T, H, W, 3, -1.0f), flow_c(T, H, W, 2);
  for (int f = 0; f < T; ++f)
    for (int y = 18; y < 18 + S; ++y)
      for (int x = 6 + speed * f; x < 6 + speed * f + S; ++x) {
        for (int c = 0; c < 3; ++c) content.at(f, y, x, c) = 0.9f;
        flow_c.at(f, y, x, 0) = speed;
      }
  // Style: static texture with a noise-textured region drifting right.
  const VideoTensor background = textured_clip(1, H, W, 7);
  const VideoTensor blob = random_video(1, H, W, 3, 8);
  VideoTensor style(T, H, W, 3), flow_s(T, H, W, 2);
  for (int f = 0; f < T; ++f)
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x)
        for (int c = 0; c < 3; ++c) style.at(f, y, x, c) = background.at(0, y, x, c);
  for (int f = 0; f < T; ++f)
    for (int y = 10; y < 30; ++y)
      for (int x = 4 + speed * f; x < 4 + speed * f + 16; ++x) {
        for (int c = 0; c < 3; ++c) style.at(f, y, x, c) = 0.6f * blob.at(0, y, x - speed * f, c) + 0.3f;
        flow_s.at(f, y, x, 0) = speed;
      }
  const auto [dc, ds] = kmeans_quantize_joint(flow_magnitude(flow_c), flow_magnitude(flow_s), 5);
  const VideoTensor out = analogies(content, style, dc.values, ds.values, PipelineConfig::analogies_all_pairs(), 0);
  const VideoTensor g = to_grayscale(out);
  int inter = 0, uni = 0;
  for (int f = 0; f + 1 < T; ++f)
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        const bool moving = std::abs(g.at(f + 1, y, x) - g.at(f, y, x)) > 0.1f;
        const bool square = content.at(f, y, x, 0) > 0.0f;
        inter += moving && square;
        uni += moving || square;
      }
  const double iou = static_cast<double>(inter) / uni;
  return {iou >= 0.4, fmt("motion-mask IoU %.3f", iou)};
}

// 11. Pyramid shapes for the default configuration.
Outcome pyramid_conformance() {
  const Shape3 in{13, 144, 256};
  const auto got = pyramid_shapes(in, {0.82, 0.82, 0.87}, 3, 15);
  const auto want = shape_recurrence_oracle(in, 0.82, 0.87, 3, 15);
  return {got == want, fmt("%zu levels, coarsest %s", got.size(), to_string(got.back()).c_str())};
}

// 12. Lloyd objective and the two-cluster case.
Outcome kmeans_checks() {
  int monotone = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const int n = 50 + static_cast<int>(s % 7) * 40;
    VideoTensor m = random_video(1, 1, n, 1, 9000 + s, 0.0f, 1.0f);
    for (float& v : m.data()) v = v * v * 10.0f;  // skewed values
    const DynField d = kmeans_quantize(m, 2 + static_cast<int>(s % 5));
    bool ok = true;
    for (std::size_t i = 1; i < d.sse.size(); ++i) ok &= d.sse[i] <= d.sse[i - 1];
    monotone += ok;
  }
  std::vector<float> x(20, 0.0f);
  std::fill(x.begin() + 10, x.end(), 10.0f);
  const DynField two = kmeans_quantize(VideoTensor(Shape3{1, 1, 20}, 1, x), 2);
  bool exact = two.k == 2;
  for (int i = 0; i < 20; ++i) exact &= two.values.data()[i] == (i < 10 ? 0.5f : 1.0f);
  return {monotone == 100 && exact, fmt("%d/100 monotone, two-cluster exact %d", monotone, exact)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc == 5 && std::string(argv[1]) == "--scaling-child")
    return scaling_child(std::atoi(argv[2]), std::atoi(argv[3]), std::atoi(argv[4]));

  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"oracle equivalence", oracle_equivalence},
      {"weighted oracle equivalence", weighted_oracle_equivalence},
      {"round-trip identity", round_trip},
      {"degenerate-generation fixed point", degenerate_generation},
      {"determinism", determinism},
      {"diversity", diversity},
      {"coherence", coherence},
      {"runtime scaling", runtime_scaling},
      {"inpainting steering", inpainting_steering},
      {"analogies structure transfer", analogies_structure},
      {"pyramid conformance", pyramid_conformance},
      {"k-means", kmeans_checks},
  };
  int failed = 0, index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
