#include "vgpnn/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "vgpnn/dynstruct.hpp"
#include "vgpnn/error.hpp"
#include "vgpnn/io.hpp"
#include "vgpnn/metrics.hpp"
#include "vgpnn/pipelines.hpp"

namespace vgpnn {
namespace {

Shape3 parse_shape(const std::string& key, const std::string& text) {
  Shape3 s;
  char x1 = 0, x2 = 0;
  std::istringstream in(text);
  if (!(in >> s.t >> x1 >> s.h >> x2 >> s.w) || x1 != 'x' || x2 != 'x' || !in.eof() || !s.valid())
    throw UsageError("--" + key + ": expected TxHxW with positive integers, got '" + text + "'");
  return s;
}

std::vector<int> parse_steps(const std::string& text) {
  std::vector<int> steps;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      int v = std::stoi(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      steps.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("--pm-steps: expected comma-separated positive integers, got '" + text + "'");
    }
  }
  if (steps.empty()) throw UsageError("--pm-steps: empty schedule");
  return steps;
}

// Raw option storage for one parse.
struct Options {
  std::string config;
  std::uint64_t seed = 0;
  double scale_spatial = 0, scale_temporal = 0;
  int min_t = 0, min_s = 0;
  std::string patch, patch_small, pm_steps;
  int em_iters = 0, em_iters_small = 0, pm_passes = 0;
  long long voxel_threshold = 0;
  double alpha = 0;
  std::string solver;

  std::string input, output, target, out_shape, mask, cue;
  double noise_std = 0, temporal_shrink = 0;
  bool noisy_keys = false;

  std::string content, style, flow_content, flow_style, preset = "all-pairs";
  bool use_block_flow = false, per_video_bins = false;
  int block = 9, radius = 4, bins = 5;
  double aux_fraction = 0;

  std::vector<std::string> samples;
};

struct Parser {
  CLI::App app{"Patch nearest-neighbour video synthesis from a single video", "vgpnn"};
  Options o;
  CLI::App* generate = nullptr;
  CLI::App* retarget = nullptr;
  CLI::App* inpaint = nullptr;
  CLI::App* analogy = nullptr;
  CLI::App* metrics = nullptr;
  CLI::App* diversity = nullptr;

  void add_pipeline_options(CLI::App* sub, bool with_alpha) {
    sub->add_option("--config", o.config, "key=value file supplying any flag (flags win)");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--scale-spatial", o.scale_spatial, "spatial downscaling factor (0.82)");
    sub->add_option("--scale-temporal", o.scale_temporal, "temporal downscaling factor (0.87)");
    sub->add_option("--min-t", o.min_t, "minimal pyramid frame count (3)");
    sub->add_option("--min-s", o.min_s, "minimal pyramid spatial size (15)");
    sub->add_option("--patch", o.patch, "patch size TxHxW (3x7x7)");
    sub->add_option("--patch-small", o.patch_small, "patch size above the voxel threshold (3x5x5)");
    sub->add_option("--em-iters", o.em_iters, "EM-like iterations per scale (5)");
    sub->add_option("--em-iters-small", o.em_iters_small, "EM-like iterations above the voxel threshold (1)");
    sub->add_option("--voxel-threshold", o.voxel_threshold, "output voxel count switching to small patches (3000000)");
    sub->add_option("--solver", o.solver, "patchmatch or exhaustive")->check(CLI::IsMember({"patchmatch", "exhaustive"}));
    sub->add_option("--pm-steps", o.pm_steps, "PatchMatch jump-flood steps (8,4,1)");
    sub->add_option("--pm-passes", o.pm_passes, "PatchMatch passes per step (5)");
    if (with_alpha) sub->add_option("--alpha", o.alpha, "completeness weight (1)");
  }

  Parser() {
    app.require_subcommand(1);
    generate = app.add_subcommand("generate", "generate a new video with the input's patch distribution");
    generate->add_option("--input", o.input, "input frame directory")->required();
    generate->add_option("--output", o.output, "output frame directory")->required();
    generate->add_option("--noise-std", o.noise_std, "std of the coarsest-scale noise (3)");
    generate->add_option("--temporal-shrink", o.temporal_shrink, "output/input frame ratio (0.9)");
    generate->add_option("--out-shape", o.out_shape, "explicit output shape TxHxW");
    generate->add_flag("--noisy-keys", o.noisy_keys, "use x_N + noise as coarsest keys");
    add_pipeline_options(generate, false);

    retarget = app.add_subcommand("retarget", "spatial or temporal retargeting");
    retarget->add_option("--input", o.input, "input frame directory")->required();
    retarget->add_option("--output", o.output, "output frame directory")->required();
    retarget->add_option("--target", o.target, "target shape TxHxW")->required();
    add_pipeline_options(retarget, true);

    inpaint = app.add_subcommand("inpaint", "conditional inpainting from colour cues");
    inpaint->add_option("--input", o.input, "input frame directory")->required();
    inpaint->add_option("--mask", o.mask, "occlusion mask (.vgt, c=1)")->required();
    inpaint->add_option("--cue", o.cue, "colour cues (.vgt, c=3)")->required();
    inpaint->add_option("--output", o.output, "output frame directory")->required();
    add_pipeline_options(inpaint, true);

    analogy = app.add_subcommand("analogy", "video analogies: layout from content, appearance from style");
    analogy->add_option("--content", o.content, "content frame directory")->required();
    analogy->add_option("--style", o.style, "style frame directory")->required();
    analogy->add_option("--output", o.output, "output frame directory")->required();
    analogy->add_option("--flow-content", o.flow_content, "content optical flow (.vgt, c=2)");
    analogy->add_option("--flow-style", o.flow_style, "style optical flow (.vgt, c=2)");
    analogy->add_flag("--block-flow", o.use_block_flow, "estimate flow by block matching");
    analogy->add_option("--block-size", o.block, "block-matching block size (9)");
    analogy->add_option("--block-radius", o.radius, "block-matching search radius (4)");
    analogy->add_option("--bins", o.bins, "k-means bins for the dynamic structure (5)");
    analogy->add_flag("--per-video-bins", o.per_video_bins, "quantize each video's flow separately");
    analogy->add_option("--preset", o.preset, "all-pairs or sketch")->check(CLI::IsMember({"all-pairs", "sketch"}));
    analogy->add_option("--aux-fraction", o.aux_fraction, "fraction of the pyramid (from coarsest) using dynamics (0.5)");
    add_pipeline_options(analogy, true);

    metrics = app.add_subcommand("metrics", "evaluation metrics");
    metrics->require_subcommand(1);
    diversity = metrics->add_subcommand("diversity", "video diversity index of generated samples");
    diversity->add_option("--input", o.input, "input frame directory")->required();
    diversity->add_option("--samples", o.samples, "sample frame directories")->required()->expected(2, -1);
    diversity->add_option("--config", o.config, "key=value file supplying any flag (flags win)");
  }

  // Deepest selected subcommand and its depth.
  std::pair<CLI::App*, int> selected() const {
    CLI::App* cur = const_cast<CLI::App*>(&app);
    int depth = 0;
    for (;;) {
      auto subs = cur->get_subcommands();
      if (subs.empty()) return {cur, depth};
      cur = subs.front();
      ++depth;
    }
  }

  bool given(CLI::App* sub, const std::string& name) const {
    const CLI::Option* opt = sub->get_option_no_throw("--" + name);
    return opt && opt->count() > 0;
  }

  PipelineConfig pipeline_config(CLI::App* sub, PipelineConfig cfg) const {
    if (given(sub, "scale-spatial")) cfg.factors.r_h = cfg.factors.r_w = o.scale_spatial;
    if (given(sub, "scale-temporal")) cfg.factors.r_t = o.scale_temporal;
    if (given(sub, "min-t")) cfg.min_t = o.min_t;
    if (given(sub, "min-s")) cfg.min_s = o.min_s;
    if (given(sub, "patch")) {
      const Shape3 p = parse_shape("patch", o.patch);
      cfg.spec_large = {p.t, p.h, p.w};
    }
    if (given(sub, "patch-small")) {
      const Shape3 p = parse_shape("patch-small", o.patch_small);
      cfg.spec_small = {p.t, p.h, p.w};
    }
    if (given(sub, "em-iters")) cfg.em_iters_large = o.em_iters;
    if (given(sub, "em-iters-small")) cfg.em_iters_small = o.em_iters_small;
    if (given(sub, "voxel-threshold")) cfg.voxel_threshold = o.voxel_threshold;
    if (given(sub, "solver")) cfg.solver = o.solver == "exhaustive" ? Solver::exhaustive : Solver::patchmatch;
    if (given(sub, "pm-steps")) cfg.steps = parse_steps(o.pm_steps);
    if (given(sub, "pm-passes")) cfg.passes_per_step = o.pm_passes;
    if (given(sub, "alpha")) cfg.alpha = o.alpha;
    if (given(sub, "noise-std")) cfg.noise_std = o.noise_std;
    if (given(sub, "temporal-shrink")) cfg.temporal_shrink = o.temporal_shrink;
    if (given(sub, "out-shape")) cfg.out_shape = parse_shape("out-shape", o.out_shape);
    if (given(sub, "aux-fraction")) cfg.aux_max_scale_fraction = o.aux_fraction;
    cfg.noisy_coarse_keys = o.noisy_keys;
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("--config: cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses args; a --config file contributes every key not given on the command line.
std::unique_ptr<Parser> parse(const std::vector<std::string>& args) {
  auto first = std::make_unique<Parser>();
  std::vector<std::string> rev(args.rbegin(), args.rend());
  first->app.parse(rev);
  auto [sub, depth] = first->selected();
  if (first->o.config.empty()) return first;

  std::vector<std::string> extra;
  for (const auto& [key, value] : parse_config(read_text(first->o.config))) {
    if (key == "config") throw UsageError("config key 'config': nested config files are not supported");
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt) throw UsageError("config key '" + key + "': unknown option for '" + sub->get_name() + "'");
    if (opt->count() > 0) continue;
    if (opt->get_expected_max() > 1) {
      extra.push_back("--" + key);
      std::istringstream in(value);
      for (std::string item; in >> item;) extra.push_back(item);
    } else {
      extra.push_back("--" + key + "=" + value);
    }
  }
  std::vector<std::string> merged(args.begin(), args.begin() + depth);
  merged.insert(merged.end(), extra.begin(), extra.end());
  merged.insert(merged.end(), args.begin() + depth, args.end());
  auto second = std::make_unique<Parser>();
  std::vector<std::string> rev2(merged.rbegin(), merged.rend());
  try {
    second->app.parse(rev2);
  } catch (const CLI::ParseError& e) {
    throw UsageError(std::string("config file '") + first->o.config + "': " + e.what());
  }
  return second;
}

void warn_reduced(const DynField& f, std::ostream& err) {
  if (f.k_reduced) err << "warning: fewer distinct flow magnitudes than bins; using k = " << f.k << "\n";
}

int run(Parser& p, std::ostream& out, std::ostream& err) {
  auto [sub, depth] = p.selected();
  const Options& o = p.o;
  if (sub == p.generate) {
    const PipelineConfig cfg = p.pipeline_config(sub, PipelineConfig{});
    const VideoTensor x = read_video(o.input);
    write_video(generate(x, cfg, o.seed), o.output);
  } else if (sub == p.retarget) {
    const PipelineConfig cfg = p.pipeline_config(sub, PipelineConfig{});
    const Shape3 target = parse_shape("target", o.target);
    const VideoTensor x = read_video(o.input);
    write_video(retarget(x, target, cfg, o.seed), o.output);
  } else if (sub == p.inpaint) {
    const PipelineConfig cfg = p.pipeline_config(sub, PipelineConfig{});
    const VideoTensor x = read_video(o.input);
    const CueMask cue = CueMask::from_tensors(read_vgt(o.mask), read_vgt(o.cue));
    write_video(inpaint(x, cue, cfg, o.seed), o.output);
  } else if (sub == p.analogy) {
    const PipelineConfig base =
        o.preset == "sketch" ? PipelineConfig::analogies_sketch() : PipelineConfig::analogies_all_pairs();
    const PipelineConfig cfg = p.pipeline_config(sub, base);
    const bool have_files = !o.flow_content.empty() || !o.flow_style.empty();
    if (have_files == o.use_block_flow)
      throw UsageError("analogy: give either --flow-content and --flow-style, or --block-flow");
    if (have_files && (o.flow_content.empty() || o.flow_style.empty()))
      throw UsageError("analogy: --flow-content and --flow-style must be given together");
    if (o.bins < 1) throw UsageError("--bins: must be >= 1");
    const VideoTensor C = read_video(o.content);
    const VideoTensor S = read_video(o.style);
    VideoTensor fc, fs;
    if (have_files) {
      fc = read_vgt(o.flow_content);
      fs = read_vgt(o.flow_style);
      if (fc.c() != 2 || fc.shape() != C.shape()) throw DataError("--flow-content: expected a c=2 field shaped like the content");
      if (fs.c() != 2 || fs.shape() != S.shape()) throw DataError("--flow-style: expected a c=2 field shaped like the style");
    } else {
      fc = block_flow(C, o.block, o.radius);
      fs = block_flow(S, o.block, o.radius);
    }
    DynField dc, ds;
    if (o.per_video_bins) {
      dc = kmeans_quantize(flow_magnitude(fc), o.bins);
      ds = kmeans_quantize(flow_magnitude(fs), o.bins);
    } else {
      std::tie(dc, ds) = kmeans_quantize_joint(flow_magnitude(fc), flow_magnitude(fs), o.bins);
    }
    warn_reduced(dc, err);
    if (o.per_video_bins) warn_reduced(ds, err);
    write_video(analogies(C, S, dc.values, ds.values, cfg, o.seed), o.output);
  } else if (sub == p.diversity) {
    const VideoTensor x = read_video(o.input);
    std::vector<VideoTensor> samples;
    for (const auto& dir : o.samples) samples.push_back(read_video(dir));
    out << "diversity_index " << diversity_index(x, samples) << "\n";
  }
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::unique_ptr<Parser> parser;
  try {
    parser = parse(args);
  } catch (const CLI::CallForHelp&) {
    out << Parser().app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    Parser usage;
    err << "error: " << e.what() << "\n" << usage.app.help();
    return 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    return run(*parser, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace vgpnn
