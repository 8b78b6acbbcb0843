#include "glyphflow/app/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "glyphflow/app/pipeline.hpp"
#include "glyphflow/eval/metrics.hpp"
#include "glyphflow/imaging/png_io.hpp"
#include "glyphflow/layout/layout.hpp"
#include "glyphflow/rng.hpp"
#include "glyphflow/text.hpp"

namespace glyphflow::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

// ---- datagen --------------------------------------------------------------

struct DatagenOpts {
  int n = 16;
  std::string profile = "mixed";
  std::uint64_t seed = 0;
  int canvas = 128;
  double adversarial = 0.0;
  std::string out;

  DatasetConfig config() const {
    DatasetConfig cfg;
    cfg.n = n;
    cfg.profile = size_profile_from_string(profile);
    cfg.seed = seed;
    cfg.canvas = {canvas, canvas};
    cfg.adversarial_fraction = adversarial;
    return cfg;
  }
};

void add_datagen_options(CLI::App& cmd, DatagenOpts& o) {
  cmd.add_option("--n", o.n, "Number of scenes")->capture_default_str();
  cmd.add_option("--profile", o.profile, "Glyph size profile: large, mini or mixed")
      ->capture_default_str();
  cmd.add_option("--canvas", o.canvas, "Square canvas side in pixels")->capture_default_str();
  cmd.add_option("--adversarial", o.adversarial, "Fraction of black-on-black scenes")
      ->capture_default_str();
}

// ---- condition ------------------------------------------------------------

struct ConditionOpts {
  std::string mode = "adaptive";
  double threshold = 4900.0;
  double blur_sigma = 2.0;
  int band_width = 3;
  double canny_sigma = 1.4;
  double canny_low = 0.1;
  double canny_high = 0.3;
  double seg_threshold = 0.5;
  double dropout = 0.0;

  condition::AgcConfig agc() const {
    condition::AgcConfig cfg;
    cfg.threshold = threshold;
    cfg.blur_sigma = blur_sigma;
    cfg.band_width = band_width;
    cfg.canny = {canny_sigma, canny_low, canny_high};
    cfg.seg_threshold = seg_threshold;
    cfg.validate();
    return cfg;
  }

  std::unique_ptr<Segmenter> segmenter() const {
    if (dropout > 0.0) return std::make_unique<SmallGlyphDropoutSegmenter>(dropout, threshold);
    return std::make_unique<GroundTruthSegmenter>();
  }
};

void add_condition_options(CLI::App& cmd, ConditionOpts& o) {
  cmd.add_option("--mode", o.mode, "Condition mode: adaptive, raw-seg or no-blur")
      ->capture_default_str();
  cmd.add_option("--threshold", o.threshold, "Per-character area threshold (px^2)")
      ->capture_default_str();
  cmd.add_option("--blur-sigma", o.blur_sigma, "Small-branch blur sigma")->capture_default_str();
  cmd.add_option("--band-width", o.band_width, "Small-branch boundary band width")
      ->capture_default_str();
  cmd.add_option("--canny-sigma", o.canny_sigma, "Canny smoothing sigma")->capture_default_str();
  cmd.add_option("--canny-low", o.canny_low, "Canny low threshold")->capture_default_str();
  cmd.add_option("--canny-high", o.canny_high, "Canny high threshold")->capture_default_str();
  cmd.add_option("--seg-threshold", o.seg_threshold, "Segmentation binarization level")
      ->capture_default_str();
  cmd.add_option("--dropout", o.dropout,
                 "Drop this fraction of small-glyph ink from the segmentation")
      ->capture_default_str();
}

json condition_report(const SceneData& scene, const ConditionedScene& cond,
                      const condition::AgcConfig& agc, condition::ConditionMode mode) {
  json regions = json::array();
  for (const auto& rb : cond.condition.per_region_branch) {
    const GlyphRegion& r = scene.regions[rb.region];
    regions.push_back({{"index", rb.region},
                       {"text", r.text},
                       {"bbox", {r.box.x0, r.box.y0, r.box.x1, r.box.y1}},
                       {"branch", condition::to_string(rb.branch)},
                       {"avg_char_area", rb.avg_char_area}});
  }
  return {{"image", scene.stem},
          {"mode", condition::to_string(mode)},
          {"threshold", agc.threshold},
          {"blur_sigma", agc.blur_sigma},
          {"band_width", agc.band_width},
          {"canny", {{"sigma", agc.canny.sigma}, {"low", agc.canny.lo}, {"high", agc.canny.hi}}},
          {"seg_threshold", agc.seg_threshold},
          {"regions", regions},
          {"warnings", cond.condition.warnings}};
}

struct BranchCounts {
  int large = 0;
  int small = 0;
};

// Writes conds/<stem>.png, conds/<stem>.json and grmasks/<stem>.png under
// `out_dir`, plus conds/summary.json with branch counts.
BranchCounts write_conditions(std::span<const SceneData> scenes,
                              std::span<const ConditionedScene> conds,
                              const condition::AgcConfig& agc, condition::ConditionMode mode,
                              const fs::path& out_dir) {
  ensure_dir(out_dir / "conds");
  ensure_dir(out_dir / "grmasks");
  BranchCounts counts;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    imaging::save_png(conds[i].condition.image, out_dir / "conds" / (scenes[i].stem + ".png"));
    imaging::save_mask_png(conds[i].m_gr, out_dir / "grmasks" / (scenes[i].stem + ".png"));
    write_text(out_dir / "conds" / (scenes[i].stem + ".json"),
               condition_report(scenes[i], conds[i], agc, mode).dump(2) + "\n");
    for (const auto& rb : conds[i].condition.per_region_branch) {
      (rb.branch == condition::Branch::Large ? counts.large : counts.small)++;
    }
  }
  write_text(out_dir / "conds" / "summary.json",
             json{{"images", scenes.size()},
                  {"mode", condition::to_string(mode)},
                  {"large", counts.large},
                  {"small", counts.small}}
                     .dump(2) +
                 "\n");
  return counts;
}

// Loads the condition images and glyph-region masks written by
// write_conditions.
std::vector<ConditionedScene> read_conditions(std::span<const SceneData> scenes,
                                              const fs::path& out_dir) {
  std::vector<ConditionedScene> out;
  for (const SceneData& s : scenes) {
    ConditionedScene c;
    c.condition.image = imaging::load_png(out_dir / "conds" / (s.stem + ".png"));
    c.m_gr = imaging::load_mask_png(out_dir / "grmasks" / (s.stem + ".png"));
    out.push_back(std::move(c));
  }
  return out;
}

// ---- train ----------------------------------------------------------------

struct TrainOpts {
  int steps = 2000;
  double lambda = 1.0;
  int gr_start = -1;
  double lr = 0.05;
  double momentum = 0.9;
  double clip = 1.0;
  int batch = 4;
  int patch = 8;
  std::vector<int> hidden{64, 64};
  int samples = 4;
  int sample_steps = 20;

  ExperimentConfig experiment(const ConditionOpts& c) const {
    ExperimentConfig e;
    e.patch = patch;
    e.hidden = hidden;
    e.train.steps = steps;
    e.train.lambda = lambda;
    e.train.gr_activation_step = gr_start;
    e.train.learning_rate = lr;
    e.train.momentum = momentum;
    e.train.grad_clip = clip;
    e.train.batch_size = batch;
    e.agc = c.agc();
    return e;
  }
};

void add_train_options(CLI::App& cmd, TrainOpts& o) {
  cmd.add_option("--steps", o.steps, "Optimizer steps")->capture_default_str();
  cmd.add_option("--lambda", o.lambda, "Glyph-region loss weight")->capture_default_str();
  cmd.add_option("--gr-start", o.gr_start,
                 "Step at which the glyph-region loss is enabled (-1: steps/5)")
      ->capture_default_str();
  cmd.add_option("--lr", o.lr, "Learning rate")->capture_default_str();
  cmd.add_option("--momentum", o.momentum, "SGD momentum")->capture_default_str();
  cmd.add_option("--clip", o.clip, "Gradient norm clip (0 disables)")->capture_default_str();
  cmd.add_option("--batch", o.batch, "Batch size")->capture_default_str();
  cmd.add_option("--patch", o.patch, "Codec patch size")->capture_default_str();
  cmd.add_option("--hidden", o.hidden, "Hidden layer widths")
      ->delimiter(',')
      ->capture_default_str();
}

struct TrainOutput {
  flow::TrainResult result;
  flow::ReconstructionMetrics metrics;
};

// Trains on `data`, writing ckpt.bin, logs/train.jsonl and Euler samples of
// the first `samples` scenes to samples/.
TrainOutput run_training(const ExperimentConfig& e, std::uint64_t seed,
                         std::span<const SceneData> scenes,
                         std::span<const ConditionedScene> conds, int samples, int sample_steps,
                         const fs::path& out_dir) {
  const RunSeeds rs = RunSeeds::from(seed);
  const flow::Codec codec(e.patch, rs.codec);
  const auto data = make_examples(scenes, conds, codec);
  flow::TrainConfig tc = e.train;
  tc.seed = rs.train;
  ensure_dir(out_dir / "logs");
  std::ostringstream log;
  TrainOutput out;
  out.result = flow::train(tc, data, codec, flow::init_denoiser(e.denoiser(), rs.init),
                           [&](const flow::StepLog& s) {
                             log << json{{"step", s.step},
                                         {"l_fm", s.loss.l_fm},
                                         {"l_gr", s.loss.l_gr},
                                         {"lambda", s.loss.lambda},
                                         {"total", s.loss.total}}
                                        .dump()
                                 << '\n';
                           });
  write_text(out_dir / "logs" / "train.jsonl", log.str());
  flow::save_checkpoint(out.result.params, codec, out_dir / "ckpt.bin");
  out.metrics = flow::evaluate_reconstruction(out.result.params, data, codec, rs.eval, e.eval_times);
  const int n = std::min<int>(samples, static_cast<int>(scenes.size()));
  if (n > 0) ensure_dir(out_dir / "samples");
  for (int i = 0; i < n; ++i) {
    const ImageBuffer img = flow::sample_image(out.result.params, data[static_cast<std::size_t>(i)].z_cond,
                                               codec, SeedTree(rs.sample).derive("scene", i),
                                               sample_steps);
    imaging::save_png(img, out_dir / "samples" / (scenes[static_cast<std::size_t>(i)].stem + ".png"));
  }
  return out;
}

json metrics_json(const flow::ReconstructionMetrics& m) {
  return {{"glyph_region_mse", m.glyph_region_mse}, {"full_mse", m.full_mse}, {"l_fm", m.l_fm}};
}

json benchmark_json(const eval::MetricsReport& r) {
  return {{"sen_acc", r.sen_acc}, {"ned", r.ned}, {"regions", r.regions}, {"exact", r.exact}};
}

void print_ablation(std::span<const AblationRow> rows) {
  for (const AblationRow& r : rows) {
    std::cout << r.label << " seed=" << r.seed << " glyph_region_mse=" << r.metrics.glyph_region_mse
              << " full_mse=" << r.metrics.full_mse << '\n';
  }
}

std::vector<SceneData> ablation_scenes(const std::string& manifest, const DatagenOpts& gen) {
  if (!manifest.empty()) return load_scenes(load_manifest(manifest));
  const auto rendered = render_dataset(gen.config());
  return to_scene_data(rendered);
}

// ---- layout ---------------------------------------------------------------

// Vocabulary made of every well-formed token that appears in the corpus.
layout::TokenVocab vocab_from_corpus(const std::string& text) {
  std::vector<std::string> fonts;
  std::vector<std::string> colors;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const json j = json::parse(line, nullptr, false);
    if (!j.is_object()) continue;
    auto collect = [&](const char* key, auto pred, std::vector<std::string>& dst) {
      if (!j.contains(key) || !j[key].is_array()) return;
      for (const auto& t : j[key]) {
        if (t.is_string() && pred(t.template get<std::string>())) {
          dst.push_back(t.template get<std::string>());
        }
      }
    };
    collect("fonts", layout::TokenVocab::is_font_token, fonts);
    collect("colors", layout::TokenVocab::is_color_token, colors);
  }
  for (auto* v : {&fonts, &colors}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  return layout::TokenVocab(std::move(fonts), std::move(colors));
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Returns the number of records with violations or parse failures.
int validate_corpus(const std::string& text, const layout::TokenVocab& vocab) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int bad = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const layout::LayoutRecord rec = layout::parse_record(line, vocab, line_no);
      const layout::ValidationReport rep = layout::validate_layout(rec.layout);
      for (const auto& o : rep.overlaps) {
        std::cout << "line " << line_no << ": entries " << o.first << " and " << o.second
                  << " overlap by " << o.area << " px\n";
      }
      for (std::size_t i : rep.out_of_bounds) {
        std::cout << "line " << line_no << ": entry " << i << " leaves the canvas\n";
      }
      if (rep.proportionality_flagged) {
        std::cout << "line " << line_no << ": box sizes weakly proportional to text length ("
                  << *rep.proportionality << ")\n";
      }
      if (rep.violations() > 0) ++bad;
    } catch (const Error& e) {
      std::cout << "line " << line_no << ": " << e.what() << '\n';
      ++bad;
    }
  }
  return bad;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Glyph-conditioned flow matching toolkit"};
  app.set_config("--config", "", "Key/value configuration file; command-line flags override it");
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  std::function<int()> action;

  // datagen
  DatagenOpts gen;
  auto* datagen = app.add_subcommand("datagen", "Render a synthetic scene dataset");
  add_datagen_options(*datagen, gen);
  datagen->add_option("--seed", gen.seed, "Root seed")->capture_default_str();
  datagen->add_option("--out", gen.out, "Output directory")->required();
  datagen->callback([&] {
    action = [&] {
      const DatasetManifest m = make_dataset(gen.config(), gen.out);
      std::cout << "wrote " << m.records.size() << " scenes to " << gen.out << '\n';
      return kExitOk;
    };
  });

  // condition build
  ConditionOpts cond;
  std::string cond_manifest;
  std::string cond_out;
  auto* condition_cmd = app.add_subcommand("condition", "Glyph condition tools");
  condition_cmd->require_subcommand(1);
  auto* cond_build = condition_cmd->add_subcommand("build", "Build condition images and masks");
  cond_build->add_option("--manifest", cond_manifest, "Dataset manifest")->required();
  cond_build->add_option("--out-dir", cond_out, "Output directory")->required();
  cond_build->add_option("--seed", seed, "Seed for the segmenter")->capture_default_str();
  add_condition_options(*cond_build, cond);
  cond_build->callback([&] {
    action = [&] {
      const condition::AgcConfig agc = cond.agc();
      const auto mode = condition::condition_mode_from_string(cond.mode);
      const auto scenes = load_scenes(load_manifest(cond_manifest));
      const auto conds =
          condition_scenes(scenes, *cond.segmenter(), agc, mode, RunSeeds::from(seed).segment);
      const BranchCounts c = write_conditions(scenes, conds, agc, mode, cond_out);
      std::cout << "conditioned " << scenes.size() << " images: " << c.large << " large, "
                << c.small << " small regions\n";
      return kExitOk;
    };
  });

  // train
  TrainOpts tr;
  ConditionOpts train_cond;
  std::string train_manifest;
  std::string train_conds;
  std::string train_out;
  auto* train_cmd = app.add_subcommand("train", "Train the velocity model");
  train_cmd->add_option("--manifest", train_manifest, "Dataset manifest")->required();
  train_cmd->add_option("--conds", train_conds,
                        "Directory holding conds/ and grmasks/ from 'condition build'; built in "
                        "memory when omitted");
  train_cmd->add_option("--out", train_out, "Output directory")->required();
  train_cmd->add_option("--seed", seed, "Root seed")->capture_default_str();
  train_cmd->add_option("--samples", tr.samples, "Scenes to sample after training")
      ->capture_default_str();
  train_cmd->add_option("--sample-steps", tr.sample_steps, "Euler steps per sample")
      ->capture_default_str();
  add_train_options(*train_cmd, tr);
  add_condition_options(*train_cmd, train_cond);
  train_cmd->callback([&] {
    action = [&] {
      const ExperimentConfig e = tr.experiment(train_cond);
      const auto scenes = load_scenes(load_manifest(train_manifest));
      const auto conds =
          train_conds.empty()
              ? condition_scenes(scenes, *train_cond.segmenter(), e.agc,
                                 condition::condition_mode_from_string(train_cond.mode),
                                 RunSeeds::from(seed).segment)
              : read_conditions(scenes, train_conds);
      const TrainOutput o =
          run_training(e, seed, scenes, conds, tr.samples, tr.sample_steps, train_out);
      std::cout << "final loss " << o.result.log.back().loss.total << ", glyph-region mse "
                << o.metrics.glyph_region_mse << '\n';
      return kExitOk;
    };
  });

  // ablate-lambda
  TrainOpts abl;
  ConditionOpts abl_cond;
  DatagenOpts abl_gen;
  abl_gen.n = 64;
  std::string abl_manifest;
  std::string abl_out;
  std::vector<double> lambdas{0, 0.01, 0.1, 1, 2, 4};
  std::vector<std::uint64_t> abl_seeds{0, 1, 2};
  auto* ablate_lambda =
      app.add_subcommand("ablate-lambda", "Paired-seed sweep over the glyph-region loss weight");
  ablate_lambda->add_option("--values", lambdas, "Lambda values")
      ->delimiter(',')
      ->capture_default_str();
  ablate_lambda->add_option("--seeds", abl_seeds, "Run seeds")->delimiter(',')->capture_default_str();
  ablate_lambda->add_option("--manifest", abl_manifest,
                            "Dataset manifest; a dataset is rendered in memory when omitted");
  ablate_lambda->add_option("--data-seed", abl_gen.seed, "Seed of the in-memory dataset")
      ->capture_default_str();
  ablate_lambda->add_option("--out", abl_out, "Report path");
  add_datagen_options(*ablate_lambda, abl_gen);
  add_train_options(*ablate_lambda, abl);
  add_condition_options(*ablate_lambda, abl_cond);
  ablate_lambda->callback([&] {
    action = [&] {
      std::vector<AblationArm> arms;
      const auto mode = condition::condition_mode_from_string(abl_cond.mode);
      for (double l : lambdas) {
        std::ostringstream label;
        label << "lambda=" << l;
        arms.push_back({label.str(), l, mode});
      }
      const auto scenes = ablation_scenes(abl_manifest, abl_gen);
      const auto rows = run_ablation(scenes, *abl_cond.segmenter(), abl.experiment(abl_cond),
                                     arms, abl_seeds);
      print_ablation(rows);
      if (!abl_out.empty()) write_ablation_report(rows, abl_out);
      return kExitOk;
    };
  });

  // ablate-agc
  TrainOpts agc_tr;
  ConditionOpts agc_cond;
  DatagenOpts agc_gen;
  agc_gen.n = 64;
  agc_gen.profile = "mini";
  std::string agc_manifest;
  std::string agc_out;
  std::vector<std::uint64_t> agc_seeds{0, 1, 2};
  auto* ablate_agc = app.add_subcommand(
      "ablate-agc", "Paired-seed comparison of adaptive and raw-segmentation conditions");
  ablate_agc->add_option("--seeds", agc_seeds, "Run seeds")->delimiter(',')->capture_default_str();
  ablate_agc->add_option("--manifest", agc_manifest,
                         "Dataset manifest; a dataset is rendered in memory when omitted");
  ablate_agc->add_option("--data-seed", agc_gen.seed, "Seed of the in-memory dataset")
      ->capture_default_str();
  ablate_agc->add_option("--out", agc_out, "Report path");
  add_datagen_options(*ablate_agc, agc_gen);
  add_train_options(*ablate_agc, agc_tr);
  add_condition_options(*ablate_agc, agc_cond);
  ablate_agc->callback([&] {
    action = [&] {
      const std::vector<AblationArm> arms{
          {"adaptive", agc_tr.lambda, condition::ConditionMode::Adaptive},
          {"raw-seg", agc_tr.lambda, condition::ConditionMode::RawSegmentation}};
      const auto scenes = ablation_scenes(agc_manifest, agc_gen);
      const auto rows = run_ablation(scenes, *agc_cond.segmenter(),
                                     agc_tr.experiment(agc_cond), arms, agc_seeds);
      print_ablation(rows);
      if (!agc_out.empty()) write_ablation_report(rows, agc_out);
      return kExitOk;
    };
  });

  // eval
  std::string eval_manifest;
  std::string eval_images;
  std::string eval_report;
  auto* eval_cmd = app.add_subcommand("eval", "Score text accuracy with the template recognizer");
  eval_cmd->add_option("--manifest", eval_manifest, "Dataset manifest")->required();
  eval_cmd->add_option("--images", eval_images,
                       "Directory of images to score in place of the manifest images");
  eval_cmd->add_option("--report", eval_report, "Report path");
  eval_cmd->callback([&] {
    action = [&] {
      const auto rep = eval::run_benchmark(
          load_manifest(eval_manifest), eval::TemplateRecognizer{},
          eval_images.empty() ? std::nullopt : std::optional<fs::path>(eval_images),
          eval_report.empty() ? std::nullopt : std::optional<fs::path>(eval_report));
      std::cout << "sen_acc " << rep.sen_acc << " ned " << rep.ned << " over " << rep.regions
                << " regions\n";
      return kExitOk;
    };
  });

  // layout gen | validate
  int layout_n = 1000;
  std::uint64_t layout_seed = 0;
  std::string layout_vocab;
  std::string layout_out;
  std::string layout_in;
  auto* layout_cmd = app.add_subcommand("layout", "Layout corpus tools");
  layout_cmd->require_subcommand(1);
  auto* layout_gen = layout_cmd->add_subcommand("gen", "Generate a layout corpus");
  layout_gen->add_option("--n", layout_n, "Number of records")->capture_default_str();
  layout_gen->add_option("--seed", layout_seed, "Seed")->capture_default_str();
  layout_gen->add_option("--vocab", layout_vocab, "Font/color token file")->required();
  layout_gen->add_option("--out", layout_out, "Corpus path")->required();
  layout_gen->callback([&] {
    action = [&] {
      const auto vocab = layout::TokenVocab::load(layout_vocab);
      layout::save_corpus(layout::gen_corpus(vocab, layout_n, layout_seed), layout_out);
      std::cout << "wrote " << layout_n << " records to " << layout_out << '\n';
      return kExitOk;
    };
  });
  auto* layout_validate = layout_cmd->add_subcommand("validate", "Check a layout corpus");
  layout_validate->add_option("--in", layout_in, "Corpus path")->required();
  layout_validate->add_option("--vocab", layout_vocab,
                              "Font/color token file; any well-formed token is accepted when "
                              "omitted");
  layout_validate->callback([&] {
    action = [&] {
      const std::string text = read_text(layout_in);
      const auto vocab =
          layout_vocab.empty() ? vocab_from_corpus(text) : layout::TokenVocab::load(layout_vocab);
      const int bad = validate_corpus(text, vocab);
      std::cout << bad << " record(s) with violations\n";
      return bad == 0 ? kExitOk : kExitFailure;
    };
  });

  // pipeline
  DatagenOpts pipe_gen;
  TrainOpts pipe_tr;
  pipe_tr.steps = 200;
  ConditionOpts pipe_cond;
  std::string pipe_out = "run";
  auto* pipeline = app.add_subcommand("pipeline", "datagen, condition, train and eval in one run");
  pipeline->add_option("--seed", seed, "Root seed")->capture_default_str();
  pipeline->add_option("--out", pipe_out, "Run directory")->capture_default_str();
  pipeline->add_option("--sample-steps", pipe_tr.sample_steps, "Euler steps per sample")
      ->capture_default_str();
  add_datagen_options(*pipeline, pipe_gen);
  add_train_options(*pipeline, pipe_tr);
  add_condition_options(*pipeline, pipe_cond);
  pipeline->callback([&] {
    action = [&] {
      const fs::path run(pipe_out);
      pipe_gen.seed = SeedTree(seed).derive("data");
      const ExperimentConfig e = pipe_tr.experiment(pipe_cond);
      const auto mode = condition::condition_mode_from_string(pipe_cond.mode);

      const DatasetManifest manifest = make_dataset(pipe_gen.config(), run);
      const auto scenes = load_scenes(manifest);
      const auto built = condition_scenes(scenes, *pipe_cond.segmenter(), e.agc, mode,
                                          RunSeeds::from(seed).segment);
      const BranchCounts counts = write_conditions(scenes, built, e.agc, mode, run);
      const auto conds = read_conditions(scenes, run);
      const TrainOutput trained = run_training(e, seed, scenes, conds,
                                               static_cast<int>(scenes.size()),
                                               pipe_tr.sample_steps, run);

      const eval::TemplateRecognizer recognizer;
      const auto gt = eval::run_benchmark(manifest, recognizer, std::nullopt,
                                          run / "eval_ground_truth.json");
      const auto sampled =
          eval::run_benchmark(manifest, recognizer, run / "samples", run / "eval_samples.json");

      int gr_seg = 0;
      int gr_box = 0;
      for (const auto& c : built) {
        for (const auto& rb : c.condition.per_region_branch) {
          (rb.branch == condition::Branch::Large ? gr_seg : gr_box)++;
        }
      }
      const bool coverage = counts.large > 0 && counts.small > 0 && gr_seg > 0 && gr_box > 0;
      const json report{
          {"seed", seed},
          {"scenes", scenes.size()},
          {"profile", pipe_gen.profile},
          {"steps", e.train.steps},
          {"lambda", e.train.lambda},
          {"gr_activation_step", e.train.activation_step()},
          {"condition_mode", condition::to_string(mode)},
          {"branches", {{"condition_large", counts.large}, {"condition_small", counts.small},
                        {"gr_mask_segmentation", gr_seg}, {"gr_mask_box", gr_box}}},
          {"branch_coverage", coverage},
          {"final_loss", trained.result.log.back().loss.total},
          {"reconstruction", metrics_json(trained.metrics)},
          {"eval_ground_truth", benchmark_json(gt)},
          {"eval_samples", benchmark_json(sampled)}};
      write_text(run / "report.json", report.dump(2) + "\n");
      std::cout << "report written to " << (run / "report.json").string() << '\n';
      if (!coverage) std::cerr << "warning: run did not exercise both branches\n";
      return kExitOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e, std::cerr, std::cerr);
    std::cerr << '\n' << app.help();
    return kExitUsage;
  }
  try {
    return action ? action() : kExitUsage;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace glyphflow::app
