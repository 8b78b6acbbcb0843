// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "glyphflow/app/cli.hpp"
#include "glyphflow/app/dataset.hpp"
#include "glyphflow/app/pipeline.hpp"
#include "glyphflow/eval/metrics.hpp"
#include "glyphflow/flow/trainer.hpp"
#include "glyphflow/imaging/png_io.hpp"
#include "glyphflow/layout/layout.hpp"
#include "glyphflow/text.hpp"

using namespace glyphflow;
namespace fs = std::filesystem;
using imaging::ImageBuffer;
using imaging::Mask;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

const fs::path kWork = fs::temp_directory_path() / "glyphflow_acceptance";

// Training data for the flow-level criteria.
std::vector<app::SceneData> scenes(app::SizeProfile profile, int n, std::uint64_t seed) {
  app::DatasetConfig cfg;
  cfg.n = n;
  cfg.profile = profile;
  cfg.seed = seed;
  return app::to_scene_data(app::render_dataset(cfg));
}

// 1 ---------------------------------------------------------------------------
Outcome gradient_check() {
  constexpr double kTol = 1e-4;
  constexpr double kStep = 1e-4;
  constexpr double kFloor = 1e-6;  // denominators below this count as absolute error
  constexpr int kParams = 120;
  const auto t0 = Clock::now();
  const auto data_scenes = scenes(app::SizeProfile::Mixed, 4, 101);
  double worst = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const flow::Codec codec(8, seed);
    const auto conds = app::condition_scenes(data_scenes, app::GroundTruthSegmenter{},
                                             condition::AgcConfig{},
                                             condition::ConditionMode::Adaptive, seed);
    const auto data = app::make_examples(data_scenes, conds, codec);
    const flow::DenoiserParams p = flow::init_denoiser(flow::DenoiserConfig{}, seed, 1.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> time(0.05, 0.95);
    std::vector<flow::BatchItem> batch;
    for (std::size_t i = 0; i < 2; ++i) {
      flow::LatentTensor eps(data[i].z0.h(), data[i].z0.w(), data[i].z0.c());
      for (double& v : eps.data()) v = normal(rng);
      batch.push_back({i, eps, time(rng)});
    }
    const double lambda = 1.0;
    const flow::DenoiserParams g = flow::backward(p, data, batch, lambda, codec);
    std::uniform_int_distribution<std::size_t> pick(0, p.parameter_count() - 1);
    for (int k = 0; k < kParams; ++k) {
      const std::size_t i = pick(rng);
      flow::DenoiserParams a = p;
      flow::DenoiserParams b = p;
      a.flat(i) += kStep;
      b.flat(i) -= kStep;
      const double fa = flow::evaluate_objective(a, data, batch, lambda, codec, false).loss.total;
      const double fb = flow::evaluate_objective(b, data, batch, lambda, codec, false).loss.total;
      const double fd = (fa - fb) / (2 * kStep);
      const double err =
          std::abs(g.flat(i) - fd) / std::max({std::abs(g.flat(i)), std::abs(fd), kFloor});
      worst = std::max(worst, err);
    }
  }
  const double secs = seconds_since(t0);
  return {worst < kTol && secs < 60.0,
          "max rel err " + fmt("%.3g", worst) + " over 3x" + std::to_string(kParams) +
              " params (tol 1e-4), " + fmt("%.1f", secs) + " s (limit 60)"};
}

// 2 ---------------------------------------------------------------------------
Outcome flow_identities() {
  const auto s = scenes(app::SizeProfile::Mixed, 2, 202);
  const flow::Codec codec(8, 5);
  double rec_err = 0.0;
  double codec_err = 0.0;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto& sc : s) {
    const flow::LatentTensor z0 = codec.encode(sc.image);
    const ImageBuffer back = codec.decode(z0);
    for (std::size_t i = 0; i < back.data().size(); ++i) {
      codec_err = std::max(codec_err, std::abs(back.data()[i] - sc.image.data()[i]));
    }
    flow::LatentTensor eps(z0.h(), z0.w(), z0.c());
    for (double& v : eps.data()) v = normal(rng);
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const flow::FlowSample fs_ = flow::sample_flow(z0, eps, t);
      const ImageBuffer x = flow::reconstruct_x0(fs_.zt, fs_.v_star, t, codec);
      for (std::size_t i = 0; i < x.data().size(); ++i) {
        rec_err = std::max(rec_err, std::abs(x.data()[i] - sc.image.data()[i]));
      }
    }
  }
  return {rec_err < 1e-10 && codec_err < 1e-12,
          "x0 max err " + fmt("%.3g", rec_err) + " (tol 1e-10), codec round trip " +
              fmt("%.3g", codec_err) + " (tol 1e-12)"};
}

// 3 ---------------------------------------------------------------------------
Outcome branch_law() {
  const condition::AgcConfig cfg;
  const condition::GlyphRegion below{{0, 0, 71, 69}, "A", 1};    // 4899
  const condition::GlyphRegion at{{0, 0, 70, 70}, "A", 1};       // 4900
  const condition::GlyphRegion above{{0, 0, 377, 13}, "A", 1};   // 4901
  const bool ok = condition::avg_char_area(below) == cfg.threshold - 1 &&
                  condition::avg_char_area(at) == cfg.threshold &&
                  condition::avg_char_area(above) == cfg.threshold + 1 &&
                  condition::classify(below, cfg) == condition::Branch::Small &&
                  condition::classify(at, cfg) == condition::Branch::Small &&
                  condition::classify(above, cfg) == condition::Branch::Large;
  return {ok, std::string("A_avg 4899/4900/4901 -> ") +
                  condition::to_string(condition::classify(below, cfg)) + "/" +
                  condition::to_string(condition::classify(at, cfg)) + "/" +
                  condition::to_string(condition::classify(above, cfg))};
}

// 4 ---------------------------------------------------------------------------
Outcome mask_loss_identities() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  bool zero_exact = true;
  for (int trial = 0; trial < 10; ++trial) {
    ImageBuffer a(64, 48, 3);
    ImageBuffer b(64, 48, 3);
    for (double& v : a.data()) v = u(rng);
    for (double& v : b.data()) v = u(rng);
    double mse = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
      mse += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
    }
    mse /= static_cast<double>(a.data().size());
    worst = std::max(worst, std::abs(flow::loss_gr(a, b, Mask(64, 48, 1.0)) - mse));
    zero_exact = zero_exact && flow::loss_gr(a, b, Mask(64, 48, 0.0)) == 0.0;
  }
  return {worst < 1e-12 && zero_exact, "all-ones |diff| " + fmt("%.3g", worst) +
                                           " (tol 1e-12), all-zeros exact " +
                                           (zero_exact ? "yes" : "no")};
}

// 5 and 6 -------------------------------------------------------------------
app::ExperimentConfig ablation_config() {
  app::ExperimentConfig e;
  e.train.steps = 2000;
  return e;
}

std::string pair_line(const std::vector<app::AblationRow>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    os << (i ? "; " : "") << "seed " << rows[i].seed << ": " << rows[i].label << " "
       << fmt("%.5f", rows[i].metrics.glyph_region_mse) << " vs " << rows[i + 1].label << " "
       << fmt("%.5f", rows[i + 1].metrics.glyph_region_mse);
  }
  return os.str();
}

bool first_le_second(const std::vector<app::AblationRow>& rows) {
  bool ok = !rows.empty();
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    ok = ok && rows[i].metrics.glyph_region_mse <= rows[i + 1].metrics.glyph_region_mse;
  }
  return ok;
}

Outcome lambda_ablation() {
  const auto t0 = Clock::now();
  const auto data = scenes(app::SizeProfile::Mixed, 64, 505);
  const std::vector<app::AblationArm> arms{
      {"lambda=1", 1.0, condition::ConditionMode::Adaptive},
      {"lambda=0", 0.0, condition::ConditionMode::Adaptive}};
  const std::vector<std::uint64_t> seeds{0, 1, 2};
  const auto rows =
      app::run_ablation(data, app::GroundTruthSegmenter{}, ablation_config(), arms, seeds);
  const double secs = seconds_since(t0);
  return {first_le_second(rows) && secs < 15 * 60.0,
          pair_line(rows) + "; " + fmt("%.0f", secs) + " s (limit 900)"};
}

Outcome agc_ablation() {
  const auto data = scenes(app::SizeProfile::Mini, 64, 606);
  const std::vector<app::AblationArm> arms{
      {"adaptive", 1.0, condition::ConditionMode::Adaptive},
      {"raw-seg", 1.0, condition::ConditionMode::RawSegmentation}};
  const std::vector<std::uint64_t> seeds{0, 1, 2};
  const auto rows =
      app::run_ablation(data, app::GroundTruthSegmenter{}, ablation_config(), arms, seeds);
  return {first_le_second(rows), pair_line(rows)};
}

// 7 ---------------------------------------------------------------------------
std::size_t levenshtein_oracle(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

Outcome ned_oracle() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> len(0, 30);
  std::uniform_int_distribution<int> sym(0, 5);
  const char32_t alphabet[] = {U'A', U'B', U'7', U'國', U'風', U'Z'};
  int mismatches = 0;
  for (int k = 0; k < 1000; ++k) {
    std::u32string a;
    std::u32string b;
    for (int i = len(rng); i > 0; --i) a.push_back(alphabet[sym(rng)]);
    for (int i = len(rng); i > 0; --i) b.push_back(alphabet[sym(rng)]);
    const std::size_t m = std::max(a.size(), b.size());
    const double expect =
        m == 0 ? 1.0 : 1.0 - static_cast<double>(levenshtein_oracle(a, b)) / static_cast<double>(m);
    if (eval::ned(text::encode_utf8(a), text::encode_utf8(b)) != expect) ++mismatches;
  }
  const double kitten = eval::ned("kitten", "sitting");
  return {mismatches == 0 && std::abs(kitten - 0.5714) <= 1e-4,
          std::to_string(mismatches) + "/1000 mismatches, ned(kitten,sitting)=" +
              fmt("%.6f", kitten)};
}

// 8 ---------------------------------------------------------------------------
Outcome layout_contract() {
  const layout::TokenVocab vocab({"<font_sans>", "<font_serif>", "<font_mono>", "<font_brush>"},
                                 {"<color_black>", "<color_white>", "<color_red>", "<color_gold>"});
  const auto corpus = layout::gen_corpus(vocab, 1000, 8);
  std::size_t overlaps = 0;
  std::size_t flagged = 0;
  std::size_t round_trip_bad = 0;
  for (const auto& rec : corpus) {
    overlaps += layout::validate_layout(rec.layout).overlaps.size();
    const std::string line = layout::serialize_record(rec);
    const layout::LayoutRecord back = layout::parse_record(line, vocab);
    if (!(back == rec) || layout::serialize_record(back) != line) ++round_trip_bad;

    layout::LayoutSpec mutated = rec.layout;
    const auto& target = mutated.entries[0].box;
    auto& moved = mutated.entries[1].box;
    const int w = moved.width();
    const int h = moved.height();
    moved = {target.x0 + target.width() / 2, target.y0 + target.height() / 2,
             target.x0 + target.width() / 2 + w, target.y0 + target.height() / 2 + h};
    if (!layout::validate_layout(mutated).overlaps.empty()) ++flagged;
  }
  return {corpus.size() == 1000 && overlaps == 0 && flagged == corpus.size() && round_trip_bad == 0,
          std::to_string(overlaps) + " overlaps in 1000 records, mutations flagged " +
              std::to_string(flagged) + "/" + std::to_string(corpus.size()) +
              ", round-trip failures " + std::to_string(round_trip_bad)};
}

// 9 ---------------------------------------------------------------------------
Outcome evaluation_bounds() {
  const fs::path dir = kWork / "bench";
  fs::remove_all(dir);
  app::DatasetConfig cfg;
  cfg.n = 16;
  cfg.seed = 909;
  const app::DatasetManifest m = app::make_dataset(cfg, dir);
  const eval::TemplateRecognizer rec;
  const eval::MetricsReport gt = eval::run_benchmark(m, rec);
  fs::create_directories(dir / "blanked");
  for (const auto& r : m.records) {
    ImageBuffer img = imaging::load_png(m.resolve(r.image));
    for (const auto& g : r.regions) {
      for (int y = g.box.y0; y < g.box.y1; ++y) {
        for (int x = g.box.x0; x < g.box.x1; ++x) {
          for (int c = 0; c < img.channels(); ++c) img.at(x, y, c) = 0.0;
        }
      }
    }
    imaging::save_png(img, dir / "blanked" / fs::path(r.image).filename());
  }
  const eval::MetricsReport blank = eval::run_benchmark(m, rec, dir / "blanked");
  return {gt.sen_acc == 1.0 && gt.ned == 1.0 && blank.sen_acc == 0.0,
          "ground truth sen_acc " + fmt("%.4f", gt.sen_acc) + " ned " + fmt("%.4f", gt.ned) +
              ", blanked sen_acc " + fmt("%.4f", blank.sen_acc) + " over " +
              std::to_string(gt.regions) + " regions"};
}

// 10 --------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_pipeline(const fs::path& out) {
  std::vector<std::string> args{"glyphflow", "pipeline", "--seed", "0", "--out", out.string()};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return app::cli_main(static_cast<int>(argv.size()), argv.data());
}

Outcome end_to_end_determinism() {
  const fs::path a = kWork / "run_a";
  const fs::path b = kWork / "run_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const int ra = run_pipeline(a);
  const int rb = run_pipeline(b);
  const std::string rep = slurp(a / "report.json");
  const bool same_report = !rep.empty() && rep == slurp(b / "report.json");
  const std::string ck = slurp(a / "ckpt.bin");
  const bool same_ckpt = !ck.empty() && ck == slurp(b / "ckpt.bin");
  return {ra == 0 && rb == 0 && same_report && same_ckpt,
          std::string("exit ") + std::to_string(ra) + "/" + std::to_string(rb) + ", report " +
              (same_report ? "identical" : "differs") + ", checkpoint " +
              (same_ckpt ? "identical" : "differs") + " (" + std::to_string(ck.size()) +
              " bytes)"};
}

}  // namespace

int main() {
  fs::remove_all(kWork);
  fs::create_directories(kWork);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"gradient correctness", gradient_check},
      {"flow identities", flow_identities},
      {"AGC branch law", branch_law},
      {"mask-loss identities", mask_loss_identities},
      {"lambda-ablation trend", lambda_ablation},
      {"AGC-ablation trend", agc_ablation},
      {"NED oracle equivalence", ned_oracle},
      {"layout contract", layout_contract},
      {"evaluation bounds", evaluation_bounds},
      {"end-to-end determinism", end_to_end_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(kWork);
  return failed;
}
