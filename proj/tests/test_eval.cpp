#include <algorithm>
#include <random>

#include "doctest.h"

#include "glyphflow/app/dataset.hpp"
#include "glyphflow/error.hpp"
#include "glyphflow/eval/metrics.hpp"
#include "glyphflow/imaging/png_io.hpp"
#include "glyphflow/text.hpp"

using namespace glyphflow;
using namespace glyphflow::eval;

namespace {

// Full-matrix Levenshtein distance.
std::size_t dp_oracle(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
    }
  }
  return d[a.size()][b.size()];
}

app::RenderedScene scene_with(const std::string& text, int scale, double noise = 0.0) {
  app::SceneSpec spec;
  spec.canvas = {128, 128};
  spec.style = noise > 0 ? app::BackgroundStyle::Noise : app::BackgroundStyle::Flat;
  spec.noise_sigma = noise;
  spec.background = {0.9, 0.85, 0.8};
  spec.background_end = spec.background;
  spec.strings.push_back({text, 4, 10, scale, {0.1, 0.2, 0.3}});
  spec.seed = 4;
  return app::render_scene(spec);
}

}  // namespace

TEST_CASE("ned examples") {
  CHECK(ned("text", "text") == 1.0);
  CHECK(ned("hello", "") == 0.0);
  CHECK(ned("", "") == 1.0);
  CHECK(ned("kitten", "sitting") == doctest::Approx(1.0 - 3.0 / 7.0));
  CHECK(std::abs(ned("kitten", "sitting") - 0.5714) < 1e-4);
  CHECK(ned("國風", "國雲") == 0.5);
}

TEST_CASE("ned agrees with the oracle and is symmetric") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> len(0, 30);
  std::uniform_int_distribution<int> sym(0, 4);
  for (int trial = 0; trial < 1000; ++trial) {
    std::u32string a;
    std::u32string b;
    for (int i = len(rng); i > 0; --i) a.push_back(U'A' + static_cast<char32_t>(sym(rng)));
    for (int i = len(rng); i > 0; --i) b.push_back(U'A' + static_cast<char32_t>(sym(rng)));
    const std::size_t d = dp_oracle(a, b);
    CHECK(edit_distance(a, b) == d);
    const std::size_t m = std::max(a.size(), b.size());
    const double expect = m == 0 ? 1.0 : 1.0 - static_cast<double>(d) / static_cast<double>(m);
    const std::string sa = text::encode_utf8(a);
    const std::string sb = text::encode_utf8(b);
    CHECK(ned(sa, sb) == expect);
    CHECK(ned(sa, sb) == ned(sb, sa));
    CHECK(ned(sa, sa) == 1.0);
  }
}

TEST_CASE("sentence accuracy") {
  using P = std::pair<std::string, std::string>;
  const std::vector<P> all{{"A", "A"}, {"B", "B"}};
  const std::vector<P> none{{"A", "B"}, {"B", "C"}};
  const std::vector<P> most{{"A", "A"}, {"B", "B"}, {"C", " C "}, {"D", "E"}};
  CHECK(sentence_acc(all) == 1.0);
  CHECK(sentence_acc(none) == 0.0);
  CHECK(sentence_acc(most) == 0.75);
  CHECK_THROWS_AS(sentence_acc(std::vector<P>{}), ParameterError);
}

TEST_CASE("recognizer on clean renders") {
  for (int scale : {1, 2, 3, 9}) {
    const auto s = scene_with(scale == 9 ? "A" : "AB", scale);
    const auto r = toy_recognize(s.image, s.regions);
    REQUIRE(r.texts.size() == 1);
    CHECK(r.texts[0] == (scale == 9 ? "A" : "AB"));
    CHECK(r.confidence[0] > 0.99);
  }
  const auto& atlas = app::GlyphAtlas::builtin();
  std::string all;
  for (const auto& g : atlas.latin()) all += g;
  for (const auto& g : atlas.ideographs()) all += g;
  const std::u32string cps = text::decode_utf8(all);
  for (std::size_t i = 0; i < cps.size(); i += 6) {
    const std::string chunk = text::encode_utf8(cps.substr(i, 6));
    const auto s = scene_with(chunk, 2);
    CHECK(toy_recognize(s.image, s.regions).texts[0] == chunk);
  }
}

TEST_CASE("recognizer edge cases") {
  const std::vector<GlyphRegion> regions{{{4, 4, 60, 40}, "AB", 2}};
  const auto blank = toy_recognize(ImageBuffer(128, 128, 3, 0.0), regions);
  CHECK(blank.texts[0].empty());
  const std::vector<GlyphRegion> tiny{{{4, 4, 40, 12}, "AB", 2}};
  const auto t = toy_recognize(ImageBuffer(128, 128, 3, 0.5), tiny);
  CHECK(t.texts[0].empty());
  CHECK(t.confidence[0] == 0.0);
}

TEST_CASE("recognizer tolerates mild noise") {
  for (int scale : {1, 2, 3}) {
    auto s = scene_with("K7鳥", scale);
    std::mt19937_64 rng(static_cast<unsigned>(scale));
    std::normal_distribution<double> n(0.0, 0.02);
    for (double& v : s.image.data()) v += n(rng);
    CHECK(toy_recognize(s.image, s.regions).texts[0] == "K7鳥");
  }
}

TEST_CASE("aggregation") {
  std::vector<RegionScore> rows{{"a", 0, "AB", "AB", 1.0, 1.0},
                                {"a", 1, "CD", "CE", 0.5, 0.7},
                                {"b", 0, "EF", "", 0.0, 0.0}};
  const MetricsReport r = aggregate(rows, 2);
  CHECK(r.sen_acc == doctest::Approx(1.0 / 3.0));
  CHECK(r.ned == doctest::Approx(0.5));
  CHECK(r.sen_acc <= r.ned);
  std::reverse(rows.begin(), rows.end());
  const MetricsReport s = aggregate(rows, 2);
  CHECK(s.ned == r.ned);
  CHECK(s.sen_acc == r.sen_acc);
}

TEST_CASE("benchmark bounds and permutation invariance") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "glyphflow_eval_bench";
  fs::remove_all(dir);
  app::DatasetConfig cfg;
  cfg.n = 6;
  cfg.seed = 3;
  app::DatasetManifest m = app::make_dataset(cfg, dir);
  const TemplateRecognizer rec;
  const MetricsReport gt = run_benchmark(m, rec, std::nullopt, dir / "report.json");
  CHECK(gt.sen_acc == 1.0);
  CHECK(gt.ned == 1.0);
  CHECK(fs::exists(dir / "report.json"));

  std::reverse(m.records.begin(), m.records.end());
  const MetricsReport shuffled = run_benchmark(m, rec);
  CHECK(shuffled.sen_acc == gt.sen_acc);
  CHECK(shuffled.ned == gt.ned);

  fs::create_directories(dir / "blank");
  for (const auto& r : m.records) {
    fs::copy_file(m.resolve(r.image), dir / "blank" / fs::path(r.image).filename());
  }
  for (const auto& r : m.records) {
    const fs::path p = dir / "blank" / fs::path(r.image).filename();
    ImageBuffer img = imaging::load_png(p);
    for (const auto& g : r.regions) {
      for (int y = g.box.y0; y < g.box.y1; ++y) {
        for (int x = g.box.x0; x < g.box.x1; ++x) {
          for (int c = 0; c < 3; ++c) img.at(x, y, c) = 0.0;
        }
      }
    }
    imaging::save_png(img, p);
  }
  const MetricsReport blank = run_benchmark(m, rec, dir / "blank");
  CHECK(blank.sen_acc == 0.0);

  fs::remove(dir / "blank" / fs::path(m.records[0].image).filename());
  fs::remove(dir / "blank" / fs::path(m.records[1].image).filename());
  try {
    run_benchmark(m, rec, dir / "blank");
    FAIL("expected an I/O error");
  } catch (const IoError& e) {
    const std::string what = e.what();
    CHECK(what.find(fs::path(m.records[0].image).filename().string()) != std::string::npos);
    CHECK(what.find(fs::path(m.records[1].image).filename().string()) != std::string::npos);
  }
  fs::remove_all(dir);
}
