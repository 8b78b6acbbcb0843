#include "glyphflow/eval/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include "json.hpp"

#include "glyphflow/imaging/png_io.hpp"
#include "glyphflow/text.hpp"

namespace glyphflow::eval {

using app::GlyphAtlas;

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double ned(std::string_view a, std::string_view b) {
  const std::u32string ua = text::decode_utf8(a);
  const std::u32string ub = text::decode_utf8(b);
  const std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(ua, ub)) / static_cast<double>(longest);
}

double sentence_acc(std::span<const std::pair<std::string, std::string>> pairs) {
  if (pairs.empty()) throw ParameterError("sentence accuracy needs at least one pair");
  std::size_t hits = 0;
  for (const auto& [ref, hyp] : pairs) {
    if (text::trim(ref) == text::trim(hyp)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

TemplateRecognizer::TemplateRecognizer(const GlyphAtlas& atlas) : atlas_(atlas) {}

namespace {

constexpr int kUnits = GlyphAtlas::kInkWidth * GlyphAtlas::kInkHeight;
// Cells whose strongest unit differs from the background by less than this
// are treated as empty.
constexpr double kBlankContrast = 0.08;

struct CellMatch {
  bool blank = true;
  char32_t code_point = 0;
  double score = 0.0;
};

CellMatch match_cell(const ImageBuffer& img, int x0, int y0, int s, const GlyphAtlas& atlas) {
  const int cw = GlyphAtlas::kCellWidth * s;
  const int ch = GlyphAtlas::kCellHeight * s;
  const int ink_x = x0 + GlyphAtlas::kInkOffset * s;
  const int ink_y = y0 + GlyphAtlas::kInkOffset * s;
  const int ink_w = GlyphAtlas::kInkWidth * s;
  const int ink_h = GlyphAtlas::kInkHeight * s;

  std::array<double, 3> bg{};
  double margin_n = 0.0;
  for (int y = y0; y < y0 + ch; ++y) {
    for (int x = x0; x < x0 + cw; ++x) {
      if (x >= ink_x && x < ink_x + ink_w && y >= ink_y && y < ink_y + ink_h) continue;
      for (int c = 0; c < img.channels(); ++c) bg[static_cast<std::size_t>(c)] += img.at(x, y, c);
      margin_n += 1.0;
    }
  }
  for (double& v : bg) v /= margin_n;

  std::array<double, kUnits> units{};
  const double per_unit = static_cast<double>(s * s * img.channels());
  for (int gy = 0; gy < GlyphAtlas::kInkHeight; ++gy) {
    for (int gx = 0; gx < GlyphAtlas::kInkWidth; ++gx) {
      double acc = 0.0;
      for (int py = 0; py < s; ++py) {
        for (int px = 0; px < s; ++px) {
          const int x = ink_x + gx * s + px;
          const int y = ink_y + gy * s + py;
          for (int c = 0; c < img.channels(); ++c) {
            acc += std::abs(img.at(x, y, c) - bg[static_cast<std::size_t>(c)]);
          }
        }
      }
      units[static_cast<std::size_t>(gy * GlyphAtlas::kInkWidth + gx)] = acc / per_unit;
    }
  }
  CellMatch best;
  if (*std::max_element(units.begin(), units.end()) < kBlankContrast) return best;
  best.blank = false;
  best.score = -2.0;
  std::array<double, kUnits> tmpl{};
  for (const GlyphAtlas::Glyph& g : atlas.glyphs()) {
    std::transform(g.ink.begin(), g.ink.end(), tmpl.begin(),
                   [](bool b) { return b ? 1.0 : 0.0; });
    const double r = app::normalized_correlation(units, tmpl);
    if (r > best.score) {
      best.score = r;
      best.code_point = g.code_point;
    }
  }
  return best;
}

}  // namespace

RecognizerResult TemplateRecognizer::recognize(const ImageBuffer& image,
                                               std::span<const GlyphRegion> regions) const {
  RecognizerResult out;
  for (const GlyphRegion& r : regions) {
    const int s = r.box.height() / GlyphAtlas::kCellHeight;
    const int cells = s < 1 ? 0 : r.box.width() / (GlyphAtlas::kCellWidth * s);
    if (!r.box.within(image.size()) || cells < 1) {
      out.texts.emplace_back();
      out.confidence.push_back(0.0);
      continue;
    }
    std::u32string hyp;
    double conf = 0.0;
    for (int k = 0; k < cells; ++k) {
      const CellMatch m =
          match_cell(image, r.box.x0 + k * GlyphAtlas::kCellWidth * s, r.box.y0, s, atlas_);
      if (m.blank) continue;
      hyp.push_back(m.code_point);
      conf += std::max(0.0, m.score);
    }
    out.texts.push_back(text::encode_utf8(hyp));
    out.confidence.push_back(conf / cells);
  }
  return out;
}

RecognizerResult toy_recognize(const ImageBuffer& image, std::span<const GlyphRegion> regions,
                               const GlyphAtlas& atlas) {
  return TemplateRecognizer(atlas).recognize(image, regions);
}

MetricsReport aggregate(std::vector<RegionScore> rows, std::size_t images) {
  MetricsReport rep;
  rep.images = images;
  rep.regions = rows.size();
  std::vector<double> neds;
  neds.reserve(rows.size());
  for (const RegionScore& r : rows) {
    neds.push_back(r.ned);
    if (text::trim(r.reference) == text::trim(r.hypothesis)) ++rep.exact;
  }
  std::sort(neds.begin(), neds.end());
  double sum = 0.0;
  for (double v : neds) sum += v;
  if (!rows.empty()) {
    rep.sen_acc = static_cast<double>(rep.exact) / static_cast<double>(rows.size());
    rep.ned = sum / static_cast<double>(rows.size());
  }
  rep.rows = std::move(rows);
  return rep;
}

MetricsReport run_benchmark(const app::DatasetManifest& manifest, const Recognizer& recognizer,
                            const std::optional<std::filesystem::path>& image_dir,
                            const std::optional<std::filesystem::path>& report_path) {
  auto image_path = [&](const app::ManifestRecord& rec) {
    return image_dir ? *image_dir / std::filesystem::path(rec.image).filename()
                     : manifest.resolve(rec.image);
  };
  std::string missing;
  for (const app::ManifestRecord& rec : manifest.records) {
    const auto p = image_path(rec);
    if (!std::filesystem::exists(p)) missing += (missing.empty() ? "" : ", ") + p.string();
  }
  if (!missing.empty()) throw IoError("missing benchmark images: " + missing);

  std::vector<RegionScore> rows;
  for (const app::ManifestRecord& rec : manifest.records) {
    const ImageBuffer img = imaging::load_png(image_path(rec));
    const RecognizerResult res = recognizer.recognize(img, rec.regions);
    if (res.texts.size() != rec.regions.size()) {
      throw ShapeError("recognizer returned a wrong number of regions");
    }
    for (std::size_t i = 0; i < rec.regions.size(); ++i) {
      const std::string ref(text::trim(rec.regions[i].text));
      const std::string hyp(text::trim(res.texts[i]));
      rows.push_back({rec.image, i, ref, hyp, ned(ref, hyp), res.confidence[i]});
    }
  }
  MetricsReport rep = aggregate(std::move(rows), manifest.records.size());
  if (report_path) write_report(rep, *report_path);
  return rep;
}

void write_report(const MetricsReport& report, const std::filesystem::path& path) {
  nlohmann::json obj;
  obj["sen_acc"] = report.sen_acc;
  obj["ned"] = report.ned;
  obj["images"] = report.images;
  obj["regions"] = report.regions;
  obj["exact_matches"] = report.exact;
  obj["rows"] = nlohmann::json::array();
  for (const RegionScore& r : report.rows) {
    obj["rows"].push_back({{"image", r.image},
                           {"region", r.region},
                           {"reference", r.reference},
                           {"hypothesis", r.hypothesis},
                           {"ned", r.ned},
                           {"confidence", r.confidence}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write report " + path.string());
  out << obj.dump(2) << '\n';
}

}  // namespace glyphflow::eval
