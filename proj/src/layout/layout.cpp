#include "glyphflow/layout/layout.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "glyphflow/error.hpp"
#include "glyphflow/rng.hpp"
#include "glyphflow/text.hpp"

namespace glyphflow::layout {

using nlohmann::json;

namespace {

bool matches_token(std::string_view token, std::string_view prefix) {
  if (token.size() <= prefix.size() + 1) return false;
  if (token.substr(0, prefix.size()) != prefix || token.back() != '>') return false;
  const std::string_view body = token.substr(prefix.size(), token.size() - prefix.size() - 1);
  return std::none_of(body.begin(), body.end(), [](char c) {
    return c == '<' || c == '>' || std::isspace(static_cast<unsigned char>(c));
  });
}

void check_unique(const std::vector<std::string>& tokens) {
  std::vector<std::string> sorted = tokens;
  std::sort(sorted.begin(), sorted.end());
  const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) throw ParameterError("duplicate vocabulary token " + *dup);
}

}  // namespace

TokenVocab::TokenVocab(std::vector<std::string> fonts, std::vector<std::string> colors)
    : fonts_(std::move(fonts)), colors_(std::move(colors)) {
  for (const auto& f : fonts_) {
    if (!is_font_token(f)) throw ParameterError("not a font token: " + f);
  }
  for (const auto& c : colors_) {
    if (!is_color_token(c)) throw ParameterError("not a color token: " + c);
  }
  check_unique(fonts_);
  check_unique(colors_);
}

bool TokenVocab::is_font_token(std::string_view token) { return matches_token(token, "<font_"); }
bool TokenVocab::is_color_token(std::string_view token) {
  return matches_token(token, "<color_");
}

TokenVocab TokenVocab::parse(std::string_view text) {
  std::vector<std::string> fonts;
  std::vector<std::string> colors;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view tok = text::trim(raw);
    if (tok.empty() || tok.front() == '#') continue;
    if (is_font_token(tok)) {
      fonts.emplace_back(tok);
    } else if (is_color_token(tok)) {
      colors.emplace_back(tok);
    } else {
      throw ParseError("vocabulary line is neither <font_...> nor <color_...>", line, 1);
    }
  }
  return TokenVocab(std::move(fonts), std::move(colors));
}

TokenVocab TokenVocab::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool TokenVocab::has_font(std::string_view token) const {
  return std::find(fonts_.begin(), fonts_.end(), token) != fonts_.end();
}
bool TokenVocab::has_color(std::string_view token) const {
  return std::find(colors_.begin(), colors_.end(), token) != colors_.end();
}

namespace {

const json& require(const json& obj, const char* key, json::value_t type, int line) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("missing key \"") + key + "\"", line, 1);
  const bool ok = type == json::value_t::number_integer
                      ? it->is_number_integer()
                      : it->type() == type;
  if (!ok) throw ParseError(std::string("key \"") + key + "\" has the wrong type", line, 1);
  return *it;
}

std::string string_at(const json& arr, std::size_t i, const char* key, int line) {
  if (!arr[i].is_string()) {
    throw ParseError(std::string("\"") + key + "\" entries must be strings", line, 1);
  }
  return arr[i].get<std::string>();
}

BoundingBox parse_box(const json& v, int line) {
  if (!v.is_array() || v.size() != 4 ||
      !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number_integer(); })) {
    throw ParseError("bbox must be an array of 4 integers", line, 1);
  }
  const BoundingBox box{v[0].get<int>(), v[1].get<int>(), v[2].get<int>(), v[3].get<int>()};
  if (!box.nonempty()) throw ParseError("bbox has non-positive extent", line, 1);
  return box;
}

}  // namespace

LayoutRecord parse_record(std::string_view raw, const TokenVocab& vocab, int line) {
  json obj;
  try {
    obj = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed layout record: ") + e.what(), line,
                     static_cast<int>(std::max<std::size_t>(e.byte, 1)));
  }
  if (!obj.is_object()) throw ParseError("layout record must be an object", line, 1);
  static const char* kKeys[] = {"prompt", "rewritten_prompt", "texts", "bboxes",
                                "fonts",  "colors",           "canvas"};
  for (const auto& item : obj.items()) {
    if (std::find_if(std::begin(kKeys), std::end(kKeys),
                     [&](const char* k) { return item.key() == k; }) == std::end(kKeys)) {
      throw ParseError("unexpected key \"" + item.key() + "\"", line, 1);
    }
  }

  LayoutRecord rec;
  if (obj.contains("prompt")) {
    if (!obj["prompt"].is_string()) throw ParseError("\"prompt\" must be a string", line, 1);
    rec.prompt = obj["prompt"].get<std::string>();
  }
  LayoutSpec& spec = rec.layout;
  spec.rewritten_prompt =
      require(obj, "rewritten_prompt", json::value_t::string, line).get<std::string>();
  const json& canvas = require(obj, "canvas", json::value_t::array, line);
  if (canvas.size() != 2 || !canvas[0].is_number_integer() || !canvas[1].is_number_integer() ||
      canvas[0].get<int>() <= 0 || canvas[1].get<int>() <= 0) {
    throw ParseError("canvas must be [width, height] with positive integers", line, 1);
  }
  spec.canvas = {canvas[0].get<int>(), canvas[1].get<int>()};

  const json& texts = require(obj, "texts", json::value_t::array, line);
  const json& boxes = require(obj, "bboxes", json::value_t::array, line);
  const json& fonts = require(obj, "fonts", json::value_t::array, line);
  const json& colors = require(obj, "colors", json::value_t::array, line);
  const std::size_t n = texts.size();
  if (boxes.size() != n || fonts.size() != n || colors.size() != n) {
    throw ParseError("texts, bboxes, fonts and colors must have equal lengths", line, 1);
  }
  for (std::size_t i = 0; i < n; ++i) {
    LayoutEntry e;
    e.text = string_at(texts, i, "texts", line);
    e.box = parse_box(boxes[i], line);
    e.font = string_at(fonts, i, "fonts", line);
    e.color = string_at(colors, i, "colors", line);
    if (!vocab.has_font(e.font)) throw VocabularyError(e.font);
    if (!vocab.has_color(e.color)) throw VocabularyError(e.color);
    if (e.text.empty()) throw ConstraintError("entry " + std::to_string(i) + " has empty text");
    if (spec.rewritten_prompt.find(e.text) != std::string::npos) {
      throw ConstraintError("rewritten prompt still contains the text \"" + e.text + "\"");
    }
    spec.entries.push_back(std::move(e));
  }
  return rec;
}

LayoutSpec parse_layout(std::string_view raw, const TokenVocab& vocab, int line) {
  return parse_record(raw, vocab, line).layout;
}

std::string serialize_record(const LayoutRecord& record) {
  const LayoutSpec& spec = record.layout;
  json obj = json::object();
  if (!record.prompt.empty()) obj["prompt"] = record.prompt;
  obj["rewritten_prompt"] = spec.rewritten_prompt;
  obj["canvas"] = {spec.canvas.width, spec.canvas.height};
  obj["texts"] = json::array();
  obj["bboxes"] = json::array();
  obj["fonts"] = json::array();
  obj["colors"] = json::array();
  for (const LayoutEntry& e : spec.entries) {
    obj["texts"].push_back(e.text);
    obj["bboxes"].push_back({e.box.x0, e.box.y0, e.box.x1, e.box.y1});
    obj["fonts"].push_back(e.font);
    obj["colors"].push_back(e.color);
  }
  return obj.dump();
}

std::string serialize_layout(const LayoutSpec& spec) { return serialize_record({{}, spec}); }

std::vector<LayoutRecord> parse_corpus(std::string_view text, const TokenVocab& vocab) {
  std::vector<LayoutRecord> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (text::trim(raw).empty()) continue;
    out.push_back(parse_record(raw, vocab, line));
  }
  return out;
}

std::vector<LayoutRecord> load_corpus(const std::filesystem::path& path,
                                      const TokenVocab& vocab) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str(), vocab);
}

void save_corpus(const std::vector<LayoutRecord>& records,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write corpus " + path.string());
  for (const LayoutRecord& r : records) out << serialize_record(r) << '\n';
  if (!out) throw IoError("failed writing corpus " + path.string());
}

ValidationReport validate_layout(const LayoutSpec& spec) {
  ValidationReport report;
  const auto& es = spec.entries;
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (!es[i].box.within(spec.canvas)) report.out_of_bounds.push_back(i);
    for (std::size_t j = i + 1; j < es.size(); ++j) {
      const long long a = imaging::intersection_area(es[i].box, es[j].box);
      if (a > 0) report.overlaps.push_back({i, j, a});
    }
  }
  if (es.size() >= 2) {
    const auto n = static_cast<double>(es.size());
    double ma = 0.0;
    double mc = 0.0;
    for (const LayoutEntry& e : es) {
      ma += static_cast<double>(e.box.area());
      mc += static_cast<double>(text::code_point_count(e.text));
    }
    ma /= n;
    mc /= n;
    double sab = 0.0;
    double saa = 0.0;
    double scc = 0.0;
    for (const LayoutEntry& e : es) {
      const double da = static_cast<double>(e.box.area()) - ma;
      const double dc = static_cast<double>(text::code_point_count(e.text)) - mc;
      sab += da * dc;
      saa += da * da;
      scc += dc * dc;
    }
    if (saa > 0.0 && scc > 0.0) {
      report.proportionality = sab / std::sqrt(saa * scc);
      report.proportionality_flagged = es.size() >= 3 && *report.proportionality < 0.5;
    }
  }
  return report;
}

namespace {

const std::vector<std::string>& corpus_alphabet() {
  static const std::vector<std::string> chars = [] {
    std::vector<std::string> c;
    for (char ch = 'A'; ch <= 'Z'; ++ch) c.emplace_back(1, ch);
    for (char ch = '0'; ch <= '9'; ++ch) c.emplace_back(1, ch);
    for (const char* h : {"永", "東", "國", "風", "書", "龍", "電", "學", "語", "體"}) {
      c.emplace_back(h);
    }
    return c;
  }();
  return chars;
}

constexpr const char* kScenes[] = {"a summer music festival poster",
                                   "a minimalist coffee shop sign",
                                   "a vintage travel postcard",
                                   "a neon night market banner",
                                   "a bakery storefront at dawn",
                                   "a science fair announcement board"};
constexpr const char* kStyles[] = {"with soft pastel tones", "in bold flat colors",
                                   "with a grainy film texture", "on a dark gradient",
                                   "with hand drawn ornaments"};
constexpr int kMaxRestarts = 10;

}  // namespace

std::vector<LayoutRecord> gen_corpus(const TokenVocab& vocab, int n, std::uint64_t seed,
                                     const CorpusConfig& cfg) {
  if (n < 1) throw ParameterError("corpus size must be at least 1");
  if (vocab.fonts().empty() || vocab.colors().empty()) {
    throw ParameterError("vocabulary needs at least one font and one color");
  }
  if (cfg.min_entries < 1 || cfg.max_entries < cfg.min_entries || cfg.max_text_length < 1) {
    throw ParameterError("invalid corpus entry limits");
  }
  const SeedTree seeds(seed);
  const auto& alphabet = corpus_alphabet();
  std::vector<LayoutRecord> out;
  out.reserve(static_cast<std::size_t>(n));

  for (int r = 0; r < n; ++r) {
    auto rng = seeds.stream("layout/record", static_cast<std::uint64_t>(r));
    auto pick = [&](std::size_t size) {
      return std::uniform_int_distribution<std::size_t>(0, size - 1)(rng);
    };
    const int count = std::uniform_int_distribution<int>(cfg.min_entries, cfg.max_entries)(rng);
    // Largest line height that lets the longest text fit across the canvas.
    const int max_line =
        std::min(cfg.canvas.height / (2 * count),
                 static_cast<int>(cfg.canvas.width /
                                  (0.8 * cfg.max_text_length * (1.0 + cfg.jitter))));
    if (max_line < 8) throw PlacementError("canvas too small for the requested entries");

    LayoutRecord rec;
    rec.layout.canvas = cfg.canvas;
    rec.layout.rewritten_prompt =
        std::string(kScenes[pick(std::size(kScenes))]) + " " + kStyles[pick(std::size(kStyles))];
    std::string quoted;
    bool placed = false;
    for (int restart = 0; restart < kMaxRestarts && !placed; ++restart) {
      rec.layout.entries.clear();
      quoted.clear();
      const int line_h = std::uniform_int_distribution<int>(8, max_line)(rng);
      int attempts = 0;
      while (static_cast<int>(rec.layout.entries.size()) < count &&
             ++attempts <= cfg.max_attempts) {
        const int len = std::uniform_int_distribution<int>(1, cfg.max_text_length)(rng);
        std::string text;
        for (int k = 0; k < len; ++k) text += alphabet[pick(alphabet.size())];
        const double j = std::uniform_real_distribution<double>(-cfg.jitter, cfg.jitter)(rng);
        const int h = std::max(4, static_cast<int>(std::lround(line_h * (1.0 + j))));
        const int w = std::max(1, static_cast<int>(std::lround(0.8 * h * len)));
        if (w > cfg.canvas.width || h > cfg.canvas.height) continue;
        const int x = std::uniform_int_distribution<int>(0, cfg.canvas.width - w)(rng);
        const int y = std::uniform_int_distribution<int>(0, cfg.canvas.height - h)(rng);
        const BoundingBox box{x, y, x + w, y + h};
        const bool clash = std::any_of(
            rec.layout.entries.begin(), rec.layout.entries.end(), [&](const LayoutEntry& e) {
              return imaging::intersection_area(e.box, box) > 0;
            });
        if (clash || rec.layout.rewritten_prompt.find(text) != std::string::npos) continue;
        rec.layout.entries.push_back({text, box, vocab.fonts()[pick(vocab.fonts().size())],
                                      vocab.colors()[pick(vocab.colors().size())]});
        quoted += (quoted.empty() ? "\"" : ", \"") + text + "\"";
      }
      placed = static_cast<int>(rec.layout.entries.size()) == count;
    }
    if (!placed) {
      throw PlacementError("could not place " + std::to_string(count) +
                           " non-overlapping entries on a " +
                           std::to_string(cfg.canvas.width) + "x" +
                           std::to_string(cfg.canvas.height) + " canvas");
    }
    rec.prompt = rec.layout.rewritten_prompt + " with the text " + quoted;
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace glyphflow::layout
