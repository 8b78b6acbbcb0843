#include "glyphflow/app/manifest.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "glyphflow/text.hpp"

namespace glyphflow::app {

using nlohmann::json;

std::string ManifestRecord::stem() const {
  return std::filesystem::path(image).stem().string();
}

std::filesystem::path DatasetManifest::resolve(const std::string& p) const {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

std::vector<std::string> DatasetManifest::missing_files() const {
  std::vector<std::string> missing;
  for (const ManifestRecord& r : records) {
    for (const std::string* p : {&r.image, &r.mask}) {
      if (!std::filesystem::exists(resolve(*p))) missing.push_back(resolve(*p).string());
    }
  }
  return missing;
}

std::string serialize_manifest_record(const ManifestRecord& record) {
  json obj;
  obj["image"] = record.image;
  obj["mask"] = record.mask;
  obj["regions"] = json::array();
  for (const GlyphRegion& r : record.regions) {
    obj["regions"].push_back({{"bbox", {r.box.x0, r.box.y0, r.box.x1, r.box.y1}},
                              {"text", r.text},
                              {"char_count", r.char_count}});
  }
  return obj.dump();
}

ManifestRecord parse_manifest_record(const std::string& line, int line_number) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed manifest record: ") + e.what(), line_number,
                     static_cast<int>(std::max<std::size_t>(e.byte, 1)));
  }
  try {
    ManifestRecord rec;
    rec.image = obj.at("image").get<std::string>();
    rec.mask = obj.at("mask").get<std::string>();
    for (const json& r : obj.at("regions")) {
      const json& b = r.at("bbox");
      if (!b.is_array() || b.size() != 4) {
        throw ParseError("bbox must have 4 integers", line_number, 1);
      }
      GlyphRegion region{{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()},
                         r.at("text").get<std::string>(),
                         r.at("char_count").get<int>()};
      region.validate();
      rec.regions.push_back(std::move(region));
    }
    return rec;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid manifest record: ") + e.what(), line_number, 1);
  }
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  DatasetManifest m;
  m.base_dir = path.parent_path();
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    m.records.push_back(parse_manifest_record(line, n));
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + path.string());
  for (const ManifestRecord& r : manifest.records) out << serialize_manifest_record(r) << '\n';
  if (!out) throw IoError("failed writing manifest " + path.string());
}

}  // namespace glyphflow::app
