#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "glyphflow/condition/agc.hpp"

namespace glyphflow::app {

using condition::GlyphRegion;

// One image with its segmentation mask and annotated regions. Paths are
// stored as written; relative paths resolve against the manifest directory.
struct ManifestRecord {
  std::string image;
  std::string mask;
  std::vector<GlyphRegion> regions;

  // Image file name without extension.
  std::string stem() const;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

struct DatasetManifest {
  std::vector<ManifestRecord> records;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& p) const;

  // Paths of referenced files that do not exist.
  std::vector<std::string> missing_files() const;
};

// Line-delimited: one JSON object per record.
//   {"image":"images/x.png","mask":"masks/x.png",
//    "regions":[{"bbox":[x0,y0,x1,y1],"text":"AB","char_count":2}]}
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

std::string serialize_manifest_record(const ManifestRecord& record);
ManifestRecord parse_manifest_record(const std::string& line, int line_number = 1);

}  // namespace glyphflow::app
