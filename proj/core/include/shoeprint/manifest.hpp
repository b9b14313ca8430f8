#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "shoeprint/types.hpp"

namespace shoeprint {

struct ManifestRow {
  long long subject_id = 0;
  Side side = Side::left;
  int age = 0;
  Gender gender = Gender::male;
  double height_cm = 0.0;
  double weight_kg = 0.0;
  std::string path;  // relative to the manifest's directory
  Split split = Split::train;
  Provenance provenance = Provenance::original;
};

// Dataset index. Image paths resolve against root (the directory holding the
// manifest CSV).
struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestRow> rows;

  std::filesystem::path image_path(const ManifestRow& row) const { return root / row.path; }
};

inline constexpr const char* kManifestHeader =
    "subject_id,side,age,gender,height_cm,weight_kg,path,split,provenance";

DatasetManifest read_manifest(const std::filesystem::path& csv_path);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& csv_path);

}  // namespace shoeprint
