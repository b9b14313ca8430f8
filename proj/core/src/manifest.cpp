#include "shoeprint/manifest.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "shoeprint/error.hpp"

namespace shoeprint {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

long long parse_int(const std::string& text, const std::string& what, int line_no) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoError("manifest line " + std::to_string(line_no) + ": bad " + what + " '" + text + "'");
  }
  return value;
}

double parse_double(const std::string& text, const std::string& what, int line_no) {
  try {
    size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw IoError("manifest line " + std::to_string(line_no) + ": bad " + what + " '" + text + "'");
  }
}

}  // namespace

DatasetManifest read_manifest(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open manifest " + csv_path.string());

  DatasetManifest manifest;
  manifest.root = csv_path.parent_path();

  std::string line;
  if (!std::getline(in, line)) throw IoError("empty manifest " + csv_path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kManifestHeader) {
    throw IoError("manifest " + csv_path.string() + " has header '" + line + "', expected '" +
                  kManifestHeader + "'");
  }

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != 9) {
      throw IoError("manifest line " + std::to_string(line_no) + ": expected 9 fields, got " +
                    std::to_string(fields.size()));
    }
    ManifestRow row;
    row.subject_id = parse_int(fields[0], "subject_id", line_no);
    try {
      row.side = side_from_string(fields[1]);
      row.gender = gender_from_string(fields[3]);
      row.split = split_from_string(fields[7]);
      row.provenance = provenance_from_string(fields[8]);
    } catch (const ConfigError& e) {
      throw IoError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    row.age = static_cast<int>(parse_int(fields[2], "age", line_no));
    row.height_cm = parse_double(fields[4], "height_cm", line_no);
    row.weight_kg = parse_double(fields[5], "weight_kg", line_no);
    row.path = fields[6];
    if (row.path.empty()) {
      throw IoError("manifest line " + std::to_string(line_no) + ": empty path");
    }
    manifest.rows.push_back(std::move(row));
  }
  return manifest;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw IoError("cannot open " + csv_path.string() + " for writing");
  out << kManifestHeader << '\n';
  out.setf(std::ios::fixed);
  for (const auto& row : manifest.rows) {
    out.precision(1);
    out << row.subject_id << ',' << to_string(row.side) << ',' << row.age << ','
        << to_string(row.gender) << ',' << row.height_cm << ',' << row.weight_kg << ','
        << row.path << ',' << to_string(row.split) << ',' << to_string(row.provenance) << '\n';
  }
  if (!out) throw IoError("failed writing " + csv_path.string());
}

}  // namespace shoeprint
