#include "shoeprint/types.hpp"

namespace shoeprint {

std::string to_string(Side side) {
  switch (side) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::pair: return "pair";
  }
  throw ConfigError("bad Side value");
}

std::string to_string(Gender gender) {
  return gender == Gender::male ? "male" : "female";
}

std::string to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  throw ConfigError("bad Split value");
}

std::string to_string(Provenance provenance) {
  return provenance == Provenance::original ? "original" : "augmented";
}

Side side_from_string(const std::string& text) {
  if (text == "left") return Side::left;
  if (text == "right") return Side::right;
  if (text == "pair") return Side::pair;
  throw ConfigError("unknown side '" + text + "' (expected left, right, or pair)");
}

Gender gender_from_string(const std::string& text) {
  if (text == "male") return Gender::male;
  if (text == "female") return Gender::female;
  throw ConfigError("unknown gender '" + text + "' (expected male or female)");
}

Split split_from_string(const std::string& text) {
  if (text == "train") return Split::train;
  if (text == "val") return Split::val;
  if (text == "test") return Split::test;
  throw ConfigError("unknown split '" + text + "' (expected train, val, or test)");
}

Provenance provenance_from_string(const std::string& text) {
  if (text == "original") return Provenance::original;
  if (text == "augmented") return Provenance::augmented;
  throw ConfigError("unknown provenance '" + text + "' (expected original or augmented)");
}

}  // namespace shoeprint
