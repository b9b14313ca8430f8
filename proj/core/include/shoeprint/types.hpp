#pragma once

#include <string>

#include "shoeprint/error.hpp"

namespace shoeprint {

enum class Side { left, right, pair };
enum class Gender { male, female };
enum class Split { train, val, test };
enum class Provenance { original, augmented };

std::string to_string(Side side);
std::string to_string(Gender gender);
std::string to_string(Split split);
std::string to_string(Provenance provenance);

Side side_from_string(const std::string& text);
Gender gender_from_string(const std::string& text);
Split split_from_string(const std::string& text);
Provenance provenance_from_string(const std::string& text);

}  // namespace shoeprint
