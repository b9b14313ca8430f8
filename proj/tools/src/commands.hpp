#pragma once

#include "CLI11.hpp"

namespace shoeprint::cli {

void register_synth(CLI::App& app);
void register_train(CLI::App& app);
void register_eval(CLI::App& app);
void register_baseline(CLI::App& app);
void register_analyze(CLI::App& app);
void register_gradcheck(CLI::App& app);

}  // namespace shoeprint::cli
