#pragma once

#include <string>

#include "mdmt/trainer.hpp"

namespace mdmt {

// Versioned little-endian binary snapshot of the whole trainer state
// (trunk, heads, memory, recorded matrices). Layout is documented in
// README.md; load validates the magic and version and fails on any
// truncation.
void save_checkpoint(const TrainerState& state, const std::string& path);
TrainerState load_checkpoint(const std::string& path);

}  // namespace mdmt
