#pragma once

#include <string>

#include "netscan/model.hpp"

namespace netscan {

/// Versioned JSON checkpoint: architecture + config, vocabulary version,
/// init seed, and row-major weight arrays. Loading rejects a vocabulary
/// version mismatch. Serialization is byte-deterministic for equal models.
std::string checkpoint_to_json(const Model& model);
Model checkpoint_from_json(const std::string& text);

void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path);

}  // namespace netscan
