#pragma once

#include "samkit/tcn.hpp"

#include <string>

namespace samkit {

/// JSON checkpoint: header (format, version, config, normalizer, padding
/// convention) and a "parameters" array in TcnModel::parameters() order, each
/// entry {name, rows, cols, data} with data column-major.
void save_checkpoint(const TcnModel<float>& model, const std::string& path);

/// Throws ConfigError on malformed files or shape mismatches.
TcnModel<float> load_checkpoint(const std::string& path);

std::string checkpoint_to_string(const TcnModel<float>& model);
TcnModel<float> checkpoint_from_string(const std::string& text);

}  // namespace samkit
