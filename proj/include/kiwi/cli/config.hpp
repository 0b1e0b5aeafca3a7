#pragma once

#include <optional>
#include <string>

#include "kiwi/trainer/trainer.hpp"

namespace kiwi::cli {

// Parses a YAML training configuration. Unknown keys are fatal and named
// by their full path; all file paths resolve relative to the config file.
// Overrides replace the file's seed / output-dir before the snapshot text
// is produced, so the snapshot reflects the effective configuration.
trainer::TrainConfig load_train_config(
    const std::string& path, std::optional<uint64_t> seed_override = {},
    std::optional<std::string> output_dir_override = {});

// Parses config text with paths resolved against base_dir.
trainer::TrainConfig parse_train_config(const std::string& text,
                                        const std::string& base_dir);

// Canonical serialization; parse(serialize(parse(x))) is a fixed point.
std::string serialize_config(const trainer::TrainConfig& config);

}  // namespace kiwi::cli
