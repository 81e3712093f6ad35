#pragma once

// JSON and text formats.
//
// POVM:      {"dim": d, "label": "...", "family": "...",
//             "outcomes": [ [[ [re,im], ... ], ...], ... ]}   (row-major)
// Fiducial:  [[re,im], ...]
// State:     [[ [re,im], ... ], ...]
// Counts:    a JSON array of nonnegative integers, or the same numbers
//            separated by whitespace or commas.
// Experiment config: see README.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qtomo/povm.hpp"
#include "qtomo/simulate.hpp"

namespace qtomo {

std::string povm_to_json(const Povm& povm);
Povm povm_from_json(std::string_view text);
Povm read_povm(const std::filesystem::path& path);
void write_povm(const Povm& povm, const std::filesystem::path& path);

/// "builtin:<name>" or a path to a POVM JSON file.
Povm resolve_povm(std::string_view spec);

CVector fiducial_from_json(std::string_view text);
CVector read_fiducial(const std::filesystem::path& path);

CMatrix matrix_from_json(std::string_view text);
std::string matrix_to_json(const CMatrix& m);
CMatrix read_state(const std::filesystem::path& path);

std::vector<std::uint64_t> counts_from_text(std::string_view text);
std::vector<std::uint64_t> read_counts(const std::filesystem::path& path);

/// Relative POVM and state file paths are resolved against `base_dir`.
ExperimentConfig experiment_config_from_json(std::string_view text,
                                             const std::filesystem::path& base_dir = {});
ExperimentConfig read_experiment_config(const std::filesystem::path& path);

/// Reads a whole file; ValidationError if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace qtomo
