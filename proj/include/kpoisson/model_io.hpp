#pragma once

#include "kpoisson/estimator.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>

namespace kpoisson {

inline constexpr int kModelFormatVersion = 1;

/// Writes an IntensityModel, NaiveModel or KIEModel as versioned plain text.
/// Nystrom models store their landmark coordinates and rank; the eigensystem
/// is recomputed on load.
void write_model(const IntensityPredictor& model, std::ostream& out);
void save_model(const IntensityPredictor& model, const std::filesystem::path& path);

std::shared_ptr<const IntensityPredictor> read_model(std::istream& in);
std::shared_ptr<const IntensityPredictor> load_model(const std::filesystem::path& path);

}  // namespace kpoisson
