#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "cmplq/quantizer.hpp"

namespace cmplq {

/// Malformed or inconsistent design file. what() names the offending field.
class DesignFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Schema:
///   {dim, k, source, seed, stream_id, iterations, restarts,
///    V: [k*dim numbers, row-major, unit-norm rows], t: [k numbers],
///    codebook: [{label: [+-1 x k], centroid: [dim numbers], weight}],
///    mse_estimate, mse_std_error, mse_points}
/// Doubles are written in shortest round-trip form, so save/load is lossless.
nlohmann::json design_to_json(const QuantizerDesign& design);
QuantizerDesign design_from_json(const nlohmann::json& j);

void save_design(const QuantizerDesign& design, const std::filesystem::path& path);
QuantizerDesign load_design(const std::filesystem::path& path);

/// Tolerance on |row norm - 1| accepted when loading V.
inline constexpr double kUnitNormTolerance = 1e-9;

}  // namespace cmplq
