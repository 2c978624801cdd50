#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "mlnn/network.hpp"
#include "mlnn/threshold.hpp"

namespace mlnn {

/// Binary model container, all integers and reals little-endian:
///
///   "MLNNMODL"  u32 version=1
///   u64 D, u64 F, u64 L
///   u8 hidden_act, u8 output_act, u8 loss kind, u8 label weighting
///   f64 W1[D*F] (feature-major), b1[F], W2[L*F] (row-major), b2[L]
///   u8 has_threshold; if 1: f64 theta[D], f64 intercept, f64 lambda
struct ModelFile {
  Model model;
  std::optional<ThresholdModel> threshold;
};

inline constexpr std::uint32_t kModelFileVersion = 1;

void save_model(std::ostream& out, const ModelFile& file);
void save_model(const std::filesystem::path& path, const ModelFile& file);
/// Throws ParseError on bad magic, unknown version, truncation or
/// inconsistent enums.
ModelFile load_model(std::istream& in);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace mlnn
