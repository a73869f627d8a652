#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "prism/structure.hpp"

namespace prism {

enum class SyntheticKind { ShortRange, LongRange, Mixed };

std::string_view to_string(SyntheticKind kind);
std::optional<SyntheticKind> parse_synthetic_kind(std::string_view name);

/// Closed-form target definitions. Any independent implementation of these
/// formulas reproduces the stored targets.
namespace synthetic {

// Short range: per-atom Lennard-Jones-like energy over every periodic pair
// within kPairCutoff, E = (1 / 2N) sum_i sum_{(j,n) != (i,0), d < cutoff} k(d),
// k(d) = 4 eps ((sigma/d)^12 - (sigma/d)^6).
inline constexpr double kPairCutoff = 4.0;
inline constexpr double kLjSigma = 1.5;
inline constexpr double kLjEpsilon = 1.0;
inline constexpr double kMinSeparation = 1.6;

// Long range: two atomic layers per cell stacked along l3 (perpendicular to
// the layers), uniform spacing s = c / 2. Target = kLongRangeScale / s.
inline constexpr double kLongRangeScale = 10.0;
inline constexpr double kLayerSpacingMin = 4.5;
inline constexpr double kLayerSpacingMax = 7.5;

// Mixed: layered construction with spacing in [kMixedSpacingMin, kLayerSpacingMax],
// target = kMixedShortWeight * short + kMixedLongWeight * long.
inline constexpr double kMixedSpacingMin = 3.0;
inline constexpr double kMixedShortWeight = 0.5;
inline constexpr double kMixedLongWeight = 0.5;

double lj_kernel(double d);
double short_range_energy(const CrystalStructure& s);
/// Uniform interlayer spacing of a two-layer cell: (V / |l1 x l2|) / 2.
double layer_spacing(const CrystalStructure& s);
double long_range_term(const CrystalStructure& s);

}  // namespace synthetic

/// n structures of 1-8 atoms with closed-form targets; identical for a seed.
std::vector<CrystalStructure> generate_synthetic(SyntheticKind kind, std::size_t n, std::uint64_t seed);

}  // namespace prism
