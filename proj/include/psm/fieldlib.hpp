#pragma once

#include <cstdint>
#include <random>

#include "psm/grid.hpp"

namespace psm {

// Versioned seed for the shared library of random smooth fields; empirical
// constants (GN, D) are always quoted against this seed.
inline constexpr std::uint64_t kFieldLibrarySeed = 0x5EEDF1E1DULL;

// Uniform in [0,1) from raw mt19937_64 output; avoids the distribution
// classes, whose streams are not pinned by the standard.
inline double next_double(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double next_uniform(std::mt19937_64& rng, double a, double b)
{
    return a + (b - a) * next_double(rng);
}

// Sum of 3..6 random Gaussian bumps, centers well inside the box: smooth,
// decaying, generically asymmetric and sign-changing.
Field2D random_smooth_field(const Grid2D& g, std::uint64_t seed, std::uint64_t index);

// Radial analog; centers in [0, R/3], so the tail is negligible at R.
RadialField random_radial_field(const RadialGrid& g, std::uint64_t seed,
                                std::uint64_t index);

std::vector<Field2D> field_library(const Grid2D& g, int count,
                                   std::uint64_t seed = kFieldLibrarySeed);
std::vector<RadialField> radial_field_library(const RadialGrid& g, int count,
                                              std::uint64_t seed = kFieldLibrarySeed);

} // namespace psm
