#include "psm/fieldlib.hpp"

#include <cmath>

namespace psm {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t index)
{
    // splitmix64 step decorrelates library members drawn from one seed
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

Field2D random_smooth_field(const Grid2D& g, std::uint64_t seed, std::uint64_t index)
{
    std::mt19937_64 rng(mix(seed, index));
    const int nb = 3 + static_cast<int>(rng() % 4);
    struct Bump {
        double a, cx, cy, s;
    };
    std::vector<Bump> bumps(nb);
    for (auto& b : bumps) {
        b.a = next_uniform(rng, -1.0, 1.0);
        b.cx = next_uniform(rng, -g.L / 3.0, g.L / 3.0);
        b.cy = next_uniform(rng, -g.L / 3.0, g.L / 3.0);
        b.s = next_uniform(rng, 0.3, 1.2);
    }
    return Field2D::sample(g, [&](double x, double y) {
        double v = 0.0;
        for (const auto& b : bumps) {
            const double dx = x - b.cx, dy = y - b.cy;
            v += b.a * std::exp(-(dx * dx + dy * dy) / (2.0 * b.s * b.s));
        }
        return v;
    });
}

RadialField random_radial_field(const RadialGrid& g, std::uint64_t seed,
                                std::uint64_t index)
{
    std::mt19937_64 rng(mix(seed, index ^ 0xABCDULL));
    const int nb = 3 + static_cast<int>(rng() % 4);
    struct Bump {
        double a, c, s;
    };
    std::vector<Bump> bumps(nb);
    for (auto& b : bumps) {
        b.a = next_uniform(rng, -1.0, 1.0);
        b.c = next_uniform(rng, 0.0, g.R / 3.0);
        b.s = next_uniform(rng, 0.3, 1.0);
    }
    return RadialField::sample(g, [&](double r) {
        double v = 0.0;
        for (const auto& b : bumps) {
            const double d = r - b.c;
            v += b.a * std::exp(-d * d / (2.0 * b.s * b.s));
        }
        return v;
    });
}

std::vector<Field2D> field_library(const Grid2D& g, int count, std::uint64_t seed)
{
    std::vector<Field2D> lib;
    lib.reserve(count);
    for (int i = 0; i < count; ++i)
        lib.push_back(random_smooth_field(g, seed, static_cast<std::uint64_t>(i)));
    return lib;
}

std::vector<RadialField> radial_field_library(const RadialGrid& g, int count,
                                              std::uint64_t seed)
{
    std::vector<RadialField> lib;
    lib.reserve(count);
    for (int i = 0; i < count; ++i)
        lib.push_back(random_radial_field(g, seed, static_cast<std::uint64_t>(i)));
    return lib;
}

} // namespace psm
