#pragma once

#include <filesystem>
#include <string>

#include "psm/grid.hpp"

namespace psm {

// Binary field file: 32-byte header, then the samples as little-endian f64.
//   bytes  0..3   magic "PSM2"
//   bytes  4..5   version (u16, currently 1)
//   bytes  6..9   n (u32): side of the plane grid, 0 for a radial profile
//   bytes 10..13  m (u32): radial sample count, 0 for a plane field
//   bytes 14..21  L (f64): half-width of the box, or R for a radial profile
//   byte  22      symmetry tag: 0 none, 1 radial, 2 odd_even, 128+k dihedral(k)
//   bytes 23..31  zero padding
// Plane fields store n*n values row-major; radial profiles store m values.
// A sidecar "<path>.json" records grid, symmetry, and provenance; the binary
// header stays authoritative on load.

inline constexpr std::uint16_t kFieldFileVersion = 1;

void save_field(const std::filesystem::path& path, const Field2D& u,
                const std::string& provenance = "psm");
void save_field(const std::filesystem::path& path, const RadialField& u,
                const std::string& provenance = "psm");

struct LoadedField {
    bool is_radial = false;
    Field2D plane;       // populated when !is_radial
    RadialField radial;  // populated when is_radial
    SymmetryClass sym = SymmetryClass::none();
};

// Throws std::runtime_error on bad magic, version, size, or tag.
LoadedField load_field(const std::filesystem::path& path);

std::uint8_t encode_symmetry_tag(const SymmetryClass& c);
SymmetryClass decode_symmetry_tag(std::uint8_t tag); // throws on unknown tag

// Lowercase hex SHA-256 of a byte string (content hashes for manifests).
std::string sha256_hex(const std::string& bytes);

// Read a whole file into a string; throws std::runtime_error if unreadable.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

} // namespace psm
