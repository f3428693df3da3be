#include "psm/io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>
#include <openssl/evp.h>

namespace psm {

namespace {

void put_u16(std::string& b, std::uint16_t v)
{
    b.push_back(static_cast<char>(v & 0xff));
    b.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& b, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& b, double x)
{
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const std::string& b, std::size_t off)
{
    return static_cast<std::uint16_t>(static_cast<unsigned char>(b[off]) |
                                      (static_cast<unsigned char>(b[off + 1]) << 8));
}

std::uint32_t get_u32(const std::string& b, std::size_t off)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + i])) << (8 * i);
    return v;
}

double get_f64(const std::string& b, std::size_t off)
{
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[off + i])) << (8 * i);
    double x;
    std::memcpy(&x, &bits, 8);
    return x;
}

std::string header_bytes(std::uint32_t n, std::uint32_t m, double L, std::uint8_t tag)
{
    std::string b;
    b.reserve(32);
    b += "PSM2";
    put_u16(b, kFieldFileVersion);
    put_u32(b, n);
    put_u32(b, m);
    put_f64(b, L);
    b.push_back(static_cast<char>(tag));
    b.resize(32, '\0');
    return b;
}

void write_sidecar(const std::filesystem::path& path, const nlohmann::ordered_json& grid,
                   const std::string& symmetry, const std::string& provenance)
{
    nlohmann::ordered_json j;
    j["format"] = "PSM2";
    j["version"] = kFieldFileVersion;
    j["grid"] = grid;
    j["symmetry"] = symmetry;
    j["provenance"] = provenance;
    std::filesystem::path side = path;
    side += ".json";
    write_file(side, j.dump(2) + "\n");
}

} // namespace

std::uint8_t encode_symmetry_tag(const SymmetryClass& c)
{
    switch (c.kind) {
        case SymmetryKind::none: return 0;
        case SymmetryKind::radial: return 1;
        case SymmetryKind::odd_even: return 2;
        case SymmetryKind::dihedral: return static_cast<std::uint8_t>(128 + c.k);
    }
    return 0;
}

SymmetryClass decode_symmetry_tag(std::uint8_t tag)
{
    if (tag == 0) return SymmetryClass::none();
    if (tag == 1) return SymmetryClass::radial();
    if (tag == 2) return SymmetryClass::odd_even();
    if (tag > 128) return SymmetryClass::dihedral(tag - 128);
    throw std::runtime_error("field file: unknown symmetry tag " + std::to_string(tag));
}

void save_field(const std::filesystem::path& path, const Field2D& u,
                const std::string& provenance)
{
    std::string b = header_bytes(static_cast<std::uint32_t>(u.grid.n), 0, u.grid.L,
                                 encode_symmetry_tag(u.sym));
    b.reserve(32 + 8 * u.v.size());
    for (double x : u.v) put_f64(b, x);
    write_file(path, b);
    nlohmann::ordered_json grid;
    grid["kind"] = "plane";
    grid["n"] = u.grid.n;
    grid["L"] = u.grid.L;
    grid["h"] = u.grid.h();
    write_sidecar(path, grid, u.sym.name(), provenance);
}

void save_field(const std::filesystem::path& path, const RadialField& u,
                const std::string& provenance)
{
    std::string b = header_bytes(0, static_cast<std::uint32_t>(u.grid.m), u.grid.R,
                                 encode_symmetry_tag(SymmetryClass::radial()));
    b.reserve(32 + 8 * u.v.size());
    for (double x : u.v) put_f64(b, x);
    write_file(path, b);
    nlohmann::ordered_json grid;
    grid["kind"] = "radial";
    grid["m"] = u.grid.m;
    grid["R"] = u.grid.R;
    grid["h"] = u.grid.h();
    write_sidecar(path, grid, "radial", provenance);
}

LoadedField load_field(const std::filesystem::path& path)
{
    const std::string b = read_file(path);
    if (b.size() < 32 || b.compare(0, 4, "PSM2") != 0)
        throw std::runtime_error("field file: bad magic in " + path.string());
    if (get_u16(b, 4) != kFieldFileVersion)
        throw std::runtime_error("field file: unsupported version in " + path.string());
    const std::uint32_t n = get_u32(b, 6);
    const std::uint32_t m = get_u32(b, 10);
    const double L = get_f64(b, 14);
    const std::uint8_t tag = static_cast<std::uint8_t>(b[22]);

    LoadedField out;
    out.sym = decode_symmetry_tag(tag);
    if ((n == 0) == (m == 0))
        throw std::runtime_error("field file: exactly one of n, m must be nonzero");
    const std::size_t count = n ? std::size_t(n) * n : m;
    if (b.size() != 32 + 8 * count)
        throw std::runtime_error("field file: size mismatch in " + path.string());
    if (n) {
        out.is_radial = false;
        out.plane = Field2D(Grid2D(L, static_cast<int>(n)));
        out.plane.sym = out.sym;
        for (std::size_t i = 0; i < count; ++i) out.plane.v[i] = get_f64(b, 32 + 8 * i);
    } else {
        out.is_radial = true;
        out.radial = RadialField(RadialGrid(L, static_cast<int>(m)));
        for (std::size_t i = 0; i < count; ++i) out.radial.v[i] = get_f64(b, 32 + 8 * i);
    }
    return out;
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad()) throw std::runtime_error("read error on " + path.string());
    return s;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot create " + path.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write error on " + path.string());
}

} // namespace psm
