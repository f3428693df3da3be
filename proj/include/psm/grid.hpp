#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace psm {

// Cell-centered uniform grid on the square [-L,L]^2. Cell (ix,iy) has center
// (-L+(ix+1/2)h, -L+(iy+1/2)h), h = 2L/n. No node sits at the origin or on the
// axes, which keeps reflection maps lattice-exact and the log kernel finite
// at every center pair.
struct Grid2D {
    double L = 0.0;
    int n = 0;

    Grid2D() = default;
    Grid2D(double half_width, int npts) : L(half_width), n(npts)
    {
        if (!(L > 0.0)) throw std::invalid_argument("Grid2D: half_width must be > 0");
        if (n < 8 || n % 2 != 0) throw std::invalid_argument("Grid2D: n must be even and >= 8");
    }

    double h() const { return 2.0 * L / n; }
    double x(int ix) const { return -L + (ix + 0.5) * h(); }
    double y(int iy) const { return -L + (iy + 0.5) * h(); }
    std::size_t size() const { return static_cast<std::size_t>(n) * n; }
    std::size_t idx(int ix, int iy) const { return static_cast<std::size_t>(iy) * n + ix; }

    bool operator==(const Grid2D& o) const { return L == o.L && n == o.n; }
    bool operator!=(const Grid2D& o) const { return !(*this == o); }
};

// Cell-centered radial grid on [0,R]: r_i = (i+1/2)R/m.
struct RadialGrid {
    double R = 0.0;
    int m = 0;

    RadialGrid() = default;
    RadialGrid(double radius, int mpts) : R(radius), m(mpts)
    {
        if (!(R > 0.0)) throw std::invalid_argument("RadialGrid: R must be > 0");
        if (m < 16) throw std::invalid_argument("RadialGrid: m must be >= 16");
    }

    double h() const { return R / m; }
    double r(int i) const { return (i + 0.5) * h(); }
    bool operator==(const RadialGrid& o) const { return R == o.R && m == o.m; }
    bool operator!=(const RadialGrid& o) const { return !(*this == o); }
};

// Symmetry classes. odd_even: odd in x1, even in x2. dihedral(k): invariant
// under u -> -u(A x) with A the rotation by pi/k (k=1 is plain antisymmetry
// under x -> -x, k=2 uses quarter turns; both are lattice-exact).
enum class SymmetryKind : std::uint8_t { none = 0, radial = 1, odd_even = 2, dihedral = 3 };

struct SymmetryClass {
    SymmetryKind kind = SymmetryKind::none;
    int k = 0; // dihedral order, used only when kind == dihedral

    static SymmetryClass none() { return {SymmetryKind::none, 0}; }
    static SymmetryClass radial() { return {SymmetryKind::radial, 0}; }
    static SymmetryClass odd_even() { return {SymmetryKind::odd_even, 0}; }
    static SymmetryClass dihedral(int k)
    {
        if (k < 1 || k > 127) throw std::invalid_argument("dihedral order out of range");
        return {SymmetryKind::dihedral, k};
    }
    bool operator==(const SymmetryClass& o) const { return kind == o.kind && k == o.k; }

    std::string name() const
    {
        switch (kind) {
            case SymmetryKind::none: return "none";
            case SymmetryKind::radial: return "radial";
            case SymmetryKind::odd_even: return "odd_even";
            case SymmetryKind::dihedral: return "dihedral:" + std::to_string(k);
        }
        return "none";
    }
};

struct Field2D {
    Grid2D grid;
    std::vector<double> v;
    SymmetryClass sym = SymmetryClass::none();

    Field2D() = default;
    explicit Field2D(const Grid2D& g) : grid(g), v(g.size(), 0.0) {}

    double& at(int ix, int iy) { return v[grid.idx(ix, iy)]; }
    double at(int ix, int iy) const { return v[grid.idx(ix, iy)]; }

    template <class F>
    static Field2D sample(const Grid2D& g, F&& f)
    {
        Field2D u(g);
        for (int iy = 0; iy < g.n; ++iy)
            for (int ix = 0; ix < g.n; ++ix)
                u.v[g.idx(ix, iy)] = f(g.x(ix), g.y(iy));
        return u;
    }
};

struct RadialField {
    RadialGrid grid;
    std::vector<double> v;

    RadialField() = default;
    explicit RadialField(const RadialGrid& g) : grid(g), v(static_cast<std::size_t>(g.m), 0.0) {}

    template <class F>
    static RadialField sample(const RadialGrid& g, F&& f)
    {
        RadialField u(g);
        for (int i = 0; i < g.m; ++i) u.v[i] = f(g.r(i));
        return u;
    }
};

enum class LocalSign { plus, minus, general_W };

// Problem data: -Delta u + (1+|x|^alpha) u - q phi u + W'(u) = 0, phi the
// log-kernel potential of u^2. local_sign plus/minus selects W'(u) =
// +/-|u|^{p-2}u; general_W uses explicit coefficients (W <= c1 s^2 + c2|s|^p).
struct ProblemParams {
    double alpha = 2.0;
    double p = 4.0;
    double q = 1.0;
    LocalSign local_sign = LocalSign::plus;
    double w_c1 = 0.0; // general_W only
    double w_c2 = 0.0;

    void validate() const
    {
        if (!(alpha > 0.0)) throw std::invalid_argument("ProblemParams: alpha must be > 0");
        if (!(p > 2.0)) throw std::invalid_argument("ProblemParams: p must be > 2");
        if (!(q >= 0.0)) throw std::invalid_argument("ProblemParams: q must be >= 0");
        if (local_sign == LocalSign::general_W && (w_c1 < 0.0 || w_c2 < 0.0))
            throw std::invalid_argument("ProblemParams: W coefficients must be >= 0");
    }
};

} // namespace psm
