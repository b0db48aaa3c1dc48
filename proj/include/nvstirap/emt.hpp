#pragma once

// Effective-mass electronic structure of a (100) diamond nanowire modelled as
// an infinite square well.

#include "nvstirap/core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace nvstirap::emt {

/// Quantum numbers (n_x, n_y, n_z); all >= 1 for an envelope function.
struct Triple {
    int x = 1;
    int y = 1;
    int z = 1;

    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

inline std::string to_string(const Triple& t)
{
    return "(" + std::to_string(t.x) + "," + std::to_string(t.y) + "," +
           std::to_string(t.z) + ")";
}

/// Parallel: valleys 1,2 with K along the wire axis.
/// Perpendicular: valleys 3-6 with K normal to the wire axis.
enum class ValleyGroup { Parallel, Perpendicular };

enum class Symmetry { A1g_1, A2u, A1g_2, B1g, Eu_1, Eu_2, SingleValley };

inline constexpr std::array<Symmetry, 6> all_symmetry_labels{
    Symmetry::A1g_1, Symmetry::A2u, Symmetry::A1g_2,
    Symmetry::B1g,   Symmetry::Eu_1, Symmetry::Eu_2};

inline std::string to_string(Symmetry s)
{
    switch (s) {
    case Symmetry::A1g_1:
        return "A1g_1";
    case Symmetry::A2u:
        return "A2u";
    case Symmetry::A1g_2:
        return "A1g_2";
    case Symmetry::B1g:
        return "B1g";
    case Symmetry::Eu_1:
        return "Eu_1";
    case Symmetry::Eu_2:
        return "Eu_2";
    case Symmetry::SingleValley:
        return "single";
    }
    return "?";
}

inline std::string to_string(ValleyGroup g)
{
    return g == ValleyGroup::Parallel ? "parallel" : "perpendicular";
}

struct ConductionState {
    Triple n;
    ValleyGroup valley_group = ValleyGroup::Perpendicular;
    Symmetry symmetry = Symmetry::SingleValley;
    int valley = 0; ///< single-valley index 1..6 when symmetry is SingleValley
    double energy = 0.0; ///< J, above the bulk conduction-band minimum
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// Infinite-well envelope normalised so that the integral of |F|^2 over the
/// wire equals the unit-cell volume V_c.
struct EnvelopeFunction {
    Triple n;
    WireGeometry geometry;
    double normalization = 0.0; ///< sqrt(8 V_c / (w^2 L))

    EnvelopeFunction(Triple n_, const WireGeometry& g, const PhysicalConstants& c)
      : n(n_), geometry(g),
        normalization(std::sqrt(8.0 * c.V_c / (g.w * g.w * g.L)))
    {
        if (n.x < 1 || n.y < 1 || n.z < 1)
            throw ConfigError("envelope quantum numbers must be >= 1");
    }
};

inline double envelope_value(const EnvelopeFunction& F, const Vec3& r)
{
    const auto& g = F.geometry;
    if (r.x < 0.0 || r.x > g.w || r.y < 0.0 || r.y > g.w || r.z < 0.0 || r.z > g.L)
        return 0.0;
    return F.normalization * std::sin(F.n.x * pi * r.x / g.w) *
           std::sin(F.n.y * pi * r.y / g.w) * std::sin(F.n.z * pi * r.z / g.L);
}

inline void require_supported_axis(const WireGeometry& g)
{
    if (g.axis != CrystalAxis::Dir100)
        throw ConfigError("only (100) wire axes are supported");
}

/// Confinement energy of state n in the given valley group. The
/// perpendicular group uses the x-heavy form (valleys 3,4); valleys 5,6 are
/// its x<->y relabelling, see valley_energy_single().
inline double valley_energy(const Triple& n, ValleyGroup group,
                            const WireGeometry& g, const PhysicalConstants& c)
{
    require_supported_axis(g);
    const double pref = c.hbar * c.hbar * pi * pi / 2.0;
    const double w2 = g.w * g.w;
    const double L2 = g.L * g.L;
    const double nx2 = double(n.x) * n.x;
    const double ny2 = double(n.y) * n.y;
    const double nz2 = double(n.z) * n.z;
    if (group == ValleyGroup::Perpendicular)
        return pref * (nx2 / (c.m_par * w2) + ny2 / (c.m_perp * w2) +
                       nz2 / (c.m_perp * L2));
    return pref * (nx2 / (c.m_perp * w2) + ny2 / (c.m_perp * w2) +
                   nz2 / (c.m_par * L2));
}

/// Energy for an individual valley index 1..6.
inline double valley_energy_single(const Triple& n, int valley,
                                   const WireGeometry& g, const PhysicalConstants& c)
{
    switch (valley) {
    case 1:
    case 2:
        return valley_energy(n, ValleyGroup::Parallel, g, c);
    case 3:
    case 4:
        return valley_energy(n, ValleyGroup::Perpendicular, g, c);
    case 5:
    case 6:
        return valley_energy(Triple{n.y, n.x, n.z}, ValleyGroup::Perpendicular, g, c);
    default:
        throw ConfigError("valley index must be in 1..6");
    }
}

/// Gap between the two lowest longitudinal levels of the four-fold manifold,
/// 3 hbar^2 pi^2 / (2 m_perp L^2). Evaluated as the level difference so that
/// the two agree bit for bit.
inline double delta_Ec(const WireGeometry& g, const PhysicalConstants& c)
{
    require_supported_axis(g);
    if (g.L < 3.0 * g.w)
        warn("delta_Ec assumes L >> w; here L < 3w");
    return valley_energy({1, 1, 2}, ValleyGroup::Perpendicular, g, c) -
           valley_energy({1, 1, 1}, ValleyGroup::Perpendicular, g, c);
}

/// Symmetry-adapted combinations of single-valley states. Rows are states,
/// columns are valleys in the order (1,2) or (3,4,5,6).
struct SymmetryBasis {
    std::vector<Symmetry> labels;
    Eigen::MatrixXd coefficients;
};

inline SymmetryBasis symmetry_basis(ValleyGroup group)
{
    SymmetryBasis basis;
    if (group == ValleyGroup::Parallel) {
        basis.labels = {Symmetry::A1g_1, Symmetry::A2u};
        basis.coefficients.resize(2, 2);
        basis.coefficients << 1.0, 1.0, -1.0, 1.0;
        basis.coefficients /= std::sqrt(2.0);
        return basis;
    }
    const double h = 0.5;
    const double r = 1.0 / std::sqrt(2.0);
    basis.labels = {Symmetry::A1g_2, Symmetry::B1g, Symmetry::Eu_1, Symmetry::Eu_2};
    basis.coefficients.resize(4, 4);
    // clang-format off
    basis.coefficients <<
         h,  h,  h,  h,
        -h, -h,  h,  h,
        0.0, 0.0, -r,  r,
        -r,  r, 0.0, 0.0;
    // clang-format on
    return basis;
}

/// Energy splitting between the two NV sites from a potential difference
/// Phi applied across the wire ends.
inline double stark_detuning(const WireGeometry& g, double Phi,
                             const PhysicalConstants& c = default_constants())
{
    return c.e_charge * Phi * g.s / g.L;
}

/// Whether the axial Stark operator (A2u, transforms as z) has a non-zero
/// matrix element between states of the given symmetries in D4h.
inline bool stark_couples(Symmetry a, Symmetry b)
{
    if (a == Symmetry::SingleValley || b == Symmetry::SingleValley)
        throw ConfigError("stark_couples needs symmetry-adapted labels");
    auto is_a1g = [](Symmetry s) {
        return s == Symmetry::A1g_1 || s == Symmetry::A1g_2;
    };
    return (a == Symmetry::A2u && is_a1g(b)) || (b == Symmetry::A2u && is_a1g(a));
}

/// Symmetry-adapted level table for all n with components <= n_max, sorted by
/// energy. Valley-orbit splitting is neglected, so each n contributes two
/// parallel and four perpendicular degenerate states.
inline std::vector<ConductionState> level_table(const WireGeometry& g,
                                                const PhysicalConstants& c,
                                                int n_max)
{
    std::vector<ConductionState> out;
    for (int nx = 1; nx <= n_max; ++nx)
        for (int ny = 1; ny <= n_max; ++ny)
            for (int nz = 1; nz <= n_max; ++nz) {
                const Triple n{nx, ny, nz};
                for (auto group : {ValleyGroup::Perpendicular, ValleyGroup::Parallel}) {
                    const double e = valley_energy(n, group, g, c);
                    for (auto label : symmetry_basis(group).labels)
                        out.push_back(ConductionState{n, group, label, 0, e});
                }
            }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.energy < b.energy;
    });
    return out;
}

} // namespace nvstirap::emt
