#pragma once

// Axisymmetric Laplace solver for a disc electrode on a grounded diamond
// slab. The substrate occupies -depth <= z <= 0; the electrode sits on the
// top surface at r <= electrode_radius.
//
// The top surface outside the electrode is treated as charge-free (Neumann),
// so only the electrode footprint enters; electrode_height is carried for
// reporting but does not affect the solution.

#include "nvstirap/core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace nvstirap::electrostatics {

struct ElectrodeSetup {
    double electrode_radius = 1e-6;
    double electrode_height = 1e-6;
    double substrate_depth = 10e-6;
    double substrate_radius = 5e-6; ///< outer truncation of the domain
    double V_applied = 1.0;
    int n_r = 128; ///< cells along r
    int n_z = 256; ///< cells along z

    void validate() const
    {
        if (!(substrate_depth > 0.0) || !(substrate_radius > 0.0))
            throw ConfigError("substrate depth and radius must be positive");
        if (!(electrode_radius > 0.0) || electrode_radius > substrate_radius)
            throw ConfigError("electrode radius must lie in (0, substrate_radius]");
        if (!(electrode_height >= 0.0))
            throw ConfigError("electrode height must be non-negative");
        if (n_r < 64 || n_z < 64)
            throw ConfigError("grid must be at least 64 x 64");
        if (!std::isfinite(V_applied))
            throw ConfigError("applied voltage must be finite");
    }
};

struct SolverOptions {
    double tol = 1e-9;       ///< V, on the largest Jacobi correction
    long max_iter = 200000;
    double omega = 0.0;      ///< SOR factor; 0 selects it from the grid
};

struct PotentialField {
    ElectrodeSetup setup;
    int n_r = 0;
    int n_z = 0;
    double dr = 0.0;
    double dz = 0.0;
    std::vector<double> phi;      ///< (n_r + 1) x (n_z + 1) nodes, index i * (n_z + 1) + j
    std::vector<char> dirichlet;  ///< node fixed by a boundary condition
    double residual = 0.0;        ///< V
    long iterations = 0;
    double omega = 0.0;

    [[nodiscard]] std::size_t index(int i, int j) const
    {
        return std::size_t(i) * std::size_t(n_z + 1) + std::size_t(j);
    }
    [[nodiscard]] double at(int i, int j) const { return phi[index(i, j)]; }
    [[nodiscard]] double r(int i) const { return i * dr; }
    /// z of row j; row n_z is the top surface (z = 0).
    [[nodiscard]] double z(int j) const { return -setup.substrate_depth + j * dz; }

    /// On-axis potential at depth d below the surface (linear interpolation).
    [[nodiscard]] double on_axis(double depth) const
    {
        const double zz = -depth;
        const double u = (zz + setup.substrate_depth) / dz;
        const int j = std::clamp(int(std::floor(u)), 0, n_z - 1);
        const double f = std::clamp(u - j, 0.0, 1.0);
        return (1.0 - f) * at(0, j) + f * at(0, j + 1);
    }
};

namespace detail {

/// Five-point stencil weights at node (i, j) with the boundary treatment
/// folded in. Weights are non-negative and sum to `centre`.
struct Stencil {
    double west = 0.0, east = 0.0, south = 0.0, north = 0.0, centre = 0.0;
};

inline Stencil stencil(int i, int j, int n_r, int n_z, double dr, double dz)
{
    Stencil s;
    const double idr2 = 1.0 / (dr * dr);
    const double idz2 = 1.0 / (dz * dz);
    if (i == 0) {
        s.east = 4.0 * idr2; // axis: (1/r) d_r phi -> d_rr phi
    } else if (i == n_r) {
        s.west = 2.0 * idr2; // mirrored ghost node, zero radial flux
    } else {
        const double ri = i * dr;
        s.west = (ri - 0.5 * dr) / ri * idr2;
        s.east = (ri + 0.5 * dr) / ri * idr2;
    }
    if (j == n_z) {
        s.south = 2.0 * idz2; // charge-free top surface
    } else {
        s.south = idz2;
        s.north = idz2;
    }
    s.centre = s.west + s.east + s.south + s.north;
    return s;
}

} // namespace detail

/// Solves Laplace's equation by red-black successive over-relaxation.
inline PotentialField solve_potential(const ElectrodeSetup& setup, const SolverOptions& opt = {})
{
    setup.validate();
    if (!(opt.tol > 0.0) || opt.max_iter < 1)
        throw ConfigError("solver tolerance and iteration limit must be positive");

    PotentialField f;
    f.setup = setup;
    f.n_r = setup.n_r;
    f.n_z = setup.n_z;
    f.dr = setup.substrate_radius / setup.n_r;
    f.dz = setup.substrate_depth / setup.n_z;
    const std::size_t nodes = std::size_t(f.n_r + 1) * std::size_t(f.n_z + 1);
    f.phi.assign(nodes, 0.0);
    f.dirichlet.assign(nodes, 0);
    for (int i = 0; i <= f.n_r; ++i) {
        f.dirichlet[f.index(i, 0)] = 1; // grounded bottom plate
        if (f.r(i) <= setup.electrode_radius * (1.0 + 1e-12)) {
            f.dirichlet[f.index(i, f.n_z)] = 1;
            f.phi[f.index(i, f.n_z)] = setup.V_applied;
        }
    }

    std::vector<detail::Stencil> st(nodes);
    for (int i = 0; i <= f.n_r; ++i)
        for (int j = 0; j <= f.n_z; ++j)
            st[f.index(i, j)] = detail::stencil(i, j, f.n_r, f.n_z, f.dr, f.dz);

    if (opt.omega > 0.0) {
        if (opt.omega >= 2.0)
            throw ConfigError("SOR factor must lie in (0, 2)");
        f.omega = opt.omega;
    } else {
        // Jacobi spectral radius of the model problem; Neumann sides act like
        // a domain of twice the extent.
        const double wr = 1.0 / (f.dr * f.dr);
        const double wz = 1.0 / (f.dz * f.dz);
        const double rho = (wr * std::cos(pi / (2.0 * f.n_r)) + wz * std::cos(pi / (2.0 * f.n_z))) /
                           (wr + wz);
        f.omega = 2.0 / (1.0 + std::sqrt(1.0 - rho * rho));
    }

    if (setup.V_applied == 0.0) {
        f.residual = 0.0;
        return f;
    }

    const int stride = f.n_z + 1;
    for (long it = 1; it <= opt.max_iter; ++it) {
        double max_update = 0.0;
        for (int colour = 0; colour < 2; ++colour) {
            for (int i = 0; i <= f.n_r; ++i) {
                for (int j = 1 + ((i + 1 + colour) % 2); j <= f.n_z; j += 2) {
                    const std::size_t k = std::size_t(i) * stride + j;
                    if (f.dirichlet[k])
                        continue;
                    const auto& s = st[k];
                    double sum = s.south * f.phi[k - 1];
                    if (j < f.n_z)
                        sum += s.north * f.phi[k + 1];
                    if (i > 0)
                        sum += s.west * f.phi[k - stride];
                    if (i < f.n_r)
                        sum += s.east * f.phi[k + stride];
                    const double update = sum / s.centre - f.phi[k];
                    max_update = std::max(max_update, std::abs(update));
                    f.phi[k] += f.omega * update;
                }
            }
        }
        f.iterations = it;
        f.residual = max_update;
        if (max_update < opt.tol)
            return f;
    }
    throw NumericalError("Laplace solver did not converge in " + std::to_string(opt.max_iter) +
                         " iterations (residual " + std::to_string(f.residual) + " V)");
}

/// Depth below the surface where the on-axis potential first falls below
/// fraction * V_applied.
inline double effective_wire_length(const PotentialField& f, double fraction = 0.1)
{
    if (!(fraction > 0.0 && fraction < 1.0))
        throw ConfigError("fraction must lie in (0, 1)");
    const double V = f.setup.V_applied;
    if (V == 0.0)
        throw NumericalError("no potential applied; effective length undefined");
    const double target = fraction;
    double prev = f.at(0, f.n_z) / V;
    for (int j = f.n_z - 1; j >= 0; --j) {
        const double cur = f.at(0, j) / V;
        if (cur < target) {
            const double t = (prev - target) / (prev - cur);
            return (f.n_z - (j + 1)) * f.dz + t * f.dz;
        }
        prev = cur;
    }
    throw NumericalError("potential never falls below the requested fraction");
}

/// Maximum principle check: every node value lies within the range of the
/// Dirichlet data (up to `slack`).
inline bool satisfies_maximum_principle(const PotentialField& f, double slack = 1e-12)
{
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (std::size_t k = 0; k < f.phi.size(); ++k)
        if (f.dirichlet[k]) {
            lo = first ? f.phi[k] : std::min(lo, f.phi[k]);
            hi = first ? f.phi[k] : std::max(hi, f.phi[k]);
            first = false;
        }
    const double tol = slack * std::max(1.0, std::abs(hi - lo));
    return std::all_of(f.phi.begin(), f.phi.end(),
                       [&](double v) { return v >= lo - tol && v <= hi + tol; });
}

// ---------------------------------------------------------------------------
// Equipotentials
// ---------------------------------------------------------------------------

struct Point {
    double r = 0.0;
    double z = 0.0;
};

using Polyline = std::vector<Point>;

/// Marching squares on the node grid, with segments chained into polylines.
inline std::vector<Polyline> equipotentials(const PotentialField& f, double level)
{
    // Edge ids: horizontal edge (i,j)-(i+1,j) -> 2*index(i,j); vertical
    // (i,j)-(i,j+1) -> 2*index(i,j)+1.
    auto crossing = [&](int i0, int j0, int i1, int j1) {
        const double a = f.at(i0, j0) - level;
        const double b = f.at(i1, j1) - level;
        const double t = a / (a - b);
        return Point{f.r(i0) + t * (f.r(i1) - f.r(i0)), f.z(j0) + t * (f.z(j1) - f.z(j0))};
    };
    std::map<long, Point> points;
    std::map<long, std::vector<long>> links;
    auto add_segment = [&](long a, long b) {
        links[a].push_back(b);
        links[b].push_back(a);
    };

    for (int i = 0; i < f.n_r; ++i)
        for (int j = 0; j < f.n_z; ++j) {
            // Corners counter-clockwise: (i,j) (i+1,j) (i+1,j+1) (i,j+1).
            const double v[4] = {f.at(i, j), f.at(i + 1, j), f.at(i + 1, j + 1), f.at(i, j + 1)};
            const long e[4] = {2 * long(f.index(i, j)), 2 * long(f.index(i + 1, j)) + 1,
                               2 * long(f.index(i, j + 1)), 2 * long(f.index(i, j)) + 1};
            const int ends[4][4] = {{i, j, i + 1, j},
                                    {i + 1, j, i + 1, j + 1},
                                    {i, j + 1, i + 1, j + 1},
                                    {i, j, i, j + 1}};
            std::vector<int> cut;
            for (int k = 0; k < 4; ++k) {
                const bool above0 = v[k] >= level;
                const bool above1 = v[(k + 1) % 4] >= level;
                if (above0 != above1) {
                    cut.push_back(k);
                    if (!points.count(e[k]))
                        points[e[k]] = crossing(ends[k][0], ends[k][1], ends[k][2], ends[k][3]);
                }
            }
            if (cut.size() == 2) {
                add_segment(e[cut[0]], e[cut[1]]);
            } else if (cut.size() == 4) {
                // Saddle: resolve with the cell-centre average.
                const double centre = 0.25 * (v[0] + v[1] + v[2] + v[3]);
                if ((centre >= level) == (v[0] >= level)) {
                    add_segment(e[0], e[1]);
                    add_segment(e[2], e[3]);
                } else {
                    add_segment(e[0], e[3]);
                    add_segment(e[1], e[2]);
                }
            }
        }

    std::vector<Polyline> lines;
    std::map<long, bool> used;
    auto walk = [&](long start) {
        Polyline line{points[start]};
        used[start] = true;
        long cur = start;
        for (;;) {
            long next = -1;
            for (long n : links[cur])
                if (!used[n]) {
                    next = n;
                    break;
                }
            if (next < 0)
                break;
            used[next] = true;
            line.push_back(points[next]);
            cur = next;
        }
        return line;
    };
    // Open chains start at endpoints (degree 1); closed loops afterwards.
    for (const auto& [id, nb] : links)
        if (nb.size() == 1 && !used[id])
            lines.push_back(walk(id));
    for (const auto& [id, nb] : links)
        if (!used[id]) {
            auto line = walk(id);
            line.push_back(line.front());
            lines.push_back(std::move(line));
        }
    return lines;
}

} // namespace nvstirap::electrostatics
