#pragma once

// Electron-phonon scattering out of the conduction-band minimum.
//
// Two phonon models are provided: the quantized dilational modes of a
// free-standing wire (surface design) and the bulk acoustic continuum seen by
// an electrostatically confined electron. In both, envelope overlaps use
// envelopes normalised to unit probability, i.e. F / sqrt(V_c), so that every
// rate comes out in 1/s.

#include "nvstirap/core.hpp"
#include "nvstirap/emt.hpp"
#include "nvstirap/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <complex>
#include <numeric>
#include <queue>
#include <string>
#include <vector>

namespace nvstirap::phonons {

using emt::Triple;

/// Dilational mode indices (m_x, m_y, m_z), each >= 0 and not all zero.
struct ModeIndex {
    int x = 0;
    int y = 0;
    int z = 1;

    friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

inline void validate(const ModeIndex& m)
{
    if (m.x < 0 || m.y < 0 || m.z < 0 || (m.x == 0 && m.y == 0 && m.z == 0))
        throw ConfigError("phonon mode indices must be >= 0 and not all zero");
}

inline void validate(const Triple& n)
{
    if (n.x < 1 || n.y < 1 || n.z < 1)
        throw ConfigError("electronic quantum numbers must be >= 1");
}

inline double mode_frequency(const ModeIndex& m, const WireGeometry& g,
                             const PhysicalConstants& c)
{
    const double kx = m.x / g.w;
    const double ky = m.y / g.w;
    const double kz = m.z / g.L;
    return pi * c.c_l * std::sqrt(kx * kx + ky * ky + kz * kz);
}

/// Mode frequency with its indices, as enumerated by the rate calculation.
struct PhononMode {
    ModeIndex m;
    double omega = 0.0;
};

// ---------------------------------------------------------------------------
// Dilational (surface) overlaps
// ---------------------------------------------------------------------------

namespace detail {

/// Integral over [0,1] of cos(p pi u) cos(b pi u) for integers p, b.
inline double cos_cos_integral(int p, int b)
{
    p = std::abs(p);
    b = std::abs(b);
    if (p != b)
        return 0.0;
    return p == 0 ? 1.0 : 0.5;
}

} // namespace detail

/// Integral over [0,1] of sin(a pi u) cos(b pi u) sin(c pi u).
/// Non-zero only when b = |a - c| or b = a + c; for c = 1 that is b = a +- 1,
/// plus b = 0 when a = 1.
inline double sin_cos_sin_integral(int a, int b, int c)
{
    return 0.5 * (detail::cos_cos_integral(a - c, b) - detail::cos_cos_integral(a + c, b));
}

/// The mode shape chi = sqrt(8) c_l / omega * prod cos(...) integrates
/// |grad chi|^2 to V * 2^z, with z the number of zero indices. This returns
/// the amplitude factor that restores the normalization to V.
inline double dilational_norm_correction(const ModeIndex& m)
{
    const int zeros = int(m.x == 0) + int(m.y == 0) + int(m.z == 0);
    return std::pow(2.0, -0.5 * zeros);
}

/// Dimensionless shape of the overlap: 8 sqrt(8) times the product of the
/// three 1-D factors, between final state n and initial state `initial`.
inline double dilational_shape(const Triple& n, const ModeIndex& m, const Triple& initial)
{
    return 8.0 * std::sqrt(8.0) * sin_cos_sin_integral(n.x, m.x, initial.x) *
           sin_cos_sin_integral(n.y, m.y, initial.y) *
           sin_cos_sin_integral(n.z, m.z, initial.z);
}

/// M_{n,m}: overlap of the unit-normalised envelopes F_n, F_initial with the
/// scalar mode function chi_m (amplitude sqrt(8) c_l / omega_m). Units: m.
inline double dilational_overlap_M(const Triple& n, const ModeIndex& m,
                                   const WireGeometry& g,
                                   const PhysicalConstants& c = default_constants(),
                                   const Triple& initial = {1, 1, 1})
{
    validate(n);
    validate(m);
    validate(initial);
    return c.c_l / mode_frequency(m, g, c) * dilational_shape(n, m, initial);
}

inline double lorentzian(double detuning, double gamma)
{
    return (gamma / pi) / (detuning * detuning + gamma * gamma);
}

struct ScatteringChannel {
    Triple n_final;
    ModeIndex m;
    double omega_m = 0.0;      ///< phonon frequency, rad/s
    double omega_n = 0.0;      ///< electronic level spacing E_n - E_i, rad/s
    double overlap_sq = 0.0;   ///< normalised squared shape factor (dimensionless)
    double rate_contribution = 0.0; ///< 1/s
};

struct SurfaceRateOptions {
    Triple initial{1, 1, 1};
    emt::ValleyGroup group = emt::ValleyGroup::Perpendicular;
    double cutoff_kT = 10.0;       ///< phonon modes with hbar omega <= cutoff_kT k_B T
    double max_cutoff_kT = 20.0;   ///< hard limit when the tail check raises the cutoff
    int top_k = 10;
    double tail_tolerance = 1e-2;  ///< relative tail estimate allowed
};

struct SurfaceRateResult {
    double total = 0.0;
    std::vector<ScatteringChannel> channels; ///< top-k by contribution
    std::size_t modes = 0;
    std::size_t channel_count = 0;
    std::size_t rescaled_modes = 0; ///< modes needing the zero-index normalization fix
    double tail_estimate = 0.0;
    double cutoff_kT = 0.0; ///< cutoff actually used
};

namespace detail {

/// Per-axis confinement energies E(a) for a = 0..n_max (index 0 unused).
inline std::vector<double> axis_energies(double mass, double D, int n_max,
                                         const PhysicalConstants& c)
{
    std::vector<double> e(n_max + 1, 0.0);
    const double pref = c.hbar * c.hbar * pi * pi / (2.0 * mass * D * D);
    for (int a = 1; a <= n_max; ++a)
        e[a] = pref * double(a) * a;
    return e;
}

struct AxisMasses {
    double x, y, z;
};

inline AxisMasses axis_masses(emt::ValleyGroup group, const PhysicalConstants& c)
{
    if (group == emt::ValleyGroup::Perpendicular)
        return {c.m_par, c.m_perp, c.m_perp};
    return {c.m_perp, c.m_perp, c.m_par};
}

struct AxisTerm {
    int a;
    double J;
};

/// Final quantum numbers a reachable from c by a cos(b pi u) mode, with the
/// corresponding 1-D overlap.
inline int allowed_finals(int b, int c, std::array<AxisTerm, 3>& out)
{
    int count = 0;
    const int candidates[3] = {c + b, c - b, b - c};
    for (int a : candidates) {
        if (a < 1)
            continue;
        bool seen = false;
        for (int i = 0; i < count; ++i)
            seen = seen || out[i].a == a;
        if (seen)
            continue;
        const double J = sin_cos_sin_integral(a, b, c);
        if (J != 0.0)
            out[count++] = AxisTerm{a, J};
    }
    return count;
}

struct ChannelOrder {
    bool operator()(const ScatteringChannel& a, const ScatteringChannel& b) const
    {
        return a.rate_contribution > b.rate_contribution;
    }
};

} // namespace detail

namespace detail {

struct SurfaceSum {
    double total = 0.0;
    double shell = 0.0; ///< part of total from modes above the shell threshold
    std::size_t modes = 0;
    std::size_t channels = 0;
    std::size_t rescaled = 0;
};

/// Sums all channels of modes with omega_m <= omega_limit. Channels of modes
/// with omega_m <= omega_keep are offered to the top-k heap.
template <class Heap>
SurfaceSum surface_sum(const WireGeometry& g, const EnvironmentParams& env,
                       const PhysicalConstants& c, const SurfaceRateOptions& opt,
                       double omega_limit, double omega_shell, double omega_keep, Heap& top)
{
    SurfaceSum out;
    const int mxy_max = int(std::floor(omega_limit * g.w / (pi * c.c_l)));
    const int mz_max = int(std::floor(omega_limit * g.L / (pi * c.c_l)));

    const auto masses = axis_masses(opt.group, c);
    const auto ex = axis_energies(masses.x, g.w, mxy_max + opt.initial.x + 1, c);
    const auto ey = axis_energies(masses.y, g.w, mxy_max + opt.initial.y + 1, c);
    const auto ez = axis_energies(masses.z, g.L, mz_max + opt.initial.z + 1, c);
    const double E_i = ex[opt.initial.x] + ey[opt.initial.y] + ez[opt.initial.z];

    const double V = g.w * g.w * g.L;
    const double rate_pref = pi * c.Xi_d * c.Xi_d / (c.hbar * c.c_l * c.c_l * c.rho_C * V);
    std::array<AxisTerm, 3> tx{}, ty{}, tz{};

    for (int mx = 0; mx <= mxy_max; ++mx) {
        const int nx_count = allowed_finals(mx, opt.initial.x, tx);
        for (int my = 0; my <= mxy_max; ++my) {
            const int ny_count = allowed_finals(my, opt.initial.y, ty);
            for (int mz = 0; mz <= mz_max; ++mz) {
                if (mx == 0 && my == 0 && mz == 0)
                    continue;
                const ModeIndex m{mx, my, mz};
                const double omega_m = mode_frequency(m, g, c);
                if (omega_m > omega_limit)
                    break;
                ++out.modes;
                const double corr = dilational_norm_correction(m);
                if (corr != 1.0)
                    ++out.rescaled;
                const double nB = bose_einstein(omega_m, env.T, c);
                if (nB == 0.0)
                    continue;
                const double gamma = omega_m / env.Q;
                const double mode_pref = rate_pref * omega_m * corr * corr * nB;
                const bool keep = omega_m <= omega_keep;
                const int nz_count = allowed_finals(mz, opt.initial.z, tz);
                double mode_sum = 0.0;
                for (int ix = 0; ix < nx_count; ++ix)
                    for (int iy = 0; iy < ny_count; ++iy)
                        for (int iz = 0; iz < nz_count; ++iz) {
                            const double shape =
                                8.0 * std::sqrt(8.0) * tx[ix].J * ty[iy].J * tz[iz].J;
                            const double E_n = ex[tx[ix].a] + ey[ty[iy].a] + ez[tz[iz].a];
                            const double omega_n = (E_n - E_i) / c.hbar;
                            const double contribution =
                                mode_pref * shape * shape * lorentzian(omega_n - omega_m, gamma);
                            mode_sum += contribution;
                            ++out.channels;
                            if (keep && opt.top_k > 0 &&
                                (int(top.size()) < opt.top_k ||
                                 contribution > top.top().rate_contribution)) {
                                top.push(ScatteringChannel{
                                    Triple{tx[ix].a, ty[iy].a, tz[iz].a}, m, omega_m,
                                    omega_n, shape * shape * corr * corr, contribution});
                                if (int(top.size()) > opt.top_k)
                                    top.pop();
                            }
                        }
                out.total += mode_sum;
                if (omega_m > omega_shell)
                    out.shell += mode_sum;
            }
        }
    }
    return out;
}

} // namespace detail

/// Golden-rule absorption rate out of `initial` through the quantized
/// dilational modes of a free-standing wire, with a Lorentzian phonon line of
/// width omega_m / Q.
///
/// The mode sum runs to cutoff_kT. The next k_B T shell is evaluated
/// explicitly; if it (plus its geometric Bose tail) exceeds tail_tolerance of
/// the total, the cutoff is raised shell by shell up to max_cutoff_kT. A
/// resonance sitting just above the cutoff is therefore absorbed rather than
/// silently dropped.
inline SurfaceRateResult surface_ep_rate(const WireGeometry& g, const EnvironmentParams& env,
                                         const PhysicalConstants& c,
                                         const SurfaceRateOptions& opt = {})
{
    emt::require_supported_axis(g);
    validate(opt.initial);
    if (!(env.T > 0.0) || !(env.Q >= 1.0))
        throw ConfigError("surface e-p rate needs T > 0 and Q >= 1");
    if (!(opt.cutoff_kT > 0.0) || opt.max_cutoff_kT < opt.cutoff_kT)
        throw ConfigError("invalid surface e-p cutoffs");

    const double kT = c.k_B * env.T / c.hbar;
    using Heap = std::priority_queue<ScatteringChannel, std::vector<ScatteringChannel>,
                                     detail::ChannelOrder>;
    for (double cutoff = opt.cutoff_kT;; cutoff += 1.0) {
        Heap top;
        const auto sum = detail::surface_sum(g, env, c, opt, (cutoff + 1.0) * kT,
                                             cutoff * kT, cutoff * kT, top);
        const double base = sum.total - sum.shell;
        const double r = std::exp(-1.0) * std::pow(1.0 + 1.0 / cutoff, 3);
        // below ~2.5 k_B T the shell ratio bound exceeds one and bounds nothing
        const double tail =
            r < 1.0 ? sum.shell / (1.0 - r) : std::numeric_limits<double>::infinity();
        if (tail <= opt.tail_tolerance * base) {
            SurfaceRateResult result;
            result.total = base;
            result.tail_estimate = tail;
            result.cutoff_kT = cutoff;
            result.modes = sum.modes;
            result.channel_count = sum.channels;
            result.rescaled_modes = sum.rescaled;
            while (!top.empty()) {
                result.channels.push_back(top.top());
                top.pop();
            }
            std::reverse(result.channels.begin(), result.channels.end());
            return result;
        }
        if (cutoff + 1.0 > opt.max_cutoff_kT)
            throw NumericalError("surface e-p sum not converged at cutoff " +
                                 std::to_string(cutoff) + " k_B T: tail estimate " +
                                 std::to_string(tail) + " vs total " + std::to_string(base));
    }
}

// ---------------------------------------------------------------------------
// Bulk-phonon overlaps
// ---------------------------------------------------------------------------

namespace detail {

/// (exp(i x) - 1) / (i x), stable at small x.
inline std::complex<double> phase_integral(double x)
{
    const double h = 0.5 * x;
    const double sinc = std::abs(h) < 1e-4 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
    return std::polar(sinc, h);
}

/// Integral over [0,1] of cos(p pi u) exp(i q u).
inline std::complex<double> cos_phase_integral(int p, double q)
{
    return 0.5 * (phase_integral(q + p * pi) + phase_integral(q - p * pi));
}

} // namespace detail

/// Integral over [0,1] of sin(a pi u) exp(i q u) sin(c pi u).
inline std::complex<double> sin_phase_sin_integral(int a, double q, int c)
{
    return 0.5 * (detail::cos_phase_integral(a - c, q) - detail::cos_phase_integral(a + c, q));
}

/// |sin_phase_sin_integral(a, q, c)|^2 via its real closed form, falling back
/// to the complex form next to the removable singularities.
inline double sin_phase_sin_sq(int a, double q, int c)
{
    const double A = double(a - c) * pi;
    const double B = double(a + c) * pi;
    const double P = (A * A - q * q) * (B * B - q * q);
    const double scale = (B * B + q * q) * (B * B + q * q);
    if (std::abs(P) < 1e-6 * scale)
        return std::norm(sin_phase_sin_integral(a, q, c));
    const double sign = ((a + c) % 2 == 0) ? 1.0 : -1.0;
    const double ac = double(a) * c * pi * pi;
    return 8.0 * ac * ac * q * q * (1.0 - sign * std::cos(q)) / (P * P);
}

/// G_n(k): squared overlap of the unit-normalised envelopes F_n and
/// F_initial with the bulk mode (c_l / omega_k) exp(i k.r). Units: m^2.
inline double bulk_overlap_G(const Triple& n, const emt::Vec3& k, const WireGeometry& g,
                             const Triple& initial = {1, 1, 1})
{
    validate(n);
    validate(initial);
    const double k2 = k.x * k.x + k.y * k.y + k.z * k.z;
    if (!(k2 > 0.0))
        throw ConfigError("bulk overlap needs a non-zero wavevector");
    const auto Ix = sin_phase_sin_integral(n.x, k.x * g.w, initial.x);
    const auto Iy = sin_phase_sin_integral(n.y, k.y * g.w, initial.y);
    const auto Iz = sin_phase_sin_integral(n.z, k.z * g.L, initial.z);
    return 64.0 * std::norm(Ix * Iy * Iz) / k2;
}

struct AngularGrid {
    int n_theta = 16;  ///< polar nodes over [0, pi]
    int n_phi = 32;    ///< azimuthal intervals over [0, 2 pi)
    /// Optional per-state refinement: nodes per unit of phase k D / pi. Zero
    /// keeps one grid for all states; the sum over many final states is far
    /// smoother in direction than any single term, so this converges fast.
    double refine = 0.0;

    void validate() const
    {
        if (n_theta < 16 || n_phi < 32)
            throw ConfigError("angular grid must be at least 16 x 32");
        if (!(refine >= 0.0))
            throw ConfigError("angular refinement must be non-negative");
    }
};

struct BulkRateOptions {
    Triple initial{1, 1, 1};
    emt::ValleyGroup group = emt::ValleyGroup::Perpendicular;
    double cutoff_kT = 10.0;
    AngularGrid grid{};
    double prune_tolerance = 1e-3; ///< skipped states bounded by this fraction of the total
    bool check_convergence = true;
    double convergence_tolerance = 1e-2;
    int max_doublings = 3; ///< angular resolution may grow to 2^max_doublings
};

/// One electronic final state of the bulk sum.
struct BulkState {
    Triple n;
    double omega = 0.0;  ///< (E_n - E_i) / hbar
    double weight = 0.0; ///< prefactor * omega^5 * n_B
    double bound = 0.0;  ///< upper bound on weight * angular integral
};

struct BulkRateResult {
    double total = 0.0;
    double coarse_total = 0.0; ///< at half the final resolution, if checked
    double resolution = 1.0;   ///< angular resolution scale of `total`
    std::size_t states = 0;
    std::size_t integrated_states = 0;
    double pruned_bound = 0.0; ///< upper bound on the skipped contribution
};

namespace detail {

/// Upper envelope of sin_phase_sin_sq: 16 a^2 c^2 pi^4 q^2 / P(q)^2, capped at
/// 1/4 (the integrand magnitude never exceeds 1/2).
inline double overlap_envelope(int a, int c, double q)
{
    const double A = double(a - c) * pi;
    const double B = double(a + c) * pi;
    const double P = (A * A - q * q) * (B * B - q * q);
    if (P == 0.0)
        return 0.25;
    const double ac = double(a) * c * pi * pi;
    return std::min(0.25, 16.0 * ac * ac * q * q / (P * P));
}

/// Upper bound of |I(a, q, c)|^2 over |q| <= q_max.
inline double sup_inside(int a, int c, double q_max)
{
    const double A = std::abs(a - c) * pi;
    if (A == 0.0 || q_max >= A - pi)
        return 0.25;
    return overlap_envelope(a, c, q_max); // envelope increases on [0, A)
}

/// Upper bound of |I(a, q, c)|^2 over |q| >= q_min.
inline double sup_outside(int a, int c, double q_min)
{
    const double B = double(a + c) * pi;
    if (q_min <= B + pi)
        return 0.25;
    return overlap_envelope(a, c, q_min); // envelope decreases beyond B
}

inline double state_bound(const Triple& n, const Triple& i, double k, const WireGeometry& g)
{
    const double Q[3] = {k * g.w, k * g.w, k * g.L};
    const int a[3] = {n.x, n.y, n.z};
    const int c[3] = {i.x, i.y, i.z};
    double inside[3];
    double product = 1.0;
    for (int d = 0; d < 3; ++d) {
        inside[d] = sup_inside(a[d], c[d], Q[d]);
        product *= inside[d];
    }
    // Every direction has some |k_d| >= k / sqrt(3).
    double directional = 0.0;
    for (int d = 0; d < 3; ++d) {
        const double own = std::min(inside[d], sup_outside(a[d], c[d], Q[d] / std::sqrt(3.0)));
        directional = std::max(directional, own * product / inside[d]);
    }
    return 4.0 * pi * 64.0 / (k * k) * std::min(product, directional);
}

} // namespace detail

/// Solid-angle integral of G_n at |k| = k, using the eightfold mirror
/// symmetry of |G| (Gauss-Legendre in theta, trapezoid in phi over an octant).
inline double angular_integral(const Triple& n, double k, const WireGeometry& g,
                               const Triple& initial, const AngularGrid& grid,
                               double resolution_scale = 1.0)
{
    const double refine = grid.refine * resolution_scale;
    const int n_theta = std::max(int(std::ceil(grid.n_theta * resolution_scale / 2.0)),
                                 int(std::ceil(refine * k * std::max(g.w, g.L) / pi)) + 4);
    const int n_phi = std::max(int(std::ceil(grid.n_phi * resolution_scale / 4.0)),
                               int(std::ceil(refine * k * g.w / pi)) + 4);
    const auto theta = quadrature::gauss_legendre(n_theta, 0.0, pi / 2.0);
    const auto phi = quadrature::trapezoid(n_phi, 0.0, pi / 2.0);

    std::vector<double> cos_phi(phi.nodes.size()), sin_phi(phi.nodes.size());
    for (std::size_t j = 0; j < phi.nodes.size(); ++j) {
        cos_phi[j] = std::cos(phi.nodes[j]);
        sin_phi[j] = std::sin(phi.nodes[j]);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < theta.nodes.size(); ++i) {
        const double st = std::sin(theta.nodes[i]);
        const double ct = std::cos(theta.nodes[i]);
        const double fz = sin_phase_sin_sq(n.z, k * ct * g.L, initial.z);
        if (fz == 0.0)
            continue;
        const double qperp = k * st * g.w;
        double row = 0.0;
        for (std::size_t j = 0; j < phi.nodes.size(); ++j)
            row += phi.weights[j] * sin_phase_sin_sq(n.x, qperp * cos_phi[j], initial.x) *
                   sin_phase_sin_sq(n.y, qperp * sin_phi[j], initial.y);
        sum += theta.weights[i] * st * fz * row;
    }
    return 8.0 * 64.0 * sum / (k * k);
}

/// Final states with 0 < E_n - E_i <= cutoff_kT k_B T, with their weights and
/// angular bounds.
inline std::vector<BulkState> bulk_states(const WireGeometry& g, const EnvironmentParams& env,
                                          const PhysicalConstants& c,
                                          const BulkRateOptions& opt)
{
    const auto masses = detail::axis_masses(opt.group, c);
    const double E_window = opt.cutoff_kT * c.k_B * env.T;
    auto level = [&](double mass, double D, int a) {
        return c.hbar * c.hbar * pi * pi * double(a) * a / (2.0 * mass * D * D);
    };
    const double E_i = level(masses.x, g.w, opt.initial.x) + level(masses.y, g.w, opt.initial.y) +
                       level(masses.z, g.L, opt.initial.z);
    const double E_top = E_i + E_window;
    const double pref = 1.0 / (2.0 * (2.0 * pi) * (2.0 * pi)) * c.Xi_d * c.Xi_d /
                        (c.hbar * c.rho_C * std::pow(c.c_l, 7));

    std::vector<BulkState> states;
    for (int nx = 1; level(masses.x, g.w, nx) + level(masses.y, g.w, 1) +
                         level(masses.z, g.L, 1) <= E_top;
         ++nx)
        for (int ny = 1; level(masses.x, g.w, nx) + level(masses.y, g.w, ny) +
                             level(masses.z, g.L, 1) <= E_top;
             ++ny)
            for (int nz = 1;; ++nz) {
                const double E = level(masses.x, g.w, nx) + level(masses.y, g.w, ny) +
                                 level(masses.z, g.L, nz);
                if (E > E_top)
                    break;
                const Triple n{nx, ny, nz};
                if (n == opt.initial || E <= E_i)
                    continue;
                const double omega = (E - E_i) / c.hbar;
                const double nB = bose_einstein(omega, env.T, c);
                if (nB == 0.0)
                    continue;
                const double weight = pref * std::pow(omega, 5) * nB;
                const double k = omega / c.c_l;
                states.push_back(BulkState{n, omega, weight,
                                           weight * detail::state_bound(n, opt.initial, k, g)});
            }
    return states;
}

/// Golden-rule absorption rate out of `initial` through bulk acoustic
/// phonons, summed over final states with the solid-angle integral done by
/// quadrature.
inline BulkRateResult bulk_ep_rate(const WireGeometry& g, const EnvironmentParams& env,
                                   const PhysicalConstants& c, const BulkRateOptions& opt = {})
{
    emt::require_supported_axis(g);
    validate(opt.initial);
    opt.grid.validate();
    if (!(env.T > 0.0))
        throw ConfigError("bulk e-p rate needs T > 0");

    auto states = bulk_states(g, env, c, opt);
    std::sort(states.begin(), states.end(),
              [](const BulkState& a, const BulkState& b) { return a.bound > b.bound; });
    std::vector<double> remaining(states.size() + 1, 0.0);
    for (std::size_t i = states.size(); i-- > 0;)
        remaining[i] = remaining[i + 1] + states[i].bound;

    BulkRateResult result;
    result.states = states.size();
    std::size_t used = 0;
    for (; used < states.size(); ++used) {
        if (result.total > 0.0 && remaining[used] <= opt.prune_tolerance * result.total)
            break;
        const auto& st = states[used];
        result.total += st.weight * angular_integral(st.n, st.omega / c.c_l, g, opt.initial,
                                                     opt.grid);
    }
    result.integrated_states = used;
    result.pruned_bound = remaining[used];

    if (opt.check_convergence) {
        // Double the angular resolution until two successive totals agree.
        for (int d = 1;; ++d) {
            const double scale = std::ldexp(1.0, d);
            double refined = 0.0;
            for (std::size_t i = 0; i < used; ++i)
                refined += states[i].weight * angular_integral(states[i].n,
                                                               states[i].omega / c.c_l, g,
                                                               opt.initial, opt.grid, scale);
            const double coarse = result.total;
            result.coarse_total = coarse;
            result.total = refined;
            result.resolution = scale;
            const double ref = std::max(std::abs(refined), std::abs(coarse));
            if (ref == 0.0 || std::abs(refined - coarse) <= opt.convergence_tolerance * ref)
                break;
            if (d >= opt.max_doublings)
                throw NumericalError("bulk e-p angular quadrature not converged: " +
                                     std::to_string(coarse) + " vs " + std::to_string(refined) +
                                     " at resolution x" + std::to_string(int(scale)));
        }
    }
    return result;
}

} // namespace nvstirap::phonons
