#pragma once

// Photoionization coupling between an NV centre and the confined conduction
// band minimum: dipole moment in the wire, Rabi frequency and spontaneous
// emission.

#include "nvstirap/core.hpp"
#include "nvstirap/emt.hpp"

#include <cmath>

namespace nvstirap::optics {

struct LaserParams {
    double P = 0.1;          ///< W, power per beam
    double r_spot = 200e-9;  ///< m, Gaussian beam radius
    double detuning = 0.0;   ///< rad/s, single-photon detuning

    void validate() const
    {
        if (!(P >= 0.0))
            throw ConfigError("laser power must be non-negative");
        if (!(r_spot > 0.0))
            throw ConfigError("laser spot radius must be positive");
    }
};

struct OpticalCoupling {
    double F0 = 0.0;
    double d_wire = 0.0;   ///< C m
    double Omega = 0.0;    ///< rad/s
    double Gamma_SE = 0.0; ///< 1/s
};

/// Envelope amplitude at NV A, normalised to the supercell volume in which
/// d_bulk was computed.
inline double envelope_norm_F0(const WireGeometry& g, const PhysicalConstants& c)
{
    return std::sqrt(8.0 * c.V_sc / (g.w * g.w * g.L)) * std::cos(pi * g.s / (2.0 * g.L));
}

/// Franck-Condon factor |<mu_0|nu_p>|^2 of the p-th vibrational sideband.
inline double huang_rhys_overlap_sq(int p, double S)
{
    if (p < 0)
        throw ConfigError("vibrational quantum number must be >= 0");
    if (!(S >= 0.0))
        throw ConfigError("Huang-Rhys factor must be >= 0");
    if (S == 0.0)
        return p == 0 ? 1.0 : 0.0;
    return std::exp(-S + p * std::log(S) - std::lgamma(p + 1.0));
}

inline double dipole_wire(const WireGeometry& g, const PhysicalConstants& c)
{
    return envelope_norm_F0(g, c) * std::sqrt(huang_rhys_overlap_sq(0, c.S_hr)) *
           c.d_bulk;
}

/// Peak field amplitude of a Gaussian beam inside diamond.
inline double field_amplitude(const LaserParams& laser, const PhysicalConstants& c)
{
    return std::sqrt(4.0 * laser.P /
                     (c.n_D * c.c_light * c.eps0 * pi * laser.r_spot * laser.r_spot));
}

/// Single-beam Rabi frequency d_wire |E0| / hbar.
inline double rabi_single_beam(const WireGeometry& g, const LaserParams& laser,
                               const PhysicalConstants& c)
{
    return dipole_wire(g, c) * field_amplitude(laser, c) / c.hbar;
}

/// Effective Rabi frequency sqrt(Omega_P^2 + Omega_S^2) for identical pump and
/// Stokes beams, in closed form.
inline double rabi_effective(const WireGeometry& g, const LaserParams& laser,
                             const PhysicalConstants& c)
{
    return std::exp(-c.S_hr / 2.0) / (laser.r_spot * c.hbar) *
           std::sqrt(8.0 * laser.P / (c.n_D * c.c_light * c.eps0 * pi)) *
           envelope_norm_F0(g, c) * c.d_bulk;
}

/// Effective Rabi frequency with separately specified pump and Stokes beams.
inline double rabi_effective(const WireGeometry& g, const LaserParams& pump,
                             const LaserParams& stokes, const PhysicalConstants& c)
{
    return std::hypot(rabi_single_beam(g, pump, c), rabi_single_beam(g, stokes, c));
}

/// Zero-phonon ionization energy expressed as an angular frequency.
inline double default_transition_frequency(const PhysicalConstants& c)
{
    return 2.6 * c.e_charge / c.hbar;
}

/// Bulk-medium spontaneous emission rate from the conduction state back to
/// either NV.
inline double spontaneous_emission(const WireGeometry& g, double omega_transition,
                                   const PhysicalConstants& c)
{
    if (!(omega_transition > 0.0))
        throw ConfigError("transition frequency must be positive");
    const double d = dipole_wire(g, c);
    const double c3 = c.c_light * c.c_light * c.c_light;
    return 2.0 * omega_transition * omega_transition * omega_transition * d * d /
           (3.0 * pi * c.eps0 * c.n_D * c.hbar * c3);
}

inline OpticalCoupling compute_coupling(const WireGeometry& g, const LaserParams& pump,
                                        const LaserParams& stokes,
                                        double omega_transition,
                                        const PhysicalConstants& c)
{
    OpticalCoupling out;
    out.F0 = envelope_norm_F0(g, c);
    out.d_wire = dipole_wire(g, c);
    out.Omega = rabi_effective(g, pump, stokes, c);
    out.Gamma_SE = spontaneous_emission(g, omega_transition, c);
    return out;
}

} // namespace nvstirap::optics
