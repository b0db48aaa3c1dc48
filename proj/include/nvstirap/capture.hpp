#pragma once

// Loss of the conduction electron to ionized substitutional nitrogen.

#include "nvstirap/core.hpp"

#include <cmath>

namespace nvstirap::capture {

struct CaptureModel {
    double rho_Nplus = 0.0;       ///< m^-3
    double sigma = 5e-18;         ///< m^2
    double T = 4.0;               ///< K
    double m_star = 0.0;          ///< kg
    double occupancy_bound = 1.0; ///< rho_e L^2 w, conservatively 1

    static CaptureModel from(const EnvironmentParams& env, const PhysicalConstants& c,
                             double occupancy_bound = 1.0)
    {
        return CaptureModel{ppb_to_density(env.rho_Nplus_ppb, c), env.sigma_cap,
                            env.T, c.m_star(), occupancy_bound};
    }
};

/// Thermal-velocity capture rate; independent of wire volume once the
/// occupancy bound is applied.
inline double capture_rate(const CaptureModel& m, const PhysicalConstants& c)
{
    if (!(m.occupancy_bound > 0.0 && m.occupancy_bound <= 1.0))
        throw ConfigError("occupancy bound must lie in (0, 1]");
    if (!(m.rho_Nplus >= 0.0) || !(m.sigma >= 0.0) || !(m.T >= 0.0) ||
        !(m.m_star > 0.0))
        throw ConfigError("invalid capture model parameters");
    return m.rho_Nplus * m.occupancy_bound * m.sigma * std::sqrt(c.k_B * m.T / m.m_star);
}

/// A sacrificial donor layer removes 95% of the N_S+ available for capture.
inline double apply_sacrificial_layer(double rate, bool enabled)
{
    if (!(rate >= 0.0))
        throw ConfigError("capture rate must be non-negative");
    return enabled ? 0.05 * rate : rate;
}

inline double apply_sacrificial_layer(double rate, bool enabled, Design design)
{
    if (enabled && design == Design::Surface)
        warn("sacrificial layer enabled on a surface-confined design");
    return apply_sacrificial_layer(rate, enabled);
}

} // namespace nvstirap::capture
