#pragma once

#include <cmath>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace nvstirap {

/// Raised for invalid user input: bad config keys, out-of-range parameters,
/// geometry invariants. The CLI maps it to exit code 1.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure fails to converge or is otherwise
/// unable to produce a trustworthy result. The CLI maps it to exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Warnings
// ---------------------------------------------------------------------------

using WarningSink = std::function<void(std::string_view)>;

inline WarningSink& warning_sink()
{
    static WarningSink sink = [](std::string_view msg) {
        std::cerr << "warning: " << msg << '\n';
    };
    return sink;
}

inline void warn(std::string_view msg)
{
    if (warning_sink())
        warning_sink()(msg);
}

/// Temporarily redirects warnings; restores the previous sink on scope exit.
class ScopedWarningSink {
public:
    explicit ScopedWarningSink(WarningSink sink)
      : previous_(std::exchange(warning_sink(), std::move(sink)))
    {
    }
    ~ScopedWarningSink() { warning_sink() = std::move(previous_); }
    ScopedWarningSink(const ScopedWarningSink&) = delete;
    ScopedWarningSink& operator=(const ScopedWarningSink&) = delete;

private:
    WarningSink previous_;
};

// ---------------------------------------------------------------------------
// Physical constants
// ---------------------------------------------------------------------------

namespace si {
inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double e_charge = 1.602176634e-19; // C
inline constexpr double k_B = 1.380649e-23;         // J/K
inline constexpr double c_light = 299792458.0;      // m/s
inline constexpr double eps0 = 8.8541878128e-12;    // F/m
inline constexpr double m_e = 9.1093837015e-31;     // kg
inline constexpr double angstrom = 1e-10;
inline constexpr double eV = e_charge;
} // namespace si

inline constexpr double pi = 3.14159265358979323846;

/// How the single isotropic effective mass m* is formed from the
/// longitudinal and transverse components.
enum class MassMean { Arithmetic, Geometric };

struct PhysicalConstants {
    double hbar = si::hbar;
    double e_charge = si::e_charge;
    double k_B = si::k_B;
    double c_light = si::c_light;
    double eps0 = si::eps0;
    double m_e = si::m_e;
    double m_perp = 0.28 * si::m_e; ///< transverse effective mass
    double m_par = 1.56 * si::m_e;  ///< longitudinal effective mass
    double Xi_d = 8.7 * si::eV;     ///< deformation potential
    double c_l = 17500.0;           ///< longitudinal sound speed, m/s
    double rho_C = 3515.0;          ///< mass density, kg/m^3
    double n_D = 2.41;              ///< refractive index
    double V_sc = 2.837e-27;        ///< 512-atom supercell volume, m^3
    double V_c = 2.837e-27 / 64.0;  ///< conventional cubic cell (8 atoms)
    double d_bulk = 0.085 * si::e_charge * si::angstrom; ///< C m
    double S_hr = 1.39;             ///< Huang-Rhys factor
    double atom_density = 1.76e29;  ///< carbon sites per m^3
    MassMean mass_mean = MassMean::Arithmetic;

    /// Isotropic mean of the effective-mass tensor.
    [[nodiscard]] double m_star() const
    {
        if (mass_mean == MassMean::Geometric)
            return std::cbrt(m_par * m_perp * m_perp);
        return (m_par + 2.0 * m_perp) / 3.0;
    }

    void validate() const
    {
        const std::pair<const char*, double> fields[] = {
            {"hbar", hbar},     {"e_charge", e_charge},
            {"k_B", k_B},       {"c_light", c_light},
            {"eps0", eps0},     {"m_e", m_e},
            {"m_perp", m_perp}, {"m_par", m_par},
            {"Xi_d", Xi_d},     {"c_l", c_l},
            {"rho_C", rho_C},   {"n_D", n_D},
            {"V_sc", V_sc},     {"V_c", V_c},
            {"d_bulk", d_bulk}, {"S_hr", S_hr},
            {"atom_density", atom_density}};
        for (const auto& [name, value] : fields)
            if (!(value > 0.0) || !std::isfinite(value))
                throw ConfigError(std::string("constant '") + name +
                                  "' must be finite and positive");
    }
};

/// The default constant set. Material values not quoted in the source
/// literature for this model (effective masses, sound speed, density,
/// refractive index, atomic density) are standard diamond values.
inline PhysicalConstants default_constants()
{
    return PhysicalConstants{};
}

/// Converts a parts-per-billion impurity concentration into a number density.
inline double ppb_to_density(double rho_ppb, const PhysicalConstants& constants)
{
    if (!(rho_ppb >= 0.0))
        throw ConfigError("ppb concentration must be non-negative");
    return rho_ppb * 1e-9 * constants.atom_density;
}

// ---------------------------------------------------------------------------
// Geometry and environment
// ---------------------------------------------------------------------------

enum class CrystalAxis { Dir100, Dir110, Dir111 };
enum class Design { Surface, Electrostatic };

inline std::string to_string(Design d)
{
    return d == Design::Surface ? "surface" : "electrostatic";
}

inline std::string to_string(CrystalAxis a)
{
    switch (a) {
    case CrystalAxis::Dir100:
        return "100";
    case CrystalAxis::Dir110:
        return "110";
    case CrystalAxis::Dir111:
        return "111";
    }
    return "?";
}

/// A w x w x L square prism with two NV centres on its axis, placed
/// symmetrically about the centre and separated by s.
struct WireGeometry {
    double w = 0.2e-6;
    double L = 0.6e-6;
    double s = 0.4e-6;
    CrystalAxis axis = CrystalAxis::Dir100;
    Design design = Design::Surface;

    void validate() const
    {
        if (!(w > 0.0) || !(L > 0.0) || !std::isfinite(w) || !std::isfinite(L))
            throw ConfigError("wire dimensions must be finite and positive");
        if (w > L)
            throw ConfigError("wire width w must not exceed length L");
        if (!(s > 0.0) || !(s < L))
            throw ConfigError("NV separation s must satisfy 0 < s < L");
    }

    /// z coordinates of NV A and NV B.
    [[nodiscard]] double z_A() const { return 0.5 * (L - s); }
    [[nodiscard]] double z_B() const { return 0.5 * (L + s); }

    /// Geometry whose NVs sit `inset` from each end of the wire.
    static WireGeometry with_end_inset(double w, double L, double inset,
                                       Design design = Design::Surface)
    {
        return WireGeometry{w, L, L - 2.0 * inset, CrystalAxis::Dir100, design};
    }
};

struct EnvironmentParams {
    double T = 4.0;               ///< K
    double rho_Nplus_ppb = 1.0;   ///< N_S+ concentration
    double sigma_cap = 5e-18;     ///< capture cross section, m^2
    double Q = 1e6;               ///< phonon quality factor
    bool sacrificial_layer = false;

    void validate() const
    {
        if (!(T > 0.0))
            throw ConfigError("temperature must be positive");
        if (!(Q >= 1.0))
            throw ConfigError("phonon quality factor must be >= 1");
        if (!(rho_Nplus_ppb >= 0.0))
            throw ConfigError("N_S+ concentration must be non-negative");
        if (!(sigma_cap >= 1e-18 && sigma_cap <= 20e-18))
            throw ConfigError("capture cross section must lie in [1, 20] nm^2");
        if (sigma_cap < 3e-18 || sigma_cap > 7e-18)
            warn("capture cross section outside the typical 3-7 nm^2 window");
    }
};

/// Bose-Einstein occupation of a mode of angular frequency omega.
inline double bose_einstein(double omega, double T, const PhysicalConstants& c)
{
    if (!(omega > 0.0) || !(T > 0.0))
        return 0.0;
    const double x = c.hbar * omega / (c.k_B * T);
    if (x > 700.0)
        return 0.0;
    return 1.0 / std::expm1(x);
}

} // namespace nvstirap
