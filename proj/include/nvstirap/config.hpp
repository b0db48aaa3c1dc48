#pragma once

// INI run configuration. Every key is optional; unknown sections or keys are
// rejected. Values accept unit suffixes (um, nm, meV, mW, K, ppb, ...); bare
// numbers are SI. Comments start with ';' or '#' on their own line.

#include "nvstirap/core.hpp"
#include "nvstirap/electrostatics.hpp"
#include "nvstirap/emt.hpp"
#include "nvstirap/optics.hpp"
#include "nvstirap/phonons.hpp"
#include "nvstirap/stirap.hpp"
#include "nvstirap/sweep.hpp"
#include "nvstirap/units.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace nvstirap::config {

using units::Dimension;

struct PulseConfig {
    double Omega_tau = 100.0;   ///< target Omega * sigma_t when sigma_t is derived
    double delay_ratio = 1.2;   ///< t_delay / sigma_t
    std::optional<double> sigma_t; ///< explicit pulse width overrides Omega_tau
    double loss_split = 1.0;
    double detuning_single = 0.0;
    double detuning_two_photon = 0.0;
    int samples = 401;
    double rtol = 1e-9;
    double atol = 1e-11;
};

struct ElectrostaticsConfig {
    electrostatics::ElectrodeSetup setup{};
    electrostatics::SolverOptions solver{};
    double fraction = 0.1;
    std::vector<double> contour_fractions{0.1, 0.25, 0.5, 0.75, 0.9};
};

/// Whether the sacrificial donor layer is present: by default exactly for the
/// electrostatic design.
enum class SacrificialMode { Auto, On, Off };

struct SweepConfig {
    std::optional<double> w_min, w_max, L_min, L_max;
    int n_w = 40;
    int n_L = 40;
    bool log_spaced = true;
    double end_inset = 100e-9;
    double min_L = 250e-9;
    int threads = 0;

    [[nodiscard]] sweep::GridSpec grid(Design d) const
    {
        auto g = sweep::GridSpec::for_design(d);
        g.w_min = w_min.value_or(g.w_min);
        g.w_max = w_max.value_or(g.w_max);
        g.L_min = L_min.value_or(g.L_min);
        g.L_max = L_max.value_or(g.L_max);
        g.n_w = n_w;
        g.n_L = n_L;
        g.log_spaced = log_spaced;
        g.end_inset = end_inset;
        g.min_L = min_L;
        return g;
    }
};

struct RunConfig {
    PhysicalConstants constants{};
    double w = 0.1e-6;
    double L = 0.3e-6;
    std::optional<double> s; ///< default: L - 2 * end_inset
    CrystalAxis axis = CrystalAxis::Dir100;
    Design design = Design::Surface;
    EnvironmentParams env{};
    SacrificialMode sacrificial = SacrificialMode::Auto;
    optics::LaserParams pump{};
    std::optional<double> P_stokes;
    std::optional<double> r_spot_stokes;
    double transition_energy = 2.6 * si::eV;
    PulseConfig pulses{};
    SweepConfig sweep{};
    ElectrostaticsConfig electrostatics{};
    phonons::SurfaceRateOptions surface{};
    phonons::BulkRateOptions bulk{};

    [[nodiscard]] WireGeometry geometry() const
    {
        WireGeometry g{w, L, s.value_or(L - 2.0 * sweep.end_inset), axis, design};
        g.validate();
        return g;
    }

    [[nodiscard]] optics::LaserParams stokes() const
    {
        auto l = pump;
        l.P = P_stokes.value_or(pump.P);
        l.r_spot = r_spot_stokes.value_or(pump.r_spot);
        return l;
    }

    [[nodiscard]] bool sacrificial_layer(Design d) const
    {
        if (sacrificial == SacrificialMode::Auto)
            return d == Design::Electrostatic;
        return sacrificial == SacrificialMode::On;
    }

    [[nodiscard]] sweep::SweepInputs sweep_inputs(Design d) const
    {
        sweep::SweepInputs in;
        in.design = d;
        in.grid = sweep.grid(d);
        in.env = env;
        in.env.sacrificial_layer = sacrificial_layer(d);
        if (sacrificial != SacrificialMode::Auto)
            in.sacrificial_layer = sacrificial == SacrificialMode::On;
        in.pump = pump;
        in.stokes = stokes();
        in.omega_transition = transition_energy / constants.hbar;
        in.constants = constants;
        in.surface = surface;
        in.bulk = bulk;
        in.threads = sweep.threads;
        return in;
    }

    void validate() const
    {
        constants.validate();
        env.validate();
        pump.validate();
        stokes().validate();
        electrostatics.setup.validate();
        (void)geometry();
        if (!(transition_energy > 0.0))
            throw ConfigError("transition energy must be positive");
        if (!(pulses.Omega_tau > 0.0) || !(pulses.delay_ratio > 0.0) ||
            !(pulses.delay_ratio < 6.0))
            throw ConfigError("pulses need Omega_tau > 0 and 0 < delay_ratio < 6");
        if (!(pulses.loss_split >= 0.0 && pulses.loss_split <= 1.0))
            throw ConfigError("loss_split must lie in [0, 1]");
        if (!(electrostatics.fraction > 0.0 && electrostatics.fraction < 1.0))
            throw ConfigError("electrostatics fraction must lie in (0, 1)");
        bulk.grid.validate();
    }
};

// ---------------------------------------------------------------------------
// Value codecs
// ---------------------------------------------------------------------------

inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline bool parse_bool(const std::string& text)
{
    const auto t = std::string(units::trim(text));
    if (t == "true" || t == "1" || t == "yes" || t == "on")
        return true;
    if (t == "false" || t == "0" || t == "no" || t == "off")
        return false;
    throw ConfigError("not a boolean: '" + t + "'");
}

inline int parse_int(const std::string& text)
{
    const double v = units::parse_number(text);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw ConfigError("not an integer: '" + text + "'");
    return int(v);
}

inline std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(units::parse_number(item));
    return out;
}

inline std::string format_list(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? "," : "") + format_double(v[i]);
    return out;
}

inline Design parse_design(const std::string& text)
{
    const auto t = std::string(units::trim(text));
    if (t == "surface")
        return Design::Surface;
    if (t == "electrostatic")
        return Design::Electrostatic;
    throw ConfigError("design must be 'surface' or 'electrostatic', got '" + t + "'");
}

inline CrystalAxis parse_axis(const std::string& text)
{
    const auto t = std::string(units::trim(text));
    if (t == "100")
        return CrystalAxis::Dir100;
    if (t == "110")
        return CrystalAxis::Dir110;
    if (t == "111")
        return CrystalAxis::Dir111;
    throw ConfigError("axis must be 100, 110 or 111, got '" + t + "'");
}

// ---------------------------------------------------------------------------
// Field table
// ---------------------------------------------------------------------------

struct Field {
    std::string section;
    std::string key;
    std::function<void(RunConfig&, const std::string&)> parse;
    /// Empty optional: key is unset and is not serialized.
    std::function<std::optional<std::string>(const RunConfig&)> format;
};

namespace detail {

template <class Get>
Field quantity(std::string section, std::string key, Dimension dim, Get get)
{
    return Field{std::move(section), std::move(key),
                 [get, dim](RunConfig& c, const std::string& v) {
                     get(c) = units::parse_quantity(v, dim);
                 },
                 [get](const RunConfig& c) -> std::optional<std::string> {
                     return format_double(get(const_cast<RunConfig&>(c)));
                 }};
}

template <class Get>
Field optional_quantity(std::string section, std::string key, Dimension dim, Get get)
{
    return Field{std::move(section), std::move(key),
                 [get, dim](RunConfig& c, const std::string& v) {
                     get(c) = units::parse_quantity(v, dim);
                 },
                 [get](const RunConfig& c) -> std::optional<std::string> {
                     const auto& v = get(const_cast<RunConfig&>(c));
                     if (!v)
                         return std::nullopt;
                     return format_double(*v);
                 }};
}

template <class Get>
Field integer(std::string section, std::string key, Get get)
{
    return Field{std::move(section), std::move(key),
                 [get](RunConfig& c, const std::string& v) { get(c) = parse_int(v); },
                 [get](const RunConfig& c) -> std::optional<std::string> {
                     return std::to_string(get(const_cast<RunConfig&>(c)));
                 }};
}

template <class Get>
Field boolean(std::string section, std::string key, Get get)
{
    return Field{std::move(section), std::move(key),
                 [get](RunConfig& c, const std::string& v) { get(c) = parse_bool(v); },
                 [get](const RunConfig& c) -> std::optional<std::string> {
                     return get(const_cast<RunConfig&>(c)) ? "true" : "false";
                 }};
}

} // namespace detail

inline const std::vector<Field>& fields()
{
    using detail::boolean;
    using detail::integer;
    using detail::optional_quantity;
    using detail::quantity;
    using D = Dimension;
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        // [constants]
        f.push_back(quantity("constants", "m_perp", D::Mass, [](RunConfig& c) -> double& { return c.constants.m_perp; }));
        f.push_back(quantity("constants", "m_par", D::Mass, [](RunConfig& c) -> double& { return c.constants.m_par; }));
        f.push_back(quantity("constants", "Xi_d", D::Energy, [](RunConfig& c) -> double& { return c.constants.Xi_d; }));
        f.push_back(quantity("constants", "c_l", D::Dimensionless, [](RunConfig& c) -> double& { return c.constants.c_l; }));
        f.push_back(quantity("constants", "rho_C", D::Dimensionless, [](RunConfig& c) -> double& { return c.constants.rho_C; }));
        f.push_back(quantity("constants", "n_D", D::Dimensionless, [](RunConfig& c) -> double& { return c.constants.n_D; }));
        f.push_back(quantity("constants", "V_sc", D::Volume, [](RunConfig& c) -> double& { return c.constants.V_sc; }));
        f.push_back(quantity("constants", "V_c", D::Volume, [](RunConfig& c) -> double& { return c.constants.V_c; }));
        f.push_back(quantity("constants", "d_bulk", D::DipoleMoment, [](RunConfig& c) -> double& { return c.constants.d_bulk; }));
        f.push_back(quantity("constants", "S_hr", D::Dimensionless, [](RunConfig& c) -> double& { return c.constants.S_hr; }));
        f.push_back(quantity("constants", "atom_density", D::Density, [](RunConfig& c) -> double& { return c.constants.atom_density; }));
        f.push_back(Field{"constants", "mass_mean",
                          [](RunConfig& c, const std::string& v) {
                              const auto t = std::string(units::trim(v));
                              if (t == "arithmetic")
                                  c.constants.mass_mean = MassMean::Arithmetic;
                              else if (t == "geometric")
                                  c.constants.mass_mean = MassMean::Geometric;
                              else
                                  throw ConfigError("mass_mean must be arithmetic or geometric");
                          },
                          [](const RunConfig& c) -> std::optional<std::string> {
                              return c.constants.mass_mean == MassMean::Geometric ? "geometric"
                                                                                  : "arithmetic";
                          }});
        // [geometry]
        f.push_back(quantity("geometry", "w", D::Length, [](RunConfig& c) -> double& { return c.w; }));
        f.push_back(quantity("geometry", "L", D::Length, [](RunConfig& c) -> double& { return c.L; }));
        f.push_back(optional_quantity("geometry", "s", D::Length, [](RunConfig& c) -> std::optional<double>& { return c.s; }));
        f.push_back(Field{"geometry", "axis",
                          [](RunConfig& c, const std::string& v) { c.axis = parse_axis(v); },
                          [](const RunConfig& c) -> std::optional<std::string> { return to_string(c.axis); }});
        f.push_back(Field{"geometry", "design",
                          [](RunConfig& c, const std::string& v) { c.design = parse_design(v); },
                          [](const RunConfig& c) -> std::optional<std::string> { return to_string(c.design); }});
        // [environment]
        f.push_back(quantity("environment", "T", D::Temperature, [](RunConfig& c) -> double& { return c.env.T; }));
        f.push_back(quantity("environment", "rho_Nplus", D::Dimensionless, [](RunConfig& c) -> double& { return c.env.rho_Nplus_ppb; }));
        f.push_back(quantity("environment", "sigma_cap", D::Area, [](RunConfig& c) -> double& { return c.env.sigma_cap; }));
        f.push_back(quantity("environment", "Q", D::Dimensionless, [](RunConfig& c) -> double& { return c.env.Q; }));
        f.push_back(Field{"environment", "sacrificial_layer",
                          [](RunConfig& c, const std::string& v) {
                              const auto t = std::string(units::trim(v));
                              c.sacrificial = t == "auto" ? SacrificialMode::Auto
                                              : parse_bool(t) ? SacrificialMode::On
                                                              : SacrificialMode::Off;
                          },
                          [](const RunConfig& c) -> std::optional<std::string> {
                              switch (c.sacrificial) {
                              case SacrificialMode::On:
                                  return "true";
                              case SacrificialMode::Off:
                                  return "false";
                              default:
                                  return "auto";
                              }
                          }});
        // [laser]
        f.push_back(quantity("laser", "P", D::Power, [](RunConfig& c) -> double& { return c.pump.P; }));
        f.push_back(quantity("laser", "r_spot", D::Length, [](RunConfig& c) -> double& { return c.pump.r_spot; }));
        f.push_back(quantity("laser", "detuning", D::AngularFrequency, [](RunConfig& c) -> double& { return c.pump.detuning; }));
        f.push_back(optional_quantity("laser", "P_stokes", D::Power, [](RunConfig& c) -> std::optional<double>& { return c.P_stokes; }));
        f.push_back(optional_quantity("laser", "r_spot_stokes", D::Length, [](RunConfig& c) -> std::optional<double>& { return c.r_spot_stokes; }));
        f.push_back(quantity("laser", "transition_energy", D::Energy, [](RunConfig& c) -> double& { return c.transition_energy; }));
        // [pulses]
        f.push_back(quantity("pulses", "Omega_tau", D::Dimensionless, [](RunConfig& c) -> double& { return c.pulses.Omega_tau; }));
        f.push_back(quantity("pulses", "delay_ratio", D::Dimensionless, [](RunConfig& c) -> double& { return c.pulses.delay_ratio; }));
        f.push_back(optional_quantity("pulses", "sigma_t", D::Time, [](RunConfig& c) -> std::optional<double>& { return c.pulses.sigma_t; }));
        f.push_back(quantity("pulses", "loss_split", D::Dimensionless, [](RunConfig& c) -> double& { return c.pulses.loss_split; }));
        f.push_back(quantity("pulses", "detuning_single", D::AngularFrequency, [](RunConfig& c) -> double& { return c.pulses.detuning_single; }));
        f.push_back(quantity("pulses", "detuning_two_photon", D::AngularFrequency, [](RunConfig& c) -> double& { return c.pulses.detuning_two_photon; }));
        f.push_back(integer("pulses", "samples", [](RunConfig& c) -> int& { return c.pulses.samples; }));
        f.push_back(quantity("pulses", "rtol", D::Dimensionless, [](RunConfig& c) -> double& { return c.pulses.rtol; }));
        f.push_back(quantity("pulses", "atol", D::Dimensionless, [](RunConfig& c) -> double& { return c.pulses.atol; }));
        // [sweep]
        f.push_back(optional_quantity("sweep", "w_min", D::Length, [](RunConfig& c) -> std::optional<double>& { return c.sweep.w_min; }));
        f.push_back(optional_quantity("sweep", "w_max", D::Length, [](RunConfig& c) -> std::optional<double>& { return c.sweep.w_max; }));
        f.push_back(optional_quantity("sweep", "L_min", D::Length, [](RunConfig& c) -> std::optional<double>& { return c.sweep.L_min; }));
        f.push_back(optional_quantity("sweep", "L_max", D::Length, [](RunConfig& c) -> std::optional<double>& { return c.sweep.L_max; }));
        f.push_back(integer("sweep", "n_w", [](RunConfig& c) -> int& { return c.sweep.n_w; }));
        f.push_back(integer("sweep", "n_L", [](RunConfig& c) -> int& { return c.sweep.n_L; }));
        f.push_back(boolean("sweep", "log_spaced", [](RunConfig& c) -> bool& { return c.sweep.log_spaced; }));
        f.push_back(quantity("sweep", "end_inset", D::Length, [](RunConfig& c) -> double& { return c.sweep.end_inset; }));
        f.push_back(quantity("sweep", "min_L", D::Length, [](RunConfig& c) -> double& { return c.sweep.min_L; }));
        f.push_back(integer("sweep", "threads", [](RunConfig& c) -> int& { return c.sweep.threads; }));
        // [electrostatics]
        f.push_back(quantity("electrostatics", "electrode_radius", D::Length, [](RunConfig& c) -> double& { return c.electrostatics.setup.electrode_radius; }));
        f.push_back(quantity("electrostatics", "electrode_height", D::Length, [](RunConfig& c) -> double& { return c.electrostatics.setup.electrode_height; }));
        f.push_back(quantity("electrostatics", "substrate_depth", D::Length, [](RunConfig& c) -> double& { return c.electrostatics.setup.substrate_depth; }));
        f.push_back(quantity("electrostatics", "substrate_radius", D::Length, [](RunConfig& c) -> double& { return c.electrostatics.setup.substrate_radius; }));
        f.push_back(quantity("electrostatics", "V_applied", D::Voltage, [](RunConfig& c) -> double& { return c.electrostatics.setup.V_applied; }));
        f.push_back(integer("electrostatics", "n_r", [](RunConfig& c) -> int& { return c.electrostatics.setup.n_r; }));
        f.push_back(integer("electrostatics", "n_z", [](RunConfig& c) -> int& { return c.electrostatics.setup.n_z; }));
        f.push_back(quantity("electrostatics", "tol", D::Voltage, [](RunConfig& c) -> double& { return c.electrostatics.solver.tol; }));
        f.push_back(Field{"electrostatics", "max_iter",
                          [](RunConfig& c, const std::string& v) { c.electrostatics.solver.max_iter = parse_int(v); },
                          [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.electrostatics.solver.max_iter); }});
        f.push_back(quantity("electrostatics", "fraction", D::Dimensionless, [](RunConfig& c) -> double& { return c.electrostatics.fraction; }));
        f.push_back(Field{"electrostatics", "contour_fractions",
                          [](RunConfig& c, const std::string& v) { c.electrostatics.contour_fractions = parse_list(v); },
                          [](const RunConfig& c) -> std::optional<std::string> { return format_list(c.electrostatics.contour_fractions); }});
        // [phonons]
        f.push_back(quantity("phonons", "cutoff_kT", D::Dimensionless, [](RunConfig& c) -> double& { return c.surface.cutoff_kT; }));
        f.push_back(quantity("phonons", "max_cutoff_kT", D::Dimensionless, [](RunConfig& c) -> double& { return c.surface.max_cutoff_kT; }));
        f.push_back(quantity("phonons", "tail_tolerance", D::Dimensionless, [](RunConfig& c) -> double& { return c.surface.tail_tolerance; }));
        f.push_back(integer("phonons", "top_k", [](RunConfig& c) -> int& { return c.surface.top_k; }));
        f.push_back(quantity("phonons", "bulk_cutoff_kT", D::Dimensionless, [](RunConfig& c) -> double& { return c.bulk.cutoff_kT; }));
        f.push_back(integer("phonons", "n_theta", [](RunConfig& c) -> int& { return c.bulk.grid.n_theta; }));
        f.push_back(integer("phonons", "n_phi", [](RunConfig& c) -> int& { return c.bulk.grid.n_phi; }));
        f.push_back(quantity("phonons", "refine", D::Dimensionless, [](RunConfig& c) -> double& { return c.bulk.grid.refine; }));
        f.push_back(quantity("phonons", "prune_tolerance", D::Dimensionless, [](RunConfig& c) -> double& { return c.bulk.prune_tolerance; }));
        f.push_back(boolean("phonons", "check_convergence", [](RunConfig& c) -> bool& { return c.bulk.check_convergence; }));
        f.push_back(quantity("phonons", "convergence_tolerance", D::Dimensionless, [](RunConfig& c) -> double& { return c.bulk.convergence_tolerance; }));
        f.push_back(integer("phonons", "max_doublings", [](RunConfig& c) -> int& { return c.bulk.max_doublings; }));
        return f;
    }();
    return table;
}

// ---------------------------------------------------------------------------
// Parse / serialize / hash
// ---------------------------------------------------------------------------

inline RunConfig parse(std::istream& is, const std::string& source = "<config>")
{
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(source + ": " + e.what());
    }
    RunConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError(source + ": key '" + section + "' outside any section");
        for (const auto& [key, value] : body) {
            const Field* field = nullptr;
            for (const auto& f : fields())
                if (f.section == section && f.key == key)
                    field = &f;
            if (!field)
                throw ConfigError(source + ": unknown key [" + section + "] " + key);
            try {
                field->parse(cfg, value.data());
            } catch (const ConfigError& e) {
                throw ConfigError(source + ": [" + section + "] " + key + ": " + e.what());
            }
        }
    }
    cfg.validate();
    return cfg;
}

inline RunConfig parse_string(const std::string& text)
{
    std::istringstream is(text);
    return parse(is);
}

inline RunConfig load(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot open config file '" + path + "'");
    return parse(is, path);
}

/// Canonical INI text: every set key, fixed order, %.17g numbers.
inline std::string serialize(const RunConfig& cfg)
{
    std::string out;
    std::string current;
    for (const auto& f : fields()) {
        const auto value = f.format(cfg);
        if (!value)
            continue;
        if (f.section != current) {
            out += (current.empty() ? "" : "\n") + std::string("[") + f.section + "]\n";
            current = f.section;
        }
        out += f.key + " = " + *value + "\n";
    }
    return out;
}

inline std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw NumericalError("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

inline std::string config_hash(const RunConfig& cfg) { return sha256_hex(serialize(cfg)); }

} // namespace nvstirap::config
