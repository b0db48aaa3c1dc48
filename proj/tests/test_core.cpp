#include "nvstirap/config.hpp"
#include "nvstirap/core.hpp"
#include "nvstirap/units.hpp"

#include <gtest/gtest.h>

#include <array>
#include <filesystem>
#include <string>
#include <vector>

using namespace nvstirap;

TEST(Constants, DefaultsArePositiveAndPinned)
{
    const auto c = default_constants();
    EXPECT_NO_THROW(c.validate());
    EXPECT_DOUBLE_EQ(c.S_hr, 1.39);
    EXPECT_NEAR(c.Xi_d, 8.7 * 1.602176634e-19, 1e-30);
    EXPECT_NEAR(c.d_bulk / (0.085 * 1.602176634e-19 * 1e-10), 1.0, 1e-3);
    EXPECT_NEAR(c.V_sc / 2.837e-27, 1.0, 1e-3);
    EXPECT_NEAR(c.m_par / c.m_e, 1.56, 1e-12);
    EXPECT_NEAR(c.m_perp / c.m_e, 0.28, 1e-12);
    EXPECT_NEAR(c.atom_density, 1.76e29, 1e15);
}

TEST(Constants, DipoleConversionValue)
{
    // 0.085 e * 1 angstrom in C m
    EXPECT_NEAR(default_constants().d_bulk, 1.3618e-30, 1e-33);
}

TEST(Constants, RejectsNonPositive)
{
    auto c = default_constants();
    c.c_l = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = default_constants();
    c.m_perp = -1.0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Constants, MassMeanSwitch)
{
    auto c = default_constants();
    EXPECT_NEAR(c.m_star() / c.m_e, (1.56 + 2 * 0.28) / 3.0, 1e-12);
    c.mass_mean = MassMean::Geometric;
    EXPECT_NEAR(c.m_star() / c.m_e, std::cbrt(1.56 * 0.28 * 0.28), 1e-12);
}

TEST(Ppb, Examples)
{
    const auto c = default_constants();
    EXPECT_EQ(ppb_to_density(0.0, c), 0.0);
    EXPECT_NEAR(ppb_to_density(1.0, c), 1.76e20, 1e6);
    EXPECT_NEAR(ppb_to_density(1e9, c), c.atom_density, 1e14);
    EXPECT_THROW(ppb_to_density(-1.0, c), ConfigError);
}

TEST(Geometry, Invariants)
{
    EXPECT_NO_THROW((WireGeometry{0.1e-6, 0.3e-6, 0.1e-6}.validate()));
    EXPECT_THROW((WireGeometry{2e-6, 1e-6, 0.5e-6}.validate()), ConfigError);
    EXPECT_THROW((WireGeometry{0.1e-6, 1e-6, 1e-6}.validate()), ConfigError);
    EXPECT_THROW((WireGeometry{0.1e-6, 1e-6, 0.0}.validate()), ConfigError);
    EXPECT_THROW((WireGeometry{0.0, 1e-6, 0.5e-6}.validate()), ConfigError);
    const auto g = WireGeometry::with_end_inset(0.2e-6, 0.6e-6, 100e-9);
    EXPECT_NEAR(g.s, 0.4e-6, 1e-18);
    EXPECT_NEAR(g.z_A(), 0.1e-6, 1e-18);
    EXPECT_NEAR(g.z_B(), 0.5e-6, 1e-18);
}

TEST(Environment, Invariants)
{
    EnvironmentParams env;
    EXPECT_NO_THROW(env.validate());
    env.T = 0.0;
    EXPECT_THROW(env.validate(), ConfigError);
    env = {};
    env.Q = 0.5;
    EXPECT_THROW(env.validate(), ConfigError);
    env = {};
    env.sigma_cap = 25e-18;
    EXPECT_THROW(env.validate(), ConfigError);

    env = {};
    env.sigma_cap = 10e-18;
    std::vector<std::string> seen;
    ScopedWarningSink sink([&](std::string_view m) { seen.emplace_back(m); });
    env.validate();
    EXPECT_EQ(seen.size(), 1u);
}

TEST(BoseEinstein, Limits)
{
    const auto c = default_constants();
    EXPECT_EQ(bose_einstein(1e12, 0.0, c), 0.0);
    EXPECT_EQ(bose_einstein(1e16, 4.0, c), 0.0);
    const double omega = 1e9;
    EXPECT_NEAR(bose_einstein(omega, 4.0, c), c.k_B * 4.0 / (c.hbar * omega) - 0.5, 1e-3);
}

TEST(Units, Suffixes)
{
    using units::Dimension;
    using units::parse_quantity;
    EXPECT_DOUBLE_EQ(parse_quantity("2.0um", Dimension::Length), 2e-6);
    EXPECT_DOUBLE_EQ(parse_quantity(" 150 nm ", Dimension::Length), 150e-9);
    EXPECT_DOUBLE_EQ(parse_quantity("100mW", Dimension::Power), 0.1);
    EXPECT_DOUBLE_EQ(parse_quantity("4K", Dimension::Temperature), 4.0);
    EXPECT_DOUBLE_EQ(parse_quantity("1ppb", Dimension::Dimensionless), 1.0);
    EXPECT_DOUBLE_EQ(parse_quantity("5nm2", Dimension::Area), 5e-18);
    EXPECT_DOUBLE_EQ(parse_quantity("10meV", Dimension::Energy), 10e-3 * si::eV);
    EXPECT_DOUBLE_EQ(parse_quantity("8.7eV", Dimension::Energy), 8.7 * si::eV);
    EXPECT_DOUBLE_EQ(parse_quantity("1.56me", Dimension::Mass), 1.56 * si::m_e);
    EXPECT_DOUBLE_EQ(parse_quantity("3e-7", Dimension::Length), 3e-7);
    EXPECT_DOUBLE_EQ(parse_quantity("50ns", Dimension::Time), 50e-9);
}

TEST(Units, Rejections)
{
    using units::Dimension;
    using units::parse_quantity;
    EXPECT_THROW(parse_quantity("2.0um", Dimension::Power), ConfigError);
    EXPECT_THROW(parse_quantity("abc", Dimension::Length), ConfigError);
    EXPECT_THROW(parse_quantity("", Dimension::Length), ConfigError);
    EXPECT_THROW(parse_quantity("1.0 furlong", Dimension::Length), ConfigError);
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

TEST(Config, EmptyGivesDefaults)
{
    const auto cfg = config::parse_string("");
    EXPECT_DOUBLE_EQ(cfg.constants.S_hr, 1.39);
    EXPECT_DOUBLE_EQ(cfg.env.T, 4.0);
    EXPECT_EQ(cfg.design, Design::Surface);
    EXPECT_EQ(cfg.pulses.Omega_tau, 100.0);
}

TEST(Config, ParsesUnitsAndSections)
{
    const auto cfg = config::parse_string(R"(
; comment
[geometry]
w = 150nm
L = 0.5um
design = electrostatic
# another comment
[environment]
T = 10K
rho_Nplus = 2ppb
sacrificial_layer = off
[constants]
mass_mean = geometric
[electrostatics]
contour_fractions = 0.2, 0.4
)");
    EXPECT_DOUBLE_EQ(cfg.w, 150e-9);
    EXPECT_DOUBLE_EQ(cfg.L, 0.5e-6);
    EXPECT_EQ(cfg.design, Design::Electrostatic);
    EXPECT_DOUBLE_EQ(cfg.env.T, 10.0);
    EXPECT_DOUBLE_EQ(cfg.env.rho_Nplus_ppb, 2.0);
    EXPECT_FALSE(cfg.sacrificial_layer(Design::Electrostatic));
    EXPECT_EQ(cfg.constants.mass_mean, MassMean::Geometric);
    ASSERT_EQ(cfg.electrostatics.contour_fractions.size(), 2u);
    EXPECT_DOUBLE_EQ(cfg.electrostatics.contour_fractions[1], 0.4);
}

TEST(Config, UnknownKeysAndSectionsAreErrors)
{
    EXPECT_THROW(config::parse_string("[geometry]\nwidth = 1um\n"), ConfigError);
    EXPECT_THROW(config::parse_string("[nonsense]\nw = 1um\n"), ConfigError);
    EXPECT_THROW(config::parse_string("w = 1um\n"), ConfigError);
    EXPECT_THROW(config::parse_string("[geometry]\nw = 1um\nw = 2um\n"), ConfigError);
    EXPECT_THROW(config::parse_string("[geometry]\nw = 1kg\n"), ConfigError);
}

TEST(Config, GeometryInvariantRejected)
{
    EXPECT_THROW(config::parse_string("[geometry]\nw = 2um\nL = 1um\n"), ConfigError);
}

TEST(Config, SacrificialDefaultFollowsDesign)
{
    const auto cfg = config::parse_string("");
    EXPECT_TRUE(cfg.sacrificial_layer(Design::Electrostatic));
    EXPECT_FALSE(cfg.sacrificial_layer(Design::Surface));
    EXPECT_FALSE(cfg.sweep_inputs(Design::Surface).sacrificial_layer.has_value());
}

TEST(Config, RoundTripIsIdentity)
{
    const std::string text = R"(
[constants]
m_perp = 0.3me
c_l = 18000
mass_mean = geometric
[geometry]
w = 123.456nm
L = 0.777um
s = 0.5um
[environment]
T = 6.5K
sigma_cap = 4nm2
[laser]
P = 37mW
P_stokes = 20mW
[pulses]
sigma_t = 33ns
[sweep]
w_min = 0.06um
n_w = 7
log_spaced = false
[electrostatics]
n_r = 96
contour_fractions = 0.1,0.3
[phonons]
top_k = 3
check_convergence = false
)";
    const auto a = config::parse_string(text);
    const auto s1 = config::serialize(a);
    const auto b = config::parse_string(s1);
    const auto s2 = config::serialize(b);
    EXPECT_EQ(s1, s2);
    EXPECT_EQ(a.w, b.w);
    EXPECT_EQ(a.L, b.L);
    EXPECT_EQ(*a.s, *b.s);
    EXPECT_EQ(a.constants.m_perp, b.constants.m_perp);
    EXPECT_EQ(a.env.sigma_cap, b.env.sigma_cap);
    EXPECT_EQ(*a.pulses.sigma_t, *b.pulses.sigma_t);
    EXPECT_EQ(*a.P_stokes, *b.P_stokes);
    EXPECT_EQ(a.electrostatics.contour_fractions, b.electrostatics.contour_fractions);
    EXPECT_EQ(a.bulk.check_convergence, b.bulk.check_convergence);
    EXPECT_EQ(config::config_hash(a), config::config_hash(b));
}

TEST(Config, DefaultRoundTripCoversEveryField)
{
    const config::RunConfig def;
    const auto text = config::serialize(def);
    for (const auto& f : config::fields()) {
        if (f.format(def)) {
            EXPECT_NE(text.find(f.key + " = "), std::string::npos) << f.key;
        }
    }
    EXPECT_EQ(config::serialize(config::parse_string(text)), text);
}

TEST(Config, HashIsStableAndSensitive)
{
    const auto a = config::parse_string("[geometry]\nw = 100nm\n");
    const auto b = config::parse_string("[geometry]\nw = 1e-7\n");
    const auto c = config::parse_string("[geometry]\nw = 101nm\n");
    EXPECT_EQ(config::config_hash(a), config::config_hash(b));
    EXPECT_NE(config::config_hash(a), config::config_hash(c));
    EXPECT_EQ(config::config_hash(a).size(), 64u);
    EXPECT_EQ(config::sha256_hex("abc"),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

// ---------------------------------------------------------------------------
// Dimensional audit: exponents of (kg, m, s, A, K) carried through each rate
// formula must reduce to s^-1.
// ---------------------------------------------------------------------------

namespace {

struct Dim {
    std::array<int, 5> e{}; // kg, m, s, A, K
    Dim operator*(const Dim& o) const
    {
        Dim r;
        for (int i = 0; i < 5; ++i)
            r.e[i] = e[i] + o.e[i];
        return r;
    }
    Dim operator/(const Dim& o) const
    {
        Dim r;
        for (int i = 0; i < 5; ++i)
            r.e[i] = e[i] - o.e[i];
        return r;
    }
    Dim pow(int p) const
    {
        Dim r;
        for (int i = 0; i < 5; ++i)
            r.e[i] = e[i] * p;
        return r;
    }
    bool operator==(const Dim&) const = default;
};

constexpr Dim one{};
constexpr Dim kg{{1, 0, 0, 0, 0}};
constexpr Dim m{{0, 1, 0, 0, 0}};
constexpr Dim s{{0, 0, 1, 0, 0}};
constexpr Dim A{{0, 0, 0, 1, 0}};
constexpr Dim K{{0, 0, 0, 0, 1}};

const Dim J = kg * m.pow(2) / s.pow(2);
const Dim W = J / s;
const Dim C = A * s;
const Dim V = W / A;
const Dim per_s = one / s;

const Dim hbar = J * s;
const Dim k_B = J / K;
const Dim eps0 = C / (V * m);
const Dim c_light = m / s;
const Dim mass = kg;
const Dim Xi = J;
const Dim rho_C = kg / m.pow(3);
const Dim density = one / m.pow(3);
const Dim area = m.pow(2);
const Dim omega = per_s;
const Dim dipole = C * m;

} // namespace

TEST(DimensionalAudit, EveryRateIsPerSecond)
{
    // capture: n sigma sqrt(k_B T / m*)
    const Dim v2 = k_B * K / mass;
    ASSERT_EQ(v2.e[1] % 2, 0);
    const Dim v{{v2.e[0] / 2, v2.e[1] / 2, v2.e[2] / 2, v2.e[3] / 2, v2.e[4] / 2}};
    EXPECT_EQ(density * area * v, per_s);

    // field amplitude sqrt(P / (c eps0 r^2)) and Rabi frequency d E / hbar
    const Dim E2 = W / (c_light * eps0 * area);
    const Dim E{{E2.e[0] / 2, E2.e[1] / 2, E2.e[2] / 2, E2.e[3] / 2, E2.e[4] / 2}};
    EXPECT_EQ(E, V / m);
    EXPECT_EQ(dipole * E / hbar, per_s);

    // spontaneous emission: omega^3 d^2 / (eps0 hbar c^3)
    EXPECT_EQ(omega.pow(3) * dipole.pow(2) / (eps0 * hbar * c_light.pow(3)), per_s);

    // surface e-p: Xi^2 omega n_B / (hbar c_l^2 rho V) times a Lorentzian (s)
    const Dim lorentz = s;
    EXPECT_EQ(Xi.pow(2) * omega / (hbar * c_light.pow(2) * rho_C * m.pow(3)) * lorentz, per_s);

    // bulk e-p: Xi^2 / (hbar rho c_l^7) omega^5 times the solid-angle integral of G (m^2)
    EXPECT_EQ(Xi.pow(2) / (hbar * rho_C * c_light.pow(7)) * omega.pow(5) * area, per_s);

    // level gap over hbar compares with a Rabi frequency
    EXPECT_EQ(hbar.pow(2) / (mass * area) / hbar, per_s);
}

TEST(Units, DecimalPrefixesAreExact)
{
    using units::Dimension;
    EXPECT_EQ(units::parse_quantity("0.1um", Dimension::Length), 0.1e-6);
    EXPECT_EQ(units::parse_quantity("100nm", Dimension::Length), 1e-7);
    EXPECT_EQ(units::parse_quantity("3e2nm", Dimension::Length), 3e-7);
    EXPECT_EQ(units::parse_quantity("2.5mW", Dimension::Power), 2.5e-3);
    EXPECT_THROW(units::parse_quantity("1e0.5nm", Dimension::Length), ConfigError);
    EXPECT_THROW(units::parse_quantity("1x5nm", Dimension::Length), ConfigError);
}

TEST(Config, ShippedConfigsLoadAndRoundTrip)
{
    int n = 0;
    for (const auto& e : std::filesystem::directory_iterator(NVSTIRAP_CONFIG_DIR)) {
        if (e.path().extension() != ".ini")
            continue;
        ++n;
        const auto cfg = config::load(e.path().string());
        const auto text = config::serialize(cfg);
        EXPECT_EQ(config::serialize(config::parse_string(text)), text) << e.path();
    }
    EXPECT_GE(n, 3);
}
