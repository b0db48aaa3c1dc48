#include "nvstirap/emt.hpp"
#include "nvstirap/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nvstirap;
using namespace nvstirap::emt;

namespace {

const PhysicalConstants C = default_constants();

WireGeometry wire(double w, double L) { return WireGeometry{w, L, 0.5 * L}; }

} // namespace

TEST(Envelope, PointValues)
{
    const auto g = wire(0.2e-6, 0.6e-6);
    const EnvelopeFunction F111({1, 1, 1}, g, C);
    const double peak = std::sqrt(8.0 * C.V_c / (g.w * g.w * g.L));
    EXPECT_NEAR(envelope_value(F111, {g.w / 2, g.w / 2, g.L / 2}), peak, 1e-12 * peak);
    EXPECT_EQ(envelope_value(F111, {0.0, g.w / 2, g.L / 2}), 0.0);
    EXPECT_NEAR(envelope_value(F111, {g.w / 2, g.w, g.L / 3}), 0.0, 1e-12 * peak);
    EXPECT_EQ(envelope_value(F111, {-1e-9, g.w / 2, g.L / 2}), 0.0);
    const EnvelopeFunction F211({2, 1, 1}, g, C);
    EXPECT_NEAR(envelope_value(F211, {g.w / 2, g.w / 2, g.L / 2}), 0.0, 1e-12 * peak);
    EXPECT_THROW(EnvelopeFunction({0, 1, 1}, g, C), ConfigError);
}

// The envelope is separable, so the 3-D integral is a product of 1-D
// Gauss-Legendre integrals of the sampled envelope itself.
TEST(Envelope, OrthonormalityByQuadrature)
{
    const auto g = wire(0.15e-6, 0.45e-6);
    const auto qx = quadrature::gauss_legendre(40, 0.0, g.w);
    const auto qz = quadrature::gauss_legendre(40, 0.0, g.L);
    auto overlap = [&](const Triple& a, const Triple& b) {
        const EnvelopeFunction Fa(a, g, C), Fb(b, g, C);
        double sum = 0.0;
        for (std::size_t i = 0; i < qx.nodes.size(); ++i)
            for (std::size_t j = 0; j < qx.nodes.size(); ++j)
                for (std::size_t k = 0; k < qz.nodes.size(); ++k) {
                    const Vec3 r{qx.nodes[i], qx.nodes[j], qz.nodes[k]};
                    sum += qx.weights[i] * qx.weights[j] * qz.weights[k] *
                           envelope_value(Fa, r) * envelope_value(Fb, r);
                }
        return sum / C.V_c;
    };
    for (int ax = 1; ax <= 3; ++ax)
        for (int az = 1; az <= 3; ++az) {
            const Triple a{ax, 1, az};
            EXPECT_NEAR(overlap(a, a), 1.0, 1e-6);
            for (int bx = 1; bx <= 3; ++bx)
                for (int bz = 1; bz <= 3; ++bz) {
                    const Triple b{bx, 2, bz};
                    EXPECT_NEAR(overlap(a, b), 0.0, 1e-6);
                }
        }
    EXPECT_NEAR(overlap({3, 3, 3}, {3, 3, 3}), 1.0, 1e-6);
    EXPECT_NEAR(overlap({3, 3, 3}, {3, 3, 2}), 0.0, 1e-6);
}

TEST(ValleyEnergy, ScalarOracle)
{
    const auto g = wire(0.1e-6, 1.0e-6);
    const double hb = 1.054571817e-34, me = 9.1093837015e-31;
    const double mpar = 1.56 * me, mperp = 0.28 * me, w = 0.1e-6, L = 1.0e-6;
    const double expect = hb * hb * M_PI * M_PI / 2.0 *
                          (1.0 / (mpar * w * w) + 1.0 / (mperp * w * w) + 1.0 / (mperp * L * L));
    EXPECT_NEAR(valley_energy({1, 1, 1}, ValleyGroup::Perpendicular, g, C) / expect, 1.0, 1e-12);
}

TEST(ValleyEnergy, SymmetryAndScaling)
{
    // For a cube and n = (1,1,1) both groups see one heavy and two light
    // axes, so the energies coincide.
    const auto sq = wire(0.5e-6, 0.5e-6);
    EXPECT_NEAR(valley_energy({1, 1, 1}, ValleyGroup::Perpendicular, sq, C) /
                    valley_energy({1, 1, 1}, ValleyGroup::Parallel, sq, C),
                1.0, 1e-12);

    const auto g1 = wire(0.1e-6, 0.5e-6);
    const auto g2 = wire(0.1e-6, 1.0e-6);
    const double dz1 = valley_energy({1, 1, 2}, ValleyGroup::Perpendicular, g1, C) -
                       valley_energy({1, 1, 1}, ValleyGroup::Perpendicular, g1, C);
    const double dz2 = valley_energy({1, 1, 2}, ValleyGroup::Perpendicular, g2, C) -
                       valley_energy({1, 1, 1}, ValleyGroup::Perpendicular, g2, C);
    EXPECT_NEAR(dz1 / dz2, 4.0, 1e-12);
}

TEST(ValleyEnergy, SingleValleyRelabelling)
{
    const auto g = wire(0.1e-6, 0.4e-6);
    EXPECT_EQ(valley_energy_single({2, 1, 1}, 3, g, C),
              valley_energy({2, 1, 1}, ValleyGroup::Perpendicular, g, C));
    EXPECT_EQ(valley_energy_single({2, 1, 1}, 5, g, C),
              valley_energy({1, 2, 1}, ValleyGroup::Perpendicular, g, C));
    EXPECT_EQ(valley_energy_single({1, 1, 1}, 2, g, C),
              valley_energy({1, 1, 1}, ValleyGroup::Parallel, g, C));
    EXPECT_THROW(valley_energy_single({1, 1, 1}, 7, g, C), ConfigError);
}

TEST(ValleyEnergy, UnsupportedAxis)
{
    auto g = wire(0.1e-6, 0.4e-6);
    g.axis = CrystalAxis::Dir111;
    EXPECT_THROW(valley_energy({1, 1, 1}, ValleyGroup::Parallel, g, C), ConfigError);
}

TEST(ValleyEnergy, TwoFoldAboveFourFoldForLongWires)
{
    for (double w : {0.05e-6, 0.1e-6, 0.3e-6})
        for (double ratio : {3.0, 5.0, 10.0}) {
            const auto g = wire(w, ratio * w);
            double min_par = 1e300, min_perp = 1e300;
            for (int a = 1; a <= 3; ++a)
                for (int b = 1; b <= 3; ++b)
                    for (int c = 1; c <= 3; ++c) {
                        min_par = std::min(min_par,
                                           valley_energy({a, b, c}, ValleyGroup::Parallel, g, C));
                        min_perp = std::min(
                            min_perp, valley_energy({a, b, c}, ValleyGroup::Perpendicular, g, C));
                    }
            EXPECT_GT(min_par, min_perp);
            EXPECT_GT(min_perp, 0.0);
        }
}

TEST(DeltaEc, IdentityAndOracle)
{
    const auto g = wire(0.1e-6, 1.0e-6);
    const double gap = delta_Ec(g, C);
    const double diff = valley_energy({1, 1, 2}, ValleyGroup::Perpendicular, g, C) -
                        valley_energy({1, 1, 1}, ValleyGroup::Perpendicular, g, C);
    EXPECT_EQ(gap, diff);
    const double hb = 1.054571817e-34, me = 9.1093837015e-31;
    const double oracle = 3.0 * hb * hb * M_PI * M_PI / (2.0 * 0.28 * me * 1e-12);
    EXPECT_NEAR(gap / oracle, 1.0, 1e-12);
    EXPECT_NEAR(gap / C.hbar, 6.1e9, 0.05e9);
    EXPECT_NEAR(delta_Ec(wire(0.1e-6, 2.0e-6), C) / gap, 0.25, 1e-12);
}

TEST(DeltaEc, WarnsForStubbyWires)
{
    int warnings = 0;
    ScopedWarningSink sink([&](std::string_view) { ++warnings; });
    (void)delta_Ec(wire(0.5e-6, 1.0e-6), C);
    EXPECT_EQ(warnings, 1);
    (void)delta_Ec(wire(0.1e-6, 1.0e-6), C);
    EXPECT_EQ(warnings, 1);
}

TEST(SymmetryBasis, Orthonormal)
{
    const auto par = symmetry_basis(ValleyGroup::Parallel);
    Eigen::MatrixXd expect(2, 2);
    expect << 1, 1, -1, 1;
    expect /= std::sqrt(2.0);
    EXPECT_LT((par.coefficients - expect).norm(), 1e-15);
    for (auto group : {ValleyGroup::Parallel, ValleyGroup::Perpendicular}) {
        const auto b = symmetry_basis(group);
        const auto n = b.coefficients.rows();
        EXPECT_LT((b.coefficients * b.coefficients.transpose() -
                   Eigen::MatrixXd::Identity(n, n))
                      .norm(),
                  1e-15);
        for (Eigen::Index i = 0; i < n; ++i)
            EXPECT_NEAR(b.coefficients.row(i).squaredNorm(), 1.0, 1e-15);
    }
    const auto perp = symmetry_basis(ValleyGroup::Perpendicular);
    EXPECT_EQ(perp.labels[0], Symmetry::A1g_2);
    EXPECT_EQ(perp.labels[1], Symmetry::B1g);
    EXPECT_EQ(perp.labels[2], Symmetry::Eu_1);
    EXPECT_EQ(perp.labels[3], Symmetry::Eu_2);
    EXPECT_DOUBLE_EQ(perp.coefficients(2, 2), -1.0 / std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(perp.coefficients(3, 1), 1.0 / std::sqrt(2.0));
}

TEST(Stark, Detuning)
{
    EXPECT_EQ(stark_detuning(wire(0.1e-6, 0.6e-6), 0.0, C), 0.0);
    WireGeometry half{0.1e-6, 0.6e-6, 0.3e-6};
    EXPECT_NEAR(stark_detuning(half, 1.0, C) / si::eV, 0.5, 1e-15);
    WireGeometry g{0.1e-6, 0.6e-6, 0.4e-6};
    EXPECT_NEAR(stark_detuning(g, 0.01, C), C.e_charge * 0.01 * 2.0 / 3.0, 1e-33);
}

TEST(Stark, SelectionRulesExhaustive)
{
    int true_pairs = 0;
    for (auto a : all_symmetry_labels)
        for (auto b : all_symmetry_labels) {
            const bool expect = (a == Symmetry::A2u && (b == Symmetry::A1g_1 || b == Symmetry::A1g_2)) ||
                                (b == Symmetry::A2u && (a == Symmetry::A1g_1 || a == Symmetry::A1g_2));
            EXPECT_EQ(stark_couples(a, b), expect) << to_string(a) << "," << to_string(b);
            EXPECT_EQ(stark_couples(a, b), stark_couples(b, a));
            true_pairs += stark_couples(a, b);
        }
    EXPECT_EQ(true_pairs, 4);
    EXPECT_TRUE(stark_couples(Symmetry::A2u, Symmetry::A1g_1));
    EXPECT_FALSE(stark_couples(Symmetry::Eu_1, Symmetry::Eu_2));
    EXPECT_FALSE(stark_couples(Symmetry::B1g, Symmetry::B1g));
    EXPECT_THROW(stark_couples(Symmetry::SingleValley, Symmetry::A2u), ConfigError);
}

TEST(LevelTable, SortedAndDegenerate)
{
    const auto t = level_table(wire(0.1e-6, 0.5e-6), C, 2);
    ASSERT_EQ(t.size(), 8u * 6u);
    for (std::size_t i = 1; i < t.size(); ++i)
        EXPECT_LE(t[i - 1].energy, t[i].energy);
    EXPECT_EQ(t[0].n, (Triple{1, 1, 1}));
    EXPECT_EQ(t[0].valley_group, ValleyGroup::Perpendicular);
    EXPECT_EQ(t[0].energy, t[3].energy);
}
