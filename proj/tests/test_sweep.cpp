#include "nvstirap/sweep.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace nvstirap;
using namespace nvstirap::sweep;

namespace {

SweepInputs surface_inputs(int n = 6)
{
    SweepInputs in;
    in.design = Design::Surface;
    in.grid = GridSpec::for_design(Design::Surface);
    in.grid.n_w = in.grid.n_L = n;
    in.threads = 1;
    return in;
}

Cell valid_cell(double w, double L, double ratio, double gap_ratio = 1e6)
{
    Cell c;
    c.w = w;
    c.L = L;
    c.ratio = ratio;
    c.gap_ratio = gap_ratio;
    c.valid = true;
    return c;
}

FeasibilityMap map_of(std::vector<double> w, std::vector<double> L, std::vector<Cell> cells)
{
    FeasibilityMap m;
    m.w_axis = std::move(w);
    m.L_axis = std::move(L);
    m.cells = std::move(cells);
    return m;
}

} // namespace

TEST(Grid, AxesAndValidation)
{
    const auto lin = axis(1.0, 3.0, 3, false);
    EXPECT_EQ(lin, (std::vector<double>{1.0, 2.0, 3.0}));
    const auto lg = axis(1.0, 100.0, 3, true);
    EXPECT_NEAR(lg[1], 10.0, 1e-12);
    EXPECT_DOUBLE_EQ(lg[2], 100.0);
    EXPECT_EQ(axis(2.0, 5.0, 1, true), std::vector<double>{2.0});

    auto g = GridSpec::for_design(Design::Electrostatic);
    EXPECT_DOUBLE_EQ(g.w_min, 0.2e-6);
    EXPECT_DOUBLE_EQ(g.L_max, 1.5e-6);
    g.w_max = 3e-6;
    EXPECT_THROW(g.validate(), ConfigError);
    g = GridSpec{};
    g.n_w = 0;
    EXPECT_THROW(g.validate(), ConfigError);
    g = GridSpec{};
    g.w_min = 0.5e-6;
    g.w_max = 0.1e-6;
    EXPECT_THROW(g.validate(), ConfigError);
}

TEST(Map, InvalidCellsAreMarked)
{
    const auto map = build_map(surface_inputs());
    ASSERT_EQ(map.cells.size(), 36u);
    int valid = 0;
    for (const auto& c : map.cells) {
        const bool expect_valid = c.w <= c.L && c.L > 250e-9;
        EXPECT_EQ(c.valid, expect_valid) << c.w << ' ' << c.L << ' ' << c.error;
        if (c.valid) {
            ++valid;
            EXPECT_GT(c.Omega, 0.0);
            EXPECT_NEAR(c.ratio, c.Omega / c.Gamma_total, 1e-12 * c.ratio);
            EXPECT_NEAR(c.Gamma_total, c.Gamma_cap + c.Gamma_SE + c.Gamma_ep,
                        1e-12 * c.Gamma_total);
            EXPECT_NEAR(c.s, c.L - 200e-9, 1e-18);
        }
    }
    EXPECT_GT(valid, 0);
    EXPECT_TRUE(flagged_cells(map).empty());
}

TEST(Map, CellMatchesDirectEvaluation)
{
    const auto in = surface_inputs();
    const auto map = build_map(in);
    for (const auto& c : map.cells) {
        if (!c.valid)
            continue;
        const Cell d =
            evaluate_cell(in, WireGeometry::with_end_inset(c.w, c.L, 100e-9, Design::Surface));
        EXPECT_EQ(c.ratio, d.ratio);
        EXPECT_EQ(c.gap_ratio, d.gap_ratio);
    }
}

TEST(Map, SacrificialLayerDefaultFollowsDesign)
{
    auto in = surface_inputs();
    const auto g = WireGeometry::with_end_inset(0.1e-6, 0.5e-6, 100e-9, Design::Surface);
    const double bare = evaluate_cell(in, g).Gamma_cap;
    in.sacrificial_layer = false;
    EXPECT_EQ(evaluate_cell(in, g).Gamma_cap, bare);
    EXPECT_GT(bare, 0.0);
}

TEST(Map, OutputIndependentOfThreadCount)
{
    auto in = surface_inputs(8);
    std::ostringstream a, b;
    write_csv(build_map(in), a);
    in.threads = 4;
    write_csv(build_map(in), b);
    EXPECT_EQ(a.str(), b.str());
}

TEST(Optimum, SingleValidCell)
{
    Cell invalid;
    const auto m = map_of({1e-7, 2e-7}, {5e-7}, {valid_cell(1e-7, 5e-7, 3.0), invalid});
    const auto r = find_optimum(m);
    EXPECT_DOUBLE_EQ(r.best_w, 1e-7);
    EXPECT_DOUBLE_EQ(r.best_ratio, 3.0);
    EXPECT_TRUE(r.feasible_region.empty());
}

TEST(Optimum, TiesPreferSmallerWidthThenLength)
{
    const auto m = map_of({1e-7, 2e-7}, {4e-7, 5e-7},
                          {valid_cell(2e-7, 4e-7, 20.0), valid_cell(1e-7, 5e-7, 20.0),
                           valid_cell(1e-7, 4e-7, 20.0), valid_cell(2e-7, 5e-7, 5.0)});
    const auto r = find_optimum(m);
    EXPECT_DOUBLE_EQ(r.best_w, 1e-7);
    EXPECT_DOUBLE_EQ(r.best_L, 4e-7);
    EXPECT_EQ(r.feasible_region.size(), 3u);
}

TEST(Optimum, EmptyMapThrows)
{
    Cell invalid;
    const auto m = map_of({1e-7}, {5e-7}, {invalid});
    EXPECT_THROW(find_optimum(m), NumericalError);
    const auto h = check_hierarchy(m);
    EXPECT_TRUE(h.violations.empty());
    EXPECT_FALSE(h.strongly_satisfied);
    EXPECT_EQ(h.min_gap_ratio, 0.0);
}

TEST(Hierarchy, FlagsALongWireWithStrongDrive)
{
    SweepInputs in = surface_inputs();
    in.pump.P *= 100;
    in.stokes.P *= 100;
    const auto g = WireGeometry::with_end_inset(0.05e-6, 5e-6, 100e-9, Design::Surface);
    const Cell c = evaluate_cell(in, g);
    EXPECT_LE(c.gap_ratio, 1e3);
    const auto m = map_of({g.w}, {g.L}, {c});
    const auto h = check_hierarchy(m);
    ASSERT_EQ(h.violations.size(), 1u);
    EXPECT_FALSE(h.strongly_satisfied);
}

TEST(Hierarchy, StrongSatisfaction)
{
    const auto m = map_of({1e-7, 2e-7}, {5e-7},
                          {valid_cell(1e-7, 5e-7, 1.0, 2e4), valid_cell(2e-7, 5e-7, 1.0, 1.5e4)});
    const auto h = check_hierarchy(m);
    EXPECT_TRUE(h.violations.empty());
    EXPECT_TRUE(h.strongly_satisfied);
    EXPECT_DOUBLE_EQ(h.min_gap_ratio, 1.5e4);
}

TEST(Component, LargestConnectedRegion)
{
    // 3 x 3, ratio > 10 at an L-shape of 3 cells and a lone corner
    std::vector<double> ax{1e-7, 2e-7, 3e-7};
    std::vector<Cell> cells;
    const double r[3][3] = {{20, 20, 1}, {20, 1, 1}, {1, 1, 20}};
    for (int iL = 0; iL < 3; ++iL)
        for (int iw = 0; iw < 3; ++iw)
            cells.push_back(valid_cell(ax[iw], ax[iL], r[iL][iw]));
    const auto m = map_of(ax, ax, cells);
    EXPECT_EQ(largest_feasible_component(m, 10.0, 1.0, 1.0).size(), 3u);
    EXPECT_EQ(largest_feasible_component(m, 10.0, 1.5e-7, 1.0).size(), 2u);
    EXPECT_TRUE(largest_feasible_component(m, 100.0, 1.0, 1.0).empty());
}

TEST(Map, PhononResonancesShowUp)
{
    auto in = surface_inputs(40);
    in.threads = 0;
    const auto map = build_map(in);
    bool dip = false;
    for (std::size_t iL = 0; iL < map.L_axis.size() && !dip; ++iL) {
        std::vector<double> row;
        for (std::size_t iw = 0; iw < map.w_axis.size(); ++iw)
            if (map.at(int(iL), int(iw)).valid)
                row.push_back(map.at(int(iL), int(iw)).Gamma_ep);
        if (row.size() < 5)
            continue;
        auto sorted = row;
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
        const double median = sorted[sorted.size() / 2];
        dip = std::any_of(row.begin(), row.end(), [&](double v) { return v > 10.0 * median; });
    }
    EXPECT_TRUE(dip);
}

TEST(Output, CsvSchema)
{
    const auto map = build_map(surface_inputs(3));
    std::ostringstream os;
    write_csv(map, os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, csv_header);
    const auto columns = std::count(line.begin(), line.end(), ',');
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), columns);
        EXPECT_EQ(line.rfind("surface,", 0), 0u);
    }
    EXPECT_EQ(rows, 9);
}

TEST(Output, JsonSchemaAndMatrix)
{
    const auto map = build_map(surface_inputs(4));
    const auto opt = to_json(find_optimum(map));
    for (const char* k : {"best_w_m", "best_L_m", "best_ratio", "feasible_region"})
        EXPECT_TRUE(opt.contains(k)) << k;
    const auto h = to_json(check_hierarchy(map));
    for (const char* k : {"threshold", "min_gap_ratio", "strongly_satisfied", "violations"})
        EXPECT_TRUE(h.contains(k)) << k;
    const auto cj = cell_json(map.cells.back());
    EXPECT_EQ(cj.size(), 10u);

    std::ostringstream os;
    write_matrix(map, os);
    std::istringstream is(os.str());
    std::string line;
    int lines = 0;
    while (std::getline(is, line))
        ++lines;
    EXPECT_EQ(lines, 5);
    EXPECT_EQ(format_number(0.1), "0.1");
}
