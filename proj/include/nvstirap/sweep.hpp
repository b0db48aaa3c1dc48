#pragma once

// Feasibility maps over wire width and length: Rabi frequency against the
// total decoherence rate, and the level gap against the Rabi frequency.

#include "nvstirap/capture.hpp"
#include "nvstirap/core.hpp"
#include "nvstirap/emt.hpp"
#include "nvstirap/optics.hpp"
#include "nvstirap/phonons.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace nvstirap::sweep {

struct GridSpec {
    double w_min = 0.05e-6;
    double w_max = 0.8e-6;
    double L_min = 0.05e-6;
    double L_max = 0.8e-6;
    int n_w = 40;
    int n_L = 40;
    bool log_spaced = true;
    double end_inset = 100e-9; ///< NV distance from each wire end
    double min_L = 250e-9;     ///< cells with L <= min_L are invalid

    static GridSpec for_design(Design d)
    {
        GridSpec g;
        if (d == Design::Electrostatic) {
            g.w_min = g.L_min = 0.2e-6;
            g.w_max = g.L_max = 1.5e-6;
        }
        return g;
    }

    void validate() const
    {
        for (double v : {w_min, w_max, L_min, L_max})
            if (!(v >= 0.05e-6 * (1 - 1e-12) && v <= 2.0e-6 * (1 + 1e-12)))
                throw ConfigError("sweep axes must lie within [0.05, 2.0] um");
        if (!(w_max >= w_min) || !(L_max >= L_min))
            throw ConfigError("sweep axis bounds must be increasing");
        if (n_w < 1 || n_L < 1)
            throw ConfigError("sweep needs at least one cell per axis");
        if (!(end_inset > 0.0))
            throw ConfigError("NV end inset must be positive");
    }
};

inline std::vector<double> axis(double lo, double hi, int n, bool log_spaced)
{
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : double(i) / (n - 1);
        out[i] = log_spaced ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo);
    }
    return out;
}

struct SweepInputs {
    Design design = Design::Surface;
    GridSpec grid{};
    EnvironmentParams env{};
    optics::LaserParams pump{};
    optics::LaserParams stokes{};
    double omega_transition = 0.0; ///< 0 selects the default 2.6 eV line
    PhysicalConstants constants{};
    phonons::SurfaceRateOptions surface{};
    phonons::BulkRateOptions bulk{};
    int threads = 0; ///< 0: hardware concurrency
    /// Unset: the sacrificial layer is present exactly for the electrostatic design.
    std::optional<bool> sacrificial_layer;
};

struct Cell {
    double w = 0.0;
    double L = 0.0;
    double s = 0.0;
    double Omega = 0.0;
    double Gamma_cap = 0.0;
    double Gamma_SE = 0.0;
    double Gamma_ep = 0.0;
    double Gamma_total = 0.0;
    double ratio = 0.0;
    double gap_ratio = 0.0;
    bool valid = false;
    std::string error; ///< non-empty when the cell computation failed
};

/// Cells are stored row-major with L as the row index.
struct FeasibilityMap {
    Design design = Design::Surface;
    std::vector<double> w_axis;
    std::vector<double> L_axis;
    std::vector<Cell> cells;

    [[nodiscard]] const Cell& at(int iL, int iw) const
    {
        return cells[std::size_t(iL) * w_axis.size() + std::size_t(iw)];
    }
    [[nodiscard]] Cell& at(int iL, int iw)
    {
        return cells[std::size_t(iL) * w_axis.size() + std::size_t(iw)];
    }
};

/// Evaluates one wire. Throws on invalid geometry or numerical failure.
inline Cell evaluate_cell(const SweepInputs& in, const WireGeometry& g)
{
    g.validate();
    const auto& c = in.constants;
    Cell cell;
    cell.w = g.w;
    cell.L = g.L;
    cell.s = g.s;
    cell.Omega = optics::rabi_effective(g, in.pump, in.stokes, c);
    const double omega_line =
        in.omega_transition > 0.0 ? in.omega_transition : optics::default_transition_frequency(c);
    cell.Gamma_SE = optics::spontaneous_emission(g, omega_line, c);
    const bool sacrificial = in.sacrificial_layer.value_or(g.design == Design::Electrostatic);
    cell.Gamma_cap = capture::apply_sacrificial_layer(
        capture::capture_rate(capture::CaptureModel::from(in.env, c), c), sacrificial, g.design);
    if (g.design == Design::Surface)
        cell.Gamma_ep = phonons::surface_ep_rate(g, in.env, c, in.surface).total;
    else
        cell.Gamma_ep = phonons::bulk_ep_rate(g, in.env, c, in.bulk).total;
    cell.Gamma_total = cell.Gamma_cap + cell.Gamma_SE + cell.Gamma_ep;
    cell.ratio = cell.Omega / cell.Gamma_total;
    // Level difference rather than delta_Ec(): identical value, without the
    // L >> w warning that a square grid would trigger on every short cell.
    const double gap = emt::valley_energy({1, 1, 2}, emt::ValleyGroup::Perpendicular, g, c) -
                       emt::valley_energy({1, 1, 1}, emt::ValleyGroup::Perpendicular, g, c);
    cell.gap_ratio = gap / (c.hbar * cell.Omega);
    cell.valid = true;
    return cell;
}

inline int resolve_threads(int requested)
{
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Builds the map; per-cell failures are recorded in Cell::error and never
/// abort the sweep. Cells are independent and each is written by exactly one
/// worker, so output does not depend on the thread count.
inline FeasibilityMap build_map(const SweepInputs& in)
{
    in.grid.validate();
    in.env.validate();
    in.pump.validate();
    in.stokes.validate();
    in.constants.validate();

    FeasibilityMap map;
    map.design = in.design;
    map.w_axis = axis(in.grid.w_min, in.grid.w_max, in.grid.n_w, in.grid.log_spaced);
    map.L_axis = axis(in.grid.L_min, in.grid.L_max, in.grid.n_L, in.grid.log_spaced);
    map.cells.resize(map.w_axis.size() * map.L_axis.size());

    const int n_w = int(map.w_axis.size());
    const std::size_t total = map.cells.size();
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < total; k = next++) {
            const int iL = int(k / std::size_t(n_w));
            const int iw = int(k % std::size_t(n_w));
            const double w = map.w_axis[iw];
            const double L = map.L_axis[iL];
            Cell& cell = map.cells[k];
            cell.w = w;
            cell.L = L;
            cell.s = L - 2.0 * in.grid.end_inset;
            if (w > L || L <= in.grid.min_L || !(cell.s > 0.0))
                continue;
            try {
                cell = evaluate_cell(in, WireGeometry::with_end_inset(w, L, in.grid.end_inset,
                                                                      in.design));
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
        }
    };
    const int n_threads = std::min<int>(resolve_threads(in.threads), int(total));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    return map;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct HierarchyReport {
    double threshold = 1e3;
    std::vector<Cell> violations;   ///< valid cells with gap_ratio <= threshold
    double min_gap_ratio = 0.0;     ///< over valid cells; 0 for an empty map
    bool strongly_satisfied = false; ///< every valid cell exceeds 10x threshold
};

inline HierarchyReport check_hierarchy(const FeasibilityMap& map, double threshold = 1e3)
{
    HierarchyReport r;
    r.threshold = threshold;
    bool any = false;
    for (const auto& c : map.cells) {
        if (!c.valid)
            continue;
        r.min_gap_ratio = any ? std::min(r.min_gap_ratio, c.gap_ratio) : c.gap_ratio;
        any = true;
        if (!(c.gap_ratio > threshold))
            r.violations.push_back(c);
    }
    r.strongly_satisfied = any && r.min_gap_ratio > 10.0 * threshold;
    return r;
}

struct OptimumReport {
    double best_w = 0.0;
    double best_L = 0.0;
    double best_ratio = 0.0;
    std::vector<Cell> feasible_region; ///< ratio > 10 and gap_ratio > 10
};

/// Argmax of the ratio over valid cells; ties go to smaller w, then smaller L.
inline OptimumReport find_optimum(const FeasibilityMap& map)
{
    const Cell* best = nullptr;
    OptimumReport r;
    for (const auto& c : map.cells) {
        if (!c.valid)
            continue;
        if (c.ratio > 10.0 && c.gap_ratio > 10.0)
            r.feasible_region.push_back(c);
        if (!best || c.ratio > best->ratio ||
            (c.ratio == best->ratio && (c.w < best->w || (c.w == best->w && c.L < best->L))))
            best = &c;
    }
    if (!best)
        throw NumericalError("feasibility map has no valid cells");
    r.best_w = best->w;
    r.best_L = best->L;
    r.best_ratio = best->ratio;
    return r;
}

/// Cells of the largest 4-connected component with ratio > threshold whose
/// cells all satisfy w < w_max and L < L_max.
inline std::vector<Cell> largest_feasible_component(const FeasibilityMap& map, double threshold,
                                                    double w_max, double L_max)
{
    const int n_w = int(map.w_axis.size());
    const int n_L = int(map.L_axis.size());
    auto inside = [&](int iL, int iw) {
        const auto& c = map.at(iL, iw);
        return c.valid && c.ratio > threshold && c.w < w_max && c.L < L_max;
    };
    std::vector<char> seen(map.cells.size(), 0);
    std::vector<Cell> best;
    for (int iL = 0; iL < n_L; ++iL)
        for (int iw = 0; iw < n_w; ++iw) {
            if (seen[std::size_t(iL) * n_w + iw] || !inside(iL, iw))
                continue;
            std::vector<Cell> comp;
            std::vector<std::pair<int, int>> stack{{iL, iw}};
            seen[std::size_t(iL) * n_w + iw] = 1;
            while (!stack.empty()) {
                const auto [a, b] = stack.back();
                stack.pop_back();
                comp.push_back(map.at(a, b));
                const int nb[4][2] = {{a - 1, b}, {a + 1, b}, {a, b - 1}, {a, b + 1}};
                for (const auto& n : nb) {
                    if (n[0] < 0 || n[0] >= n_L || n[1] < 0 || n[1] >= n_w)
                        continue;
                    auto& flag = seen[std::size_t(n[0]) * n_w + n[1]];
                    if (!flag && inside(n[0], n[1])) {
                        flag = 1;
                        stack.push_back({n[0], n[1]});
                    }
                }
            }
            if (comp.size() > best.size())
                best = std::move(comp);
        }
    return best;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline constexpr const char* csv_header =
    "design,w_m,L_m,s_m,omega_rad_s,gamma_cap,gamma_se,gamma_ep,gamma_total,ratio,gap_ratio,valid";

/// One row per cell. Invalid cells keep their coordinates and leave the
/// numeric fields empty.
inline void write_csv(const FeasibilityMap& map, std::ostream& os)
{
    os << csv_header << '\n';
    for (const auto& c : map.cells) {
        os << to_string(map.design) << ',' << format_number(c.w) << ',' << format_number(c.L)
           << ',' << format_number(c.s);
        if (c.valid) {
            for (double v : {c.Omega, c.Gamma_cap, c.Gamma_SE, c.Gamma_ep, c.Gamma_total,
                             c.ratio, c.gap_ratio})
                os << ',' << format_number(v);
            os << ",1\n";
        } else {
            os << ",,,,,,,,0\n";
        }
    }
}

inline nlohmann::json cell_json(const Cell& c)
{
    return {{"w_m", c.w},
            {"L_m", c.L},
            {"s_m", c.s},
            {"omega_rad_s", c.Omega},
            {"gamma_cap", c.Gamma_cap},
            {"gamma_se", c.Gamma_SE},
            {"gamma_ep", c.Gamma_ep},
            {"gamma_total", c.Gamma_total},
            {"ratio", c.ratio},
            {"gap_ratio", c.gap_ratio}};
}

inline nlohmann::json to_json(const OptimumReport& r)
{
    nlohmann::json region = nlohmann::json::array();
    for (const auto& c : r.feasible_region)
        region.push_back({{"w_m", c.w}, {"L_m", c.L}, {"ratio", c.ratio}});
    return {{"best_w_m", r.best_w},
            {"best_L_m", r.best_L},
            {"best_ratio", r.best_ratio},
            {"feasible_region", region}};
}

inline nlohmann::json to_json(const HierarchyReport& r)
{
    nlohmann::json v = nlohmann::json::array();
    for (const auto& c : r.violations)
        v.push_back({{"w_m", c.w}, {"L_m", c.L}, {"gap_ratio", c.gap_ratio}});
    return {{"threshold", r.threshold},
            {"min_gap_ratio", r.min_gap_ratio},
            {"strongly_satisfied", r.strongly_satisfied},
            {"violations", v}};
}

/// Density-plot matrix for gnuplot `matrix nonuniform`: first row is the w
/// axis, first column the L axis; invalid cells are NaN.
inline void write_matrix(const FeasibilityMap& map, std::ostream& os)
{
    os << map.w_axis.size();
    for (double w : map.w_axis)
        os << ' ' << format_number(w);
    os << '\n';
    for (std::size_t iL = 0; iL < map.L_axis.size(); ++iL) {
        os << format_number(map.L_axis[iL]);
        for (std::size_t iw = 0; iw < map.w_axis.size(); ++iw) {
            const auto& c = map.at(int(iL), int(iw));
            os << ' ' << (c.valid ? format_number(c.ratio) : std::string("nan"));
        }
        os << '\n';
    }
}

/// Failed cells, for diagnostics.
inline std::vector<Cell> flagged_cells(const FeasibilityMap& map)
{
    std::vector<Cell> out;
    for (const auto& c : map.cells)
        if (!c.error.empty())
            out.push_back(c);
    return out;
}

} // namespace nvstirap::sweep
