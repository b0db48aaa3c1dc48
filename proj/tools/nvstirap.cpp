// Command-line front end. Each subcommand reads an INI config, applies the
// command-line overrides and writes plot-ready CSV or JSON, either to stdout
// or into --out DIR together with a manifest.json.

#include "nvstirap/capture.hpp"
#include "nvstirap/config.hpp"
#include "nvstirap/electrostatics.hpp"
#include "nvstirap/emt.hpp"
#include "nvstirap/optics.hpp"
#include "nvstirap/phonons.hpp"
#include "nvstirap/spinorbit.hpp"
#include "nvstirap/stirap.hpp"
#include "nvstirap/sweep.hpp"
#include "nvstirap/units.hpp"
#include "nvstirap/version.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nvstirap;

namespace {

struct Common {
    std::string config_path;
    std::string w, L, T, design;
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 42;
    int threads = -1;
};

struct Output {
    std::string name;
    std::string content;
};

void add_common(CLI::App* sub, Common& o)
{
    sub->add_option("--config", o.config_path, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option("--w", o.w, "wire width override, e.g. 100nm");
    sub->add_option("--L", o.L, "wire length override, e.g. 0.3um");
    sub->add_option("--T", o.T, "temperature override, e.g. 4K");
    sub->add_option("--design", o.design, "surface or electrostatic");
    sub->add_option("--out", o.out, "output directory (default: stdout)");
    sub->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--threads", o.threads, "worker threads (0: all cores)")
        ->check(CLI::NonNegativeNumber);
}

config::RunConfig resolve(const Common& o)
{
    config::RunConfig cfg = o.config_path.empty() ? config::RunConfig{} : config::load(o.config_path);
    using units::Dimension;
    if (!o.w.empty())
        cfg.w = units::parse_quantity(o.w, Dimension::Length);
    if (!o.L.empty())
        cfg.L = units::parse_quantity(o.L, Dimension::Length);
    if (!o.T.empty())
        cfg.env.T = units::parse_quantity(o.T, Dimension::Temperature);
    if (!o.design.empty())
        cfg.design = config::parse_design(o.design);
    if (o.threads >= 0)
        cfg.sweep.threads = o.threads;
    cfg.validate();
    return cfg;
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void emit(const Common& o, const config::RunConfig& cfg, const std::string& subcommand,
          const std::vector<Output>& outputs)
{
    if (o.out.empty()) {
        for (std::size_t i = 0; i < outputs.size(); ++i) {
            if (i)
                std::cout << '\n';
            std::cout << outputs[i].content;
        }
        std::cout.flush();
        return;
    }
    fs::create_directories(o.out);
    json files = json::array();
    for (const auto& f : outputs) {
        std::ofstream os(fs::path(o.out) / f.name, std::ios::binary);
        os << f.content;
        if (!os)
            throw std::runtime_error("cannot write " + (fs::path(o.out) / f.name).string());
        files.push_back(f.name);
    }
    const json manifest{{"config_hash", config::config_hash(cfg)},
                        {"tool_version", version},
                        {"timestamp", utc_timestamp()},
                        {"subcommand", subcommand},
                        {"seed", o.seed},
                        {"outputs", files}};
    std::ofstream(fs::path(o.out) / "manifest.json") << manifest.dump(2) << '\n';
}

std::string csv_line(std::initializer_list<std::string> cells)
{
    std::string s;
    for (const auto& c : cells) {
        if (!s.empty())
            s += ',';
        s += c;
    }
    return s + '\n';
}

std::string num(double v) { return sweep::format_number(v); }

std::string dump(const json& j) { return j.dump(2) + '\n'; }

// ---------------------------------------------------------------------------

void run_band(const Common& o, int n_max)
{
    const auto cfg = resolve(o);
    const auto g = cfg.geometry();
    const auto table = emt::level_table(g, cfg.constants, n_max);
    const double ueV = 1e-6 * si::eV;
    std::string out;
    if (o.format == "json") {
        json rows = json::array();
        for (const auto& s : table)
            rows.push_back({{"n", {s.n.x, s.n.y, s.n.z}},
                            {"group", emt::to_string(s.valley_group)},
                            {"symmetry", emt::to_string(s.symmetry)},
                            {"energy_ueV", s.energy / ueV}});
        out = dump(rows);
    } else {
        out = "nx,ny,nz,group,symmetry,energy_ueV\n";
        for (const auto& s : table)
            out += csv_line({std::to_string(s.n.x), std::to_string(s.n.y), std::to_string(s.n.z),
                             emt::to_string(s.valley_group), emt::to_string(s.symmetry),
                             num(s.energy / ueV)});
    }
    emit(o, cfg, "band", {{"band." + o.format, out}});
}

void run_rabi(const Common& o)
{
    const auto cfg = resolve(o);
    const auto g = cfg.geometry();
    const auto k = optics::compute_coupling(g, cfg.pump, cfg.stokes(),
                                            cfg.transition_energy / cfg.constants.hbar,
                                            cfg.constants);
    std::string out;
    if (o.format == "json") {
        out = dump({{"w_m", g.w}, {"L_m", g.L}, {"s_m", g.s}, {"F0", k.F0},
                    {"d_wire_Cm", k.d_wire}, {"omega_rad_s", k.Omega},
                    {"gamma_se", k.Gamma_SE}});
    } else {
        out = "w_m,L_m,s_m,F0,d_wire_Cm,omega_rad_s,gamma_se\n" +
              csv_line({num(g.w), num(g.L), num(g.s), num(k.F0), num(k.d_wire), num(k.Omega),
                        num(k.Gamma_SE)});
    }
    emit(o, cfg, "rabi", {{"rabi." + o.format, out}});
}

struct Rates {
    double ep = 0.0, cap = 0.0, se = 0.0;
    [[nodiscard]] double total() const { return ep + cap + se; }
    std::vector<phonons::ScatteringChannel> channels;
};

Rates compute_rates(const config::RunConfig& cfg, int top_k)
{
    const auto g = cfg.geometry();
    const auto& c = cfg.constants;
    Rates r;
    r.se = optics::spontaneous_emission(g, cfg.transition_energy / c.hbar, c);
    r.cap = capture::apply_sacrificial_layer(
        capture::capture_rate(capture::CaptureModel::from(cfg.env, c), c),
        cfg.sacrificial_layer(g.design), g.design);
    if (g.design == Design::Surface) {
        auto opt = cfg.surface;
        opt.top_k = std::max(opt.top_k, top_k);
        auto s = phonons::surface_ep_rate(g, cfg.env, c, opt);
        r.ep = s.total;
        s.channels.resize(std::min<std::size_t>(s.channels.size(), std::size_t(top_k)));
        r.channels = std::move(s.channels);
    } else {
        if (top_k > 0)
            throw ConfigError("--channels is only available for the surface design");
        r.ep = phonons::bulk_ep_rate(g, cfg.env, c, cfg.bulk).total;
    }
    return r;
}

void run_rates(const Common& o, int top_k)
{
    const auto cfg = resolve(o);
    const auto g = cfg.geometry();
    const auto r = compute_rates(cfg, top_k);
    std::vector<Output> outputs;
    if (o.format == "json") {
        json j{{"design", to_string(g.design)}, {"w_m", g.w},       {"L_m", g.L},
               {"gamma_ep", r.ep},              {"gamma_cap", r.cap}, {"gamma_se", r.se},
               {"gamma_total", r.total()}};
        if (top_k > 0) {
            json ch = json::array();
            for (const auto& s : r.channels)
                ch.push_back({{"n_final", {s.n_final.x, s.n_final.y, s.n_final.z}},
                              {"mode", {s.m.x, s.m.y, s.m.z}},
                              {"omega_m", s.omega_m},
                              {"omega_n", s.omega_n},
                              {"overlap_sq", s.overlap_sq},
                              {"rate", s.rate_contribution}});
            j["channels"] = ch;
        }
        outputs.push_back({"rates.json", dump(j)});
    } else {
        outputs.push_back({"rates.csv", "design,w_m,L_m,gamma_ep,gamma_cap,gamma_se,gamma_total\n" +
                                            csv_line({to_string(g.design), num(g.w), num(g.L),
                                                      num(r.ep), num(r.cap), num(r.se),
                                                      num(r.total())})});
        if (top_k > 0) {
            std::string ch = "nx,ny,nz,mx,my,mz,omega_m_rad_s,omega_n_rad_s,overlap_sq,rate\n";
            for (const auto& s : r.channels)
                ch += csv_line({std::to_string(s.n_final.x), std::to_string(s.n_final.y),
                                std::to_string(s.n_final.z), std::to_string(s.m.x),
                                std::to_string(s.m.y), std::to_string(s.m.z), num(s.omega_m),
                                num(s.omega_n), num(s.overlap_sq), num(s.rate_contribution)});
            outputs.push_back({"channels.csv", ch});
        }
    }
    emit(o, cfg, "rates", outputs);
}

void run_stirap(const Common& o, std::optional<double> omega_tau)
{
    auto cfg = resolve(o);
    if (omega_tau)
        cfg.pulses.Omega_tau = *omega_tau;
    const auto g = cfg.geometry();
    const double Omega = optics::rabi_effective(g, cfg.pump, cfg.stokes(), cfg.constants);
    const double Gamma = compute_rates(cfg, 0).total();
    const auto& p = cfg.pulses;
    auto schedule = p.sigma_t ? stirap::PulseSchedule::symmetric(Omega, *p.sigma_t,
                                                                 p.delay_ratio * *p.sigma_t)
                              : stirap::PulseSchedule::from_adiabaticity(Omega, p.Omega_tau,
                                                                         p.delay_ratio);
    schedule.detuning_single = p.detuning_single;
    schedule.detuning_two_photon = p.detuning_two_photon;
    stirap::IntegratorOptions opt;
    opt.samples = p.samples;
    opt.rtol = p.rtol;
    opt.atol = p.atol;
    const auto r = stirap::evolve(schedule, Gamma, p.loss_split, opt);

    const json summary{{"fidelity", r.fidelity},
                       {"max_P2", r.max_P2},
                       {"adiabaticity", r.adiabaticity},
                       {"transport_time_s", stirap::transport_time(schedule)},
                       {"omega_rad_s", Omega},
                       {"gamma_total", Gamma},
                       {"max_trace_error", r.max_trace_error}};
    std::string series;
    if (o.format == "json") {
        json rows = json::array();
        for (std::size_t i = 0; i < r.times.size(); ++i) {
            const auto& q = r.populations[i];
            rows.push_back({r.times[i], q[0], q[1], q[2], q[3]});
        }
        series = dump({{"columns", {"t_s", "P1", "P2", "P3", "P_lost"}}, {"rows", rows}});
    } else {
        series = "t_s,P1,P2,P3,P_lost\n";
        for (std::size_t i = 0; i < r.times.size(); ++i) {
            const auto& q = r.populations[i];
            series += csv_line({num(r.times[i]), num(q[0]), num(q[1]), num(q[2]), num(q[3])});
        }
    }
    emit(o, cfg, "stirap", {{"stirap." + o.format, series}, {"stirap_summary.json", dump(summary)}});
}

void run_sweep(const Common& o)
{
    const auto cfg = resolve(o);
    const auto in = cfg.sweep_inputs(cfg.design);
    const auto map = sweep::build_map(in);
    for (const auto& c : sweep::flagged_cells(map))
        warn("cell w = " + num(c.w) + " m, L = " + num(c.L) + " m failed: " + c.error);
    const auto hierarchy = sweep::check_hierarchy(map);
    std::vector<Output> outputs;
    std::optional<sweep::OptimumReport> optimum;
    try {
        optimum = sweep::find_optimum(map);
    } catch (const NumericalError& e) {
        warn(e.what());
    }
    if (o.format == "json") {
        json cells = json::array();
        for (const auto& c : map.cells) {
            auto j = sweep::cell_json(c);
            j["valid"] = c.valid;
            cells.push_back(j);
        }
        outputs.push_back({"sweep.json", dump({{"design", to_string(map.design)}, {"cells", cells}})});
    } else {
        std::ostringstream os;
        sweep::write_csv(map, os);
        outputs.push_back({"sweep.csv", os.str()});
    }
    if (!o.out.empty()) {
        std::ostringstream m;
        sweep::write_matrix(map, m);
        outputs.push_back({"ratio_matrix.dat", m.str()});
        outputs.push_back({"hierarchy.json", dump(sweep::to_json(hierarchy))});
        if (optimum)
            outputs.push_back({"optimum.json", dump(sweep::to_json(*optimum))});
    }
    emit(o, cfg, "sweep", outputs);
}

void run_electrostatics(const Common& o, std::vector<double> levels)
{
    const auto cfg = resolve(o);
    const auto& es = cfg.electrostatics;
    const auto f = electrostatics::solve_potential(es.setup, es.solver);
    if (levels.empty())
        levels = es.contour_fractions;
    const double V = es.setup.V_applied;

    std::string grid = "r_m,z_m,phi_V\n";
    for (int i = 0; i <= f.n_r; ++i)
        for (int j = 0; j <= f.n_z; ++j)
            grid += csv_line({num(f.r(i)), num(f.z(j)), num(f.at(i, j))});

    std::string contours = "level_fraction,line,r_m,z_m\n";
    json lines_json = json::array();
    for (double frac : levels) {
        if (!(frac > 0.0 && frac < 1.0))
            throw ConfigError("contour levels are fractions in (0, 1)");
        const auto lines = electrostatics::equipotentials(f, frac * V);
        for (std::size_t k = 0; k < lines.size(); ++k) {
            json pts = json::array();
            for (const auto& p : lines[k]) {
                contours += csv_line({num(frac), std::to_string(k), num(p.r), num(p.z)});
                pts.push_back({p.r, p.z});
            }
            lines_json.push_back({{"level_fraction", frac}, {"points", pts}});
        }
    }
    const json summary{{"effective_wire_length_m", electrostatics::effective_wire_length(f, es.fraction)},
                       {"fraction", es.fraction},
                       {"iterations", f.iterations},
                       {"residual_V", f.residual},
                       {"omega", f.omega},
                       {"maximum_principle", electrostatics::satisfies_maximum_principle(f)}};
    if (o.format == "json") {
        json phi = json::array();
        for (int i = 0; i <= f.n_r; ++i) {
            json row = json::array();
            for (int j = 0; j <= f.n_z; ++j)
                row.push_back(f.at(i, j));
            phi.push_back(row);
        }
        emit(o, cfg, "electrostatics",
             {{"electrostatics.json",
               dump({{"summary", summary},
                     {"dr_m", f.dr},
                     {"dz_m", f.dz},
                     {"phi", phi},
                     {"equipotentials", lines_json}})}});
    } else {
        emit(o, cfg, "electrostatics",
             {{"potential.csv", grid},
              {"equipotentials.csv", contours},
              {"electrostatics_summary.json", dump(summary)}});
    }
}

void run_spin_check(const Common& o, int instances)
{
    const auto cfg = resolve(o);
    const auto r = spinorbit::spin_check(o.seed, instances);
    std::string out;
    if (o.format == "json")
        out = dump({{"seed", o.seed},
                    {"instances", r.instances},
                    {"max_relative_commutator", r.max_relative_commutator},
                    {"max_anti_hermiticity", r.max_anti_hermiticity}});
    else
        out = "seed,instances,max_relative_commutator,max_anti_hermiticity\n" +
              csv_line({std::to_string(o.seed), std::to_string(r.instances),
                        num(r.max_relative_commutator), num(r.max_anti_hermiticity)});
    emit(o, cfg, "spin-check", {{"spin_check." + o.format, out}});
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Optical electron transport between NV centres: rates, maps and dynamics"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    Common o;
    int n_max = 3;
    int channels = 0;
    double omega_tau = 0.0;
    int instances = 100;
    std::vector<double> levels;

    auto* band = app.add_subcommand("band", "conduction-band level table");
    add_common(band, o);
    band->add_option("--n-max", n_max, "largest envelope index")->check(CLI::Range(1, 12));

    auto* rabi = app.add_subcommand("rabi", "dipole, Rabi frequency and spontaneous emission");
    add_common(rabi, o);

    auto* rates = app.add_subcommand("rates", "decoherence rates of the conduction state");
    add_common(rates, o);
    rates->add_option("--channels", channels, "dump the top-k phonon channels")
        ->check(CLI::NonNegativeNumber);

    auto* st = app.add_subcommand("stirap", "population dynamics of the transfer");
    add_common(st, o);
    st->add_option("--omega-tau", omega_tau, "adiabaticity Omega * tau")
        ->check(CLI::PositiveNumber);

    auto* sw = app.add_subcommand("sweep", "feasibility map over w and L");
    add_common(sw, o);

    auto* es = app.add_subcommand("electrostatics", "potential of the surface electrode");
    add_common(es, o);
    es->add_option("--levels", levels, "equipotential levels as fractions of V")
        ->delimiter(',');

    auto* sc = app.add_subcommand("spin-check", "spin quantization check on random instances");
    add_common(sc, o);
    sc->add_option("--instances", instances, "number of random instances")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (*band)
            run_band(o, n_max);
        else if (*rabi)
            run_rabi(o);
        else if (*rates)
            run_rates(o, channels);
        else if (*st)
            run_stirap(o, omega_tau > 0.0 ? std::optional<double>(omega_tau) : std::nullopt);
        else if (*sw)
            run_sweep(o);
        else if (*es)
            run_electrostatics(o, levels);
        else if (*sc)
            run_spin_check(o, instances);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
