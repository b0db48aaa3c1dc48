#pragma once

// Three-level Lambda dynamics of the transport protocol. |1> and |3> are the
// electron on NV A and NV B, |2> the conduction band minimum. Decoherence is
// a loss channel from |2> into an absorbing sink plus optional pure dephasing
// of |2>.

#include "nvstirap/core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace nvstirap::stirap {

using cplx = std::complex<double>;
using Matrix3 = Eigen::Matrix3cd;

struct PulseSchedule {
    double Omega0_P = 0.0;  ///< peak pump Rabi frequency, rad/s
    double Omega0_S = 0.0;  ///< peak Stokes Rabi frequency, rad/s
    double sigma_t = 0.0;   ///< Gaussian width, s
    double t_delay = 0.0;   ///< separation of the two pulse centres, s
    double t_start = 0.0;
    double t_end = 0.0;
    double detuning_single = 0.0;     ///< Delta on |2>, rad/s
    double detuning_two_photon = 0.0; ///< delta on |3>, rad/s
    bool counter_intuitive = true;    ///< Stokes before pump

    void validate() const
    {
        if (!(sigma_t > 0.0))
            throw ConfigError("pulse width must be positive");
        if (!(t_delay > 0.0))
            throw ConfigError("pulse delay must be positive");
        if (!(t_delay < 6.0 * sigma_t))
            throw ConfigError("pulses must overlap: delay < 6 sigma");
        if (!(Omega0_P >= 0.0) || !(Omega0_S >= 0.0))
            throw ConfigError("peak Rabi frequencies must be non-negative");
        if (!(t_end > t_start))
            throw ConfigError("time span must be increasing");
    }

    [[nodiscard]] double t_pump() const
    {
        return counter_intuitive ? 0.5 * t_delay : -0.5 * t_delay;
    }
    [[nodiscard]] double t_stokes() const { return -t_pump(); }

    /// Equal pump and Stokes amplitudes chosen so that the effective Rabi
    /// frequency is Omega; the span covers both pulses out to 3 sigma.
    static PulseSchedule symmetric(double Omega, double sigma_t, double t_delay,
                                   bool counter_intuitive = true)
    {
        PulseSchedule p;
        p.Omega0_P = Omega / std::sqrt(2.0);
        p.Omega0_S = p.Omega0_P;
        p.sigma_t = sigma_t;
        p.t_delay = t_delay;
        p.t_start = -0.5 * t_delay - 3.0 * sigma_t;
        p.t_end = 0.5 * t_delay + 3.0 * sigma_t;
        p.counter_intuitive = counter_intuitive;
        return p;
    }

    /// Schedule with a target Omega * tau, tau = sigma_t, and the default
    /// delay of 1.2 sigma_t.
    static PulseSchedule from_adiabaticity(double Omega, double Omega_tau,
                                           double delay_ratio = 1.2)
    {
        if (!(Omega > 0.0) || !(Omega_tau > 0.0))
            throw ConfigError("Omega and Omega*tau must be positive");
        const double sigma = Omega_tau / Omega;
        return symmetric(Omega, sigma, delay_ratio * sigma);
    }
};

inline double effective_rabi(const PulseSchedule& p)
{
    return std::hypot(p.Omega0_P, p.Omega0_S);
}

/// Omega * tau, with Omega the peak effective Rabi frequency and tau the
/// pulse width sigma_t.
inline double adiabaticity(const PulseSchedule& p) { return effective_rabi(p) * p.sigma_t; }

/// Protocol duration: pulse separation plus 3 sigma on either side.
inline double transport_time(const PulseSchedule& p) { return p.t_delay + 6.0 * p.sigma_t; }

inline double gaussian(double t, double centre, double sigma)
{
    const double x = (t - centre) / sigma;
    return std::exp(-0.5 * x * x);
}

inline std::pair<double, double> envelopes(double t, const PulseSchedule& p)
{
    return {p.Omega0_P * gaussian(t, p.t_pump(), p.sigma_t),
            p.Omega0_S * gaussian(t, p.t_stokes(), p.sigma_t)};
}

/// Rotating-frame Hamiltonian divided by hbar (rad/s).
inline Matrix3 hamiltonian_at(double t, const PulseSchedule& p)
{
    const auto [OP, OS] = envelopes(t, p);
    Matrix3 H = Matrix3::Zero();
    H(0, 1) = H(1, 0) = 0.5 * OP;
    H(1, 2) = H(2, 1) = 0.5 * OS;
    H(1, 1) = p.detuning_single;
    H(2, 2) = p.detuning_two_photon;
    return H;
}

// ---------------------------------------------------------------------------
// Master equation
// ---------------------------------------------------------------------------

/// Density matrix (18 reals, row-major re/im) plus the sink population.
using State = Eigen::Matrix<double, 19, 1>;

inline State pack(const Matrix3& rho, double lost)
{
    State y;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            y(2 * (3 * i + j)) = rho(i, j).real();
            y(2 * (3 * i + j) + 1) = rho(i, j).imag();
        }
    y(18) = lost;
    return y;
}

inline Matrix3 unpack(const State& y)
{
    Matrix3 rho;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            rho(i, j) = cplx(y(2 * (3 * i + j)), y(2 * (3 * i + j) + 1));
    return rho;
}

struct Decoherence {
    double loss = 0.0;    ///< rate of |2> -> sink, 1/s
    double dephasing = 0.0; ///< rate in the dephasing operator sqrt(rate) |2><2|

    static Decoherence split(double Gamma, double loss_split)
    {
        if (!(Gamma >= 0.0))
            throw ConfigError("decoherence rate must be non-negative");
        if (!(loss_split >= 0.0 && loss_split <= 1.0))
            throw ConfigError("loss split must lie in [0, 1]");
        return {loss_split * Gamma, (1.0 - loss_split) * Gamma};
    }
};

/// Right-hand side of the Lindblad equation with the |2> sink.
struct MasterEquation {
    PulseSchedule schedule;
    Decoherence rates;

    void operator()(const State& y, State& dydt, double t) const
    {
        const Matrix3 rho = unpack(y);
        const Matrix3 H = hamiltonian_at(t, schedule);
        Matrix3 drho = cplx(0.0, -1.0) * (H * rho - rho * H);
        // Loss: -(k/2){P2, rho}; dephasing: g (P2 rho P2 - {P2, rho}/2).
        const double k = rates.loss;
        const double g = rates.dephasing;
        for (int j = 0; j < 3; ++j) {
            drho(1, j) -= 0.5 * (k + g) * rho(1, j);
            drho(j, 1) -= 0.5 * (k + g) * rho(j, 1);
        }
        drho(1, 1) += g * rho(1, 1);
        dydt = pack(drho, k * rho(1, 1).real());
    }
};

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with step-size control
// ---------------------------------------------------------------------------

struct IntegratorOptions {
    double rtol = 1e-9;
    double atol = 1e-11;
    int max_steps = 5'000'000;
    int samples = 401; ///< output samples across the time span

    void validate() const
    {
        if (!(rtol > 0.0) || !(atol > 0.0))
            throw ConfigError("integrator tolerances must be positive");
        if (samples < 2)
            throw ConfigError("need at least two output samples");
        if (max_steps < 1)
            throw ConfigError("max_steps must be positive");
    }
};

struct IntegrationStats {
    long accepted = 0;
    long rejected = 0;
};

/// Integrates y from t0 to t1 in place.
template <class Rhs>
void dopri5(const Rhs& f, State& y, double t0, double t1, double& h,
            const IntegratorOptions& opt, IntegrationStats& stats)
{
    // clang-format off
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // clang-format on

    double t = t0;
    State k1, k2, k3, k4, k5, k6, k7, y_new, err;
    f(y, k1, t);
    while (t < t1) {
        if (stats.accepted + stats.rejected >= opt.max_steps)
            throw NumericalError("integrator exceeded " + std::to_string(opt.max_steps) +
                                 " steps at t = " + std::to_string(t));
        const double remaining = t1 - t;
        if (remaining <= 1e-12 * (t1 - t0)) {
            t = t1; // rounding residue of the previous step
            break;
        }
        // stretch the final step instead of leaving a sliver
        const bool last = 1.1 * h >= remaining;
        const double step = last ? remaining : h;
        if (step < 1e-14 * std::max(std::abs(t), std::abs(t1 - t0)))
            throw NumericalError("integrator step underflow at t = " + std::to_string(t) +
                                 ", h = " + std::to_string(step));

        f(y + step * a21 * k1, k2, t + c2 * step);
        f(y + step * (a31 * k1 + a32 * k2), k3, t + c3 * step);
        f(y + step * (a41 * k1 + a42 * k2 + a43 * k3), k4, t + c4 * step);
        f(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5, t + c5 * step);
        f(y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6, t + step);
        y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        f(y_new, k7, t + step);
        err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double norm = 0.0;
        for (int i = 0; i < State::RowsAtCompileTime; ++i) {
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(y_new(i)));
            norm = std::max(norm, std::abs(err(i)) / sc);
        }
        if (!std::isfinite(norm))
            throw NumericalError("integrator produced a non-finite state at t = " +
                                 std::to_string(t));
        if (norm <= 1.0) {
            t = last ? t1 : t + step;
            y = y_new;
            k1 = k7;
            ++stats.accepted;
        } else {
            ++stats.rejected;
        }
        const double factor =
            norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
        if (!(last && norm <= 1.0))
            h = step * factor;
    }
}

struct TransportResult {
    std::vector<double> times;
    std::vector<std::array<double, 4>> populations; ///< P1, P2, P3, P_lost
    double fidelity = 0.0;
    double max_P2 = 0.0;
    double adiabaticity = 0.0;
    double max_trace_error = 0.0;
    IntegrationStats stats;
};

/// Integrates the master equation from |1> over the schedule's time span.
/// Gamma is split into loss (loss_split) and dephasing (the remainder).
inline TransportResult evolve(const PulseSchedule& schedule, double Gamma,
                              double loss_split = 1.0, const IntegratorOptions& opt = {})
{
    schedule.validate();
    opt.validate();
    const double Ot = adiabaticity(schedule);
    if (Ot < 1.0)
        warn("Omega*tau = " + std::to_string(Ot) + " < 1: transfer will not be adiabatic");

    const MasterEquation rhs{schedule, Decoherence::split(Gamma, loss_split)};
    Matrix3 rho0 = Matrix3::Zero();
    rho0(0, 0) = 1.0;
    State y = pack(rho0, 0.0);

    TransportResult out;
    out.adiabaticity = Ot;
    const double span = schedule.t_end - schedule.t_start;
    double h = span * 1e-4;
    auto record = [&](double t) {
        const Matrix3 rho = unpack(y);
        const std::array<double, 4> p{rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real(),
                                      y(18)};
        out.times.push_back(t);
        out.populations.push_back(p);
        out.max_P2 = std::max(out.max_P2, p[1]);
        out.max_trace_error =
            std::max(out.max_trace_error, std::abs(p[0] + p[1] + p[2] + p[3] - 1.0));
    };
    record(schedule.t_start);
    for (int i = 1; i < opt.samples; ++i) {
        const double t0 = schedule.t_start + span * (i - 1) / (opt.samples - 1);
        const double t1 = i + 1 == opt.samples ? schedule.t_end
                                               : schedule.t_start + span * i / (opt.samples - 1);
        dopri5(rhs, y, t0, t1, h, opt, out.stats);
        record(t1);
    }
    out.fidelity = out.populations.back()[2];
    return out;
}

} // namespace nvstirap::stirap
