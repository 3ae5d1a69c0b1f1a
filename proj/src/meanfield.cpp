#include "becnet/meanfield.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "becnet/errors.hpp"

namespace becnet {

namespace {

void rhs_into(const NetworkSpec& spec, double beta, double alpha, const SpinState& s,
              SpinState& out) {
    for (int i = 0; i < spec.M; ++i) {
        const double g = gamma_of_field(local_field(spec, s, i), beta);
        out[i] = alpha * (-spec.N * g * s[i] * s[i] - 2.0 * s[i] + g * (2.0 + spec.N));
    }
}

void check_in_band(const SpinState& s, double t, double dt) {
    for (double x : s) {
        if (std::isnan(x) || std::fabs(x) > 1.01) {
            std::ostringstream msg;
            msg << "integrate_ode: state left [-1.01, 1.01] at t=" << t
                << " (dt=" << dt << "; reduce dt)";
            throw NumericalError(msg.str());
        }
    }
}

TrajectoryMeta make_meta(const NetworkSpec& spec, const BetaSchedule& beta, double alpha,
                         std::uint64_t seed) {
    TrajectoryMeta meta;
    meta.M = spec.M;
    meta.N = spec.N;
    meta.alpha = alpha;
    meta.thermo_desc = beta.is_constant() ? "beta=" + std::to_string(beta.constant_value())
                                          : "beta=schedule";
    meta.seed = seed;
    return meta;
}

} // namespace

SpinState ode_rhs(const NetworkSpec& spec, const ThermoParams& thermo, const SpinState& s) {
    SpinState out(spec.M);
    rhs_into(spec, thermo.beta, thermo.alpha, s, out);
    return out;
}

Trajectory integrate_ode(const NetworkSpec& spec, const BetaSchedule& beta, double alpha,
                         const SpinState& s0, double t_max, double dt, double sample_dt) {
    if (!(dt > 0.0)) throw ConfigError("integrate_ode: dt must be > 0");
    if (t_max > 0.0 && !(sample_dt > 0.0))
        throw ConfigError("integrate_ode: sample_dt must be > 0");

    Trajectory traj;
    traj.meta = make_meta(spec, beta, alpha, 0);

    const std::size_t n_samples =
        t_max > 0.0 ? static_cast<std::size_t>(std::floor(t_max / sample_dt)) + 1 : 1;
    // dt subdivides the sampling interval exactly so sample times are hit
    const long steps_per_sample =
        t_max > 0.0 ? std::max(1L, static_cast<long>(std::ceil(sample_dt / dt - 1e-9))) : 0;
    const double h = t_max > 0.0 ? sample_dt / steps_per_sample : 0.0;

    SpinState s = s0;
    SpinState k1(spec.M), k2(spec.M), k3(spec.M), k4(spec.M), tmp(spec.M);
    traj.times.push_back(0.0);
    traj.samples.push_back(s);
    double t = 0.0;
    for (std::size_t c = 1; c < n_samples; ++c) {
        for (long step = 0; step < steps_per_sample; ++step) {
            rhs_into(spec, beta.at(t), alpha, s, k1);
            for (int i = 0; i < spec.M; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
            rhs_into(spec, beta.at(t + 0.5 * h), alpha, tmp, k2);
            for (int i = 0; i < spec.M; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
            rhs_into(spec, beta.at(t + 0.5 * h), alpha, tmp, k3);
            for (int i = 0; i < spec.M; ++i) tmp[i] = s[i] + h * k3[i];
            rhs_into(spec, beta.at(t + h), alpha, tmp, k4);
            for (int i = 0; i < spec.M; ++i)
                s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            t += h;
        }
        check_in_band(s, t, h);
        traj.times.push_back(static_cast<double>(c) * sample_dt);
        traj.samples.push_back(s);
    }
    return traj;
}

double analytic_single_site(int N, double alpha, double gamma, double s0, double t) {
    if (gamma == 0.0) return s0 * std::exp(-2.0 * alpha * t);
    const double b = 1.0 / (N * gamma);
    const double A = std::sqrt(1.0 + 2.0 / N + b * b);
    const double arg = (s0 + b) / A;
    if (std::fabs(arg) >= 1.0)
        throw std::domain_error("analytic_single_site: s0 outside the reachable tanh range");
    const double K0 = std::atanh(arg);
    return A * std::tanh(alpha * gamma * A * N * t + K0) - b;
}

SdeCoefficients sde_coefficients(const NetworkSpec& spec, const ThermoParams& thermo,
                                 const SpinState& s, int i) {
    const double g = gamma_of_field(local_field(spec, s, i), thermo.beta);
    const double si = s[i];
    SdeCoefficients out;
    out.drift = 0.5 * thermo.alpha *
                (-spec.N * g * si * si - 2.0 * si + g * (2.0 + spec.N));
    out.diffusion = 0.5 * thermo.alpha *
                    ((1.0 + si) * (1.0 - si) + 2.0 / spec.N * (1.0 - g * si));
    return out;
}

SdeResult integrate_sde(const NetworkSpec& spec, const BetaSchedule& beta, double alpha,
                        const SpinState& s0, double t_max, double sample_dt,
                        const SdeParams& params) {
    if (!(params.dt > 0.0)) throw ConfigError("integrate_sde: dt must be > 0");
    if (t_max > 0.0 && !(sample_dt > 0.0))
        throw ConfigError("integrate_sde: sample_dt must be > 0");

    SdeResult result;
    result.trajectory.meta = make_meta(spec, beta, alpha, params.seed);
    if (params.dt * alpha * spec.N > 0.1)
        result.trajectory.meta.thermo_desc += " warn=dt*alpha*N>0.1";

    const std::size_t n_samples =
        t_max > 0.0 ? static_cast<std::size_t>(std::floor(t_max / sample_dt)) + 1 : 1;
    const long steps_per_sample =
        t_max > 0.0
            ? std::max(1L, static_cast<long>(std::ceil(sample_dt / params.dt - 1e-9)))
            : 0;
    const double h = t_max > 0.0 ? sample_dt / steps_per_sample : 0.0;
    const double sqrt_h = std::sqrt(h);

    Rng rng(params.seed);
    SpinState s = s0;
    SpinState drift(spec.M), q(spec.M);
    result.trajectory.times.push_back(0.0);
    result.trajectory.samples.push_back(s);
    double t = 0.0;
    for (std::size_t c = 1; c < n_samples; ++c) {
        for (long step = 0; step < steps_per_sample; ++step) {
            const double b = beta.at(t);
            // all coefficients from the step-start state
            rhs_into(spec, b, alpha, s, drift);
            for (int i = 0; i < spec.M; ++i) {
                const double g = gamma_of_field(local_field(spec, s, i), b);
                q[i] = (1.0 + s[i]) * (1.0 - s[i]) + 2.0 / spec.N * (1.0 - g * s[i]);
                if (q[i] < 0.0) {
                    if (params.clip_diffusion) {
                        q[i] = 0.0;
                        ++result.clip_events;
                    } else {
                        throw NumericalError("integrate_sde: negative diffusion coefficient");
                    }
                }
            }
            for (int i = 0; i < spec.M; ++i) {
                double next = s[i] + drift[i] * h;
                if (params.noise_scale != 0.0)
                    next += params.noise_scale * std::sqrt(2.0 * alpha * q[i]) * sqrt_h *
                            rng.gaussian();
                // reflect into [-1, 1]; the exact chain cannot leave [0, N]
                while (next > 1.0 || next < -1.0) {
                    if (next > 1.0) next = 2.0 - next;
                    if (next < -1.0) next = -2.0 - next;
                }
                if (std::isnan(next))
                    throw NumericalError("integrate_sde: NaN state; reduce dt");
                s[i] = next;
            }
            ++result.steps;
            t += h;
        }
        result.trajectory.times.push_back(static_cast<double>(c) * sample_dt);
        result.trajectory.samples.push_back(s);
    }
    return result;
}

} // namespace becnet
