#pragma once

#include <cstdint>
#include <vector>

#include "becnet/kmc.hpp"
#include "becnet/model.hpp"
#include "becnet/schedule.hpp"

namespace becnet {

/// Mean-field drift per site:
///   ds_i/dt = alpha [ -N gamma_i s_i^2 - 2 s_i + gamma_i (2+N) ],
/// gamma_i evaluated from the continuum field h_i(s) = -N sum J_ij s_j + lambda_i.
/// The closure <k^m> ~ <k>^m is inherent to this module; disagreement with
/// the exact dynamics shrinks as 1/sqrt(N).
SpinState ode_rhs(const NetworkSpec& spec, const ThermoParams& thermo, const SpinState& s);

/// Fixed-step RK4 for the coupled system (all sites advanced synchronously).
/// Aborts with NumericalError if any |s_i| leaves [-1.01, 1.01] or goes NaN.
Trajectory integrate_ode(const NetworkSpec& spec, const BetaSchedule& beta, double alpha,
                         const SpinState& s0, double t_max, double dt, double sample_dt);

/// Closed-form single-site solution for constant gamma != 0:
///   s(t) = A tanh(alpha gamma A N t + K0) - 1/(N gamma),
///   A = sqrt(1 + 2/N + 1/(N^2 gamma^2)),  K0 from s(0) = s0.
/// gamma == 0 falls back to the exact linear decay s0 exp(-2 alpha t).
/// Throws std::domain_error when s0 is outside the reachable tanh range.
double analytic_single_site(int N, double alpha, double gamma, double s0, double t);

struct SdeParams {
    double dt = 1e-3;
    bool clip_diffusion = true; // clamp negative diffusion to 0 (counted)
    std::uint64_t seed = 0;
    double noise_scale = 1.0;   // 0 disables noise (reduces to the drift ODE)
};

struct SdeCoefficients {
    double drift = 0.0;     // z-variable drift: exactly ode_rhs / 2
    double diffusion = 0.0; // z-variable diffusion (alpha/2)[(1+s)(1-s) + (2/N)(1-gamma s)]
};

/// Small-fluctuation expansion coefficients in the z = k/N variable. In
/// s-units the path obeys ds = ode_rhs dt + sqrt(2 alpha Q) dW with
/// Q = (1+s)(1-s) + (2/N)(1 - gamma s) = (2/alpha) * diffusion; the factor-2
/// Jacobian of s = -1 + 2z is absorbed so the deterministic parts agree.
SdeCoefficients sde_coefficients(const NetworkSpec& spec, const ThermoParams& thermo,
                                 const SpinState& s, int i);

struct SdeResult {
    Trajectory trajectory;
    long clip_events = 0; // negative-diffusion clamps
    long steps = 0;
};

/// Euler-Maruyama path with independent per-site noise of variance dt per
/// step, reflected into [-1, 1]. Emits a warning to the trajectory meta when
/// dt * alpha * N > 0.1. Reproducible from SdeParams::seed.
SdeResult integrate_sde(const NetworkSpec& spec, const BetaSchedule& beta, double alpha,
                        const SpinState& s0, double t_max, double sample_dt,
                        const SdeParams& params);

} // namespace becnet
