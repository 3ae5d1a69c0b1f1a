#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "becnet/model.hpp"
#include "becnet/rng.hpp"
#include "becnet/schedule.hpp"

namespace becnet {

/// Walker state for the kinetic Monte Carlo chain.
struct KmcState {
    OccupationState k;
    double t = 0.0;
    Rng rng;

    KmcState(OccupationState k0, std::uint64_t seed) : k(std::move(k0)), rng(seed) {}
};

/// Provenance carried with every sampled trajectory so output files can be
/// reproduced from the header alone.
struct TrajectoryMeta {
    int M = 0;
    int N = 0;
    double alpha = 0.0;
    std::string thermo_desc;
    std::uint64_t seed = 0;
};

struct Trajectory {
    std::vector<double> times;             // strictly increasing
    std::vector<SpinState> samples;        // one SpinState per time
    TrajectoryMeta meta;
};

enum class StepOutcome { stepped, absorbed };

/// One Gillespie event: pick the transition with probability proportional to
/// its weight, advance time by -ln(r)/W_tot with r in (0, 1]. Exactly one
/// k_i changes by +/-1. Returns absorbed (state untouched) when every weight
/// is zero, which can only happen at infinite beta.
StepOutcome kmc_step(KmcState& state, const NetworkSpec& spec, const ThermoParams& thermo);

/// Trajectory sampled at multiples of sample_dt by holding the piecewise
/// constant state. Identical (inputs, seed) give a bit-identical trajectory.
/// beta(t) is read from the schedule at the current trajectory time before
/// each step. An absorbing state freezes the remaining samples.
Trajectory run_trajectory(const NetworkSpec& spec, const BetaSchedule& beta, double alpha,
                          const OccupationState& k0, double t_max, double sample_dt,
                          std::uint64_t seed);

/// Draw each k_i uniformly on [0, N] (the default initial condition).
OccupationState random_occupation(const NetworkSpec& spec, Rng& rng);

struct EnsembleStats {
    std::vector<double> times;
    std::vector<std::vector<double>> mean; // [checkpoint][site]
    std::vector<std::vector<double>> var;  // [checkpoint][site], unbiased; 0 for n=1
    int n_traj = 0;
};

/// Initial condition factory invoked once per trajectory with that
/// trajectory's derived RNG; it must be a pure function of its arguments so
/// ensembles are order-independent.
using InitialCondition = std::function<OccupationState(const NetworkSpec&, Rng&)>;

/// Ensemble mean/variance of s_i over n_traj independent trajectories.
/// Trajectory i uses derive_seed(base_seed, i); trajectories are merged in a
/// fixed block order, so the result is byte-identical for any worker count.
EnsembleStats run_ensemble(const NetworkSpec& spec, const BetaSchedule& beta, double alpha,
                           int n_traj, double t_max, double sample_dt,
                           std::uint64_t base_seed,
                           InitialCondition init = nullptr, int n_workers = 0);

/// Worker count: explicit argument, else BECNET_WORKERS, else hardware.
int resolve_worker_count(int requested);

} // namespace becnet
