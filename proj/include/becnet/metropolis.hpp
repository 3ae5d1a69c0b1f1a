#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "becnet/model.hpp"
#include "becnet/rng.hpp"
#include "becnet/schedule.hpp"

namespace becnet {

/// One Metropolis proposal: site chosen uniformly, direction +/-1 chosen
/// uniformly. Out-of-range moves count as rejected proposals (this keeps the
/// proposal distribution symmetric). Acceptance: always if dE < 0, else with
/// probability exp(-beta dE); at infinite beta, dE = 0 is accepted with
/// probability 1/2 to avoid frozen plateaus.
/// Returns true if the move was accepted. Draw order per call: site,
/// direction, then (only when needed) the acceptance uniform.
bool metropolis_step(OccupationState& k, const NetworkSpec& spec, const ThermoParams& thermo,
                     Rng& rng);

/// n_sweeps sweeps of M proposals at fixed beta; returns the final state.
OccupationState metropolis_run(OccupationState k, const NetworkSpec& spec,
                               const ThermoParams& thermo, int n_sweeps, Rng& rng);

struct AnnealResult {
    OccupationState best_k;
    double best_energy = 0.0;
    OccupationState final_k;
    double final_energy = 0.0;
    std::vector<double> energy_trace; // best-so-far after each sweep (non-increasing)
};

/// Called after each sweep with (sweep index, current state, current energy).
using SweepObserver = std::function<void(int, const OccupationState&, double)>;

/// Simulated annealing: beta(sweep) from a non-decreasing schedule; returns
/// the lowest-energy state visited, not merely the final state.
AnnealResult anneal(const NetworkSpec& spec, const BetaSchedule& beta_per_sweep, double alpha,
                    const OccupationState& k0, int n_sweeps, Rng& rng,
                    const SweepObserver& observer = nullptr);

/// All (N+1)^M states scanned for the minimum energy. Test oracle and sanity
/// baseline for anneal; guarded like the master-equation module.
double exhaustive_ground_energy(const NetworkSpec& spec);

} // namespace becnet
