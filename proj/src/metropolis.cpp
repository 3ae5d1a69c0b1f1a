#include "becnet/metropolis.hpp"

#include <cmath>
#include <limits>

#include "becnet/errors.hpp"
#include "becnet/master_equation.hpp"

namespace becnet {

namespace {

struct Proposal {
    bool accepted = false;
    double dE = 0.0;
};

// Shared by metropolis_step and anneal so both consume the RNG identically.
Proposal propose_and_apply(OccupationState& k, const NetworkSpec& spec, double beta,
                           Rng& rng) {
    const int site = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.M)));
    const int direction = rng.below(2) == 0 ? 1 : -1;
    const int target = k[site] + direction;
    if (target < 0 || target > spec.N) return {}; // rejected, not re-drawn

    Proposal out;
    out.dE = delta_energy_flip(spec, k, site, direction);
    if (out.dE < 0.0) {
        out.accepted = true;
    } else if (std::isinf(beta)) {
        out.accepted = out.dE == 0.0 && rng.uniform01() < 0.5;
    } else {
        out.accepted = rng.uniform01() < std::exp(-beta * out.dE);
    }
    if (out.accepted) k[site] = target;
    return out;
}

} // namespace

bool metropolis_step(OccupationState& k, const NetworkSpec& spec, const ThermoParams& thermo,
                     Rng& rng) {
    return propose_and_apply(k, spec, thermo.beta, rng).accepted;
}

OccupationState metropolis_run(OccupationState k, const NetworkSpec& spec,
                               const ThermoParams& thermo, int n_sweeps, Rng& rng) {
    const long proposals = static_cast<long>(n_sweeps) * spec.M;
    for (long p = 0; p < proposals; ++p) propose_and_apply(k, spec, thermo.beta, rng);
    return k;
}

AnnealResult anneal(const NetworkSpec& spec, const BetaSchedule& beta_per_sweep, double alpha,
                    const OccupationState& k0, int n_sweeps, Rng& rng,
                    const SweepObserver& observer) {
    (void)alpha; // Metropolis sampling carries no physical time scale
    beta_per_sweep.require_non_decreasing();
    AnnealResult result;
    result.final_k = k0;
    result.best_k = k0;
    result.best_energy = energy(spec, k0);
    result.energy_trace.reserve(n_sweeps);

    double current_energy = result.best_energy;
    for (int sweep = 0; sweep < n_sweeps; ++sweep) {
        const double beta = beta_per_sweep.at(static_cast<double>(sweep));
        for (int p = 0; p < spec.M; ++p) {
            const Proposal move = propose_and_apply(result.final_k, spec, beta, rng);
            if (!move.accepted) continue;
            current_energy += move.dE;
            if (current_energy < result.best_energy) {
                result.best_energy = current_energy;
                result.best_k = result.final_k;
            }
        }
        result.energy_trace.push_back(result.best_energy);
        if (observer) observer(sweep, result.final_k, current_energy);
    }
    result.final_energy = energy(spec, result.final_k);
    result.best_energy = energy(spec, result.best_k); // refresh against fp drift
    return result;
}

double exhaustive_ground_energy(const NetworkSpec& spec) {
    if (!oracle_feasible(spec))
        throw NumericalError("exhaustive_ground_energy: state space exceeds the guard");
    StateSpace space(spec.M, spec.N);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < space.size(); ++idx)
        best = std::min(best, energy(spec, space.state_of(idx)));
    return best;
}

} // namespace becnet
