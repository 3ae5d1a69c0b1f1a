#pragma once

#include <cstdint>
#include <vector>

#include "becnet/model.hpp"

namespace becnet {

/// Dense probability vector over all (N+1)^M occupation states, indexed by
/// the mixed-radix multi-index k (site 0 is the fastest-varying digit).
/// This module is an exact small-instance oracle, not a production engine;
/// instances are guarded to (N+1)^M <= 10^6.
class StateSpace {
public:
    StateSpace(int M, int N);

    std::size_t size() const { return size_; }
    int M() const { return M_; }
    int N() const { return N_; }

    std::size_t index_of(const OccupationState& k) const;
    OccupationState state_of(std::size_t idx) const;
    /// Index after k_i += direction; caller guarantees the move stays in range.
    std::size_t neighbor(std::size_t idx, int i, int direction) const {
        return direction > 0 ? idx + strides_[i] : idx - strides_[i];
    }

private:
    int M_;
    int N_;
    std::size_t size_;
    std::vector<std::size_t> strides_;
};

using ProbabilityVector = std::vector<double>;

/// Uniform distribution over all states.
ProbabilityVector uniform_distribution(const StateSpace& space);
/// Point mass on a single occupation state.
ProbabilityVector delta_distribution(const StateSpace& space, const OccupationState& k0);

/// Right-hand side of the master equation dp/dt; entries of the result sum
/// to zero (probability conservation).
ProbabilityVector master_rhs(const NetworkSpec& spec, const ThermoParams& thermo,
                             const ProbabilityVector& p);

struct EvolveOptions {
    double dt = 0.0;            // <= 0: stability default 0.1 / (2 alpha M ((N+2)/2)^2)
    std::vector<double>* kl_trace = nullptr; // per-step KL(p || stationary) diagnostic
};

/// Fixed-step RK4 integration of the master equation to t_final. The result
/// is renormalized and clipped (entries >= -1e-12 forced to 0) after every
/// step; NaN aborts with a step-size diagnostic.
ProbabilityVector evolve(const NetworkSpec& spec, const ThermoParams& thermo,
                         ProbabilityVector p0, double t_final,
                         const EvolveOptions& opts = {});

/// Boltzmann stationary distribution p_k ~ exp(-beta E(k)); at infinite beta,
/// uniform over the ground-state set.
ProbabilityVector stationary_distribution(const NetworkSpec& spec, const ThermoParams& thermo);

/// Stability step for explicit RK4 on the generator (weights scale as N^2).
double default_master_dt(const NetworkSpec& spec, const ThermoParams& thermo);

// --- moments ---
double mean_spin(const StateSpace& space, const ProbabilityVector& p, int site);
double var_spin(const StateSpace& space, const ProbabilityVector& p, int site);
std::vector<double> mean_spins(const StateSpace& space, const ProbabilityVector& p);

/// Size guard shared with the CLI cross-check mode.
bool oracle_feasible(const NetworkSpec& spec, std::size_t limit = 1000000);

} // namespace becnet
