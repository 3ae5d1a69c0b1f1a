#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "becnet/model.hpp"

namespace becnet {

/// Field configurations the network is exposed to during learning, plus the
/// learning constant. Patterns are applied in order; c >= 0 (c = 0 leaves
/// the couplings untouched).
struct TrainingSet {
    std::vector<std::vector<double>> field_patterns; // lambda^(n), each length M
    double c = 0.0;

    static TrainingSet from_patterns(const std::vector<Pattern>& patterns, double lambda0,
                                     double c);
};

enum class EquilibratorKind {
    analytic,   // damped fixed-point iteration of s_i = Phi(beta h_i(s))
    metropolis, // long Metropolis run, time-averaged spins
    ode,        // mean-field steady state
};

struct EquilibratorConfig {
    EquilibratorKind kind = EquilibratorKind::analytic;
    // analytic
    double damping = 0.5;
    double tolerance = 1e-8;
    int max_iterations = 10000;
    // metropolis
    int burnin_sweeps = 2000;
    int measure_sweeps = 8000;
    std::uint64_t seed = 0;
    // ode
    double ode_t_max = 50.0;
    double ode_dt = 1e-3;
    // superposition mode: measure the response against zero coupling instead
    // of the accumulated matrix (makes updates order-independent)
    bool measure_at_zero_coupling = false;
};

/// Equilibrium spin response of the network under its current (J, lambda).
SpinState equilibrate(const NetworkSpec& spec, const ThermoParams& thermo,
                      const EquilibratorConfig& eq);

struct TrainResult {
    NetworkSpec spec;          // trained couplings, lambda reset to zero
    double max_asymmetry = 0.0; // largest |J_ij - J_ji| seen before symmetrization
    int exposures = 0;
};

/// Hebbian training from zero couplings: for each exposure, apply the field
/// pattern, equilibrate, then update J_ij -= c s_i lambda_j, symmetrize and
/// zero the diagonal. The minus sign is required for the equilibrated
/// configurations to become attractors here: the dynamics read the field
/// through N - 2 k_j = -S_j, so the correlational (+) update would store
/// every pattern with the repelling sign.
TrainResult hebbian_train(const NetworkSpec& spec0, const ThermoParams& thermo,
                          const TrainingSet& set, const EquilibratorConfig& eq,
                          int epochs = 1);

/// Normalized Hamming distance D = (1/2M) sum_i |s_i - p_i|, in [0, 1] for
/// +/-1 targets.
double hamming_distance(const SpinState& s, const std::vector<double>& target);
double hamming_distance(const SpinState& s, const Pattern& target);

/// Parse a rectangular '#'/'.' grid ('#' -> +1, '.' -> -1), row-major.
/// Throws ConfigError on ragged rows or other characters.
Pattern load_pattern_grid(const std::string& text);
Pattern load_pattern_file(const std::string& path);

/// Inverse of load_pattern_grid; sign(s) >= 0 renders '#'.
std::string render_pattern_grid(const std::vector<double>& s, int rows, int cols);
std::string render_pattern_grid(const Pattern& p);

} // namespace becnet
