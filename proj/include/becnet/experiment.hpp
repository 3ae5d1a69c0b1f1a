#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "becnet/hebbian.hpp"
#include "becnet/io.hpp"
#include "becnet/meanfield.hpp"

namespace becnet {

/// Initial spin state for an experiment run. pattern-fragment keeps the
/// leading row-major `fraction` of sites at the pattern value and leaves the
/// rest undecided (s = 0); random-spins draws +/-1 per site; uniform-random
/// draws k_i uniformly; half-filled pins k_i = floor(N/2).
SpinState make_initial_spins(const NetworkSpec& spec, const InitialConditionSpec& init,
                             std::uint64_t seed);

struct CompletionOptions {
    double t_max = 0.0;     // 0: auto 80/(alpha N)
    double dt = 0.0;        // 0: auto 0.02/(alpha N)
    double sample_dt = 0.0; // 0: auto t_max/200
    double epsilon_conv = 0.05;
    EngineKind engine = EngineKind::ode;
    std::uint64_t seed = 0; // sde engine noise
};

struct CompletionResult {
    std::vector<double> times;
    std::vector<std::vector<double>> distances; // [checkpoint][target]
    std::vector<SpinState> samples;             // spin path, one per checkpoint
    SpinState final_state;
    // converged when some target reaches D < eps (sign +1) or D > 1 - eps
    // (sign -1: the inverted attractor; the zero-field dynamics are odd)
    bool converged = false;
    int target_index = -1;
    int target_sign = 0;
};

/// Evolve a trained network from an initial state and track the normalized
/// Hamming distance to each target pattern.
CompletionResult run_pattern_completion(const NetworkSpec& trained, const BetaSchedule& beta,
                                        double alpha, const SpinState& s0,
                                        const std::vector<Pattern>& targets,
                                        const CompletionOptions& opts);

struct SweepRow {
    int N = 0;
    double epsilon = 0.0;
    double t_epsilon = 0.0;
    bool censored = false; // epsilon never reached by t_max
    std::string engine;
    std::uint64_t seed = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    // least-squares slope of log t_eps vs log N per epsilon over the fitted
    // subset (default: top half of the N values); censored rows excluded
    std::vector<std::pair<double, double>> slopes; // (epsilon, slope)
};

struct SweepOptions {
    std::vector<double> epsilons{0.3, 0.1, 0.05};
    double t_max_scale = 400.0; // t_max = scale/(alpha N)
    double dt_scale = 0.02;     // dt = scale/(alpha N)
    EngineKind engine = EngineKind::ode;
    int fit_count = 0;          // points per fit; 0: top half
    std::uint64_t seed = 0;
    int n_workers = 0;
};

/// First-passage times of D(s(t), target) below each epsilon as a function
/// of the boson number N (couplings fixed, N overridden per run).
SweepResult run_n_sweep(const NetworkSpec& trained, const BetaSchedule& beta, double alpha,
                        const InitialConditionSpec& init, const Pattern& target,
                        const std::vector<int>& n_values, const SweepOptions& opts);

/// Least-squares slope of log10(y) vs log10(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct OracleCheck {
    bool passed = true;
    double worst_deviation = 0.0; // in units of the declared tolerance
    std::string detail;
};

/// Cross-check an ensemble mean against the exact master equation on the
/// same initial distribution. Tolerance: 3 standard errors plus, for the
/// mean-field engines, a documented 0.75/sqrt(N) closure allowance.
OracleCheck verify_against_oracle(const NetworkSpec& spec, const ExperimentConfig& cfg,
                                  const EnsembleStats& stats);

} // namespace becnet
