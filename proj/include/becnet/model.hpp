#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace becnet {

using OccupationState = std::vector<int>; // per-site boson count k_i in [0, N]
using SpinState = std::vector<double>;    // normalized spins s_i in [-1, 1]

inline constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();

/// Problem definition: M sites of N bosons coupled by a symmetric matrix J
/// with local fields lambda. Diagonal J entries are stored but never enter
/// the dynamics (all dynamic sums run over j != i).
struct NetworkSpec {
    int M = 0;
    int N = 0;
    std::vector<double> J;      // row-major M x M, symmetric
    std::vector<double> lambda; // length M

    double coupling(int i, int j) const { return J[static_cast<std::size_t>(i) * M + j]; }
    double& coupling(int i, int j) { return J[static_cast<std::size_t>(i) * M + j]; }

    static NetworkSpec zeros(int M, int N);

    /// Throws ConfigError on M/N < 1, size mismatch, or asymmetric J
    /// (message names the offending index pair).
    void validate() const;
};

/// Inverse temperature and overall transition rate constant. beta may be
/// kInfiniteBeta for the zero-temperature limit.
struct ThermoParams {
    double beta = 1.0;
    double alpha = 1.0;

    void validate() const; // alpha > 0, beta >= 0 or infinite
};

/// A +/-1 configuration with optional 2-d grid shape for rendering.
struct Pattern {
    std::vector<double> p; // entries exactly +1 or -1
    int rows = 0;
    int cols = 0;

    int size() const { return static_cast<int>(p.size()); }
};

// --- state conversions (exact; see SpinState invariant) ---

inline double spin_of(int k, int N) { return static_cast<double>(-N + 2 * k) / N; }

SpinState spin_state(const OccupationState& k, int N);
OccupationState occupation_state(const SpinState& s, int N); // k = round(N(1+s)/2)

bool valid_occupation(const OccupationState& k, const NetworkSpec& spec);

// --- pointwise formulas shared by every dynamics engine ---

/// Internal field h_i = sum_{j != i} J_ij (N - 2 k_j) + lambda_i.
/// This is the single canonical field: gamma, the transition weights, the
/// flip energy and the stationary ratios are all expressed through it.
double local_field(const NetworkSpec& spec, const OccupationState& k, int i);

/// Continuum version with k_j = N(1+s_j)/2, i.e. h_i = -N sum J_ij s_j + lambda_i.
double local_field(const NetworkSpec& spec, const SpinState& s, int i);

/// gamma_i = tanh(-beta h_i); at beta = infinity returns -sign(h) with sign(0) = 0.
double gamma_of_field(double h, double beta);
double gamma_site(const NetworkSpec& spec, const ThermoParams& thermo,
                  const OccupationState& k, int i);

struct TransitionWeights {
    double up = 0.0;   // k_i -> k_i + 1
    double down = 0.0; // k_i -> k_i - 1
};

/// w_up = alpha (1+gamma)(k_i+1)(N-k_i), w_down = alpha (1-gamma) k_i (N-k_i+1).
/// The (k+1)(N-k) factors are the bosonic final-state stimulation.
TransitionWeights transition_weights(const NetworkSpec& spec, const ThermoParams& thermo,
                                     const OccupationState& k, int i);
TransitionWeights transition_weights_from_field(double h, double beta, double alpha,
                                                int k_i, int N);

/// Energy whose neighbouring-state differences reproduce delta_energy_flip
/// and hence the stationary ratios exp(-2 beta h_i):
///   E(k) = -sum_{i<j} J_ij S_i S_j + sum_i lambda_i S_i,  S_i = -N + 2 k_i.
/// The field couples through N - 2 k_j = -S_j, which fixes the sign of the
/// quadratic term relative to the textbook double-sum form.
double energy(const NetworkSpec& spec, const OccupationState& k);
double energy(const NetworkSpec& spec, const SpinState& s); // S_i = N s_i

/// Energy change for k_i -> k_i + direction: +/- 2 h_i.
double delta_energy_flip(const NetworkSpec& spec, const OccupationState& k, int i,
                         int direction);

/// Equilibrium mean spin of a single site in field B at z = B beta:
/// the average of -1 + 2k/N under p_k ~ exp(-2 z k), k = 0..N.
/// Evaluated in overflow-safe form; |z| < 1e-6 uses the odd series expansion.
double activation_phi(double z, int N);

/// tanh(-z(N+2)/3); same slope as activation_phi at z = 0.
double activation_phi_approx(double z, int N);

} // namespace becnet
