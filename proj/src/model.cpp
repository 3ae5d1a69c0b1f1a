#include "becnet/model.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "becnet/errors.hpp"

namespace becnet {

NetworkSpec NetworkSpec::zeros(int M, int N) {
    NetworkSpec spec;
    spec.M = M;
    spec.N = N;
    spec.J.assign(static_cast<std::size_t>(M) * M, 0.0);
    spec.lambda.assign(M, 0.0);
    return spec;
}

void NetworkSpec::validate() const {
    if (M < 1 || N < 1) throw ConfigError("NetworkSpec: M and N must be >= 1");
    if (J.size() != static_cast<std::size_t>(M) * M)
        throw ConfigError("NetworkSpec: J must be M x M");
    if (lambda.size() != static_cast<std::size_t>(M))
        throw ConfigError("NetworkSpec: lambda must have length M");
    for (int i = 0; i < M; ++i) {
        for (int j = i + 1; j < M; ++j) {
            if (coupling(i, j) != coupling(j, i)) {
                std::ostringstream msg;
                msg << "NetworkSpec: J is not symmetric at (" << i << ", " << j << "): "
                    << coupling(i, j) << " vs " << coupling(j, i);
                throw ConfigError(msg.str());
            }
        }
    }
}

void ThermoParams::validate() const {
    if (!(alpha > 0.0)) throw ConfigError("ThermoParams: alpha must be > 0");
    if (std::isnan(beta) || beta < 0.0)
        throw ConfigError("ThermoParams: beta must be >= 0 or infinite");
}

SpinState spin_state(const OccupationState& k, int N) {
    SpinState s(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) s[i] = spin_of(k[i], N);
    return s;
}

OccupationState occupation_state(const SpinState& s, int N) {
    OccupationState k(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const int ki = static_cast<int>(std::lround(N * (1.0 + s[i]) / 2.0));
        k[i] = ki < 0 ? 0 : (ki > N ? N : ki);
    }
    return k;
}

bool valid_occupation(const OccupationState& k, const NetworkSpec& spec) {
    if (k.size() != static_cast<std::size_t>(spec.M)) return false;
    for (int ki : k)
        if (ki < 0 || ki > spec.N) return false;
    return true;
}

double local_field(const NetworkSpec& spec, const OccupationState& k, int i) {
    if (i < 0 || i >= spec.M) throw std::out_of_range("local_field: site index");
    double h = spec.lambda[i];
    for (int j = 0; j < spec.M; ++j) {
        if (j == i) continue;
        h += spec.coupling(i, j) * (spec.N - 2 * k[j]);
    }
    return h;
}

double local_field(const NetworkSpec& spec, const SpinState& s, int i) {
    if (i < 0 || i >= spec.M) throw std::out_of_range("local_field: site index");
    double h = spec.lambda[i];
    for (int j = 0; j < spec.M; ++j) {
        if (j == i) continue;
        h -= spec.coupling(i, j) * spec.N * s[j];
    }
    return h;
}

double gamma_of_field(double h, double beta) {
    if (std::isinf(beta)) {
        if (h > 0.0) return -1.0;
        if (h < 0.0) return 1.0;
        return 0.0;
    }
    return std::tanh(-beta * h);
}

double gamma_site(const NetworkSpec& spec, const ThermoParams& thermo,
                  const OccupationState& k, int i) {
    return gamma_of_field(local_field(spec, k, i), thermo.beta);
}

TransitionWeights transition_weights_from_field(double h, double beta, double alpha,
                                                int k_i, int N) {
    const double g = gamma_of_field(h, beta);
    TransitionWeights w;
    w.up = alpha * (1.0 + g) * (k_i + 1) * (N - k_i);
    w.down = alpha * (1.0 - g) * k_i * (N - k_i + 1);
    return w;
}

TransitionWeights transition_weights(const NetworkSpec& spec, const ThermoParams& thermo,
                                     const OccupationState& k, int i) {
    return transition_weights_from_field(local_field(spec, k, i), thermo.beta,
                                         thermo.alpha, k[i], spec.N);
}

double energy(const NetworkSpec& spec, const OccupationState& k) {
    double e = 0.0;
    for (int i = 0; i < spec.M; ++i) {
        const double si = -spec.N + 2.0 * k[i];
        for (int j = i + 1; j < spec.M; ++j)
            e -= spec.coupling(i, j) * si * (-spec.N + 2.0 * k[j]);
        e += spec.lambda[i] * si;
    }
    return e;
}

double energy(const NetworkSpec& spec, const SpinState& s) {
    double e = 0.0;
    for (int i = 0; i < spec.M; ++i) {
        const double si = spec.N * s[i];
        for (int j = i + 1; j < spec.M; ++j)
            e -= spec.coupling(i, j) * si * spec.N * s[j];
        e += spec.lambda[i] * si;
    }
    return e;
}

double delta_energy_flip(const NetworkSpec& spec, const OccupationState& k, int i,
                         int direction) {
    if (direction != 1 && direction != -1)
        throw std::invalid_argument("delta_energy_flip: direction must be +1 or -1");
    const int target = k[i] + direction;
    if (target < 0 || target > spec.N)
        throw std::out_of_range("delta_energy_flip: move leaves [0, N]");
    return 2.0 * direction * local_field(spec, k, i);
}

double activation_phi(double z, int N) {
    if (z == 0.0) return 0.0;
    // odd function: evaluate at |z| where the truncated-geometric form with
    // x = exp(-2|z|) < 1 is overflow-free
    const double sign = z > 0.0 ? 1.0 : -1.0;
    const double za = std::fabs(z);
    if (za < 1e-6) {
        // series: Phi = -(N+2)/3 z + (n^4-1)/(45 N) z^3 + O(z^5), n = N+1
        const double n = static_cast<double>(N) + 1.0;
        const double n4 = n * n * n * n;
        return -(N + 2.0) / 3.0 * z + (n4 - 1.0) / (45.0 * N) * z * z * z;
    }
    // <k> for p_k ~ x^k, k=0..N:  x/(1-x) - (N+1) x^(N+1) / (1 - x^(N+1))
    const double one_minus_x = -std::expm1(-2.0 * za);           // 1 - e^{-2|z|}
    const double x = std::exp(-2.0 * za);
    double mean_k = x / one_minus_x;
    const double log_xn1 = -2.0 * za * (N + 1);
    if (log_xn1 > -700.0) {
        const double xn1 = std::exp(log_xn1);
        mean_k -= (N + 1) * xn1 / (-std::expm1(log_xn1));
    }
    const double phi_abs = -1.0 + 2.0 * mean_k / N; // value at +|z|
    return sign > 0.0 ? phi_abs : -phi_abs;
}

double activation_phi_approx(double z, int N) {
    return std::tanh(-z * (N + 2.0) / 3.0);
}

} // namespace becnet
