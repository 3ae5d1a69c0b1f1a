#include "becnet/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "becnet/errors.hpp"

namespace becnet {

namespace {

void check_feasible(const NetworkSpec& spec) {
    if (!oracle_feasible(spec))
        throw NumericalError("master equation: (N+1)^M exceeds the 10^6 state guard");
}

void clip_and_normalize(ProbabilityVector& p) {
    double sum = 0.0;
    for (double& x : p) {
        if (x < 0.0) x = 0.0; // integrator undershoot, tolerated to -1e-12
        sum += x;
    }
    if (!(sum > 0.0) || std::isnan(sum))
        throw NumericalError("master equation: probability mass vanished or NaN; reduce dt");
    const double inv = 1.0 / sum;
    for (double& x : p) x *= inv;
}

} // namespace

bool oracle_feasible(const NetworkSpec& spec, std::size_t limit) {
    std::size_t size = 1;
    for (int i = 0; i < spec.M; ++i) {
        const std::size_t radix = static_cast<std::size_t>(spec.N) + 1;
        if (size > limit / radix + 1) return false;
        size *= radix;
        if (size > limit) return false;
    }
    return true;
}

StateSpace::StateSpace(int M, int N) : M_(M), N_(N) {
    strides_.resize(M);
    size_ = 1;
    for (int i = 0; i < M; ++i) {
        strides_[i] = size_;
        size_ *= static_cast<std::size_t>(N) + 1;
    }
}

std::size_t StateSpace::index_of(const OccupationState& k) const {
    std::size_t idx = 0;
    for (int i = 0; i < M_; ++i) idx += strides_[i] * static_cast<std::size_t>(k[i]);
    return idx;
}

OccupationState StateSpace::state_of(std::size_t idx) const {
    OccupationState k(M_);
    const std::size_t radix = static_cast<std::size_t>(N_) + 1;
    for (int i = 0; i < M_; ++i) {
        k[i] = static_cast<int>(idx % radix);
        idx /= radix;
    }
    return k;
}

ProbabilityVector uniform_distribution(const StateSpace& space) {
    return ProbabilityVector(space.size(), 1.0 / static_cast<double>(space.size()));
}

ProbabilityVector delta_distribution(const StateSpace& space, const OccupationState& k0) {
    ProbabilityVector p(space.size(), 0.0);
    p[space.index_of(k0)] = 1.0;
    return p;
}

ProbabilityVector master_rhs(const NetworkSpec& spec, const ThermoParams& thermo,
                             const ProbabilityVector& p) {
    check_feasible(spec);
    StateSpace space(spec.M, spec.N);
    ProbabilityVector dpdt(space.size(), 0.0);
    OccupationState k(spec.M);
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
        const double pk = p[idx];
        k = space.state_of(idx);
        for (int i = 0; i < spec.M; ++i) {
            const TransitionWeights w = transition_weights(spec, thermo, k, i);
            // outflow from |k>, inflow into the two neighbours
            if (k[i] < spec.N) {
                dpdt[idx] -= w.up * pk;
                dpdt[space.neighbor(idx, i, +1)] += w.up * pk;
            }
            if (k[i] > 0) {
                dpdt[idx] -= w.down * pk;
                dpdt[space.neighbor(idx, i, -1)] += w.down * pk;
            }
        }
    }
    return dpdt;
}

double default_master_dt(const NetworkSpec& spec, const ThermoParams& thermo) {
    const double half = 0.5 * (spec.N + 2);
    const double rate_bound = 2.0 * thermo.alpha * spec.M * half * half;
    return 0.1 / rate_bound;
}

namespace {

double kl_divergence(const ProbabilityVector& p, const ProbabilityVector& q) {
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0 && q[i] > 0.0) kl += p[i] * std::log(p[i] / q[i]);
    }
    return kl;
}

} // namespace

ProbabilityVector evolve(const NetworkSpec& spec, const ThermoParams& thermo,
                         ProbabilityVector p0, double t_final, const EvolveOptions& opts) {
    check_feasible(spec);
    if (t_final <= 0.0) return p0;
    const double dt_base = opts.dt > 0.0 ? opts.dt : default_master_dt(spec, thermo);

    ProbabilityVector stationary;
    if (opts.kl_trace) stationary = stationary_distribution(spec, thermo);

    ProbabilityVector p = std::move(p0);
    double t = 0.0;
    while (t < t_final) {
        const double dt = std::min(dt_base, t_final - t);
        const ProbabilityVector k1 = master_rhs(spec, thermo, p);
        ProbabilityVector tmp(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) tmp[i] = p[i] + 0.5 * dt * k1[i];
        const ProbabilityVector k2 = master_rhs(spec, thermo, tmp);
        for (std::size_t i = 0; i < p.size(); ++i) tmp[i] = p[i] + 0.5 * dt * k2[i];
        const ProbabilityVector k3 = master_rhs(spec, thermo, tmp);
        for (std::size_t i = 0; i < p.size(); ++i) tmp[i] = p[i] + dt * k3[i];
        const ProbabilityVector k4 = master_rhs(spec, thermo, tmp);
        for (std::size_t i = 0; i < p.size(); ++i)
            p[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        clip_and_normalize(p);
        if (opts.kl_trace) opts.kl_trace->push_back(kl_divergence(p, stationary));
        t += dt;
    }
    return p;
}

ProbabilityVector stationary_distribution(const NetworkSpec& spec, const ThermoParams& thermo) {
    check_feasible(spec);
    StateSpace space(spec.M, spec.N);
    ProbabilityVector p(space.size());

    std::vector<double> energies(space.size());
    double min_e = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
        energies[idx] = energy(spec, space.state_of(idx));
        min_e = std::min(min_e, energies[idx]);
    }
    if (std::isinf(thermo.beta)) {
        std::size_t count = 0;
        for (std::size_t idx = 0; idx < space.size(); ++idx)
            if (energies[idx] <= min_e + 1e-12) ++count;
        for (std::size_t idx = 0; idx < space.size(); ++idx)
            p[idx] = energies[idx] <= min_e + 1e-12 ? 1.0 / count : 0.0;
        return p;
    }
    double sum = 0.0;
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
        p[idx] = std::exp(-thermo.beta * (energies[idx] - min_e));
        sum += p[idx];
    }
    for (double& x : p) x /= sum;
    return p;
}

double mean_spin(const StateSpace& space, const ProbabilityVector& p, int site) {
    const std::size_t radix = static_cast<std::size_t>(space.N()) + 1;
    std::size_t below = 1;
    for (int i = 0; i < site; ++i) below *= radix;
    double mean = 0.0;
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
        const int k_i = static_cast<int>((idx / below) % radix);
        mean += p[idx] * spin_of(k_i, space.N());
    }
    return mean;
}

double var_spin(const StateSpace& space, const ProbabilityVector& p, int site) {
    const std::size_t radix = static_cast<std::size_t>(space.N()) + 1;
    std::size_t below = 1;
    for (int i = 0; i < site; ++i) below *= radix;
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
        const int k_i = static_cast<int>((idx / below) % radix);
        const double s = spin_of(k_i, space.N());
        m1 += p[idx] * s;
        m2 += p[idx] * s * s;
    }
    return m2 - m1 * m1;
}

std::vector<double> mean_spins(const StateSpace& space, const ProbabilityVector& p) {
    std::vector<double> out(space.M());
    for (int i = 0; i < space.M(); ++i) out[i] = mean_spin(space, p, i);
    return out;
}

} // namespace becnet
