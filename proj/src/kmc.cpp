#include "becnet/kmc.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "becnet/errors.hpp"

namespace becnet {

StepOutcome kmc_step(KmcState& state, const NetworkSpec& spec, const ThermoParams& thermo) {
    const int M = spec.M;
    // weights for all 2M candidate moves, order (site 0 up, site 0 down, site 1 up, ...)
    std::vector<double> w(2 * static_cast<std::size_t>(M));
    double w_tot = 0.0;
    for (int i = 0; i < M; ++i) {
        const TransitionWeights wi = transition_weights(spec, thermo, state.k, i);
        w[2 * i] = wi.up;
        w[2 * i + 1] = wi.down;
        w_tot += wi.up + wi.down;
    }
    if (w_tot <= 0.0) return StepOutcome::absorbed;

    // cumulative-weight inversion, then the time draw
    const double target = state.rng.uniform01() * w_tot;
    double acc = 0.0;
    int chosen = 2 * M - 1;
    for (int m = 0; m < 2 * M; ++m) {
        acc += w[m];
        if (target < acc) {
            chosen = m;
            break;
        }
    }
    const double r = state.rng.uniform01_open_low();
    state.t += -std::log(r) / w_tot;

    const int site = chosen / 2;
    const int direction = (chosen % 2 == 0) ? 1 : -1;
    state.k[site] += direction;
    assert(state.k[site] >= 0 && state.k[site] <= spec.N);
    return StepOutcome::stepped;
}

OccupationState random_occupation(const NetworkSpec& spec, Rng& rng) {
    OccupationState k(spec.M);
    for (int i = 0; i < spec.M; ++i)
        k[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.N) + 1));
    return k;
}

Trajectory run_trajectory(const NetworkSpec& spec, const BetaSchedule& beta, double alpha,
                          const OccupationState& k0, double t_max, double sample_dt,
                          std::uint64_t seed) {
    if (t_max < 0.0) throw ConfigError("run_trajectory: t_max must be >= 0");
    if (t_max > 0.0 && !(sample_dt > 0.0))
        throw ConfigError("run_trajectory: sample_dt must be > 0");

    Trajectory traj;
    traj.meta.M = spec.M;
    traj.meta.N = spec.N;
    traj.meta.alpha = alpha;
    traj.meta.thermo_desc = beta.is_constant()
                                ? "beta=" + std::to_string(beta.constant_value())
                                : "beta=schedule";
    traj.meta.seed = seed;

    const std::size_t n_samples =
        t_max > 0.0 ? static_cast<std::size_t>(std::floor(t_max / sample_dt)) + 1 : 1;
    traj.times.reserve(n_samples);
    traj.samples.reserve(n_samples);

    KmcState state(k0, seed);
    std::size_t next_sample = 0;
    bool absorbed = false;
    OccupationState k_before = state.k;
    while (next_sample < n_samples) {
        if (absorbed) {
            traj.times.push_back(static_cast<double>(next_sample) * sample_dt);
            traj.samples.push_back(spin_state(state.k, spec.N));
            ++next_sample;
            continue;
        }
        const ThermoParams thermo{beta.at(state.t), alpha};
        k_before = state.k;
        if (kmc_step(state, spec, thermo) == StepOutcome::absorbed) {
            absorbed = true;
            continue;
        }
        // emit samples the event jumps over (state held constant on [t, t'))
        while (next_sample < n_samples &&
               static_cast<double>(next_sample) * sample_dt < state.t) {
            traj.times.push_back(static_cast<double>(next_sample) * sample_dt);
            traj.samples.push_back(spin_state(k_before, spec.N));
            ++next_sample;
        }
    }
    return traj;
}

int resolve_worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("BECNET_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

namespace {

struct Accumulator {
    // running mean and sum of squared deviations per (checkpoint, site)
    std::vector<std::vector<double>> mean;
    std::vector<std::vector<double>> m2;
    long n = 0;

    void init(std::size_t checkpoints, std::size_t sites) {
        mean.assign(checkpoints, std::vector<double>(sites, 0.0));
        m2.assign(checkpoints, std::vector<double>(sites, 0.0));
        n = 0;
    }

    void add(const Trajectory& traj) {
        ++n;
        for (std::size_t c = 0; c < mean.size(); ++c) {
            for (std::size_t i = 0; i < mean[c].size(); ++i) {
                const double x = traj.samples[c][i];
                const double d = x - mean[c][i];
                mean[c][i] += d / n;
                m2[c][i] += d * (x - mean[c][i]);
            }
        }
    }

    // Chan et al. pairwise merge; applied in fixed block order
    void merge(const Accumulator& other) {
        if (other.n == 0) return;
        if (n == 0) {
            *this = other;
            return;
        }
        const long total = n + other.n;
        for (std::size_t c = 0; c < mean.size(); ++c) {
            for (std::size_t i = 0; i < mean[c].size(); ++i) {
                const double d = other.mean[c][i] - mean[c][i];
                mean[c][i] += d * other.n / total;
                m2[c][i] += other.m2[c][i] +
                            d * d * (static_cast<double>(n) * other.n / total);
            }
        }
        n = total;
    }
};

} // namespace

EnsembleStats run_ensemble(const NetworkSpec& spec, const BetaSchedule& beta, double alpha,
                           int n_traj, double t_max, double sample_dt,
                           std::uint64_t base_seed, InitialCondition init, int n_workers) {
    if (n_traj < 1) throw ConfigError("run_ensemble: n_traj must be >= 1");
    const std::size_t n_samples =
        t_max > 0.0 ? static_cast<std::size_t>(std::floor(t_max / sample_dt)) + 1 : 1;
    if (!init) init = [](const NetworkSpec& s, Rng& r) { return random_occupation(s, r); };

    constexpr int kBlock = 64;
    const int n_blocks = (n_traj + kBlock - 1) / kBlock;
    std::vector<Accumulator> block_acc(n_blocks);

    auto run_block = [&](int b) {
        Accumulator& acc = block_acc[b];
        acc.init(n_samples, static_cast<std::size_t>(spec.M));
        const int lo = b * kBlock;
        const int hi = std::min(n_traj, lo + kBlock);
        for (int tr = lo; tr < hi; ++tr) {
            const std::uint64_t seed = derive_seed(base_seed, static_cast<std::uint64_t>(tr));
            Rng init_rng(derive_seed(seed, 0x1c0));
            const OccupationState k0 = init(spec, init_rng);
            acc.add(run_trajectory(spec, beta, alpha, k0, t_max, sample_dt, seed));
        }
    };

    const int workers = std::min(resolve_worker_count(n_workers), n_blocks);
    if (workers <= 1) {
        for (int b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1))
                    run_block(b);
            });
        for (auto& th : pool) th.join();
    }

    Accumulator total;
    total.init(n_samples, static_cast<std::size_t>(spec.M));
    for (const Accumulator& acc : block_acc) total.merge(acc);

    EnsembleStats stats;
    stats.n_traj = n_traj;
    stats.times.resize(n_samples);
    for (std::size_t c = 0; c < n_samples; ++c)
        stats.times[c] = static_cast<double>(c) * sample_dt;
    stats.mean = std::move(total.mean);
    stats.var.assign(n_samples, std::vector<double>(spec.M, 0.0));
    if (n_traj > 1) {
        for (std::size_t c = 0; c < n_samples; ++c)
            for (int i = 0; i < spec.M; ++i)
                stats.var[c][i] = total.m2[c][i] / (n_traj - 1);
    }
    return stats;
}

} // namespace becnet
