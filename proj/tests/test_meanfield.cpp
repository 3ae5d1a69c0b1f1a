#include <doctest.h>

#include <cmath>
#include <random>

#include "becnet/errors.hpp"
#include "becnet/master_equation.hpp"
#include "becnet/meanfield.hpp"

using namespace becnet;

namespace {

NetworkSpec single_site(int N, double lambda) {
    NetworkSpec spec = NetworkSpec::zeros(1, N);
    spec.lambda[0] = lambda;
    return spec;
}

// bisection on the per-site drift, independent of the closed-form root
double bisect_root(const NetworkSpec& spec, const ThermoParams& thermo, double lo, double hi) {
    auto f = [&](double s) { return ode_rhs(spec, thermo, {s})[0]; };
    double flo = f(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if ((flo < 0) == (fmid < 0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("ode_rhs: zero gamma leaves pure linear decay") {
    const NetworkSpec spec = NetworkSpec::zeros(2, 10); // no couplings, no fields
    const ThermoParams thermo{1.0, 1.3};
    const SpinState s{0.4, -0.7};
    const SpinState ds = ode_rhs(spec, thermo, s);
    CHECK(ds[0] == doctest::Approx(-2.0 * 1.3 * 0.4).epsilon(1e-14));
    CHECK(ds[1] == doctest::Approx(-2.0 * 1.3 * -0.7).epsilon(1e-14));
}

TEST_CASE("ode_rhs: single site matches the explicit expression") {
    const NetworkSpec spec = single_site(20, 0.6);
    const ThermoParams thermo{0.9, 1.0};
    for (double s = -0.9; s <= 0.95; s += 0.1) {
        const double g = std::tanh(-0.9 * 0.6);
        const double want = -20.0 * g * s * s - 2.0 * s + g * 22.0;
        CHECK(ode_rhs(spec, thermo, {s})[0] == doctest::Approx(want).epsilon(1e-14));
    }
}

TEST_CASE("ode_rhs: steady-state root agrees with the quadratic formula") {
    // gamma = 1, N = 100: -100 s^2 - 2 s + 102 = 0, root s = 1 exactly
    const NetworkSpec spec = single_site(100, -5.0); // strong negative field
    const ThermoParams thermo{kInfiniteBeta, 1.0};   // gamma = +1
    const double root_bisect = bisect_root(spec, thermo, 0.0, 1.05);
    const double root_quadratic = (-1.0 + std::sqrt(1.0 + 100.0 * 102.0)) / 100.0;
    CHECK(root_quadratic == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(root_bisect == doctest::Approx(root_quadratic).epsilon(1e-12));
}

TEST_CASE("ode steady state is Phi-consistent in the large-N limit") {
    // the drift root solves the closure equation, the exact equilibrium is
    // activation_phi; they agree once z N >> 1 (the closure distorts the
    // slope near zero field, so the near-linear regime is excluded)
    const int N = 1000;
    for (double z : {0.01, 0.03, 0.1, 0.5}) { // z = beta * lambda
        const double g = std::tanh(-z);
        const double root =
            (-1.0 + std::sqrt(1.0 + N * g * g * (N + 2.0))) / (N * g);
        CHECK(std::fabs(root - activation_phi(z, N)) < 0.02);
    }
}

TEST_CASE("integrate_ode: a steady-state start stays constant") {
    const NetworkSpec spec = single_site(50, 0.4);
    const double g = std::tanh(-0.7 * 0.4);
    const double root = (-1.0 + std::sqrt(1.0 + 50.0 * g * g * 52.0)) / (50.0 * g);
    const Trajectory traj = integrate_ode(spec, BetaSchedule::constant(0.7), 1.0, {root},
                                          0.2, 1e-4, 0.02);
    for (const SpinState& s : traj.samples)
        CHECK(s[0] == doctest::Approx(root).epsilon(1e-8));
}

TEST_CASE("integrate_ode: matches analytic_single_site to 1e-6") {
    for (int N : {10, 100, 1000}) {
        for (double lambda : {0.8, -1.2}) {
            const NetworkSpec spec = single_site(N, lambda);
            const double beta = 1.0;
            const double g = std::tanh(-beta * lambda);
            const double horizon = 10.0 / (N * std::fabs(g));
            const double dt = horizon / 16384.0;
            const Trajectory traj = integrate_ode(spec, BetaSchedule::constant(beta), 1.0,
                                                  {0.0}, horizon, dt, horizon / 64.0);
            for (std::size_t c = 0; c < traj.times.size(); ++c) {
                const double want = analytic_single_site(N, 1.0, g, 0.0, traj.times[c]);
                CHECK(std::fabs(traj.samples[c][0] - want) < 1e-6);
            }
        }
    }
}

TEST_CASE("analytic_single_site: boundary condition and long-time limit") {
    const double g = 0.7;
    const int N = 40;
    CHECK(analytic_single_site(N, 1.0, g, 0.3, 0.0) == doctest::Approx(0.3).epsilon(1e-12));
    const double A = std::sqrt(1.0 + 2.0 / N + 1.0 / (N * N * g * g));
    CHECK(analytic_single_site(N, 1.0, g, 0.0, 1e6 / N) ==
          doctest::Approx(A - 1.0 / (N * g)).epsilon(1e-10));
}

TEST_CASE("analytic_single_site: satisfies the single-site drift equation") {
    // residual of (1/alpha) ds/dt + N g s^2 + 2 s - g(2+N) with a
    // Richardson finite-difference derivative
    const int N = 1000;
    const double g = std::tanh(-1.0);
    const double alpha = 1.0;
    const double A = std::sqrt(1.0 + 2.0 / N + 1.0 / (N * (double)N * g * g));
    const double h = 6e-4 / (alpha * std::fabs(g) * A * N);
    for (double t_scale : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        const double t = t_scale / (alpha * std::fabs(g) * N);
        auto s_of = [&](double tt) { return analytic_single_site(N, alpha, g, 0.0, tt); };
        const double ds =
            (s_of(t - 2 * h) - 8 * s_of(t - h) + 8 * s_of(t + h) - s_of(t + 2 * h)) / (12 * h);
        const double s = s_of(t);
        const double residual = ds / alpha + N * g * s * s + 2 * s - g * (2 + N);
        CHECK(std::fabs(residual) < 1e-8 * (2 + N)); // relative to the drift scale
    }
}

TEST_CASE("analytic_single_site: relaxation time scales as 1/N") {
    // time to cover half the gap toward the steady state, N = 100 vs 10000
    auto half_time = [](int N) {
        const double g = 1.0;
        const double A = std::sqrt(1.0 + 2.0 / N + 1.0 / ((double)N * N));
        const double s_inf = A - 1.0 / N;
        double lo = 0.0, hi = 10.0 / N;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (analytic_single_site(N, 1.0, g, 0.0, mid) < 0.5 * s_inf) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };
    const double ratio = half_time(100) / half_time(10000);
    CHECK(ratio == doctest::Approx(100.0).epsilon(0.05));
}

TEST_CASE("analytic_single_site: gamma = 0 falls back to exponential decay") {
    CHECK(analytic_single_site(10, 2.0, 0.0, 0.5, 0.3) ==
          doctest::Approx(0.5 * std::exp(-2.0 * 2.0 * 0.3)).epsilon(1e-14));
}

TEST_CASE("analytic_single_site: unreachable initial condition throws") {
    // s0 + 1/(N gamma) beyond A * tanh range
    CHECK_THROWS_AS(analytic_single_site(5, 1.0, 0.9, 1.5, 0.1), std::domain_error);
}

TEST_CASE("sde_coefficients: saturated spin with matching gamma has zero diffusion") {
    const NetworkSpec spec = single_site(50, -3.0);
    const ThermoParams thermo{kInfiniteBeta, 1.0}; // gamma = +1
    CHECK(sde_coefficients(spec, thermo, {1.0}, 0).diffusion == doctest::Approx(0.0));
}

TEST_CASE("sde_coefficients: gamma = 0, s = 0 gives (alpha/2)(1 + 2/N)") {
    const NetworkSpec spec = NetworkSpec::zeros(1, 20);
    const ThermoParams thermo{1.0, 1.4};
    CHECK(sde_coefficients(spec, thermo, {0.0}, 0).diffusion ==
          doctest::Approx(0.5 * 1.4 * (1.0 + 0.1)).epsilon(1e-14));
}

TEST_CASE("sde_coefficients: drift is exactly half the ode_rhs") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> sdist(-1.0, 1.0);
    NetworkSpec spec = NetworkSpec::zeros(3, 30);
    std::normal_distribution<double> jdist(0.0, 0.5);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            spec.coupling(i, j) = spec.coupling(j, i) = jdist(gen);
    spec.lambda = {0.2, -0.4, 0.1};
    const ThermoParams thermo{0.8, 1.7};
    for (int trial = 0; trial < 50; ++trial) {
        const SpinState s{sdist(gen), sdist(gen), sdist(gen)};
        const SpinState rhs = ode_rhs(spec, thermo, s);
        for (int i = 0; i < 3; ++i)
            CHECK(sde_coefficients(spec, thermo, s, i).drift ==
                  doctest::Approx(0.5 * rhs[i]).epsilon(1e-12));
    }
}

TEST_CASE("sde diffusion is non-negative on the whole domain") {
    const NetworkSpec spec = NetworkSpec::zeros(1, 2);
    for (double g : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        for (double s = -1.0; s <= 1.0; s += 0.01) {
            const double q = (1.0 + s) * (1.0 - s) + 2.0 / spec.N * (1.0 - g * s);
            CHECK(q >= -1e-15);
        }
    }
}

TEST_CASE("integrate_sde: zero noise reduces to the ODE within 1e-3") {
    NetworkSpec spec = NetworkSpec::zeros(2, 20);
    spec.coupling(0, 1) = spec.coupling(1, 0) = 0.01;
    spec.lambda = {0.4, -0.2};
    const BetaSchedule beta = BetaSchedule::constant(0.5);
    SdeParams params;
    params.dt = 1e-5;
    params.noise_scale = 0.0;
    const SpinState s0{0.1, -0.1};
    const SdeResult em = integrate_sde(spec, beta, 1.0, s0, 2.0, 0.5, params);
    const Trajectory rk = integrate_ode(spec, beta, 1.0, s0, 2.0, 1e-5, 0.5);
    for (std::size_t c = 0; c < em.trajectory.times.size(); ++c)
        for (int i = 0; i < 2; ++i)
            CHECK(std::fabs(em.trajectory.samples[c][i] - rk.samples[c][i]) < 1e-3);
}

TEST_CASE("integrate_sde: reproducible from the seed") {
    const NetworkSpec spec = single_site(15, 0.3);
    const BetaSchedule beta = BetaSchedule::constant(0.4);
    SdeParams params;
    params.dt = 1e-3;
    params.seed = 909;
    const SdeResult a = integrate_sde(spec, beta, 1.0, {0.0}, 1.0, 0.1, params);
    const SdeResult b = integrate_sde(spec, beta, 1.0, {0.0}, 1.0, 0.1, params);
    CHECK(a.trajectory.samples == b.trajectory.samples);
}

TEST_CASE("integrate_sde: long-time mean matches activation_phi within 3 SE") {
    const int N = 20;
    const double beta = 0.1, lambda = 0.3;
    const NetworkSpec spec = single_site(N, lambda);
    const int paths = 200;
    double sum = 0.0, sum2 = 0.0;
    for (int path = 0; path < paths; ++path) {
        SdeParams params;
        params.dt = 2e-3;
        params.seed = derive_seed(5150, path);
        const SdeResult result = integrate_sde(spec, BetaSchedule::constant(beta), 1.0,
                                               {0.0}, 30.0, 30.0, params);
        const double s = result.trajectory.samples.back()[0];
        sum += s;
        sum2 += s * s;
    }
    const double mean = sum / paths;
    const double var = (sum2 - paths * mean * mean) / (paths - 1);
    const double se = std::sqrt(var / paths);
    CHECK(std::fabs(mean - activation_phi(beta * lambda, N)) < 3.0 * se);
}

TEST_CASE("integrate_sde: escapes a double well that traps the ODE") {
    // J < 0 makes the anti-aligned pair the two degenerate minima; the
    // barrier |J| N^2 ~ 2.7 k_B T is crossable by the noisy path only
    NetworkSpec spec = NetworkSpec::zeros(2, 30);
    spec.coupling(0, 1) = spec.coupling(1, 0) = -0.003;
    const BetaSchedule beta = BetaSchedule::constant(1.0);
    const SpinState s0{0.6, -0.6}; // inside one well

    const Trajectory ode = integrate_ode(spec, beta, 1.0, s0, 50.0, 1e-3, 0.5);
    bool ode_crossed = false;
    for (const SpinState& s : ode.samples)
        if (s[0] - s[1] < 0.0) ode_crossed = true;
    CHECK(!ode_crossed);

    SdeParams params;
    params.dt = 1e-3;
    params.seed = 33;
    const SdeResult sde = integrate_sde(spec, beta, 1.0, s0, 400.0, 0.05, params);
    bool sde_crossed = false;
    for (const SpinState& s : sde.trajectory.samples)
        if (s[0] - s[1] < -0.5) sde_crossed = true;
    CHECK(sde_crossed);
}

TEST_CASE("integrate_sde: stationary density close to the exact marginal (TV < 0.05)") {
    const int N = 20;
    const NetworkSpec spec = single_site(N, 0.2);
    const double beta = 0.1;
    SdeParams params;
    params.dt = 1e-3;
    params.seed = 61;
    // one long path, sampled after burn-in, binned at occupation resolution
    const SdeResult result = integrate_sde(spec, BetaSchedule::constant(beta), 1.0, {0.0},
                                           12000.0, 0.5, params);
    // N+1 equal-width cells on [-1, 1]: the measure-preserving way to compare
    // a continuum density with the N+1 discrete occupations
    std::vector<double> histogram(N + 1, 0.0);
    long count = 0;
    for (std::size_t c = 100; c < result.trajectory.samples.size(); ++c) {
        const double s = result.trajectory.samples[c][0];
        const int k =
            std::clamp(static_cast<int>(std::floor((s + 1.0) / 2.0 * (N + 1))), 0, N);
        histogram[k] += 1.0;
        ++count;
    }
    const ProbabilityVector p = stationary_distribution(spec, {beta, 1.0});
    double tv = 0.0;
    for (int k = 0; k <= N; ++k) tv += 0.5 * std::fabs(histogram[k] / count - p[k]);
    CHECK(tv < 0.05);
    // diffusion clipping is a boundary-sliver event only
    CHECK(result.clip_events < result.steps / 1000 + 1);
}
