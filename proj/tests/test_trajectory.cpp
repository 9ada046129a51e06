#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nbundle/io.hpp"
#include "nbundle/rng.hpp"
#include "nbundle/steady.hpp"
#include "nbundle/trajectory.hpp"

using namespace nbundle;

namespace {

SystemParams paper_params() {
    SystemParams p;
    p.gamma_a = 0.1;
    p.gamma_sigma = 0.01;
    p.delta = -60.0;
    return p;
}

SystemParams omega2_point() {
    SystemParams p = paper_params();
    p.omega = 32.0;
    p.omega_L_detuning = resonance_dressed(2, p.omega, p.delta);
    return p;
}

} // namespace

TEST_CASE("dark vacuum produces no clicks") {
    const auto space = build_space(2);
    SystemParams p = paper_params();
    p.omega = 0.0;
    SimOptions opt;
    opt.duration = 50.0;
    opt.burn_in = 0.0;
    opt.seed = 7;
    const auto rec = simulate(p, space, opt);
    CHECK(rec.clicks.empty());
}

TEST_CASE("excited emitter decays with the exponential law") {
    const auto space = build_space(2);
    SystemParams p = paper_params();
    p.omega = 0.0;
    p.omega_L_detuning = 0.0;

    const Vec psi0 = basis_state(space, 0, 1);
    const int n_seeds = 10000;
    std::vector<double> times;
    int multi_click = 0, emitter_clicks = 0;
    for (int s = 0; s < n_seeds; ++s) {
        SimOptions opt;
        opt.duration = 400.0;  // ~40 emitter lifetimes (units 1/gamma_a)
        opt.burn_in = 0.0;
        opt.dt = 1.0;
        opt.seed = derive_seed(99, s);
        const auto rec = simulate(p, space, opt, &psi0);
        if (rec.clicks.size() != 1) ++multi_click;
        if (rec.clicks.empty()) continue;
        if (rec.clicks[0].channel == Channel::emitter) ++emitter_clicks;
        times.push_back(rec.clicks[0].time);
    }
    // Exactly one click per trajectory (the stored quantum leaves once).
    CHECK(multi_click == 0);
    // The tiny dispersive Purcell channel diverts a fraction ~(g/delta)^2.
    CHECK(emitter_clicks > int(0.99 * times.size()));

    // KS test of the click-time distribution against Exp(gamma_sigma),
    // at the 1% level: D_n < 1.628/sqrt(n). Times are in 1/gamma_a, so
    // the rate is gamma_sigma/gamma_a = 0.1.
    std::sort(times.begin(), times.end());
    const double rate = p.gamma_sigma / p.gamma_a;
    double dmax = 0.0;
    for (size_t i = 0; i < times.size(); ++i) {
        const double cdf = 1.0 - std::exp(-rate * times[i]);
        dmax = std::max(dmax, std::abs(cdf - double(i + 1) / times.size()));
        dmax = std::max(dmax, std::abs(cdf - double(i) / times.size()));
    }
    CHECK(dmax < 1.628 / std::sqrt(double(times.size())));
}

TEST_CASE("click record invariants and reproducibility") {
    const auto space = build_space(10);
    SystemParams p = omega2_point();
    SimOptions opt;
    opt.duration = 500.0;
    opt.burn_in = 50.0;
    opt.seed = 31337;
    const auto rec = simulate(p, space, opt);
    REQUIRE(!rec.clicks.empty());

    SUBCASE("strictly ascending times within (burn_in, duration]") {
        for (size_t i = 0; i < rec.clicks.size(); ++i) {
            CHECK(rec.clicks[i].time > opt.burn_in);
            CHECK(rec.clicks[i].time <= opt.duration);
            if (i) CHECK(rec.clicks[i].time > rec.clicks[i - 1].time);
        }
    }
    SUBCASE("identical seed and settings give a bit-identical record") {
        const auto rec2 = simulate(p, space, opt);
        CHECK(serialize_click_record(rec) == serialize_click_record(rec2));
        SimOptions opt3 = opt;
        opt3.seed = 31338;
        const auto rec3 = simulate(p, space, opt3);
        CHECK(serialize_click_record(rec) != serialize_click_record(rec3));
    }
}

TEST_CASE("long-run click rates match the steady state") {
    const auto space = build_space(8);
    SystemParams p = omega2_point();

    const Mat rho = steady_state(liouvillian(p, space));
    const auto ops = build_operators(space);
    const double n_a = photon_number(rho, space);
    const double n_sigma =
        expectation(rho, Mat(ops.sigma.adjoint() * ops.sigma)).real();

    SimOptions opt;
    opt.duration = 3.0e4;
    opt.burn_in = 50.0;
    opt.seed = 2718281;
    const auto rec = simulate(p, space, opt);
    const double t_obs = opt.duration - opt.burn_in;

    // Rates in 1/gamma_a time units: cavity clicks at n_a, emitter at
    // (gamma_sigma/gamma_a) n_sigma.
    const double rate_a = double(rec.count(Channel::cavity)) / t_obs;
    const double rate_s = double(rec.count(Channel::emitter)) / t_obs;
    const double se_a = std::sqrt(double(rec.count(Channel::cavity))) / t_obs;
    const double se_s = std::sqrt(double(rec.count(Channel::emitter))) / t_obs;
    CHECK(std::abs(rate_a - n_a) < 3.0 * se_a);
    CHECK(std::abs(rate_s - (p.gamma_sigma / p.gamma_a) * n_sigma) < 3.0 * se_s);
}

TEST_CASE("trajectory snapshot rows are normalized") {
    const auto space = build_space(8);
    SystemParams p = omega2_point();
    SimOptions opt;
    opt.duration = 100.0;
    opt.burn_in = 0.0;
    opt.seed = 5;
    opt.snapshot_stride = 0.5;
    TrajectorySnapshot snap;
    simulate(p, space, opt, nullptr, &snap);
    REQUIRE(snap.times.size() > 100);
    for (Eigen::Index r = 0; r < snap.populations.rows(); ++r)
        CHECK(snap.populations.row(r).sum() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("merged statistics do not depend on trajectory order") {
    const auto space = build_space(8);
    SystemParams p = omega2_point();
    auto record_for = [&](int i) {
        SimOptions opt;
        opt.duration = 300.0;
        opt.burn_in = 50.0;
        opt.seed = derive_seed(123456, i);
        return simulate(p, space, opt);
    };
    std::vector<std::string> serialized;
    for (int i = 0; i < 4; ++i)
        serialized.push_back(serialize_click_record(record_for(i)));
    // Re-run in permuted order; each record only depends on its own seed.
    for (int i : {2, 0, 3, 1})
        CHECK(serialize_click_record(record_for(i)) == serialized[size_t(i)]);
}

TEST_CASE("input validation") {
    const auto space = build_space(2);
    SystemParams p = paper_params();
    SimOptions opt;
    opt.duration = 10.0;
    opt.burn_in = 20.0;
    CHECK_THROWS_AS(simulate(p, space, opt), std::invalid_argument);

    opt.burn_in = 0.0;
    opt.dt = 6.0;  // exceeds 0.5/gamma_a = 5
    CHECK_THROWS_AS(simulate(p, space, opt), std::invalid_argument);

    opt.dt = 0.05;
    Vec bad = 2.0 * basis_state(space, 0, 0);
    CHECK_THROWS_AS(simulate(p, space, opt, &bad), std::invalid_argument);
}

TEST_CASE("ensemble state") {
    const auto space = build_space(6);

    SUBCASE("undriven ensemble is the vacuum projector") {
        SystemParams p = paper_params();
        p.omega = 0.0;
        const Mat rho = ensemble_state(p, space, 50, 20.0, 9001, 0.5, 2);
        Mat expected = Mat::Zero(space.dim, space.dim);
        expected(0, 0) = 1.0;
        CHECK((rho - expected).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("trajectory average converges to the steady state") {
        SystemParams p = omega2_point();
        const Mat rho_ss = steady_state(liouvillian(p, space));

        // The trace-distance draw is heavy tailed, so assert on means
        // over seed groups. Doubling the ensemble shrinks the mean
        // distance by roughly sqrt(2) once sampling noise dominates.
        double mean_small = 0.0, mean_large = 0.0;
        const int reps = 4;
        for (int r = 0; r < reps; ++r) {
            mean_small += trace_distance(
                ensemble_state(p, space, 750, 100.0, 777001 + r, 0.5, 2), rho_ss);
            mean_large += trace_distance(
                ensemble_state(p, space, 1500, 100.0, 888001 + r, 0.5, 2), rho_ss);
        }
        mean_small /= reps;
        mean_large /= reps;
        CHECK(mean_large < 0.02);
        const double ratio = mean_small / mean_large;
        CHECK(ratio > 1.05);
        CHECK(ratio < 2.8);
    }
}
