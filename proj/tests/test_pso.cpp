#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "psonn/metrics.hpp"
#include "psonn/pso.hpp"

#include "helpers.hpp"

using namespace psonn;

namespace {

double sphere(const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v * v;
    return s;
}

bool states_equal(const SwarmState& a, const SwarmState& b) {
    if (a.particles.size() != b.particles.size()) return false;
    for (std::size_t i = 0; i < a.particles.size(); ++i) {
        if (a.particles[i].position != b.particles[i].position) return false;
        if (a.particles[i].velocity != b.particles[i].velocity) return false;
        if (a.particles[i].pbest_position != b.particles[i].pbest_position) return false;
        if (a.particles[i].pbest_fitness != b.particles[i].pbest_fitness) return false;
    }
    return a.gbest_position == b.gbest_position && a.gbest_fitness == b.gbest_fitness;
}

}  // namespace

TEST_CASE("init_swarm") {
    SwarmConfig cfg;
    cfg.swarm_size = 40;
    cfg.bound_low = -5;
    cfg.bound_high = 5;
    cfg.vmax = 2;
    cfg.seed = 4242;

    SUBCASE("same seed builds identical states") {
        const auto a = init_swarm(cfg, 6, sphere);
        const auto b = init_swarm(cfg, 6, sphere);
        CHECK(states_equal(a, b));
    }
    SUBCASE("positions and velocities respect their ranges over many draws") {
        SwarmConfig big = cfg;
        big.swarm_size = 1000;
        const auto state = init_swarm(big, 3, sphere);
        for (const auto& p : state.particles) {
            for (double x : p.position) {
                CHECK(x >= big.bound_low);
                CHECK(x <= big.bound_high);
            }
            for (double v : p.velocity) {
                CHECK(v >= -big.vmax);
                CHECK(v <= big.vmax);
            }
            CHECK(p.pbest_position == p.position);
        }
    }
    SUBCASE("gbest is the best initial pbest") {
        const auto state = init_swarm(cfg, 4, sphere);
        double best = state.particles[0].pbest_fitness;
        for (const auto& p : state.particles) best = std::min(best, p.pbest_fitness);
        CHECK(state.gbest_fitness == best);
        CHECK(sphere(state.gbest_position) == state.gbest_fitness);
    }
    SUBCASE("invalid configs are rejected") {
        SwarmConfig bad = cfg;
        bad.swarm_size = 0;
        CHECK_THROWS_AS(init_swarm(bad, 3, sphere), TrainingError);
        bad = cfg;
        bad.bound_low = 2;
        bad.bound_high = -2;
        CHECK_THROWS_AS(init_swarm(bad, 3, sphere), TrainingError);
        CHECK_THROWS_AS(init_swarm(cfg, 0, sphere), TrainingError);
    }
}

TEST_CASE("step") {
    SUBCASE("zero inertia and zero attraction freeze the swarm") {
        SwarmConfig cfg;
        cfg.swarm_size = 8;
        cfg.inertia = 0;
        cfg.cognitive = 0;
        cfg.social = 0;
        cfg.seed = 7;
        auto state = init_swarm(cfg, 3, sphere);
        step(state, cfg, sphere);
        for (const auto& p : state.particles)
            for (double v : p.velocity) CHECK(v == 0.0);
        const auto frozen = state;
        step(state, cfg, sphere);
        CHECK(states_equal(state, frozen));
    }
    SUBCASE("a particle sitting on both attractors with no inertia stops") {
        SwarmConfig cfg;
        cfg.swarm_size = 1;  // x == pbest == gbest immediately after init
        cfg.inertia = 0;
        cfg.seed = 11;
        auto state = init_swarm(cfg, 4, sphere);
        state.particles[0].velocity.assign(4, 0.0);
        step(state, cfg, sphere);
        for (double v : state.particles[0].velocity) CHECK(v == 0.0);
    }
    SUBCASE("gbest never worsens and always equals the min pbest") {
        Rng seeder(3131);
        for (int trial = 0; trial < 10; ++trial) {
            SwarmConfig cfg;
            cfg.swarm_size = 15;
            cfg.seed = seeder.raw();
            // a rugged objective
            auto objective = [](const std::vector<double>& x) {
                double s = 0;
                for (double v : x) s += std::sin(3.0 * v) + 0.1 * v * v;
                return s;
            };
            auto state = init_swarm(cfg, 3, objective);
            double last = state.gbest_fitness;
            for (int it = 0; it < 25; ++it) {
                step(state, cfg, objective);
                CHECK(state.gbest_fitness <= last);
                last = state.gbest_fitness;
                double best = state.particles[0].pbest_fitness;
                for (const auto& p : state.particles) best = std::min(best, p.pbest_fitness);
                CHECK(state.gbest_fitness == best);
            }
        }
    }
    SUBCASE("positions and velocities stay clamped after every step") {
        SwarmConfig cfg;
        cfg.swarm_size = 12;
        cfg.bound_low = -1.5;
        cfg.bound_high = 1.5;
        cfg.vmax = 0.75;
        cfg.seed = 5;
        auto state = init_swarm(cfg, 5, sphere);
        for (int it = 0; it < 40; ++it) {
            step(state, cfg, sphere);
            for (const auto& p : state.particles) {
                for (double x : p.position) {
                    CHECK(x >= cfg.bound_low);
                    CHECK(x <= cfg.bound_high);
                }
                for (double v : p.velocity) {
                    CHECK(v >= -cfg.vmax);
                    CHECK(v <= cfg.vmax);
                }
            }
        }
    }
    SUBCASE("a non-finite fitness names the particle") {
        SwarmConfig cfg;
        cfg.swarm_size = 3;
        cfg.seed = 2;
        int calls = 0;
        auto nasty = [&calls](const std::vector<double>&) {
            return ++calls > 4 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
        };
        CHECK_THROWS_WITH_AS(
            [&] {
                auto state = init_swarm(cfg, 2, nasty);
                step(state, cfg, nasty);
            }(),
            doctest::Contains("particle 1"), TrainingError);
    }
}

TEST_CASE("optimize") {
    SUBCASE("solves the 2-D sphere") {
        SwarmConfig cfg;
        cfg.swarm_size = 20;
        cfg.bound_low = -5;
        cfg.bound_high = 5;
        cfg.iterations = 200;
        cfg.seed = 1;
        const auto result = optimize(cfg, 2, sphere);
        CHECK(result.best_fitness < 1e-4);
        CHECK(result.fitness_history.size() == 201);
    }
    SUBCASE("constant objective yields a flat history at the constant") {
        SwarmConfig cfg;
        cfg.swarm_size = 10;
        cfg.iterations = 30;
        cfg.seed = 6;
        const auto result = optimize(cfg, 3, [](const std::vector<double>&) { return 4.25; });
        CHECK(result.best_fitness == 4.25);
        for (double f : result.fitness_history) CHECK(f == 4.25);
    }
    SUBCASE("finds the unique optimum of (x - 3)^2") {
        SwarmConfig cfg;
        cfg.swarm_size = 20;
        cfg.bound_low = -5;
        cfg.bound_high = 5;
        cfg.iterations = 100;
        cfg.seed = 3;
        const auto result =
            optimize(cfg, 1, [](const std::vector<double>& x) { return (x[0] - 3.0) * (x[0] - 3.0); });
        CHECK(std::fabs(result.best_position[0] - 3.0) < 0.01);
    }
    SUBCASE("history is monotone non-increasing for arbitrary objectives") {
        Rng seeder(777);
        for (int trial = 0; trial < 5; ++trial) {
            SwarmConfig cfg;
            cfg.swarm_size = 10;
            cfg.iterations = 50;
            cfg.seed = seeder.raw();
            auto wavy = [](const std::vector<double>& x) {
                double s = 0;
                for (double v : x) s += std::cos(5.0 * v) * v;
                return s;
            };
            const auto result = optimize(cfg, 2, wavy);
            for (std::size_t i = 1; i < result.fitness_history.size(); ++i)
                CHECK(result.fitness_history[i] <= result.fitness_history[i - 1]);
        }
    }
    SUBCASE("identical seeds give bit-identical results, sequential or parallel") {
        SwarmConfig cfg;
        cfg.swarm_size = 16;
        cfg.iterations = 40;
        cfg.seed = 12345;
        const auto a = optimize(cfg, 4, sphere, 1);
        const auto b = optimize(cfg, 4, sphere, 1);
        const auto c = optimize(cfg, 4, sphere, 4);
        CHECK(a.best_position == b.best_position);
        CHECK(a.fitness_history == b.fitness_history);
        CHECK(a.best_position == c.best_position);
        CHECK(a.best_fitness == c.best_fitness);
        CHECK(a.fitness_history == c.fitness_history);
    }
    SUBCASE("median sphere improvement over 20 seeds spans at least 4 orders") {
        std::vector<double> ratios;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            SwarmConfig cfg;
            cfg.swarm_size = 20;
            cfg.bound_low = -5;
            cfg.bound_high = 5;
            cfg.iterations = 200;
            cfg.seed = seed;
            const auto r = optimize(cfg, 2, sphere);
            ratios.push_back(r.fitness_history.front() / std::max(r.fitness_history.back(), 1e-300));
        }
        std::sort(ratios.begin(), ratios.end());
        const double median = 0.5 * (ratios[9] + ratios[10]);
        CHECK(median >= 1e4);
    }
}

TEST_CASE("train_psonn") {
    SUBCASE("fits a separable two-blob set to 100% on both folds") {
        const Dataset blobs = testutil::make_blobs(100, 60);
        const auto [train, test] = split(blobs, {.train_fraction = 0.7, .seed = 2, .shuffle = true});
        SwarmConfig cfg;
        cfg.swarm_size = 30;
        cfg.iterations = 200;
        cfg.seed = 9;
        const auto result = train_psonn(Topology{{2, 5, 5, 1}}, train, cfg);

        auto accuracy = [&](const Dataset& fold) {
            std::size_t hits = 0;
            for (const auto& rec : fold.records)
                hits += result.network.predict_label(rec.features) == rec.label ? 1 : 0;
            return static_cast<double>(hits) / static_cast<double>(fold.size());
        };
        CHECK(accuracy(train) == 1.0);
        CHECK(accuracy(test) == 1.0);

        // at 100% the confusion matrix has empty off-diagonals
        std::vector<int> actuals, predicted;
        for (const auto& rec : test.records) {
            actuals.push_back(rec.label);
            predicted.push_back(result.network.predict_label(rec.features));
        }
        const auto cm = build_confusion(actuals, predicted);
        CHECK(cm.fn == 0);
        CHECK(cm.fp == 0);
    }
    SUBCASE("optimization trace matches the final network") {
        const Dataset blobs = testutil::make_blobs(40, 61);
        SwarmConfig cfg;
        cfg.swarm_size = 10;
        cfg.iterations = 20;
        cfg.seed = 5;
        const auto result = train_psonn(Topology{{2, 3, 1}}, blobs, cfg);
        CHECK(result.optimization.best_position == result.network.params);
        CHECK(mse_loss(result.network, blobs) ==
              doctest::Approx(result.optimization.best_fitness).epsilon(1e-15));
    }
    SUBCASE("misclassification fitness also separates the blobs") {
        const Dataset blobs = testutil::make_blobs(60, 62);
        SwarmConfig cfg;
        cfg.swarm_size = 25;
        cfg.iterations = 150;
        cfg.seed = 3;
        const auto result =
            train_psonn(Topology{{2, 5, 5, 1}}, blobs, cfg, PsonnFitness::misclassification);
        CHECK(result.optimization.best_fitness == 0.0);
    }
    SUBCASE("feature-count mismatch is rejected") {
        SwarmConfig cfg;
        cfg.swarm_size = 4;
        cfg.iterations = 1;
        CHECK_THROWS_AS(train_psonn(Topology{{3, 2, 1}}, testutil::make_blobs(10, 1), cfg), TrainingError);
    }
}
