#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "psonn/dataset.hpp"
#include "psonn/neural_net.hpp"
#include "psonn/util.hpp"

namespace psonn {

using Objective = std::function<double(const std::vector<double>&)>;

struct SwarmConfig {
    std::size_t swarm_size = 50;
    double inertia = 0.729;
    double cognitive = 1.49445;
    double social = 1.49445;
    double bound_low = -10.0;
    double bound_high = 10.0;
    double vmax = 4.0;
    std::size_t iterations = 700;
    std::uint64_t seed = 0;

    void validate() const {
        if (swarm_size == 0) throw TrainingError("swarm_size must be at least 1");
        if (!(bound_low < bound_high)) throw TrainingError("position bounds require low < high");
        if (!(vmax > 0.0)) throw TrainingError("vmax must be positive");
        if (iterations == 0) throw TrainingError("iterations must be at least 1");
    }
};

struct Particle {
    std::vector<double> position;
    std::vector<double> velocity;
    std::vector<double> pbest_position;
    double pbest_fitness = 0;
};

struct SwarmState {
    std::vector<Particle> particles;
    std::vector<double> gbest_position;
    double gbest_fitness = 0;
    std::size_t iteration = 0;
    Rng rng{0};  // stream shared by every step of this run
};

struct OptimizeResult {
    std::vector<double> best_position;
    double best_fitness = 0;
    std::vector<double> fitness_history;  // gbest per iteration, entry 0 at initialization
};

namespace detail {

inline double checked_fitness(const Objective& fitness, const std::vector<double>& x, std::size_t particle) {
    const double f = fitness(x);
    if (!std::isfinite(f))
        throw TrainingError("particle " + std::to_string(particle) + ": non-finite fitness " +
                            std::to_string(f));
    return f;
}

}  // namespace detail

// Positions uniform in [low, high]^dim, velocities uniform in [-vmax, vmax],
// pbest at the initial position, gbest the best initial pbest.
inline SwarmState init_swarm(const SwarmConfig& cfg, std::size_t dim, const Objective& fitness,
                             unsigned threads = 1) {
    cfg.validate();
    if (dim == 0) throw TrainingError("search dimension must be at least 1");

    SwarmState state;
    state.rng = Rng(cfg.seed);
    state.particles.resize(cfg.swarm_size);
    for (auto& p : state.particles) {
        p.position.resize(dim);
        p.velocity.resize(dim);
        for (std::size_t d = 0; d < dim; ++d) p.position[d] = state.rng.uniform(cfg.bound_low, cfg.bound_high);
        for (std::size_t d = 0; d < dim; ++d) p.velocity[d] = state.rng.uniform(-cfg.vmax, cfg.vmax);
        p.pbest_position = p.position;
    }
    parallel_for(state.particles.size(), threads, [&](std::size_t i) {
        auto& p = state.particles[i];
        p.pbest_fitness = detail::checked_fitness(fitness, p.pbest_position, i);
    });
    state.gbest_position = state.particles[0].pbest_position;
    state.gbest_fitness = state.particles[0].pbest_fitness;
    for (const auto& p : state.particles) {
        if (p.pbest_fitness < state.gbest_fitness) {
            state.gbest_fitness = p.pbest_fitness;
            state.gbest_position = p.pbest_position;
        }
    }
    return state;
}

// One synchronous swarm update:
//   v <- w*v + c1*r1.(pbest - x) + c2*r2.(gbest - x),  clamped to [-vmax, vmax]
//   x <- x + v,                                        clamped to bounds
// with fresh per-component r1, r2 and the gbest from the previous iteration.
// pbest/gbest move only on strict fitness improvement. Fitness evaluations may
// run concurrently; updates are reduced in particle-index order, so results do
// not depend on the schedule.
inline void step(SwarmState& state, const SwarmConfig& cfg, const Objective& fitness,
                 unsigned threads = 1) {
    for (auto& p : state.particles) {
        for (std::size_t d = 0; d < p.position.size(); ++d) {
            const double r1 = state.rng.uniform01();
            const double r2 = state.rng.uniform01();
            double v = cfg.inertia * p.velocity[d] +
                       cfg.cognitive * r1 * (p.pbest_position[d] - p.position[d]) +
                       cfg.social * r2 * (state.gbest_position[d] - p.position[d]);
            v = std::clamp(v, -cfg.vmax, cfg.vmax);
            p.velocity[d] = v;
            p.position[d] = std::clamp(p.position[d] + v, cfg.bound_low, cfg.bound_high);
        }
    }

    std::vector<double> fit(state.particles.size());
    parallel_for(state.particles.size(), threads, [&](std::size_t i) {
        fit[i] = detail::checked_fitness(fitness, state.particles[i].position, i);
    });

    for (std::size_t i = 0; i < state.particles.size(); ++i) {
        auto& p = state.particles[i];
        if (fit[i] < p.pbest_fitness) {
            p.pbest_fitness = fit[i];
            p.pbest_position = p.position;
        }
        if (p.pbest_fitness < state.gbest_fitness) {
            state.gbest_fitness = p.pbest_fitness;
            state.gbest_position = p.pbest_position;
        }
    }
    ++state.iteration;
}

inline OptimizeResult optimize(const SwarmConfig& cfg, std::size_t dim, const Objective& fitness,
                               unsigned threads = 1) {
    SwarmState state = init_swarm(cfg, dim, fitness, threads);
    OptimizeResult result;
    result.fitness_history.reserve(cfg.iterations + 1);
    result.fitness_history.push_back(state.gbest_fitness);
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        step(state, cfg, fitness, threads);
        result.fitness_history.push_back(state.gbest_fitness);
    }
    result.best_position = state.gbest_position;
    result.best_fitness = state.gbest_fitness;
    return result;
}

enum class PsonnFitness { mse, misclassification };

// Objective over flattened network parameters: decode and score on the
// training fold.
inline Objective make_psonn_objective(Topology topology, Dataset train,
                                      PsonnFitness kind = PsonnFitness::mse) {
    if (kind == PsonnFitness::mse)
        return [topology = std::move(topology), train = std::move(train)](const std::vector<double>& v) {
            return mse_loss(Network{topology, v}, train);
        };
    return [topology = std::move(topology), train = std::move(train)](const std::vector<double>& v) {
        const Network net{topology, v};
        std::size_t wrong = 0;
        for (const auto& rec : train.records)
            if (net.predict_label(rec.features) != rec.label) ++wrong;
        return static_cast<double>(wrong) / static_cast<double>(train.size());
    };
}

struct PsonnResult {
    Network network;
    OptimizeResult optimization;
};

// The swarm searches the network's flattened weight-and-bias space; the best
// position found becomes the trained network.
inline PsonnResult train_psonn(const Topology& topology, const Dataset& train, const SwarmConfig& cfg,
                               PsonnFitness fitness_kind = PsonnFitness::mse, unsigned threads = 1) {
    if (train.empty()) throw TrainingError("cannot train on an empty dataset");
    if (topology.input_size() != train.n_features())
        throw TrainingError("topology input size " + std::to_string(topology.input_size()) +
                            " does not match feature count " + std::to_string(train.n_features()));

    const std::size_t dim = param_count(topology);
    const Objective objective = make_psonn_objective(topology, train, fitness_kind);
    PsonnResult result;
    result.optimization = optimize(cfg, dim, objective, threads);
    result.network = unflatten(topology, result.optimization.best_position);
    return result;
}

}  // namespace psonn
