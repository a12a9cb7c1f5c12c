#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "armtune/errors.hpp"
#include "armtune/pid.hpp"
#include "armtune/simulate.hpp"

namespace armtune {

/// One GA individual: the six gains in order (kp1, ki1, kd1, kp2, ki2, kd2)
/// plus the cached ISE, empty until evaluated.
struct Chromosome {
    std::array<double, 6> genes{};
    std::optional<double> fitness;

    PidGains decode() const { return PidGains::from_array(genes); }
};

struct GeneBounds {
    double lo = 0.0;
    double hi = 150.0;
};

struct GaConfig {
    std::size_t pop_size = 20;
    std::size_t max_generations = 1000;
    double crossover_rate = 0.6;  // whole-chromosome BLX-0.5 probability
    double mutation_rate = 0.4;   // per-gene Gaussian probability
    std::array<GeneBounds, 6> gene_bounds{};
    std::size_t elite_count = 1;
    std::uint64_t seed = 1;
    std::size_t stall_generations = 25;
    double stall_tolerance = 1e-6;   // relative best-fitness improvement
    double penalty_fitness = 1e9;    // assigned to diverged simulations

    bool valid() const {
        if (pop_size < 2 || max_generations < 1) return false;
        if (crossover_rate < 0.0 || crossover_rate > 1.0) return false;
        if (mutation_rate < 0.0 || mutation_rate > 1.0) return false;
        if (elite_count >= pop_size) return false;
        if (stall_generations < 1 || stall_tolerance < 0.0) return false;
        if (!(penalty_fitness > 0.0)) return false;
        for (const auto& b : gene_bounds) {
            if (!(b.lo <= b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) return false;
        }
        return true;
    }
};

struct GenerationStats {
    double best_fitness;
    double mean_fitness;
};

enum class Termination { max_generations, stall };

struct GaReport {
    Chromosome best;
    std::size_t generations_run = 0;
    std::vector<GenerationStats> history;  // one entry per generation
    Termination terminated_by = Termination::max_generations;
};

/// Seeded RNG wrapper. All stochastic GA decisions are drawn through one
/// instance on a single thread, so results do not depend on how fitness
/// evaluations are scheduled.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) {
        if (!(hi > lo)) return lo;
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    double gaussian(double stddev) { return stddev * normal_(engine_); }

    std::size_t pick(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// ISE of the closed loop under the chromosome's gains; penalty_fitness when
/// the simulation diverges.
inline double fitness(const Chromosome& c, const RobotParams& p, const SimConfig& cfg,
                      double penalty_fitness) {
    const SimResult r = simulate(p, c.decode(), cfg);
    return r.diverged ? penalty_fitness : r.ise;
}

inline std::vector<Chromosome> init_population(const GaConfig& cfg, Rng& rng) {
    std::vector<Chromosome> pop(cfg.pop_size);
    for (auto& c : pop) {
        for (std::size_t i = 0; i < 6; ++i) {
            c.genes[i] = rng.uniform(cfg.gene_bounds[i].lo, cfg.gene_bounds[i].hi);
        }
    }
    return pop;
}

/// Winner of a size-2 tournament between population indices i and j:
/// lower fitness wins, ties go to the earlier index.
inline std::size_t tournament_winner(const std::vector<Chromosome>& pop, std::size_t i,
                                     std::size_t j) {
    const double fi = *pop[i].fitness;
    const double fj = *pop[j].fitness;
    if (fi < fj) return i;
    if (fj < fi) return j;
    return std::min(i, j);
}

/// Two parents via independent size-2 tournaments over an evaluated population.
inline std::pair<std::size_t, std::size_t> select_parents(const std::vector<Chromosome>& pop,
                                                          Rng& rng) {
    const std::size_t a = tournament_winner(pop, rng.pick(pop.size()), rng.pick(pop.size()));
    const std::size_t b = tournament_winner(pop, rng.pick(pop.size()), rng.pick(pop.size()));
    return {a, b};
}

/// BLX-0.5 blend crossover, gated whole-chromosome by `rate`. Each gene pair
/// spans [min - d/2, max + d/2] with d = |a_i - b_i|; both children sample
/// that interval uniformly and are clamped to the gene bounds.
inline std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b,
                                                   double rate,
                                                   const std::array<GeneBounds, 6>& bounds,
                                                   Rng& rng) {
    Chromosome c1, c2;
    if (rng.uniform(0.0, 1.0) < rate) {
        constexpr double alpha = 0.5;
        for (std::size_t i = 0; i < 6; ++i) {
            const double lo = std::min(a.genes[i], b.genes[i]);
            const double hi = std::max(a.genes[i], b.genes[i]);
            const double d = hi - lo;
            for (Chromosome* child : {&c1, &c2}) {
                const double v = rng.uniform(lo - alpha * d, hi + alpha * d);
                child->genes[i] = std::clamp(v, bounds[i].lo, bounds[i].hi);
            }
        }
    } else {
        c1.genes = a.genes;
        c2.genes = b.genes;
    }
    return {c1, c2};
}

/// Per-gene Gaussian mutation with sigma = 5% of the gene's range, gated by
/// `rate` per gene, clamped to bounds. Result is unevaluated.
inline Chromosome mutate(const Chromosome& c, double rate,
                         const std::array<GeneBounds, 6>& bounds, Rng& rng) {
    Chromosome out;
    out.genes = c.genes;
    for (std::size_t i = 0; i < 6; ++i) {
        if (rng.uniform(0.0, 1.0) < rate) {
            const double sigma = 0.05 * (bounds[i].hi - bounds[i].lo);
            out.genes[i] = std::clamp(out.genes[i] + rng.gaussian(sigma), bounds[i].lo,
                                      bounds[i].hi);
        }
    }
    return out;
}

/// Fill in missing fitness values, fanning the pure evaluations out over
/// `threads` workers (0 = hardware concurrency). Any evaluation failure is
/// mapped to the penalty fitness rather than aborting the run.
inline void evaluate_population(std::vector<Chromosome>& pop, const RobotParams& p,
                                const SimConfig& cfg, double penalty_fitness,
                                unsigned threads = 0) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (!pop[i].fitness) todo.push_back(i);
    }
    if (todo.empty()) return;

    auto eval_one = [&](std::size_t idx) {
        try {
            pop[idx].fitness = fitness(pop[idx], p, cfg, penalty_fitness);
        } catch (const std::exception&) {
            pop[idx].fitness = penalty_fitness;
        }
    };

    unsigned t = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    t = static_cast<unsigned>(std::min<std::size_t>(t, todo.size()));
    if (t <= 1) {
        for (std::size_t idx : todo) eval_one(idx);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(t);
    for (unsigned w = 0; w < t; ++w) {
        workers.emplace_back([&, w] {
            for (std::size_t k = w; k < todo.size(); k += t) eval_one(todo[k]);
        });
    }
    for (auto& th : workers) th.join();
}

/// Generational loop: evaluate, record (best, mean), test termination, then
/// breed pop_size - elite_count offspring via tournament -> BLX -> mutation
/// and keep the pop_size best of parents + offspring. Stops at
/// max_generations or when the per-generation best improves by less than
/// stall_tolerance (relative) for stall_generations generations in a row.
inline GaReport run_ga(const GaConfig& ga, const RobotParams& p, const SimConfig& sim,
                       unsigned threads = 0) {
    if (!ga.valid()) throw InvalidConfig("run_ga: invalid GaConfig");
    if (!sim.valid()) throw InvalidConfig("run_ga: invalid SimConfig");
    if (!p.valid()) throw InvalidConfig("run_ga: invalid RobotParams");

    Rng rng(ga.seed);
    std::vector<Chromosome> pop = init_population(ga, rng);
    evaluate_population(pop, p, sim, ga.penalty_fitness, threads);

    GaReport rep;
    rep.best = pop.front();
    std::size_t stall = 0;

    const auto by_fitness = [](const Chromosome& a, const Chromosome& b) {
        return *a.fitness < *b.fitness;
    };

    for (std::size_t gen = 1;; ++gen) {
        double sum = 0.0;
        const Chromosome* gen_best = &pop.front();
        for (const auto& c : pop) {
            sum += *c.fitness;
            if (*c.fitness < *gen_best->fitness) gen_best = &c;
        }
        if (*gen_best->fitness < *rep.best.fitness) rep.best = *gen_best;
        rep.history.push_back({*gen_best->fitness, sum / static_cast<double>(pop.size())});

        if (rep.history.size() >= 2) {
            const double prev = rep.history[rep.history.size() - 2].best_fitness;
            const double now = rep.history.back().best_fitness;
            const double rel =
                prev > now ? (prev - now) / std::max(std::abs(prev), 1e-300) : 0.0;
            stall = rel < ga.stall_tolerance ? stall + 1 : 0;
            if (stall >= ga.stall_generations) {
                rep.terminated_by = Termination::stall;
                break;
            }
        }
        if (gen >= ga.max_generations) {
            rep.terminated_by = Termination::max_generations;
            break;
        }

        // All draws happen here, sequentially, before evaluations dispatch.
        const std::size_t n_offspring = ga.pop_size - ga.elite_count;
        std::vector<Chromosome> offspring;
        offspring.reserve(n_offspring + 1);
        while (offspring.size() < n_offspring) {
            const auto [ia, ib] = select_parents(pop, rng);
            auto [c1, c2] = crossover(pop[ia], pop[ib], ga.crossover_rate, ga.gene_bounds, rng);
            c1 = mutate(c1, ga.mutation_rate, ga.gene_bounds, rng);
            c2 = mutate(c2, ga.mutation_rate, ga.gene_bounds, rng);
            offspring.push_back(std::move(c1));
            if (offspring.size() < n_offspring) offspring.push_back(std::move(c2));
        }
        evaluate_population(offspring, p, sim, ga.penalty_fitness, threads);

        // mu+lambda survivor selection; stable sort keeps parents ahead of
        // equal-fitness offspring.
        std::vector<Chromosome> merged = std::move(pop);
        merged.insert(merged.end(), std::make_move_iterator(offspring.begin()),
                      std::make_move_iterator(offspring.end()));
        std::stable_sort(merged.begin(), merged.end(), by_fitness);
        merged.resize(ga.pop_size);
        pop = std::move(merged);
    }

    rep.generations_run = rep.history.size();
    return rep;
}

}  // namespace armtune
