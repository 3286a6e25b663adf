#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "gridplan/heuristics/search.hpp"
#include "gridplan/rng.hpp"

namespace gridplan {

struct GaParams {
  std::size_t population = 50;
  std::size_t tournament = 3;
  double crossover_rate = 1.0;  // probability that a selected pair is recombined
  double crossover_bit = 0.5;   // per-bit swap probability of uniform crossover
  double mutation_bit = 0.0;    // per-bit flip probability, 0 means 1 / catalog size
  std::size_t elites = 1;
};

struct PsoParams {
  std::size_t particles = 30;
  double inertia = 0.72;
  double cognitive = 1.49;
  double social = 1.49;
  double v_max = 4.0;
  double initial_velocity = 2.0;  // |v| pointing at the starting bit
};

struct GwoParams {
  std::size_t wolves = 30;
  double a_start = 2.0;
  double a_end = 0.0;
  double steepness = 10.0;  // slope of the logistic binarization around 0.5
};

struct FwaParams {
  std::size_t fireworks = 5;
  double total_sparks = 50.0;
  std::size_t min_sparks = 2;
  std::size_t max_sparks = 20;
  std::size_t max_amplitude = 0;   // bit flips of the worst firework, 0 means max(1, size / 4)
  std::size_t mutation_flips = 0;  // flips of the mutation spark, 0 means max(1, size / 10)
};

namespace detail {

struct Member {
  Candidate candidate;
  double fitness = 0.0;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Evaluates the starting members; returns false if the budget ran out.
inline bool evaluate_all(Search& search, const std::vector<Candidate>& start, std::vector<Member>& out) {
  for (const auto& c : start) {
    auto r = search.evaluate(c);
    if (!r) return false;
    out.push_back({c, r->normalized});
  }
  return true;
}

inline std::size_t best_index(const std::vector<Member>& members) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < members.size(); ++i)
    if (members[i].fitness < members[best].fitness) best = i;
  return best;
}

inline std::size_t hamming(const Candidate& a, const Candidate& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a.bits[i] != b.bits[i];
  return d;
}

}  // namespace detail

/// Generational genetic algorithm: tournament selection, uniform crossover,
/// bit-flip mutation, elitism.
inline void run_ga(Search& search, Rng& rng, const GaParams& params, const std::vector<Candidate>& start) {
  using detail::Member;
  const std::size_t m = search.dimension();
  const double p_mut = params.mutation_bit > 0.0 ? params.mutation_bit : (m > 0 ? 1.0 / static_cast<double>(m) : 0.0);
  std::vector<Member> pop;
  if (!detail::evaluate_all(search, start, pop) || pop.empty()) return;
  const std::size_t size = std::max<std::size_t>(params.population, 2);

  auto tournament = [&]() -> const Member& {
    std::size_t best = rng.index(pop.size());
    for (std::size_t t = 1; t < params.tournament; ++t) {
      std::size_t j = rng.index(pop.size());
      if (pop[j].fitness < pop[best].fitness) best = j;
    }
    return pop[best];
  };

  for (;;) {
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pop[a].fitness < pop[b].fitness; });
    std::vector<Member> next;
    for (std::size_t e = 0; e < std::min(params.elites, order.size()); ++e) next.push_back(pop[order[e]]);
    while (next.size() < size) {
      Candidate a = tournament().candidate;
      Candidate b = tournament().candidate;
      if (rng.bernoulli(params.crossover_rate))
        for (std::size_t i = 0; i < m; ++i)
          if (rng.bernoulli(params.crossover_bit)) std::swap(a.bits[i], b.bits[i]);
      for (auto* child : {&a, &b}) {
        for (std::size_t i = 0; i < m; ++i)
          if (rng.bernoulli(p_mut)) child->flip(i);
        if (next.size() >= size) break;
        auto r = search.evaluate(*child);
        if (!r) return;
        next.push_back({*child, r->normalized});
      }
    }
    pop = std::move(next);
  }
}

/// Binary particle swarm: continuous velocities, bits re-sampled through the
/// logistic function of the velocity.
inline void run_pso(Search& search, Rng& rng, const PsoParams& params, const std::vector<Candidate>& start) {
  using detail::Member;
  const std::size_t m = search.dimension();
  std::vector<Member> current;
  if (!detail::evaluate_all(search, start, current) || current.empty()) return;
  std::vector<Member> personal = current;
  std::vector<std::vector<double>> velocity(current.size(), std::vector<double>(m, 0.0));
  for (std::size_t p = 0; p < current.size(); ++p)
    for (std::size_t d = 0; d < m; ++d)
      velocity[p][d] = current[p].candidate.test(d) ? params.initial_velocity : -params.initial_velocity;
  Member global = personal[detail::best_index(personal)];

  for (;;) {
    for (std::size_t p = 0; p < current.size(); ++p) {
      auto& x = current[p].candidate;
      for (std::size_t d = 0; d < m; ++d) {
        const double xd = x.test(d) ? 1.0 : 0.0;
        const double pd = personal[p].candidate.test(d) ? 1.0 : 0.0;
        const double gd = global.candidate.test(d) ? 1.0 : 0.0;
        double v = params.inertia * velocity[p][d] + params.cognitive * rng.uniform() * (pd - xd) +
                   params.social * rng.uniform() * (gd - xd);
        v = std::clamp(v, -params.v_max, params.v_max);
        velocity[p][d] = v;
        x.set(d, rng.uniform() < detail::sigmoid(v));
      }
      auto r = search.evaluate(x);
      if (!r) return;
      current[p].fitness = r->normalized;
      if (r->normalized < personal[p].fitness) personal[p] = current[p];
      if (r->normalized < global.fitness) global = current[p];
    }
  }
}

/// Binary grey wolf optimizer: each wolf moves toward the three best
/// candidates found so far; the averaged continuous position is binarized by
/// a logistic function centered at 0.5. `a` falls linearly over the budget.
inline void run_gwo(Search& search, Rng& rng, const GwoParams& params, const std::vector<Candidate>& start) {
  using detail::Member;
  const std::size_t m = search.dimension();
  std::vector<Member> wolves;
  if (!detail::evaluate_all(search, start, wolves) || wolves.empty()) return;

  std::vector<Member> leaders;  // up to three distinct best candidates, best first
  auto offer = [&](const Member& w) {
    for (const auto& l : leaders)
      if (l.candidate == w.candidate) return;
    leaders.push_back(w);
    std::stable_sort(leaders.begin(), leaders.end(),
                     [](const Member& a, const Member& b) { return a.fitness < b.fitness; });
    if (leaders.size() > 3) leaders.pop_back();
  };
  for (const auto& w : wolves) offer(w);

  for (;;) {
    const double a = params.a_start + (params.a_end - params.a_start) * search.progress();
    for (auto& wolf : wolves) {
      Candidate next(m);
      for (std::size_t d = 0; d < m; ++d) {
        const double x = wolf.candidate.test(d) ? 1.0 : 0.0;
        double sum = 0.0;
        for (const auto& leader : leaders) {
          const double l = leader.candidate.test(d) ? 1.0 : 0.0;
          const double big_a = 2.0 * a * rng.uniform() - a;
          const double c = 2.0 * rng.uniform();
          sum += l - big_a * std::abs(c * l - x);
        }
        const double pos = sum / static_cast<double>(leaders.size());
        next.set(d, rng.uniform() < detail::sigmoid(params.steepness * (pos - 0.5)));
      }
      auto r = search.evaluate(next);
      if (!r) return;
      wolf = {std::move(next), r->normalized};
      offer(wolf);
    }
  }
}

/// Fireworks algorithm on bit strings. Better fireworks emit more sparks with
/// smaller amplitude (number of flipped bits); each firework also emits one
/// mutation spark. The best of all points survives, the rest are chosen with
/// probability proportional to their summed Hamming distance to the pool.
inline void run_fwa(Search& search, Rng& rng, const FwaParams& params, const std::vector<Candidate>& start) {
  using detail::Member;
  const std::size_t m = search.dimension();
  std::vector<Member> fireworks;
  if (!detail::evaluate_all(search, start, fireworks) || fireworks.empty() || m == 0) return;
  const std::size_t max_amp = params.max_amplitude > 0 ? params.max_amplitude : std::max<std::size_t>(1, m / 4);
  const std::size_t mut_flips =
      std::min(m, params.mutation_flips > 0 ? params.mutation_flips : std::max<std::size_t>(1, m / 10));
  const std::size_t n_fw = std::max<std::size_t>(params.fireworks, 1);
  constexpr double eps = 1e-12;

  auto spark = [&](const Candidate& from, std::size_t flips) {
    Candidate c = from;
    for (auto bit : rng.sample(m, std::min(flips, m))) c.flip(bit);
    return c;
  };

  for (;;) {
    const std::size_t n = fireworks.size();
    double worst = fireworks[0].fitness;
    for (const auto& f : fireworks) worst = std::max(worst, f.fitness);
    double spread = 0.0;
    for (const auto& f : fireworks) spread += worst - f.fitness;

    std::vector<std::size_t> rank(n);
    {
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return fireworks[a].fitness < fireworks[b].fitness; });
      for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;
    }

    std::vector<Member> pool = fireworks;
    for (std::size_t i = 0; i < n; ++i) {
      const double share = (worst - fireworks[i].fitness + eps) / (spread + eps * static_cast<double>(n));
      const auto count = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(params.total_sparks * share)),
                                                 params.min_sparks, params.max_sparks);
      const std::size_t amplitude =
          std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(max_amp) *
                                                                        static_cast<double>(rank[i] + 1) /
                                                                        static_cast<double>(n))));
      for (std::size_t s = 0; s < count; ++s) {
        Candidate c = spark(fireworks[i].candidate, 1 + rng.index(amplitude));
        auto r = search.evaluate(c);
        if (!r) return;
        pool.push_back({std::move(c), r->normalized});
      }
      Candidate c = spark(fireworks[i].candidate, mut_flips);
      auto r = search.evaluate(c);
      if (!r) return;
      pool.push_back({std::move(c), r->normalized});
    }

    const std::size_t keep = detail::best_index(pool);
    std::vector<Member> next{pool[keep]};
    std::vector<double> weight(pool.size(), 0.0);
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t j = i + 1; j < pool.size(); ++j) {
        const auto d = static_cast<double>(detail::hamming(pool[i].candidate, pool[j].candidate));
        weight[i] += d;
        weight[j] += d;
      }
    weight[keep] = 0.0;
    while (next.size() < n_fw) {
      const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
      std::size_t pick = 0;
      if (total <= 0.0) {
        pick = rng.index(pool.size());
      } else {
        double u = rng.uniform() * total;
        for (pick = 0; pick + 1 < pool.size(); ++pick) {
          if (u < weight[pick]) break;
          u -= weight[pick];
        }
      }
      next.push_back(pool[pick]);
      weight[pick] = 0.0;
    }
    fireworks = std::move(next);
  }
}

}  // namespace gridplan
