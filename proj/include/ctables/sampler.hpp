#pragma once

// Metropolis-Hastings walks on a fiber driven by Markov moves.
//
// Proposal: a uniform move from the basis and a uniform sign. The proposal is
// symmetric, so acceptance is min(1, pi(y')/pi(y)); infeasible proposals
// (a cell would go negative) are rejections and the chain stays put.

#include <cstdint>
#include <functional>
#include <vector>

#include "ctables/fiber.hpp"
#include "ctables/moves.hpp"
#include "ctables/rng.hpp"
#include "ctables/tensor.hpp"

namespace ctables {

struct StepResult {
  bool accepted = false;
  bool feasible = false;
};

// pi(state + sign*move) / pi(state) for a feasible move; for the
// hypergeometric law only the four changed cells enter the ratio.
double acceptance_ratio(const Table& state, const Move& move, int sign, FiberLaw target);

// Advances `state` in place by one Metropolis-Hastings step.
StepResult mh_step(Table& state, const MoveSet& moves, FiberLaw target, SplitMix64& rng);

struct ChainConfig {
  Table start;
  FiberLaw target = FiberLaw::Uniform;
  std::uint64_t steps = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t thin = 1;
  std::uint64_t seed = 0;
  // Keep every retained table in ChainStats::samples; otherwise only the
  // corner trace and the observer see them.
  bool keep_samples = true;
};

// Throws InvalidInput unless steps > burn_in and thin >= 1.
void validate_chain_config(const ChainConfig& config);

struct ChainStats {
  std::vector<Table> samples;
  double acceptance_rate = 0.0;
  std::vector<std::int64_t> corner_trace;
  std::uint64_t kept = 0;

  friend bool operator==(const ChainStats&, const ChainStats&) = default;
};

using SampleObserver = std::function<void(const Table&)>;

// Runs `steps` iterations; after burn_in, every thin-th state is retained.
// Deterministic given the config. Margins are re-checked every 1000 steps.
ChainStats run_chain(const ChainConfig& config, const MoveSet& moves,
                     const SampleObserver& observer = {});

// Relative visit frequencies of the retained states over the fiber.
std::vector<double> empirical_frequencies(const Fiber& fiber, const std::vector<Table>& samples);

double tv_distance(const std::vector<double>& p, const std::vector<double>& q);
double tv_distance(const std::vector<double>& empirical, const FiberDistribution& exact);

// Exact total variation between the uniform and hypergeometric laws.
double divergence_uniform_vs_hypergeometric(const Fiber& fiber);

// One-step transition probability P(from -> to) of the kernel, summed over
// every (move, sign) that maps `from` onto `to`. Requires a materialized
// move set.
double transition_probability(const Table& from, const Table& to, const MoveSet& moves,
                              FiberLaw target);

}  // namespace ctables
