#include "ctables/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "ctables/error.hpp"

namespace ctables {

double acceptance_ratio(const Table& state, const Move& move, int sign, FiberLaw target) {
  if (target == FiberLaw::Uniform) return 1.0;
  // pi(y) ~ 1 / prod y!. Cells gaining one contribute 1/(y+1), cells losing
  // one contribute y.
  const auto& up = sign > 0 ? move.plus : move.minus;
  const auto& down = sign > 0 ? move.minus : move.plus;
  const double num = static_cast<double>(state[down[0]]) * static_cast<double>(state[down[1]]);
  const double den = static_cast<double>(state[up[0]] + 1) * static_cast<double>(state[up[1]] + 1);
  return num / den;
}

StepResult mh_step(Table& state, const MoveSet& moves, FiberLaw target, SplitMix64& rng) {
  const Move move = moves.draw(rng);
  const int sign = (rng() >> 63) ? 1 : -1;
  const auto& down = sign > 0 ? move.minus : move.plus;
  if (state[down[0]] == 0 || state[down[1]] == 0) return {false, false};
  const double ratio = acceptance_ratio(state, move, sign, target);
  if (ratio < 1.0 && !(rng.uniform() < ratio)) return {false, true};
  apply_move_in_place(state, move, sign);
  return {true, true};
}

void validate_chain_config(const ChainConfig& config) {
  if (config.steps <= config.burn_in)
    throw Error(ErrorKind::InvalidInput, "steps must exceed burn-in");
  if (config.thin < 1) throw Error(ErrorKind::InvalidInput, "thin must be at least 1");
  if (config.start.size() == 0) throw Error(ErrorKind::InvalidInput, "chain needs a start table");
}

ChainStats run_chain(const ChainConfig& config, const MoveSet& moves,
                     const SampleObserver& observer) {
  validate_chain_config(config);
  if (config.start.dims() != moves.dims())
    throw Error(ErrorKind::DimensionMismatch, "start table shape differs from the move set");
  const MarginSpec margins = margins_of(config.start);
  SplitMix64 rng(config.seed);
  Table state = config.start;
  ChainStats stats;
  std::uint64_t accepted = 0;
  for (std::uint64_t t = 0; t < config.steps; ++t) {
    if (mh_step(state, moves, config.target, rng).accepted) ++accepted;
    if ((t + 1) % 1000 == 0 && margins_of(state) != margins)
      throw std::logic_error("chain left its fiber at step " + std::to_string(t + 1));
    if (t < config.burn_in || (t - config.burn_in) % config.thin != 0) continue;
    ++stats.kept;
    stats.corner_trace.push_back(state[0]);
    if (config.keep_samples) stats.samples.push_back(state);
    if (observer) observer(state);
  }
  stats.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(config.steps);
  return stats;
}

std::vector<double> empirical_frequencies(const Fiber& fiber, const std::vector<Table>& samples) {
  std::vector<double> freq(fiber.size(), 0.0);
  for (const auto& s : samples) {
    auto idx = fiber.find(s);
    if (!idx) throw Error(ErrorKind::InvalidInput, "sample lies outside the fiber");
    freq[*idx] += 1.0;
  }
  if (!samples.empty())
    for (auto& f : freq) f /= static_cast<double>(samples.size());
  return freq;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size())
    throw Error(ErrorKind::DimensionMismatch, "distributions have different supports");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double tv_distance(const std::vector<double>& empirical, const FiberDistribution& exact) {
  return tv_distance(empirical, exact.weights);
}

double divergence_uniform_vs_hypergeometric(const Fiber& fiber) {
  return tv_distance(fiber_weights(fiber, FiberLaw::Uniform).weights,
                     fiber_weights(fiber, FiberLaw::Hypergeometric).weights);
}

double transition_probability(const Table& from, const Table& to, const MoveSet& moves,
                              FiberLaw target) {
  const double proposal = 0.5 / static_cast<double>(moves.count());
  double p = 0.0;
  for (const Move& m : moves.moves()) {
    for (int sign : {1, -1}) {
      auto next = apply_move(from, m, sign);
      if (next && *next == to) p += proposal * std::min(1.0, acceptance_ratio(from, m, sign, target));
    }
  }
  return p;
}

}  // namespace ctables
