#pragma once

// Exact fibers T(a,b,c) by backtracking, and the exact conditional laws on
// them: uniform (geometric cells) and hypergeometric (Poisson or
// multinomial cells).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ctables/moves.hpp"
#include "ctables/tensor.hpp"

namespace ctables {

inline constexpr std::size_t kDefaultFiberBudget = 5'000'000;

struct Fiber {
  MarginSpec spec;
  // Lexicographic by flat data.
  std::vector<Table> tables;

  std::size_t size() const noexcept { return tables.size(); }
  // Position of `table` in the canonical order, if it is a member.
  std::optional<std::size_t> find(const Table& table) const;
};

enum class FiberLaw { Uniform, Hypergeometric };

struct FiberDistribution {
  FiberLaw kind = FiberLaw::Uniform;
  std::vector<double> weights;  // aligned with Fiber::tables
};

// All tables with the given plane sums. Cells are filled in row-major order,
// each bounded above by the smallest remaining budget of its slices and below
// by what the later cells of its slices cannot absorb. Throws BudgetExceeded
// once more than `budget` tables are found.
Fiber enumerate_fiber(const MarginSpec& spec, std::size_t budget = kDefaultFiberBudget);

FiberDistribution fiber_weights(const Fiber& fiber, FiberLaw kind);

// Sum over cells of log(y!).
double log_factorial_sum(const Table& table);

struct Connectivity {
  bool connected = false;
  std::size_t components = 0;
};

// Components of the graph on fiber tables whose edges are feasible
// applications of +/- each move.
Connectivity connectivity_check(const Fiber& fiber, const MoveSet& moves);

// P(Y = y | margins) for independent Poisson cells with the given rates,
// normalized by direct summation over the fiber. Equals the hypergeometric
// law whenever the rates are rank-1 (in particular, constant).
FiberDistribution conditional_poisson_oracle(const Fiber& fiber, const RealTable& rates);
FiberDistribution conditional_poisson_oracle(const Fiber& fiber, double rate);

// Normalizes exp(log_weight(y)) over the fiber with a log-sum-exp.
std::vector<double> normalize_log_weights(const std::vector<double>& log_weights);

}  // namespace ctables
