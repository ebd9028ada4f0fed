#include "ctables/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctables/error.hpp"

namespace ctables {

namespace {

class FiberEnumerator {
 public:
  FiberEnumerator(const MarginSpec& spec, std::size_t budget)
      : dims_(spec.dims()), remaining_(spec.axis_sums), budget_(budget) {
    const std::size_t cells = cell_count(dims_);
    coords_.resize(cells);
    for (std::size_t c = 0; c < cells; ++c) coords_[c] = unflatten(dims_, c);
    later_in_slice_.assign(cells, std::vector<std::vector<std::size_t>>(dims_.size()));
    for (std::size_t c = 0; c < cells; ++c)
      for (std::size_t a = 0; a < dims_.size(); ++a)
        for (std::size_t d = c + 1; d < cells; ++d)
          if (coords_[d][a] == coords_[c][a]) later_in_slice_[c][a].push_back(d);
    current_.assign(cells, 0);
  }

  std::vector<Table> run() {
    fill(0);
    return std::move(found_);
  }

 private:
  std::int64_t capacity(std::size_t cell) const {
    std::int64_t cap = INT64_MAX;
    for (std::size_t a = 0; a < dims_.size(); ++a) cap = std::min(cap, remaining_[a][coords_[cell][a]]);
    return cap;
  }

  void fill(std::size_t cell) {
    if (cell == current_.size()) {
      for (const auto& axis : remaining_)
        for (auto r : axis)
          if (r != 0) return;
      if (found_.size() == budget_)
        throw Error(ErrorKind::BudgetExceeded,
                    "fiber has more than " + std::to_string(budget_) + " tables");
      found_.emplace_back(dims_, current_);
      return;
    }
    const std::int64_t upper = capacity(cell);
    std::int64_t lower = 0;
    for (std::size_t a = 0; a < dims_.size(); ++a) {
      std::int64_t absorbable = 0;
      for (auto d : later_in_slice_[cell][a]) absorbable += capacity(d);
      lower = std::max(lower, remaining_[a][coords_[cell][a]] - absorbable);
    }
    for (std::int64_t v = lower; v <= upper; ++v) {
      for (std::size_t a = 0; a < dims_.size(); ++a) remaining_[a][coords_[cell][a]] -= v;
      current_[cell] = v;
      fill(cell + 1);
      for (std::size_t a = 0; a < dims_.size(); ++a) remaining_[a][coords_[cell][a]] += v;
    }
    current_[cell] = 0;
  }

  Dims dims_;
  std::vector<std::vector<std::int64_t>> remaining_;
  std::size_t budget_;
  std::vector<MultiIndex> coords_;
  std::vector<std::vector<std::vector<std::size_t>>> later_in_slice_;
  std::vector<std::int64_t> current_;
  std::vector<Table> found_;
};

void require_nonempty(const Fiber& fiber) {
  if (fiber.tables.empty()) throw Error(ErrorKind::EmptyFiber, "fiber has no tables");
}

}  // namespace

std::optional<std::size_t> Fiber::find(const Table& table) const {
  auto it = std::lower_bound(tables.begin(), tables.end(), table);
  if (it == tables.end() || *it != table) return std::nullopt;
  return static_cast<std::size_t>(it - tables.begin());
}

Fiber enumerate_fiber(const MarginSpec& spec, std::size_t budget) {
  validate_margin_spec(spec);
  return Fiber{spec, FiberEnumerator(spec, budget).run()};
}

double log_factorial_sum(const Table& table) {
  double s = 0.0;
  for (auto y : table.data()) s += std::lgamma(static_cast<double>(y) + 1.0);
  return s;
}

std::vector<double> normalize_log_weights(const std::vector<double>& log_weights) {
  if (log_weights.empty()) throw Error(ErrorKind::EmptyFiber, "nothing to normalize");
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  std::vector<double> w(log_weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) total += (w[i] = std::exp(log_weights[i] - top));
  for (auto& x : w) x /= total;
  return w;
}

FiberDistribution fiber_weights(const Fiber& fiber, FiberLaw kind) {
  require_nonempty(fiber);
  FiberDistribution dist{kind, {}};
  if (kind == FiberLaw::Uniform) {
    dist.weights.assign(fiber.size(), 1.0 / static_cast<double>(fiber.size()));
    return dist;
  }
  std::vector<double> logw;
  logw.reserve(fiber.size());
  for (const auto& t : fiber.tables) logw.push_back(-log_factorial_sum(t));
  dist.weights = normalize_log_weights(logw);
  return dist;
}

Connectivity connectivity_check(const Fiber& fiber, const MoveSet& moves) {
  const std::size_t n = fiber.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (std::size_t v = 0; v < n; ++v) {
    for (const Move& m : moves.moves()) {
      for (int sign : {1, -1}) {
        auto next = apply_move(fiber.tables[v], m, sign);
        if (!next) continue;
        auto w = fiber.find(*next);
        if (!w) throw Error(ErrorKind::InvalidInput, "move left the fiber; fiber is incomplete");
        auto rv = root(v), rw = root(*w);
        if (rv != rw) {
          parent[rv] = rw;
          --components;
        }
      }
    }
  }
  return {components == 1, components};
}

FiberDistribution conditional_poisson_oracle(const Fiber& fiber, const RealTable& rates) {
  require_nonempty(fiber);
  if (rates.dims() != fiber.spec.dims())
    throw Error(ErrorKind::DimensionMismatch, "rate table shape differs from fiber");
  for (auto r : rates.data())
    if (!(r > 0.0)) throw Error(ErrorKind::DomainError, "Poisson rates must be positive");
  std::vector<double> logw;
  logw.reserve(fiber.size());
  for (const auto& t : fiber.tables) {
    double lp = 0.0;
    for (std::size_t c = 0; c < t.size(); ++c) {
      const double y = static_cast<double>(t[c]);
      lp += y * std::log(rates[c]) - rates[c] - std::lgamma(y + 1.0);
    }
    logw.push_back(lp);
  }
  return {FiberLaw::Hypergeometric, normalize_log_weights(logw)};
}

FiberDistribution conditional_poisson_oracle(const Fiber& fiber, double rate) {
  const Dims dims = fiber.spec.dims();
  return conditional_poisson_oracle(fiber, RealTable(dims, std::vector<double>(cell_count(dims), rate)));
}

}  // namespace ctables
