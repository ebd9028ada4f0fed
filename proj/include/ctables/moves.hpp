#pragma once

// Markov basis moves for the plane-sum independence model.
//
// A move has +1 on two cells and -1 on two cells with every plane sum zero.
// 2-way moves are the 2x2 minors, one per unordered pair of rows and pair of
// columns. 3-way moves put +1 on (i1,j1,k1) and (i2,j2,k2) and -1 on the two
// cells obtained by exchanging the j indices, the k indices, or both:
//
//   {(i1,j2,k1), (i2,j1,k2)}, {(i1,j1,k2), (i2,j2,k1)}, {(i1,j2,k2), (i2,j1,k1)}
//
// Over ordered index pairs every move appears twice (swap the "1" and "2"
// labels); after deduplication there are (3/2) n1 n2 n3 (n1-1)(n2-1)(n3-1).
//
// That family alone does not connect fibers: already a = b = c = (4,4)
// splits into 5 components. The full quadratic basis adds the 2x2 minors
// inside each slice (the same construction with exactly one index pair
// equal), and is what samplers and connectivity checks use for 3-way tables.
//
// The 3-way sets are closed under negation; the 2-way set is not, and
// samplers draw a uniform sign on top of a uniform move in every case.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctables/rng.hpp"
#include "ctables/tensor.hpp"

namespace ctables {

struct Move {
  // Flat row-major cell offsets, each pair sorted ascending.
  std::array<std::size_t, 2> plus{};
  std::array<std::size_t, 2> minus{};

  Move negated() const { return Move{minus, plus}; }

  friend bool operator==(const Move&, const Move&) = default;
  friend auto operator<=>(const Move&, const Move&) = default;
};

// Canonical form: sorted plus cells, sorted minus cells.
Move make_move(std::size_t plus_a, std::size_t plus_b, std::size_t minus_a, std::size_t minus_b);

// Dense signed tensor of a move, for margin checks and display.
std::vector<std::int64_t> move_entries(const Dims& dims, const Move& move);

// Sparse text form "(i,j,k):+1;(i,j,k):+1;(i,j,k):-1;(i,j,k):-1".
std::string format_move(const Dims& dims, const Move& move);

bool has_zero_plane_sums(const Dims& dims, const Move& move);

inline constexpr std::size_t kDefaultMoveEntryBudget = 10'000'000;

/// A basis of moves for one table shape.
///
/// Materialized when 4 * count fits the entry budget; otherwise moves are
/// generated on demand by uniform index draws. Either way `draw` is uniform
/// over the same move set.
class MoveSet {
 public:
  static MoveSet basic_2way(std::size_t rows, std::size_t cols,
                            std::size_t entry_budget = kDefaultMoveEntryBudget);
  // Moves with i1 != i2, j1 != j2, k1 != k2 only.
  static MoveSet plane_3way(std::size_t n1, std::size_t n2, std::size_t n3,
                            std::size_t entry_budget = kDefaultMoveEntryBudget);
  // plane_3way plus the in-slice minors: a Markov basis.
  static MoveSet markov_basis_3way(std::size_t n1, std::size_t n2, std::size_t n3,
                                   std::size_t entry_budget = kDefaultMoveEntryBudget);
  // Markov basis for the shape of `dims`: 2-way minors or markov_basis_3way.
  static MoveSet for_dims(const Dims& dims, std::size_t entry_budget = kDefaultMoveEntryBudget);

  const Dims& dims() const noexcept { return dims_; }
  std::uint64_t count() const noexcept { return count_; }
  bool materialized() const noexcept { return materialized_; }

  // Requires materialized(); throws BudgetExceeded otherwise.
  const std::vector<Move>& moves() const;

  Move draw(SplitMix64& rng) const;

 private:
  enum class Family { Minors2way, Plane3way, Full3way };

  static MoveSet build_3way(Family family, std::size_t n1, std::size_t n2, std::size_t n3,
                            std::size_t entry_budget);

  Family family_ = Family::Minors2way;
  Dims dims_;
  std::uint64_t count_ = 0;
  bool materialized_ = false;
  std::vector<Move> moves_;
};

// Closed-form sizes.
std::uint64_t basic_2way_count(std::size_t rows, std::size_t cols);
std::uint64_t plane_3way_count(std::size_t n1, std::size_t n2, std::size_t n3);
// Number of in-slice minors (both signs) in the full 3-way basis.
std::uint64_t slice_minor_count(std::size_t n1, std::size_t n2, std::size_t n3);

// Moves with a +1 entry at the corner cell (0,0,0): the corner plays the
// role of (i1,j1,k1). Counted by scanning the materialized move set.
std::uint64_t count_applicable_at_corner(std::size_t n1, std::size_t n2, std::size_t n3);

// table + sign * move, or nullopt when a cell would go negative.
std::optional<Table> apply_move(const Table& table, const Move& move, int sign);

// In-place variant used by samplers; leaves the table untouched on failure.
bool apply_move_in_place(Table& table, const Move& move, int sign);

}  // namespace ctables
