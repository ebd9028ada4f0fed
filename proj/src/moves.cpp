#include "ctables/moves.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>
#include <stdexcept>

#include "ctables/error.hpp"

namespace ctables {

namespace {

void require_at_least_two(const Dims& dims) {
  for (auto d : dims)
    if (d < 2) throw Error(ErrorKind::InvalidInput, "move generation needs every dimension >= 2");
}

std::size_t flat2(const Dims& d, std::size_t i, std::size_t j) { return i * d[1] + j; }
std::size_t flat3(const Dims& d, std::size_t i, std::size_t j, std::size_t k) {
  return (i * d[1] + j) * d[2] + k;
}

// Two distinct uniform values in [0, n), ordered as drawn.
std::pair<std::size_t, std::size_t> distinct_pair(SplitMix64& rng, std::size_t n) {
  std::size_t a = rng.below(n);
  std::size_t b = rng.below(n - 1);
  if (b >= a) ++b;
  return {a, b};
}

Move minor_2way(const Dims& d, std::size_t i1, std::size_t i2, std::size_t j1, std::size_t j2) {
  return make_move(flat2(d, i1, j1), flat2(d, i2, j2), flat2(d, i1, j2), flat2(d, i2, j1));
}

Move plane_move(const Dims& d, std::size_t i1, std::size_t i2, std::size_t j1, std::size_t j2,
                std::size_t k1, std::size_t k2, int pattern) {
  const std::size_t p1 = flat3(d, i1, j1, k1);
  const std::size_t p2 = flat3(d, i2, j2, k2);
  switch (pattern) {
    case 0: return make_move(p1, p2, flat3(d, i1, j2, k1), flat3(d, i2, j1, k2));
    case 1: return make_move(p1, p2, flat3(d, i1, j1, k2), flat3(d, i2, j2, k1));
    default: return make_move(p1, p2, flat3(d, i1, j2, k2), flat3(d, i2, j1, k1));
  }
}

}  // namespace

Move make_move(std::size_t plus_a, std::size_t plus_b, std::size_t minus_a, std::size_t minus_b) {
  return Move{{std::min(plus_a, plus_b), std::max(plus_a, plus_b)},
              {std::min(minus_a, minus_b), std::max(minus_a, minus_b)}};
}

std::vector<std::int64_t> move_entries(const Dims& dims, const Move& move) {
  std::vector<std::int64_t> entries(cell_count(dims), 0);
  for (auto c : move.plus) entries.at(c) += 1;
  for (auto c : move.minus) entries.at(c) -= 1;
  return entries;
}

std::string format_move(const Dims& dims, const Move& move) {
  std::ostringstream out;
  auto cell = [&](std::size_t flat, const char* sign) {
    auto idx = unflatten(dims, flat);
    out << '(';
    for (std::size_t a = 0; a < idx.size(); ++a) out << (a ? "," : "") << idx[a];
    out << "):" << sign;
  };
  cell(move.plus[0], "+1;");
  cell(move.plus[1], "+1;");
  cell(move.minus[0], "-1;");
  cell(move.minus[1], "-1");
  return out.str();
}

bool has_zero_plane_sums(const Dims& dims, const Move& move) {
  for (std::size_t axis = 0; axis < dims.size(); ++axis) {
    std::vector<std::int64_t> sums(dims[axis], 0);
    for (auto c : move.plus) sums[axis_coordinate(dims, c, axis)] += 1;
    for (auto c : move.minus) sums[axis_coordinate(dims, c, axis)] -= 1;
    if (std::any_of(sums.begin(), sums.end(), [](auto s) { return s != 0; })) return false;
  }
  return true;
}

std::uint64_t basic_2way_count(std::size_t rows, std::size_t cols) {
  return std::uint64_t{rows} * (rows - 1) / 2 * (std::uint64_t{cols} * (cols - 1) / 2);
}

std::uint64_t plane_3way_count(std::size_t n1, std::size_t n2, std::size_t n3) {
  // (3/2) n1 n2 n3 (n1-1)(n2-1)(n3-1); n(n-1) is even so the halving is exact.
  return 3 * (std::uint64_t{n1} * (n1 - 1) / 2) * (std::uint64_t{n2} * (n2 - 1)) *
         (std::uint64_t{n3} * (n3 - 1));
}

namespace {

// Signed minors inside the slices orthogonal to one axis:
// fixed * other_a (other_a - 1) * other_b (other_b - 1) / 2.
std::uint64_t minors_in_slices(std::size_t fixed, std::size_t other_a, std::size_t other_b) {
  return std::uint64_t{fixed} * (std::uint64_t{other_a} * (other_a - 1) / 2) *
         (std::uint64_t{other_b} * (other_b - 1));
}

}  // namespace

std::uint64_t slice_minor_count(std::size_t n1, std::size_t n2, std::size_t n3) {
  return minors_in_slices(n1, n2, n3) + minors_in_slices(n2, n1, n3) + minors_in_slices(n3, n1, n2);
}

MoveSet MoveSet::basic_2way(std::size_t rows, std::size_t cols, std::size_t entry_budget) {
  MoveSet set;
  set.dims_ = {rows, cols};
  check_dims(set.dims_);
  require_at_least_two(set.dims_);
  set.count_ = basic_2way_count(rows, cols);
  set.materialized_ = set.count_ * 4 <= entry_budget;
  if (!set.materialized_) return set;
  set.moves_.reserve(set.count_);
  for (std::size_t i1 = 0; i1 < rows; ++i1)
    for (std::size_t i2 = i1 + 1; i2 < rows; ++i2)
      for (std::size_t j1 = 0; j1 < cols; ++j1)
        for (std::size_t j2 = j1 + 1; j2 < cols; ++j2)
          set.moves_.push_back(minor_2way(set.dims_, i1, i2, j1, j2));
  return set;
}

MoveSet MoveSet::plane_3way(std::size_t n1, std::size_t n2, std::size_t n3,
                            std::size_t entry_budget) {
  return build_3way(Family::Plane3way, n1, n2, n3, entry_budget);
}

MoveSet MoveSet::markov_basis_3way(std::size_t n1, std::size_t n2, std::size_t n3,
                                   std::size_t entry_budget) {
  return build_3way(Family::Full3way, n1, n2, n3, entry_budget);
}

MoveSet MoveSet::build_3way(Family family, std::size_t n1, std::size_t n2, std::size_t n3,
                            std::size_t entry_budget) {
  MoveSet set;
  set.family_ = family;
  set.dims_ = {n1, n2, n3};
  check_dims(set.dims_);
  require_at_least_two(set.dims_);
  set.count_ = plane_3way_count(n1, n2, n3);
  if (family == Family::Full3way) set.count_ += slice_minor_count(n1, n2, n3);
  set.materialized_ = set.count_ * 4 <= entry_budget;
  if (!set.materialized_) return set;
  const int max_shared = family == Family::Full3way ? 1 : 0;
  auto& moves = set.moves_;
  moves.reserve(2 * set.count_);
  for (std::size_t i1 = 0; i1 < n1; ++i1)
    for (std::size_t i2 = 0; i2 < n1; ++i2)
      for (std::size_t j1 = 0; j1 < n2; ++j1)
        for (std::size_t j2 = 0; j2 < n2; ++j2)
          for (std::size_t k1 = 0; k1 < n3; ++k1)
            for (std::size_t k2 = 0; k2 < n3; ++k2) {
              const int shared = (i1 == i2) + (j1 == j2) + (k1 == k2);
              if (shared > max_shared) continue;
              for (int pattern = 0; pattern < 3; ++pattern) {
                const Move m = plane_move(set.dims_, i1, i2, j1, j2, k1, k2, pattern);
                if (m.plus != m.minus) moves.push_back(m);
              }
            }
  std::sort(moves.begin(), moves.end());
  moves.erase(std::unique(moves.begin(), moves.end()), moves.end());
  if (moves.size() != set.count_)
    throw std::logic_error("3-way move enumeration produced " + std::to_string(moves.size()) +
                           " moves, closed form gives " + std::to_string(set.count_));
  return set;
}

MoveSet MoveSet::for_dims(const Dims& dims, std::size_t entry_budget) {
  check_dims(dims);
  if (dims.size() == 2) return basic_2way(dims[0], dims[1], entry_budget);
  return markov_basis_3way(dims[0], dims[1], dims[2], entry_budget);
}

const std::vector<Move>& MoveSet::moves() const {
  if (!materialized_)
    throw Error(ErrorKind::BudgetExceeded,
                "move set of size " + std::to_string(count_) + " is not materialized");
  return moves_;
}

Move MoveSet::draw(SplitMix64& rng) const {
  if (materialized_) return moves_[rng.below(moves_.size())];
  if (dims_.size() == 2) {
    auto [a, b] = distinct_pair(rng, dims_[0]);
    auto [c, d] = distinct_pair(rng, dims_[1]);
    return minor_2way(dims_, std::min(a, b), std::max(a, b), std::min(c, d), std::max(c, d));
  }
  const auto& d = dims_;
  const std::uint64_t plane = plane_3way_count(d[0], d[1], d[2]);
  std::uint64_t pick = family_ == Family::Full3way ? rng.below(count_) : 0;
  if (pick < plane) {
    auto [i1, i2] = distinct_pair(rng, d[0]);
    auto [j1, j2] = distinct_pair(rng, d[1]);
    auto [k1, k2] = distinct_pair(rng, d[2]);
    return plane_move(d, i1, i2, j1, j2, k1, k2, static_cast<int>(rng.below(3)));
  }
  // In-slice minor; the fixed axis is chosen in proportion to its share.
  pick -= plane;
  std::size_t axis = 0;
  for (; axis < 2; ++axis) {
    const std::uint64_t share = minors_in_slices(d[axis], d[(axis + 1) % 3], d[(axis + 2) % 3]);
    if (pick < share) break;
    pick -= share;
  }
  std::array<std::size_t, 3> lo{}, hi{};
  lo[axis] = hi[axis] = rng.below(d[axis]);
  for (std::size_t a = 0; a < 3; ++a)
    if (a != axis) std::tie(lo[a], hi[a]) = distinct_pair(rng, d[a]);
  // Shared index on `axis`: the j- and k-exchange patterns coincide.
  return plane_move(d, lo[0], hi[0], lo[1], hi[1], lo[2], hi[2], axis == 2 ? 0 : 1);
}

std::uint64_t count_applicable_at_corner(std::size_t n1, std::size_t n2, std::size_t n3) {
  const auto set = MoveSet::plane_3way(n1, n2, n3);
  if (!set.materialized()) return 3 * std::uint64_t{n1 - 1} * (n2 - 1) * (n3 - 1);
  // The corner has flat offset 0, so it can only be the first plus cell.
  return static_cast<std::uint64_t>(std::count_if(
      set.moves().begin(), set.moves().end(), [](const Move& m) { return m.plus[0] == 0; }));
}

std::optional<Table> apply_move(const Table& table, const Move& move, int sign) {
  Table next = table;
  if (!apply_move_in_place(next, move, sign)) return std::nullopt;
  return next;
}

bool apply_move_in_place(Table& table, const Move& move, int sign) {
  if (sign != 1 && sign != -1) throw Error(ErrorKind::InvalidInput, "move sign must be +1 or -1");
  for (auto c : move.plus)
    if (c >= table.size()) throw Error(ErrorKind::DimensionMismatch, "move does not fit table");
  for (auto c : move.minus)
    if (c >= table.size()) throw Error(ErrorKind::DimensionMismatch, "move does not fit table");
  if (sign > 0) return table.try_shift(move.plus, move.minus);
  return table.try_shift(move.minus, move.plus);
}

}  // namespace ctables
