#pragma once

// Dense 2-way and 3-way tables, plane-sum margins and margin specs.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <type_traits>
#include <vector>

namespace ctables {

using Dims = std::vector<std::size_t>;
using MultiIndex = std::vector<std::size_t>;

std::size_t cell_count(const Dims& dims);

// Row-major flat offset of a multi-index. Throws DimensionMismatch when the
// index does not fit dims.
std::size_t flat_index(const Dims& dims, std::span<const std::size_t> index);
MultiIndex unflatten(const Dims& dims, std::size_t flat);

// Axis-th coordinate of a flat row-major offset, without materializing the
// whole multi-index.
std::size_t axis_coordinate(const Dims& dims, std::size_t flat, std::size_t axis);

// Throws InvalidInput unless dims has 2 or 3 entries, all positive.
void check_dims(const Dims& dims);

/// Dense k-way table (k in {2,3}) stored row-major.
///
/// Integer tables hold cell counts and are nonnegative by construction; the
/// real variant holds expected tables and points of transportation polytopes,
/// and is required to be nonnegative and finite.
template <typename T>
class BasicTable {
 public:
  using value_type = T;

  BasicTable() = default;
  BasicTable(Dims dims, std::vector<T> data);

  static BasicTable zeros(const Dims& dims);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t rank() const noexcept { return dims_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::span<const T> data() const noexcept { return data_; }

  T operator[](std::size_t flat) const { return data_[flat]; }
  T at(std::span<const std::size_t> index) const { return data_[flat_index(dims_, index)]; }
  T at(std::initializer_list<std::size_t> index) const {
    return at(std::span<const std::size_t>(index.begin(), index.size()));
  }

  // Adds one to every cell in `up` and subtracts one from every cell in
  // `down`. Returns false and leaves the table untouched when a cell would go
  // negative. Cells listed in `up` and `down` must be distinct.
  bool try_shift(std::span<const std::size_t> up, std::span<const std::size_t> down)
    requires std::is_integral_v<T>;

  friend bool operator==(const BasicTable&, const BasicTable&) = default;
  friend auto operator<=>(const BasicTable&, const BasicTable&) = default;

 private:
  Dims dims_;
  std::vector<T> data_;
};

using Table = BasicTable<std::int64_t>;
using RealTable = BasicTable<double>;

extern template class BasicTable<std::int64_t>;
extern template class BasicTable<double>;

template <typename T>
std::vector<T> plane_margins(const BasicTable<T>& table, std::size_t axis);

template <typename T>
T grand_total(const BasicTable<T>& table);

/// Plane-sum margins (a, b, c) of a k-way fiber; k vectors, one per axis.
struct MarginSpec {
  std::vector<std::vector<std::int64_t>> axis_sums;

  std::size_t rank() const noexcept { return axis_sums.size(); }
  Dims dims() const;

  friend bool operator==(const MarginSpec&, const MarginSpec&) = default;
};

// Returns the common grand total N. Throws NegativeEntry, MismatchedTotals,
// or InvalidInput (rank outside {2,3}, empty axis).
std::int64_t validate_margin_spec(const MarginSpec& spec);

MarginSpec margins_of(const Table& table);

bool has_margins(const Table& table, const MarginSpec& spec);

// Greedy north-west corner fill: a table with the given plane sums.
Table northwest_corner_table(const MarginSpec& spec);

}  // namespace ctables
