#include "ctables/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ctables/error.hpp"

namespace ctables {

std::size_t cell_count(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

std::size_t flat_index(const Dims& dims, std::span<const std::size_t> index) {
  if (index.size() != dims.size())
    throw Error(ErrorKind::DimensionMismatch, "index rank " + std::to_string(index.size()) +
                                                  " does not match table rank " +
                                                  std::to_string(dims.size()));
  std::size_t flat = 0;
  for (std::size_t a = 0; a < dims.size(); ++a) {
    if (index[a] >= dims[a])
      throw Error(ErrorKind::DimensionMismatch, "index out of range on axis " + std::to_string(a));
    flat = flat * dims[a] + index[a];
  }
  return flat;
}

MultiIndex unflatten(const Dims& dims, std::size_t flat) {
  MultiIndex index(dims.size());
  for (std::size_t a = dims.size(); a-- > 0;) {
    index[a] = flat % dims[a];
    flat /= dims[a];
  }
  return index;
}

std::size_t axis_coordinate(const Dims& dims, std::size_t flat, std::size_t axis) {
  std::size_t stride = 1;
  for (std::size_t a = dims.size(); a-- > axis + 1;) stride *= dims[a];
  return (flat / stride) % dims[axis];
}

void check_dims(const Dims& dims) {
  if (dims.size() != 2 && dims.size() != 3)
    throw Error(ErrorKind::InvalidInput,
                "tables must be 2-way or 3-way, got rank " + std::to_string(dims.size()));
  for (auto d : dims)
    if (d == 0) throw Error(ErrorKind::InvalidInput, "table dimensions must be positive");
}

template <typename T>
BasicTable<T>::BasicTable(Dims dims, std::vector<T> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  check_dims(dims_);
  if (data_.size() != cell_count(dims_))
    throw Error(ErrorKind::DimensionMismatch, "data length " + std::to_string(data_.size()) +
                                                  " != product of dims " +
                                                  std::to_string(cell_count(dims_)));
  for (const T& v : data_) {
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "non-finite table entry");
    }
    if (v < 0) throw Error(ErrorKind::NegativeEntry, "table entries must be nonnegative");
  }
}

template <typename T>
BasicTable<T> BasicTable<T>::zeros(const Dims& dims) {
  check_dims(dims);
  return BasicTable(dims, std::vector<T>(cell_count(dims), T{0}));
}

template <typename T>
bool BasicTable<T>::try_shift(std::span<const std::size_t> up, std::span<const std::size_t> down)
  requires std::is_integral_v<T>
{
  for (auto c : down)
    if (data_[c] <= 0) return false;
  for (auto c : up) ++data_[c];
  for (auto c : down) --data_[c];
  return true;
}

template class BasicTable<std::int64_t>;
template class BasicTable<double>;

template <typename T>
std::vector<T> plane_margins(const BasicTable<T>& table, std::size_t axis) {
  if (axis >= table.rank())
    throw Error(ErrorKind::AxisOutOfRange, "axis " + std::to_string(axis) + " >= rank " +
                                               std::to_string(table.rank()));
  const auto& dims = table.dims();
  std::size_t inner = 1;
  for (std::size_t a = axis + 1; a < dims.size(); ++a) inner *= dims[a];
  std::vector<T> sums(dims[axis], T{0});
  auto data = table.data();
  for (std::size_t flat = 0; flat < data.size(); ++flat) sums[(flat / inner) % dims[axis]] += data[flat];
  return sums;
}

template <typename T>
T grand_total(const BasicTable<T>& table) {
  auto data = table.data();
  return std::accumulate(data.begin(), data.end(), T{0});
}

template std::vector<std::int64_t> plane_margins(const Table&, std::size_t);
template std::vector<double> plane_margins(const RealTable&, std::size_t);
template std::int64_t grand_total(const Table&);
template double grand_total(const RealTable&);

Dims MarginSpec::dims() const {
  Dims d;
  d.reserve(axis_sums.size());
  for (const auto& v : axis_sums) d.push_back(v.size());
  return d;
}

std::int64_t validate_margin_spec(const MarginSpec& spec) {
  check_dims(spec.dims());
  std::int64_t total = -1;
  for (std::size_t a = 0; a < spec.rank(); ++a) {
    std::int64_t sum = 0;
    for (auto v : spec.axis_sums[a]) {
      if (v < 0)
        throw Error(ErrorKind::NegativeEntry, "negative margin on axis " + std::to_string(a));
      sum += v;
    }
    if (total < 0) {
      total = sum;
    } else if (sum != total) {
      throw Error(ErrorKind::MismatchedTotals, "axis " + std::to_string(a) + " sums to " +
                                                   std::to_string(sum) + ", axis 0 sums to " +
                                                   std::to_string(total));
    }
  }
  return total;
}

MarginSpec margins_of(const Table& table) {
  MarginSpec spec;
  for (std::size_t a = 0; a < table.rank(); ++a) spec.axis_sums.push_back(plane_margins(table, a));
  return spec;
}

bool has_margins(const Table& table, const MarginSpec& spec) {
  return table.dims() == spec.dims() && margins_of(table) == spec;
}

Table northwest_corner_table(const MarginSpec& spec) {
  validate_margin_spec(spec);
  const Dims dims = spec.dims();
  auto remaining = spec.axis_sums;
  std::vector<std::int64_t> data(cell_count(dims), 0);
  for (std::size_t flat = 0; flat < data.size(); ++flat) {
    std::int64_t v = INT64_MAX;
    for (std::size_t a = 0; a < dims.size(); ++a)
      v = std::min(v, remaining[a][axis_coordinate(dims, flat, a)]);
    data[flat] = v;
    for (std::size_t a = 0; a < dims.size(); ++a) remaining[a][axis_coordinate(dims, flat, a)] -= v;
  }
  Table table(dims, std::move(data));
  if (!has_margins(table, spec))
    throw Error(ErrorKind::InvalidInput, "north-west corner fill did not reach the margins");
  return table;
}

}  // namespace ctables
