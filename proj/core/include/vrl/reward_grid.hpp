#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "vrl/errors.hpp"
#include "vrl/numeric.hpp"

namespace vrl {

// How off-grid reals are mapped onto the grid when compiling utilities.
enum class Rounding { nearest, floor, trunc };

const char* rounding_name(Rounding mode);
Rounding rounding_from_name(const std::string& name);

// The finite ordered reward set R. Values are strictly increasing; all
// reward bookkeeping elsewhere is by grid index, which keeps equality
// checks exact in both scalar modes.
template <class S>
class RewardGrid {
 public:
  // Empty placeholder; every real grid comes from the value constructor.
  RewardGrid() = default;

  explicit RewardGrid(std::vector<S> values) : values_(std::move(values)) {
    if (values_.empty()) throw DomainError("reward grid must be non-empty");
    for (std::size_t i = 1; i < values_.size(); ++i)
      if (!(values_[i - 1] < values_[i]))
        throw DomainError("reward grid values must be strictly increasing");
    as_double_.reserve(values_.size());
    for (const S& v : values_)
      as_double_.push_back(ScalarTraits<S>::to_double(v));
  }

  int size() const { return static_cast<int>(values_.size()); }
  const S& value(int i) const { return values_.at(static_cast<std::size_t>(i)); }
  const std::vector<S>& values() const { return values_; }

  bool contains(const S& v) const {
    auto it = std::lower_bound(values_.begin(), values_.end(), v);
    return it != values_.end() && *it == v;
  }

  int index_of(const S& v) const {
    auto it = std::lower_bound(values_.begin(), values_.end(), v);
    if (it == values_.end() || !(*it == v))
      throw DomainError("value is not on the reward grid");
    return static_cast<int>(it - values_.begin());
  }

  // Nearest grid element; ties go to the smaller element; beyond the grid
  // ends the result clamps to the end.
  int quantize(double x) const { return quantize(x, Rounding::nearest); }

  int quantize(double x, Rounding mode) const {
    const auto& g = as_double_;
    if (x <= g.front()) return 0;
    if (x >= g.back()) return size() - 1;
    auto it = std::lower_bound(g.begin(), g.end(), x);
    int hi = static_cast<int>(it - g.begin());
    if (g[static_cast<std::size_t>(hi)] == x) return hi;
    int lo = hi - 1;
    switch (mode) {
      case Rounding::floor:
        return lo;
      case Rounding::trunc:
        return x < 0 ? hi : lo;
      case Rounding::nearest:
      default: {
        double dl = x - g[static_cast<std::size_t>(lo)];
        double dh = g[static_cast<std::size_t>(hi)] - x;
        return dh < dl ? hi : lo;
      }
    }
  }

 private:
  std::vector<S> values_;
  std::vector<double> as_double_;
};

}  // namespace vrl
