#pragma once

#include <string>
#include <vector>

#include "vrl/reward_grid.hpp"

namespace vrl {

// A self-delusion: a total map from the reward grid to itself, stored as
// an index table. map[i] is the grid index the i-th grid value is sent to.
struct Delusion {
  std::string name;
  std::vector<int> map;

  int grid_size() const { return static_cast<int>(map.size()); }
  bool is_identity() const {
    for (std::size_t i = 0; i < map.size(); ++i)
      if (map[i] != static_cast<int>(i)) return false;
    return true;
  }
};

Delusion identity_delusion(int grid_size, std::string name = "id");
Delusion constant_delusion(std::string name, int grid_size, int target_index);
Delusion delusion_from_images(std::string name, std::vector<int> images,
                              int grid_size);

// All grid_size^grid_size maps, in lexicographic order of their image
// tuples. Used by the worked-example builders.
std::vector<std::vector<int>> enumerate_all_maps(int grid_size);

template <class S>
S apply_delusion(const RewardGrid<S>& grid, const Delusion& d,
                 const S& inner_reward) {
  if (d.grid_size() != grid.size())
    throw DomainError("delusion '" + d.name + "' is not defined on this grid");
  return grid.value(d.map[static_cast<std::size_t>(grid.index_of(inner_reward))]);
}

}  // namespace vrl
