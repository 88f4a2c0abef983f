#include "vrl/delusion.hpp"

#include <numeric>

namespace vrl {

const char* rounding_name(Rounding mode) {
  switch (mode) {
    case Rounding::nearest:
      return "nearest";
    case Rounding::floor:
      return "floor";
    case Rounding::trunc:
      return "trunc";
  }
  return "nearest";
}

Rounding rounding_from_name(const std::string& name) {
  if (name == "nearest") return Rounding::nearest;
  if (name == "floor") return Rounding::floor;
  if (name == "trunc") return Rounding::trunc;
  throw DomainError("unknown rounding mode '" + name + "'");
}

Delusion identity_delusion(int grid_size, std::string name) {
  Delusion d;
  d.name = std::move(name);
  d.map.resize(static_cast<std::size_t>(grid_size));
  std::iota(d.map.begin(), d.map.end(), 0);
  return d;
}

Delusion constant_delusion(std::string name, int grid_size, int target_index) {
  if (target_index < 0 || target_index >= grid_size)
    throw DomainError("constant delusion target is off the grid");
  Delusion d;
  d.name = std::move(name);
  d.map.assign(static_cast<std::size_t>(grid_size), target_index);
  return d;
}

Delusion delusion_from_images(std::string name, std::vector<int> images,
                              int grid_size) {
  if (static_cast<int>(images.size()) != grid_size)
    throw DomainError("delusion '" + name + "' must map every grid value");
  for (int img : images)
    if (img < 0 || img >= grid_size)
      throw DomainError("delusion '" + name + "' maps outside the grid");
  Delusion d;
  d.name = std::move(name);
  d.map = std::move(images);
  return d;
}

std::vector<std::vector<int>> enumerate_all_maps(int grid_size) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(grid_size), 0);
  while (true) {
    out.push_back(cur);
    int pos = grid_size - 1;
    while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == grid_size - 1) {
      cur[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++cur[static_cast<std::size_t>(pos)];
  }
  return out;
}

}  // namespace vrl
