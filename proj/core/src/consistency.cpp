#include "vrl/consistency.hpp"

namespace vrl {

std::vector<std::string> bit_windows(const std::string& bits, int k) {
  if (k <= 0) throw DomainError("window length must be positive");
  if (static_cast<int>(bits.size()) < k)
    throw DomainError("state code '" + bits + "' is shorter than the window");
  for (char c : bits)
    if (c != '0' && c != '1')
      throw DomainError("state code '" + bits + "' is not a bit string");
  std::vector<std::string> out;
  out.reserve(bits.size() - static_cast<std::size_t>(k) + 1);
  for (std::size_t i = 0; i + static_cast<std::size_t>(k) <= bits.size(); ++i)
    out.push_back(bits.substr(i, static_cast<std::size_t>(k)));
  return out;
}

int window_index(const std::string& window) {
  int idx = 0;
  for (char c : window) idx = idx * 2 + (c == '1' ? 1 : 0);
  return idx;
}

}  // namespace vrl
