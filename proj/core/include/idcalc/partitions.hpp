#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace idcalc {

/// Visits every set partition of {0..n-1} with at most `max_blocks` blocks as
/// a restricted growth string (first occurrence labelling), in lexicographic
/// order of the strings. The visitor returns false to stop early; the
/// function returns false iff stopped.
template <class Visitor>
bool for_each_growth_string(int n, int max_blocks, Visitor&& visit) {
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  if (n == 0) return visit(static_cast<const std::vector<int>&>(rgs));
  if (max_blocks <= 0) return true;
  // prefix_max[i] = max label among rgs[0..i-1]
  std::vector<int> prefix_max(static_cast<std::size_t>(n) + 1, -1);
  prefix_max[1] = 0;
  for (int i = 1; i < n; ++i) prefix_max[static_cast<std::size_t>(i) + 1] = 0;
  while (true) {
    if (!visit(static_cast<const std::vector<int>&>(rgs))) return false;
    int i = n - 1;
    for (; i >= 1; --i) {
      const int cap = std::min(prefix_max[static_cast<std::size_t>(i)] + 1, max_blocks - 1);
      if (rgs[static_cast<std::size_t>(i)] < cap) break;
    }
    if (i < 1) return true;
    ++rgs[static_cast<std::size_t>(i)];
    prefix_max[static_cast<std::size_t>(i) + 1] =
        std::max(prefix_max[static_cast<std::size_t>(i)], rgs[static_cast<std::size_t>(i)]);
    for (int j = i + 1; j < n; ++j) {
      rgs[static_cast<std::size_t>(j)] = 0;
      prefix_max[static_cast<std::size_t>(j) + 1] = prefix_max[static_cast<std::size_t>(j)];
    }
  }
}

/// Relabels an arbitrary labelling into first-occurrence form.
inline std::vector<int> normalize_labels(const std::vector<int>& labels) {
  std::vector<int> out(labels.size());
  std::vector<std::pair<int, int>> seen;
  int next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& p) { return p.first == labels[i]; });
    if (it == seen.end()) {
      seen.emplace_back(labels[i], next);
      out[i] = next++;
    } else {
      out[i] = it->second;
    }
  }
  return out;
}

/// Visits every labelling that refines `coarse` (a first-occurrence
/// labelling): each block of `coarse` is split by an independent set
/// partition. Visited labellings are normalized.
template <class Visitor>
void for_each_refinement(const std::vector<int>& coarse, Visitor&& visit) {
  int blocks = 0;
  for (int v : coarse) blocks = std::max(blocks, v + 1);
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(blocks));
  for (std::size_t i = 0; i < coarse.size(); ++i) members[static_cast<std::size_t>(coarse[i])].push_back(i);

  std::vector<int> labels(coarse.size(), 0);
  // Recursive product over blocks; label = block * n + sub-label keeps
  // distinct blocks apart before normalization.
  const int n = static_cast<int>(coarse.size());
  auto recurse = [&](auto&& self, std::size_t block) -> void {
    if (block == members.size()) {
      visit(normalize_labels(labels));
      return;
    }
    const auto& mem = members[block];
    for_each_growth_string(static_cast<int>(mem.size()), static_cast<int>(mem.size()),
                           [&](const std::vector<int>& rgs) {
                             for (std::size_t j = 0; j < mem.size(); ++j)
                               labels[mem[j]] = static_cast<int>(block) * n + rgs[j];
                             self(self, block + 1);
                             return true;
                           });
  };
  recurse(recurse, 0);
}

}  // namespace idcalc
