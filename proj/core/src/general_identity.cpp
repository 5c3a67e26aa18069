#include <algorithm>
#include <bit>
#include <map>

#include "idcalc/errors.hpp"
#include "idcalc/identity.hpp"
#include "idcalc/partitions.hpp"

namespace idcalc {

namespace {

void check_base(const std::vector<int>& base) {
  if (static_cast<int>(base.size()) > GeneralIdentity::kMaxBase) throw ResourceError("general identity base too large");
  if (!std::is_sorted(base.begin(), base.end()) || std::adjacent_find(base.begin(), base.end()) != base.end())
    throw InputError("general identity base must be strictly increasing");
}

}  // namespace

GeneralIdentity GeneralIdentity::from_labels(std::vector<int> base, const std::vector<int>& labels) {
  check_base(base);
  const std::size_t subsets = std::size_t{1} << base.size();
  if (labels.size() != subsets) throw InputError("need one label per subset of the base");
  std::map<int, int> size_of_label;
  for (std::size_t b = 0; b < subsets; ++b) {
    const int sz = std::popcount(static_cast<Mask>(b));
    auto [it, inserted] = size_of_label.emplace(labels[b], sz);
    if (!inserted && it->second != sz) throw InputError("identity relates sets of different cardinality");
  }
  GeneralIdentity g;
  g.base_ = std::move(base);
  g.labels_ = normalize_labels(labels);
  return g;
}

GeneralIdentity GeneralIdentity::from_blocks(std::vector<int> base, const std::vector<std::vector<Mask>>& blocks) {
  check_base(base);
  const std::size_t subsets = std::size_t{1} << base.size();
  std::vector<int> labels(subsets);
  for (std::size_t b = 0; b < subsets; ++b) labels[b] = static_cast<int>(b);
  std::vector<char> seen(subsets, 0);
  for (const auto& block : blocks) {
    for (Mask b : block) {
      if (b >= subsets) throw InputError("subset outside the base");
      if (seen[b]) throw InputError("subset appears in more than one block");
      seen[b] = 1;
      labels[b] = static_cast<int>(block.front());
    }
  }
  return from_labels(std::move(base), labels);
}

GeneralIdentity GeneralIdentity::discrete(std::vector<int> base) {
  check_base(base);
  std::vector<int> labels(std::size_t{1} << base.size());
  for (std::size_t b = 0; b < labels.size(); ++b) labels[b] = static_cast<int>(b);
  return from_labels(std::move(base), labels);
}

GeneralIdentity GeneralIdentity::by_cardinality(std::vector<int> base) {
  check_base(base);
  std::vector<int> labels(std::size_t{1} << base.size());
  for (std::size_t b = 0; b < labels.size(); ++b) labels[b] = std::popcount(static_cast<Mask>(b));
  return from_labels(std::move(base), labels);
}

std::vector<std::vector<GeneralIdentity::Mask>> GeneralIdentity::blocks() const {
  int count = 0;
  for (int l : labels_) count = std::max(count, l + 1);
  std::vector<std::vector<Mask>> out(static_cast<std::size_t>(count));
  for (std::size_t b = 0; b < labels_.size(); ++b) out[static_cast<std::size_t>(labels_[b])].push_back(static_cast<Mask>(b));
  return out;
}

bool GeneralIdentity::operator<(const GeneralIdentity& o) const {
  if (base_ != o.base_) return base_ < o.base_;
  return labels_ < o.labels_;
}

GeneralIdentity::Mask order_transfer(GeneralIdentity::Mask sub, GeneralIdentity::Mask from, GeneralIdentity::Mask to) {
  GeneralIdentity::Mask out = 0;
  GeneralIdentity::Mask f = from;
  GeneralIdentity::Mask t = to;
  while (f != 0) {
    const auto fbit = f & (~f + 1);
    const auto tbit = t & (~t + 1);
    if (sub & fbit) out |= tbit;
    f ^= fbit;
    t ^= tbit;
  }
  return out;
}

GeneralIdentity k_simple_coarsening(const GeneralIdentity& g, int k) {
  using Mask = GeneralIdentity::Mask;
  const Mask subsets = Mask{1} << g.size();
  std::vector<int> labels(subsets, -1);
  int next = 0;
  // e' is an equivalence relation, so each set joins the class of the first
  // earlier set it is related to.
  std::vector<Mask> representatives;
  for (Mask b = 0; b < subsets; ++b) {
    for (Mask rep : representatives) {
      if (std::popcount(rep) != std::popcount(b)) continue;
      bool related = true;
      for (Mask sub = b;; sub = (sub - 1) & b) {
        if (std::popcount(sub) <= k && !g.related(sub, order_transfer(sub, b, rep))) {
          related = false;
          break;
        }
        if (sub == 0) break;
      }
      if (related) {
        labels[b] = labels[rep];
        break;
      }
    }
    if (labels[b] == -1) {
      labels[b] = next++;
      representatives.push_back(b);
    }
  }
  return GeneralIdentity::from_labels(g.base(), labels);
}

}  // namespace idcalc
