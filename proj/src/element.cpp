#include "editcraft/element.hpp"

#include <algorithm>
#include <array>

namespace editcraft {

namespace {

struct ElementInfo {
  std::string_view symbol;
  std::vector<int> valences;
  bool organic;
  bool aromatic_ok;
};

const std::array<ElementInfo, 12>& table() {
  static const std::array<ElementInfo, 12> t = {{
      {"H", {1}, false, false},
      {"B", {3}, true, true},
      {"C", {4}, true, true},
      {"N", {3}, true, true},
      {"O", {2}, true, true},
      {"F", {1}, true, false},
      {"Si", {4}, false, false},
      {"P", {3, 5}, true, true},
      {"S", {2, 4, 6}, true, true},
      {"Cl", {1}, true, false},
      {"Br", {1}, true, false},
      {"I", {1}, true, false},
  }};
  return t;
}

bool charge_adjustable(Element e) {
  return e == Element::N || e == Element::O || e == Element::P ||
         e == Element::S;
}

}  // namespace

std::string_view symbol_of(Element e) {
  return table()[static_cast<std::size_t>(e)].symbol;
}

std::optional<Element> element_from_symbol(std::string_view symbol) {
  for (std::size_t i = 0; i < table().size(); ++i) {
    if (table()[i].symbol == symbol) return static_cast<Element>(i);
  }
  return std::nullopt;
}

bool in_organic_subset(Element e) {
  return table()[static_cast<std::size_t>(e)].organic;
}

bool aromatic_capable(Element e) {
  return table()[static_cast<std::size_t>(e)].aromatic_ok;
}

std::vector<int> allowed_valences(Element e, int formal_charge) {
  const auto& base = table()[static_cast<std::size_t>(e)].valences;
  if (formal_charge == 0 || !charge_adjustable(e)) return base;
  std::vector<int> out;
  for (int v : base) {
    int adjusted = v + formal_charge;
    if (adjusted >= 0) out.push_back(adjusted);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<int> smallest_valence_at_least(Element e, int formal_charge,
                                             int bond_order_sum) {
  for (int v : allowed_valences(e, formal_charge)) {
    if (v >= bond_order_sum) return v;
  }
  return std::nullopt;
}

}  // namespace editcraft
