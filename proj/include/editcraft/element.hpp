#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace editcraft {

// Supported element set. Anything else is rejected at parse time.
enum class Element : std::uint8_t { H, B, C, N, O, F, Si, P, S, Cl, Br, I };

std::string_view symbol_of(Element e);
std::optional<Element> element_from_symbol(std::string_view symbol);

// Elements writable without brackets (the SMILES organic subset).
bool in_organic_subset(Element e);

// Elements that may carry the aromatic flag / lowercase notation.
bool aromatic_capable(Element e);

// Allowed total valences for an element at a given formal charge, sorted
// ascending. Charge shifts the table by +charge for the lone-pair donors
// N, O, P and S; other elements keep their neutral table. An empty result
// means no valence state is considered valid.
std::vector<int> allowed_valences(Element e, int formal_charge);

// Smallest allowed valence >= bond_order_sum, or nullopt if the sum
// already exceeds every allowed state. Used for implicit hydrogen fill.
std::optional<int> smallest_valence_at_least(Element e, int formal_charge,
                                             int bond_order_sum);

}  // namespace editcraft
