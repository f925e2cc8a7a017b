#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "editcraft/molecule.hpp"

namespace editcraft {

class BadParameter : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

// Fixed-length circular-fingerprint bit vector. Bit i lives in
// words[i / 64] at bit (i % 64); hex serialization is nibble-per-4-bits,
// lowest bit first, lowercase.
struct Fingerprint {
  std::vector<std::uint64_t> words;
  int length = 0;
  int radius = 0;

  static Fingerprint zeros(int nbits, int radius);

  bool test(int bit) const {
    return (words[bit / 64] >> (bit % 64)) & 1u;
  }
  void set(int bit) { words[bit / 64] |= std::uint64_t{1} << (bit % 64); }
  int popcount() const;

  std::string to_hex() const;
  static Fingerprint from_hex(const std::string& hex, int radius = 2);

  bool operator==(const Fingerprint&) const = default;
};

// Allowed fingerprint widths.
bool valid_fp_length(int nbits);

// Morgan / ECFP-style circular fingerprint: per-atom environment ids are
// grown by iterated hashing of (element, charge, degree, hydrogen count,
// ring flag) with sorted (bond order, neighbor id) tuples, deduplicated by
// covered-bond set, and folded modulo nbits. Aromatic input is kekulized
// first so notation variants fingerprint identically.
Fingerprint morgan_fingerprint(const Molecule& mol, int radius = 2,
                               int nbits = 2048);

// |a AND b| / |a OR b|; 1.0 when both vectors are empty.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

}  // namespace editcraft
