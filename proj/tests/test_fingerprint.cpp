#include <doctest.h>

#include <random>
#include <unordered_map>

#include "editcraft/fingerprint.hpp"
#include "editcraft/smiles.hpp"
#include "support/testmol.hpp"

using namespace editcraft;

TEST_CASE("single carbon at radius 0 sets exactly one bit") {
  Fingerprint fp = morgan_fingerprint(parse_smiles("C"), 0, 2048);
  CHECK(fp.popcount() == 1);
}

TEST_CASE("bad parameters are rejected") {
  Molecule m = parse_smiles("CC");
  CHECK_THROWS_AS(morgan_fingerprint(m, 2, 1000), BadParameter);
  CHECK_THROWS_AS(morgan_fingerprint(m, -1, 2048), BadParameter);
}

TEST_CASE("methane and ethane diverge at radius 1") {
  Fingerprint a = morgan_fingerprint(parse_smiles("C"), 1, 2048);
  Fingerprint b = morgan_fingerprint(parse_smiles("CC"), 1, 2048);
  CHECK_FALSE(a == b);
  CHECK(tanimoto(a, b) < 1.0);
}

TEST_CASE("fingerprints are invariant under atom relabeling") {
  std::mt19937_64 rng(11);
  const char* fixtures[] = {"CCO", "c1ccccc1", "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
                            "CC(=O)Oc1ccccc1C(=O)O"};
  for (const char* s : fixtures) {
    Molecule m = parse_smiles(s);
    Fingerprint base = morgan_fingerprint(m, 2, 2048);
    for (int t = 0; t < 20; ++t) {
      std::vector<int> maps;
      for (const Atom& a : m.atoms()) maps.push_back(a.map_num);
      std::vector<int> shuffled = maps;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      std::unordered_map<int, int> perm;
      for (std::size_t i = 0; i < maps.size(); ++i) perm[maps[i]] = shuffled[i];
      CHECK(morgan_fingerprint(m.renumbered(perm), 2, 2048) == base);
    }
  }
}

TEST_CASE("aromatic and kekule notations fingerprint identically") {
  Fingerprint a = morgan_fingerprint(parse_smiles("c1ccccc1"), 2, 2048);
  Fingerprint b = morgan_fingerprint(parse_smiles("C1=CC=CC=C1"), 2, 2048);
  CHECK(a == b);
}

TEST_CASE("tanimoto hand-counted example") {
  Fingerprint a = Fingerprint::zeros(2048, 2);
  Fingerprint b = Fingerprint::zeros(2048, 2);
  a.set(1);
  a.set(2);
  a.set(3);
  b.set(2);
  b.set(3);
  b.set(4);
  CHECK(tanimoto(a, b) == doctest::Approx(0.5));  // 2 common / 4 union
}

TEST_CASE("tanimoto identities") {
  Fingerprint x = morgan_fingerprint(parse_smiles("CCO"), 2, 2048);
  CHECK(tanimoto(x, x) == doctest::Approx(1.0));

  Fingerprint a = Fingerprint::zeros(512, 2);
  Fingerprint b = Fingerprint::zeros(512, 2);
  a.set(0);
  b.set(1);
  CHECK(tanimoto(a, b) == doctest::Approx(0.0));

  Fingerprint z1 = Fingerprint::zeros(512, 2);
  Fingerprint z2 = Fingerprint::zeros(512, 2);
  CHECK(tanimoto(z1, z2) == doctest::Approx(1.0));

  Fingerprint wide = Fingerprint::zeros(1024, 2);
  CHECK_THROWS_AS(tanimoto(a, wide), LengthMismatch);
}

TEST_CASE("tanimoto symmetry and bounds on random pairs") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 300; ++i) {
    Molecule m1 = ectest::random_molecule(rng, 12);
    Molecule m2 = ectest::random_molecule(rng, 12);
    Fingerprint a = morgan_fingerprint(m1, 2, 2048);
    Fingerprint b = morgan_fingerprint(m2, 2, 2048);
    double ab = tanimoto(a, b);
    CHECK(ab == tanimoto(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("folding: every 2048 bit has a 4096 preimage") {
  const char* fixtures[] = {"CC(C)Cc1ccc(cc1)C(C)C(=O)O", "c1cnc2[nH]ccc2c1",
                            "CCS(=O)(=O)N"};
  for (const char* s : fixtures) {
    Molecule m = parse_smiles(s);
    Fingerprint wide = morgan_fingerprint(m, 2, 4096);
    Fingerprint narrow = morgan_fingerprint(m, 2, 2048);
    for (int bit = 0; bit < 2048; ++bit) {
      if (!narrow.test(bit)) continue;
      CHECK((wide.test(bit) || wide.test(bit + 2048)));
    }
  }
}

TEST_CASE("hex round-trip") {
  Fingerprint fp = morgan_fingerprint(parse_smiles("CC(=O)O"), 2, 2048);
  std::string hex = fp.to_hex();
  CHECK(hex.size() == 512);
  for (char c : hex) {
    CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
  }
  CHECK(Fingerprint::from_hex(hex, 2) == fp);
}
