#include <doctest.h>

#include <random>
#include <unordered_map>

#include "editcraft/constraints.hpp"
#include "editcraft/prompting.hpp"
#include "editcraft/smiles.hpp"
#include "support/testmol.hpp"

using namespace editcraft;

namespace {

// Pose mirroring [CH3:11][NH:12][CH2:13][CH2:22][CH3:23] with shuffled
// serials and explicit hydrogens (which alignment must drop).
const char* kProfileJson = R"({
  "atoms": [
    {"serial": 1, "element": "C"},
    {"serial": 2, "element": "C"},
    {"serial": 3, "element": "N"},
    {"serial": 4, "element": "C"},
    {"serial": 5, "element": "C"},
    {"serial": 6, "element": "H"},
    {"serial": 7, "element": "H"}
  ],
  "bonds": [[1,2],[2,3],[3,4],[4,5],[3,6],[5,7]],
  "interactions": [
    {"serial": 3, "kind": "HydrogenBond", "residue": "ASP156"},
    {"serial": 1, "kind": "Hydrophobic", "residue": "LEU145"}
  ]
})";

Molecule canon_molecule() {
  return parse_smiles("[CH3:11][NH:12][CH2:13][CH2:22][CH3:23]");
}

}  // namespace

TEST_CASE("interaction profile parsing") {
  InteractionProfile p = parse_interaction_profile(kProfileJson);
  CHECK(p.pose.atoms.size() == 7);
  CHECK(p.pose.bonds.size() == 6);
  REQUIRE(p.interactions.size() == 2);
  CHECK(p.interactions[0].kind == InteractionKind::HydrogenBond);
  CHECK(p.interactions[0].residue == "ASP156");
}

TEST_CASE("unknown interaction kinds are rejected") {
  std::string bad = R"({
    "atoms": [{"serial": 1, "element": "C"}],
    "bonds": [],
    "interactions": [{"serial": 1, "kind": "WaterBridge", "residue": "X1"}]
  })";
  CHECK_THROWS_AS(parse_interaction_profile(bad), UnknownInteractionKind);
}

TEST_CASE("profile schema errors") {
  CHECK_THROWS_AS(parse_interaction_profile("{"), SchemaError);
  CHECK_THROWS_AS(parse_interaction_profile(R"({"atoms": []})"), SchemaError);
  std::string empty_ok = R"({"atoms": [{"serial":1,"element":"C"}],
                             "bonds": [], "interactions": []})";
  CHECK(parse_interaction_profile(empty_ok).interactions.empty());
}

TEST_CASE("alignment recovers the pose-to-map correspondence") {
  InteractionProfile p = parse_interaction_profile(kProfileJson);
  Molecule canon = canon_molecule();
  auto alignment = align_pose_to_graph(p.pose, canon);
  REQUIRE(alignment.size() == 5);  // hydrogens dropped
  // The chain is asymmetric only modulo its end-to-end flip; nitrogen
  // position pins the rest.
  CHECK(alignment.at(3) == 12);
  CHECK(alignment.at(2) == 11);
  CHECK(alignment.at(4) == 13);
  CHECK(alignment.at(5) == 22);
  CHECK(alignment.at(1) == 23);
}

TEST_CASE("alignment failure when an atom is missing") {
  InteractionProfile p = parse_interaction_profile(kProfileJson);
  p.pose.atoms.pop_back();  // drop an H: still fine
  auto ok = align_pose_to_graph(p.pose, canon_molecule());
  CHECK(ok.size() == 5);

  InteractionProfile q = parse_interaction_profile(kProfileJson);
  // Drop a heavy atom and its bonds.
  q.pose.atoms.erase(q.pose.atoms.begin());
  q.pose.bonds.erase(q.pose.bonds.begin());
  CHECK_THROWS_AS(align_pose_to_graph(q.pose, canon_molecule()),
                  AlignmentFailure);
}

TEST_CASE("symmetric molecules align deterministically") {
  Molecule benzene = parse_smiles("c1ccccc1");
  PoseGraph pose;
  for (int i = 1; i <= 6; ++i) pose.atoms.push_back({i, Element::C});
  for (int i = 1; i <= 6; ++i) pose.bonds.push_back({i, i % 6 + 1});
  auto a1 = align_pose_to_graph(pose, benzene);
  auto a2 = align_pose_to_graph(pose, benzene);
  CHECK(a1 == a2);
  CHECK(a1.size() == 6);
}

TEST_CASE("permuted poses recover the permutation on asymmetric molecules") {
  std::mt19937_64 rng(2025);
  const char* fixtures[] = {
      "CC(=O)Oc1ccccc1C(=O)O",
      "CCOC(=O)N",
      "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
  };
  for (const char* s : fixtures) {
    Molecule canon = parse_smiles(s);
    std::vector<int> maps;
    for (const Atom& a : canon.atoms()) maps.push_back(a.map_num);
    for (int trial = 0; trial < 50; ++trial) {
      // Random serial order for the pose atoms.
      std::vector<int> order = maps;
      std::shuffle(order.begin(), order.end(), rng);
      std::unordered_map<int, int> serial_of;  // map -> serial
      PoseGraph pose;
      for (std::size_t i = 0; i < order.size(); ++i) {
        int serial = static_cast<int>(i) + 1;
        serial_of[order[i]] = serial;
        pose.atoms.push_back({serial, canon.atom(order[i]).element});
      }
      for (const Bond& b : canon.bonds()) {
        pose.bonds.push_back({serial_of[b.a], serial_of[b.b]});
      }
      auto alignment = align_pose_to_graph(pose, canon);
      for (int map : maps) {
        CAPTURE(s);
        CHECK(alignment.at(serial_of[map]) == map);
      }
    }
  }
}

TEST_CASE("bind_constraints fills elements and sorted neighbors") {
  InteractionProfile p = parse_interaction_profile(kProfileJson);
  Molecule canon = canon_molecule();
  auto alignment = align_pose_to_graph(p.pose, canon);
  auto constraints = bind_constraints(p, alignment, canon);
  REQUIRE(constraints.size() == 2);
  // Sorted by map number: 12 before 23.
  CHECK(constraints[0].map_num == 12);
  CHECK(constraints[0].element == Element::N);
  REQUIRE(constraints[0].neighbors.size() == 2);
  CHECK(constraints[0].neighbors[0].second == 11);
  CHECK(constraints[0].neighbors[1].second == 13);
  CHECK(constraints[1].map_num == 23);
  CHECK(constraints[1].kind == InteractionKind::Hydrophobic);

  // Rendering reproduces the documented sentence byte-exactly.
  std::string block = render_constraint_block(constraints, canon);
  CHECK(block.find(
            "Atom with map number [12] (a N atom connected to [C:11, C:13]) "
            "forms a critical Hydrogen Bond with ASP156.\n") !=
        std::string::npos);
}

TEST_CASE("bind_constraints is stable under interaction reordering") {
  InteractionProfile p = parse_interaction_profile(kProfileJson);
  Molecule canon = canon_molecule();
  auto alignment = align_pose_to_graph(p.pose, canon);
  auto c1 = bind_constraints(p, alignment, canon);
  std::reverse(p.interactions.begin(), p.interactions.end());
  auto c2 = bind_constraints(p, alignment, canon);
  REQUIRE(c1.size() == c2.size());
  for (std::size_t i = 0; i < c1.size(); ++i) {
    CHECK(c1[i].map_num == c2[i].map_num);
    CHECK(c1[i].kind == c2[i].kind);
    CHECK(c1[i].residue == c2[i].residue);
  }
}

TEST_CASE("unmapped serials are reported") {
  InteractionProfile p = parse_interaction_profile(kProfileJson);
  Molecule canon = canon_molecule();
  auto alignment = align_pose_to_graph(p.pose, canon);
  p.interactions.push_back({99, InteractionKind::SaltBridge, "ARG1"});
  CHECK_THROWS_AS(bind_constraints(p, alignment, canon), UnmappedSerial);

  InteractionProfile empty = p;
  empty.interactions.clear();
  CHECK(bind_constraints(empty, alignment, canon).empty());
}
