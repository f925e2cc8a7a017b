// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Everything runs offline; runtimes are asserted where the criterion
// carries a budget.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "editcraft/constraints.hpp"
#include "editcraft/editextract.hpp"
#include "editcraft/evalharness.hpp"
#include "editcraft/ioutil.hpp"
#include "editcraft/llmclient.hpp"
#include "editcraft/prompting.hpp"
#include "editcraft/retrieval.hpp"
#include "editcraft/smiles.hpp"
#include "../support/testmol.hpp"

namespace fs = std::filesystem;
using namespace editcraft;

namespace {

struct AcceptanceFailure {
  std::string message;
};

#define REQUIRE_TRUE(cond, msg)                                       \
  do {                                                                \
    if (!(cond)) {                                                    \
      std::ostringstream os_;                                         \
      os_ << msg << " [" << __FILE__ << ":" << __LINE__ << "]";       \
      throw AcceptanceFailure{os_.str()};                             \
    }                                                                 \
  } while (0)

const std::string kDataDir = EDITCRAFT_TEST_DATA_DIR;
const std::string kCli = EDITCRAFT_CLI_PATH;

std::vector<std::string> corpus_smiles() {
  std::vector<std::string> out;
  for (const auto& [id, smiles] : read_smiles_file(kDataDir + "/corpus.smi")) {
    (void)id;
    out.push_back(smiles);
  }
  return out;
}

std::string canon_str(const Molecule& m, bool maps = false) {
  SmilesOptions opts;
  opts.include_atom_maps = maps;
  opts.canonical = true;
  return write_smiles(m, opts);
}

Molecule relabeled(const Molecule& m, std::mt19937_64& rng) {
  std::vector<int> maps;
  for (const Atom& a : m.atoms()) maps.push_back(a.map_num);
  std::vector<int> shuffled = maps;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::unordered_map<int, int> perm;
  for (std::size_t i = 0; i < maps.size(); ++i) perm[maps[i]] = shuffled[i];
  return m.renumbered(perm);
}

// Trivial-automorphism check by counting self-isomorphisms (element +
// adjacency), independent of the library's alignment code.
bool trivial_automorphisms(const Molecule& m) {
  int n = m.atom_count();
  if (n > 28) return false;  // keep the count cheap
  std::vector<int> maps;
  for (const Atom& a : m.atoms()) maps.push_back(a.map_num);
  std::vector<int> assign(n, -1);
  std::vector<bool> used(n, false);
  long count = 0;
  std::function<void(int)> rec = [&](int k) {
    if (count >= 2) return;
    if (k == n) {
      ++count;
      return;
    }
    for (int c = 0; c < n; ++c) {
      if (used[c]) continue;
      if (m.atom(maps[k]).element != m.atom(maps[c]).element) continue;
      if (m.degree(maps[k]) != m.degree(maps[c])) continue;
      bool ok = true;
      for (int j = 0; j < k && ok; ++j) {
        bool b1 = m.has_bond(maps[k], maps[j]);
        bool b2 = m.has_bond(maps[c], maps[assign[j]]);
        if (b1 != b2) ok = false;
      }
      if (!ok) continue;
      assign[k] = c;
      used[c] = true;
      rec(k + 1);
      used[c] = false;
      assign[k] = -1;
      if (count >= 2) return;
    }
  };
  rec(0);
  return count == 1;
}

// ---- criteria ----------------------------------------------------------

void criterion_smiles_roundtrip() {
  auto corpus = corpus_smiles();
  REQUIRE_TRUE(corpus.size() >= 1000,
               "corpus must hold >= 1000 entries, found " << corpus.size());
  auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20250810);
  std::size_t idx = 0;
  for (const std::string& s : corpus) {
    Molecule m = parse_smiles(s);
    // parse -> write -> parse is isomorphic, with and without maps.
    SmilesOptions mapped;
    mapped.include_atom_maps = true;
    REQUIRE_TRUE(is_isomorphic(parse_smiles(write_smiles(m, mapped)), m),
                 "mapped round-trip failed for " << s);
    std::string base = canon_str(m);
    REQUIRE_TRUE(is_isomorphic(parse_smiles(base), m),
                 "round-trip failed for " << s);
    for (int t = 0; t < 100; ++t) {
      Molecule p = relabeled(m, rng);
      std::string out = canon_str(p);
      REQUIRE_TRUE(out == base, "canonical instability for "
                                    << s << ": " << out << " vs " << base);
    }
    ++idx;
  }
  auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  REQUIRE_TRUE(elapsed < 30, "round-trip suite took " << elapsed << "s");
}

void criterion_executor_extractor_closure() {
  auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(99173);
  ApplyPolicy policy{.strict_stop = true,
                     .require_connected_result = false,
                     .resanitize = true};
  int pairs = 0;
  int budget_insufficient = 0;
  while (pairs < 500) {
    Molecule src = ectest::random_molecule(rng, 12);
    auto pert = ectest::random_perturbation(rng, src, 5);
    if (!pert) continue;
    const Molecule& tgt = pert->second;
    EditSequence seq;
    AtomMapping mapping = max_common_substructure(src, tgt, SearchBudget{});
    if (!mapping.optimal) {
      ++budget_insufficient;
      continue;
    }
    seq = extract_edits(src, tgt, SearchBudget{});
    Molecule out = apply_edits(src, seq, policy);
    REQUIRE_TRUE(is_isomorphic(out, tgt),
                 "closure failed on generated pair " << pairs);
    ++pairs;
  }
  REQUIRE_TRUE(budget_insufficient < 50,
               "too many budget-exhausted searches: " << budget_insufficient);

  // Minimality against the brute-force oracle at distance <= 2.
  const char* seeds[] = {"CC",     "CCC",    "CCO",   "CCN",   "C1CC1",
                         "C1CCC1", "CC(C)C", "CC=C",  "C1CCCC1", "CCSC",
                         "CCCO",   "CC(N)C"};
  int verified = 0;
  for (const char* seed : seeds) {
    Molecule src = parse_smiles(seed);
    for (int rep = 0; rep < 6; ++rep) {
      auto pert = ectest::random_perturbation(rng, src, 2);
      if (!pert || pert->second.atom_count() > 8) continue;
      int oracle = ectest::brute_force_edit_distance_upto2(src, pert->second);
      if (oracle > 2) continue;
      EditSequence seq = extract_edits(src, pert->second, SearchBudget{});
      REQUIRE_TRUE(static_cast<int>(seq.edit_count()) == oracle,
                   "extraction length " << seq.edit_count()
                                        << " != minimal " << oracle
                                        << " for seed " << seed);
      ++verified;
    }
  }
  REQUIRE_TRUE(verified >= 30, "too few minimality samples: " << verified);

  auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  REQUIRE_TRUE(elapsed < 300, "closure suite took " << elapsed << "s");
}

void criterion_edit_language() {
  // The add-two-methyls sequence, verbatim including whitespace.
  const char* listing = R"JSON([
  ["ADD_ATOM", 500, "C"],
  ["ADD_ATOM", 501, "C"],
  ["ADD_BOND", 9, 500, "SINGLE"],
  ["ADD_BOND", 9, 501, "SINGLE"],
  ["STOP"]
])JSON";
  EditSequence seq = parse_edit_json(listing);
  REQUIRE_TRUE(seq.commands.size() == 5, "listing sequence decoded wrong");
  REQUIRE_TRUE(seq.commands[1].a == 501, "listing ids decoded wrong");

  using Kind = EditParseError::Kind;
  auto expect_kind = [](const char* text, Kind want) {
    try {
      parse_edit_json(text);
    } catch (const EditParseError& e) {
      REQUIRE_TRUE(e.kind() == want, "wrong error kind for " << text);
      return;
    }
    REQUIRE_TRUE(false, "no error for " << text);
  };
  expect_kind(R"([["ADD_ATOM",12,"C"],["STOP"]])", Kind::BadArgument);
  expect_kind(R"([["ADD_ATOM",499,"C"],["STOP"]])", Kind::BadArgument);
  expect_kind(R"([["DEL_ATOM",1]])", Kind::MissingStop);
  expect_kind(R"([["STOP"],["DEL_ATOM",1]])", Kind::CommandAfterStop);
  expect_kind("not json", Kind::JsonMalformed);
  expect_kind(R"([["WARP_ATOM",1],["STOP"]])", Kind::UnknownCommand);
  expect_kind(R"([["DEL_BOND",1],["STOP"]])", Kind::BadArity);
  expect_kind(R"([["ADD_BOND",1,2,"SORTA"],["STOP"]])", Kind::BadArgument);

  // Boundary: exactly 500 is legal.
  EditSequence ok = parse_edit_json(R"([["ADD_ATOM",500,"C"],["STOP"]])");
  REQUIRE_TRUE(ok.commands[0].a == 500, "id 500 must be accepted");
}

void criterion_fingerprints() {
  std::mt19937_64 rng(60601);
  std::vector<Fingerprint> fps;
  for (int i = 0; i < 200; ++i) {
    fps.push_back(
        morgan_fingerprint(ectest::random_molecule(rng, 14), 2, 2048));
  }
  for (int i = 0; i < 10'000; ++i) {
    const Fingerprint& a = fps[rng() % fps.size()];
    const Fingerprint& b = fps[rng() % fps.size()];
    double ab = tanimoto(a, b);
    double ba = tanimoto(b, a);
    REQUIRE_TRUE(ab == ba, "tanimoto asymmetry");
    REQUIRE_TRUE(ab >= 0.0 && ab <= 1.0, "tanimoto out of bounds");
  }

  auto corpus = corpus_smiles();
  for (int i = 0; i < 200; ++i) {
    Molecule m = parse_smiles(corpus[i % corpus.size()]);
    Fingerprint base = morgan_fingerprint(m, 2, 2048);
    Fingerprint perm = morgan_fingerprint(relabeled(m, rng), 2, 2048);
    REQUIRE_TRUE(base == perm,
                 "fingerprint not permutation invariant for " << corpus[i]);
  }

  Fingerprint a = Fingerprint::zeros(2048, 2);
  Fingerprint b = Fingerprint::zeros(2048, 2);
  a.set(1);
  a.set(2);
  a.set(3);
  b.set(2);
  b.set(3);
  b.set(4);
  REQUIRE_TRUE(tanimoto(a, b) == 0.5, "hand-counted 2/4 example failed");
}

void criterion_retrieval() {
  auto make = [](const std::string& id, const std::string& s,
                 const std::string& t) {
    CliffPair pair;
    pair.source = parse_smiles(s);
    pair.target = parse_smiles(t);
    pair.edits = extract_edits(pair.source, pair.target, SearchBudget{});
    return make_exemplar(id, pair, "");
  };
  std::vector<Exemplar> kb = {make("b-id", "CCO", "CCN"),
                              make("a-id", "CCO", "CCS"),
                              make("c-id", "CCCC", "CCC")};
  auto built1 = build_index(kb);
  auto built2 = build_index({kb[2], kb[0], kb[1]});  // reordered store
  Fingerprint q = morgan_fingerprint(parse_smiles("CCO"), 2, 2048);
  auto h1 = query_top_k(built1.index, q, 3);
  auto h2 = query_top_k(built2.index, q, 3);
  REQUIRE_TRUE(h1.size() == 3 && h2.size() == 3, "retrieval hit count");
  REQUIRE_TRUE(h1[0].similarity == 1.0, "self-retrieval not 1.0");
  REQUIRE_TRUE(h1[0].exemplar.id == "a-id",
               "tie-break should pick ascending id, got " << h1[0].exemplar.id);
  for (int i = 0; i < 3; ++i) {
    REQUIRE_TRUE(h1[i].exemplar.id == h2[i].exemplar.id,
                 "retrieval order depends on store order");
  }

  // Mining: strict > threshold. An exact self-match at threshold 1.0 is
  // the boundary case and must be skipped.
  std::vector<Molecule> queries = {parse_smiles("CCO")};
  std::vector<Molecule> catalog = {parse_smiles("CCO")};
  MiningResult hit = mine_cliff_pairs(queries, catalog, 0.5);
  REQUIRE_TRUE(hit.pairs.size() == 1, "mining missed a qualifying neighbor");
  MiningResult skip = mine_cliff_pairs(queries, catalog, 1.0);
  REQUIRE_TRUE(skip.pairs.empty() && skip.skipped.size() == 1,
               "boundary similarity must be skipped under strict >");
}

void criterion_retry_contract() {
  Molecule query = parse_smiles("CCO");
  OptimizeContext ctx;
  ctx.mode.output_kind = OutputKind::Edits;
  ctx.mode.n_shots = 0;
  std::string valid =
      "[REASONING]\nok\n[EDITS]\n```json\n[[\"STOP\"]]\n```";

  MockProvider m1({"junk-a", "junk-b", valid});
  ProviderConfig config;
  config.max_retries = 3;
  CandidateResult r1 = optimize_once(query, ctx, m1, config);
  REQUIRE_TRUE(r1.status == CandidateStatus::Ok, "retry case should succeed");
  REQUIRE_TRUE(r1.attempts == 3, "expected attempts=3, got " << r1.attempts);

  MockProvider m2({"j1", "j2", "j3", "j4", valid});
  CandidateResult r2 = optimize_once(query, ctx, m2, config);
  REQUIRE_TRUE(r2.status == CandidateStatus::ParseFailed,
               "exhausted retries must fail");
  REQUIRE_TRUE(r2.attempts == 4, "expected attempts=4, got " << r2.attempts);
}

void criterion_constraints() {
  // Permuted-pose alignment recovers the permutation, 200 times across
  // asymmetric corpus molecules.
  std::mt19937_64 rng(70707);
  auto corpus = corpus_smiles();
  int done = 0;
  for (const std::string& s : corpus) {
    if (done >= 200) break;
    Molecule canon = parse_smiles(s);
    if (canon.atom_count() < 4) continue;
    if (!trivial_automorphisms(canon)) continue;
    std::vector<int> maps;
    for (const Atom& a : canon.atoms()) maps.push_back(a.map_num);
    std::vector<int> order = maps;
    std::shuffle(order.begin(), order.end(), rng);
    std::unordered_map<int, int> serial_of;
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
      REQUIRE_TRUE(alignment.at(serial_of[map]) == map,
                   "alignment failed to recover the permutation for " << s);
    }
    ++done;
  }
  REQUIRE_TRUE(done == 200, "only " << done << " asymmetric molecules found");

  // Byte-exact constraint sentence.
  Molecule mol = parse_smiles("[CH3:11][NH:12][CH2:13][CH2:22][CH3:23]");
  InteractionConstraint c;
  c.map_num = 12;
  c.element = Element::N;
  c.neighbors = {{Element::C, 11}, {Element::C, 13}};
  c.kind = InteractionKind::HydrogenBond;
  c.residue = "ASP156";
  std::string block = render_constraint_block({c}, mol);
  const std::string expect =
      "Atom with map number [12] (a N atom connected to [C:11, C:13]) forms "
      "a critical Hydrogen Bond with ASP156.";
  REQUIRE_TRUE(block.find(expect + "\n") != std::string::npos,
               "constraint sentence mismatch:\n" << block);
}

void criterion_end_to_end_golden() {
  auto start = std::chrono::steady_clock::now();
  fs::path e2e = fs::path(kDataDir) / "e2e";
  fs::path golden = fs::path(kDataDir) / "golden" / "e2e";
  fs::path workdir =
      fs::temp_directory_path() / ("editcraft_accept_" +
                                   std::to_string(::getpid()));
  fs::remove_all(workdir);
  fs::create_directories(workdir);

  struct Config {
    const char* name;
    const char* mode;
    int shots;
  };
  const Config configs[] = {
      {"edits5", "edits", 5},
      {"edits1", "edits", 1},
      {"direct5", "direct-smiles", 5},
      {"direct0", "direct-smiles", 0},
  };
  for (const Config& cfg : configs) {
    std::string out = (workdir / cfg.name).string();
    std::ostringstream cmd;
    cmd << kCli << " optimize --input " << (e2e / "inputs10.smi").string()
        << " --kb " << (e2e / "kb.jsonl").string() << " --mode " << cfg.mode
        << " --shots " << cfg.shots << " --n 2 --provider mock --script "
        << (e2e / ("script_" + std::string(cfg.name) + ".jsonl")).string()
        << " --dump-prompts --out " << out << " 2>/dev/null";
    auto run = ectest::run_command(cmd.str());
    REQUIRE_TRUE(run.exit_code == 0,
                 "optimize failed for config " << cfg.name);

    // Every produced file must match its golden byte-for-byte.
    fs::path gdir = golden / cfg.name;
    REQUIRE_TRUE(fs::exists(gdir), "missing golden dir " << gdir.string());
    std::size_t compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(gdir)) {
      if (!entry.is_regular_file()) continue;
      fs::path rel = fs::relative(entry.path(), gdir);
      std::string got = read_file((fs::path(out) / rel).string());
      std::string want = read_file(entry.path().string());
      REQUIRE_TRUE(got == want, "golden mismatch for " << cfg.name << "/"
                                                       << rel.string());
      ++compared;
    }
    REQUIRE_TRUE(compared >= 11, "golden dir " << cfg.name
                                               << " too small: " << compared);
    // And nothing extra.
    for (const auto& entry : fs::recursive_directory_iterator(out)) {
      if (!entry.is_regular_file()) continue;
      fs::path rel = fs::relative(entry.path(), out);
      REQUIRE_TRUE(fs::exists(gdir / rel),
                   "unexpected output file " << rel.string());
    }
  }

  // Evaluate the edits5 run against the set-membership oracle and check
  // the derived table exactly.
  std::string tsv = (workdir / "report.tsv").string();
  std::ostringstream eval;
  eval << kCli << " evaluate --inputs " << (e2e / "inputs10.smi").string()
       << " --candidates " << (workdir / "edits5").string() << " --oracle set:"
       << (e2e / "catalog.smi").string()
       << " --thresholds 0.5,0.6,0.7,0.8,0.9 --label edits5 --tsv " << tsv
       << " 2>/dev/null";
  auto ev = ectest::run_command(eval.str());
  REQUIRE_TRUE(ev.exit_code == 0, "evaluate failed");
  ParsedReport parsed = parse_report_tsv(read_file(tsv));
  std::string expect_tsv = read_file((golden / "report_edits5.tsv").string());
  REQUIRE_TRUE(read_file(tsv) == expect_tsv, "evaluate TSV mismatch");
  for (std::size_t i = 1; i < parsed.table.rates.size(); ++i) {
    REQUIRE_TRUE(parsed.table.rates[i] <= parsed.table.rates[i - 1],
                 "rates must be non-increasing");
  }
  REQUIRE_TRUE(parsed.table.total_solved >= parsed.table.rates[0],
               "total_solved must dominate the rates");
  // Table-1-shaped rendering.
  REQUIRE_TRUE(ev.out.find("Configuration") != std::string::npos &&
                   ev.out.find("Sim>0.5") != std::string::npos &&
                   ev.out.find('%') != std::string::npos,
               "report rendering lacks the expected layout");

  fs::remove_all(workdir);
  auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  REQUIRE_TRUE(elapsed < 60, "end-to-end suite took " << elapsed << "s");
}

void criterion_eval_math() {
  EvalRecord a{"a", true, 0.55};
  EvalRecord b{"b", true, 0.65};
  EvalRecord c{"c", false, std::nullopt};
  EvalRecord d{"d", true, 0.85};
  SuccessTable t = success_table({a, b, c, d}, {0.5, 0.6, 0.7, 0.8, 0.9});
  REQUIRE_TRUE(t.rates[0] == 0.75, "rate(0.5) must be 0.75");
  REQUIRE_TRUE(t.rates[1] == 0.5, "rate(0.6) must be 0.5");
  REQUIRE_TRUE(t.rates[3] == 0.25, "rate(0.8) must be 0.25");
  REQUIRE_TRUE(t.total_solved == 0.75, "total_solved must be 0.75");

  EvalRecord boundary{"x", true, 0.6};
  SuccessTable bt = success_table({boundary}, {0.6});
  REQUIRE_TRUE(bt.rates[0] == 0.0, "best=0.6 at t=0.6 must be excluded");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void()> fn;
  };
  const std::vector<Criterion> criteria = {
      {"1 smiles-round-trip", criterion_smiles_roundtrip},
      {"2 executor-extractor-closure", criterion_executor_extractor_closure},
      {"3 edit-language-conformance", criterion_edit_language},
      {"4 fingerprint-similarity", criterion_fingerprints},
      {"5 retrieval", criterion_retrieval},
      {"6 retry-contract", criterion_retry_contract},
      {"7 constraint-pipeline", criterion_constraints},
      {"8 end-to-end-golden", criterion_end_to_end_golden},
      {"9 eval-math", criterion_eval_math},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    try {
      c.fn();
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - start)
                    .count();
      std::printf("PASS  %-32s (%lld ms)\n", c.name,
                  static_cast<long long>(ms));
    } catch (const AcceptanceFailure& f) {
      ++failures;
      std::printf("FAIL  %-32s %s\n", c.name, f.message.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("FAIL  %-32s unexpected exception: %s\n", c.name, e.what());
    }
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
