#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "editcraft/ioutil.hpp"
#include "support/testmol.hpp"

namespace fs = std::filesystem;
using ectest::run_command;

namespace {

const std::string kCli = EDITCRAFT_CLI_PATH;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("editcraft_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name, const std::string& content) {
    fs::path p = path / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }
  std::string operator/(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("canon canonicalizes an inline SMILES") {
  auto r = run_command(kCli + " canon \"CCO\" 2>/dev/null");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "[CH3:1][CH2:2][OH:3]\n");
}

TEST_CASE("canon reports per-line failures with exit 2") {
  TempDir tmp;
  std::string input = tmp.file("in.smi", "CCO\nnot_a_molecule\nCC\n");
  auto r = run_command(kCli + " canon -i " + input + " 2>/dev/null");
  CHECK(r.exit_code == 2);
  // Two good lines still canonicalized.
  CHECK(r.out.find("[CH3:1][CH2:2][OH:3]") != std::string::npos);
  CHECK(r.out.find("[CH3:1][CH3:2]") != std::string::npos);
}

TEST_CASE("canon with empty stdin exits 0 and prints nothing") {
  auto r = run_command("echo -n '' | " + kCli + " canon 2>/dev/null");
  CHECK(r.exit_code == 0);
  CHECK(r.out.empty());
}

TEST_CASE("help and usage exit codes") {
  CHECK(run_command(kCli + " --help >/dev/null 2>&1").exit_code == 0);
  CHECK(run_command(kCli + " canon --help >/dev/null 2>&1").exit_code == 0);
  CHECK(run_command(kCli + " --frobnicate >/dev/null 2>&1").exit_code == 64);
  CHECK(run_command(kCli + " canon --bogus-flag x >/dev/null 2>&1").exit_code ==
        64);
}

TEST_CASE("apply-edits applies and classifies failures") {
  TempDir tmp;
  std::string edits =
      tmp.file("edits.json", R"([["MUTATE_ATOM",3,"N"],["STOP"]])");
  auto ok = run_command(kCli + " apply-edits --mol \"CCO\" --edits " + edits +
                        " 2>/dev/null");
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("N") != std::string::npos);

  std::string bad = tmp.file("bad.json", R"([["DEL_ATOM",99],["STOP"]])");
  auto fail = run_command(kCli + " apply-edits --mol \"CCO\" --edits " + bad +
                          " 2>/dev/null");
  CHECK(fail.exit_code == 3);

  std::string malformed = tmp.file("malformed.json", "{nope");
  auto data = run_command(kCli + " apply-edits --mol \"CCO\" --edits " +
                          malformed + " 2>/dev/null");
  CHECK(data.exit_code == 2);
}

TEST_CASE("extract-edits emits wire JSON") {
  auto r = run_command(kCli +
                       " extract-edits --src \"CCO\" --tgt \"CCN\" 2>/dev/null");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "[[\"MUTATE_ATOM\",3,\"N\"],[\"STOP\"]]\n");
}

TEST_CASE("build-kb then retrieve round-trips with self-retrieval first") {
  TempDir tmp;
  std::string pairs = tmp.file(
      "pairs.tsv",
      "CCO\tCCN\tex-a\tSwap the alcohol for an amine.\n"
      "Cc1ccccc1\tc1ccccc1\tex-b\tRemove the methyl.\n"
      "CCC\tCC\tex-c\tShorten the chain.\n");
  std::string kb = tmp / "kb.jsonl";
  auto built = run_command(kCli + " build-kb --pairs " + pairs + " --out " +
                           kb + " 2>/dev/null");
  CHECK(built.exit_code == 0);

  auto r = run_command(kCli + " retrieve --kb " + kb +
                       " --query \"CCO\" -k 5 2>/dev/null");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("ex-a\t1.000000", 0) == 0);
  // All three come back when k exceeds the store size.
  int lines = 0;
  for (char c : r.out) {
    if (c == '\n') ++lines;
  }
  CHECK(lines == 3);

  // Empty knowledge base: no output, exit 0.
  std::string empty_kb = tmp.file("empty.jsonl", "");
  auto empty = run_command(kCli + " retrieve --kb " + empty_kb +
                           " --query \"CCO\" 2>/dev/null");
  CHECK(empty.exit_code == 0);
  CHECK(empty.out.empty());
}

TEST_CASE("optimize with the mock provider is deterministic") {
  TempDir tmp;
  std::string inputs = tmp.file("inputs.smi", "CCO\tq0\nCC\tq1\n");
  std::string pairs = tmp.file("pairs.tsv", "CCO\tCCN\tex-a\tr\n");
  std::string kb = tmp / "kb.jsonl";
  REQUIRE(run_command(kCli + " build-kb --pairs " + pairs + " --out " + kb +
                      " 2>/dev/null")
              .exit_code == 0);

  // One valid response per input and run (n=1, shots=1).
  std::string script = tmp.file(
      "script.jsonl",
      "\"[REASONING]\\nok\\n[EDITS]\\n```json\\n[[\\\"STOP\\\"]]\\n```\"\n"
      "\"[REASONING]\\nok\\n[EDITS]\\n```json\\n[[\\\"STOP\\\"]]\\n```\"\n");

  std::string cmd = kCli + " optimize --input " + inputs + " --kb " + kb +
                    " --mode edits --shots 1 --n 1 --provider mock --script " +
                    script + " --dump-prompts --out ";
  std::string out1 = tmp / "run1";
  std::string out2 = tmp / "run2";
  CHECK(run_command(cmd + out1 + " 2>/dev/null").exit_code == 0);
  CHECK(run_command(cmd + out2 + " 2>/dev/null").exit_code == 0);

  for (const char* name :
       {"cand_q0.json", "cand_q1.json", "manifest.json",
        "prompts/q0.prompt.txt", "prompts/q1.prompt.txt"}) {
    CAPTURE(name);
    std::string a = editcraft::read_file(out1 + "/" + name);
    std::string b = editcraft::read_file(out2 + "/" + name);
    CHECK(a == b);
  }
  // Prompt dump carries the exemplar section.
  std::string prompt = editcraft::read_file(out1 + "/prompts/q0.prompt.txt");
  CHECK(prompt.find("[EXAMPLE 1]") != std::string::npos);
  CHECK(prompt.find("=== USER ===") != std::string::npos);
}

TEST_CASE("optimize rejects shot counts the kb cannot satisfy") {
  TempDir tmp;
  std::string inputs = tmp.file("inputs.smi", "CCO\n");
  std::string pairs = tmp.file("pairs.tsv", "CCO\tCCN\tex-a\tr\n");
  std::string kb = tmp / "kb.jsonl";
  REQUIRE(run_command(kCli + " build-kb --pairs " + pairs + " --out " + kb +
                      " 2>/dev/null")
              .exit_code == 0);
  std::string script = tmp.file("script.jsonl", "\"x\"\n");

  std::string base = kCli + " optimize --input " + inputs + " --kb " + kb +
                     " --shots 5 --n 1 --provider mock --script " + script +
                     " --out " + (tmp / "out");
  CHECK(run_command(base + " 2>/dev/null").exit_code == 2);
  // --allow-fewer-shots shrinks to the store size and proceeds.
  std::string script_ok = tmp.file(
      "ok.jsonl",
      "\"[REASONING]\\nok\\n[EDITS]\\n```json\\n[[\\\"STOP\\\"]]\\n```\"\n");
  CHECK(run_command(base + " --allow-fewer-shots --script " + script_ok +
                    " 2>/dev/null")
            .exit_code == 0);
}

TEST_CASE("optimize with constraints dumps the constraint block") {
  TempDir tmp;
  std::string inputs = tmp.file("inputs.smi", "CNCCC\tq0\n");
  std::string profile = tmp.file("pose.iprof.json", R"({
    "atoms": [
      {"serial": 1, "element": "C"},
      {"serial": 2, "element": "N"},
      {"serial": 3, "element": "C"},
      {"serial": 4, "element": "C"},
      {"serial": 5, "element": "C"}
    ],
    "bonds": [[1,2],[2,3],[3,4],[4,5]],
    "interactions": [
      {"serial": 2, "kind": "HydrogenBond", "residue": "ASP156"}
    ]
  })");
  std::string script = tmp.file(
      "script.jsonl",
      "\"[REASONING]\\nok\\n[EDITS]\\n```json\\n[[\\\"STOP\\\"]]\\n```\"\n");
  std::string out = tmp / "out";
  auto r = run_command(kCli + " optimize --input " + inputs +
                       " --mode edits --shots 0 --n 1 --provider mock"
                       " --script " + script + " --constraints " + profile +
                       " --dump-prompts --out " + out + " 2>/dev/null");
  CHECK(r.exit_code == 0);
  std::string prompt = editcraft::read_file(out + "/prompts/q0.prompt.txt");
  CHECK(prompt.find("CRITICAL BIOLOGICAL CONSTRAINTS:") != std::string::npos);
  CHECK(prompt.find("forms a critical Hydrogen Bond with ASP156.") !=
        std::string::npos);
}

TEST_CASE("evaluate computes tables from candidate files") {
  TempDir tmp;
  std::string inputs = tmp.file("inputs.smi", "CCO\tq0\nCCC\tq1\n");
  fs::create_directories(tmp / "cands");
  tmp.file("cands/cand_q0.json", R"({
    "input_id": "q0",
    "candidates": [
      {"run": 0, "status": "OK", "attempts": 1, "result_smiles": "CCO"}
    ]
  })");
  tmp.file("cands/cand_q1.json", R"({
    "input_id": "q1",
    "candidates": [
      {"run": 0, "status": "PARSE_FAILED", "attempts": 4}
    ]
  })");

  std::string catalog = tmp.file("catalog.smi", "CCO\n");
  std::string tsv = tmp / "report.tsv";
  auto r = run_command(kCli + " evaluate --inputs " + inputs +
                       " --candidates " + (tmp / "cands") +
                       " --oracle set:" + catalog + " --label demo --tsv " +
                       tsv + " 2>/dev/null");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("demo") != std::string::npos);
  CHECK(r.out.find("50.00%") != std::string::npos);
  CHECK(fs::exists(tsv));

  // always-true oracle counts every OK candidate.
  auto at = run_command(kCli + " evaluate --inputs " + inputs +
                        " --candidates " + (tmp / "cands") +
                        " --oracle always-true 2>/dev/null");
  CHECK(at.exit_code == 0);
  CHECK(at.out.find("50.00%") != std::string::npos);

  // Empty input set is a data error.
  std::string none = tmp.file("none.smi", "");
  CHECK(run_command(kCli + " evaluate --inputs " + none + " --candidates " +
                    (tmp / "cands") + " --oracle always-true 2>/dev/null")
            .exit_code == 2);
}
