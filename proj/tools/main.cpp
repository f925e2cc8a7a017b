#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "editcraft/constraints.hpp"
#include "editcraft/editextract.hpp"
#include "editcraft/evalharness.hpp"
#include "editcraft/ioutil.hpp"
#include "editcraft/llmclient.hpp"
#include "editcraft/prompting.hpp"
#include "editcraft/retrieval.hpp"
#include "editcraft/smiles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace editcraft;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitDomain = 3;
constexpr int kExitUsage = 64;

std::string mapped_smiles(const Molecule& m) {
  SmilesOptions o;
  o.include_atom_maps = true;
  o.canonical = true;
  return write_smiles(m, o);
}

std::string plain_smiles(const Molecule& m) {
  SmilesOptions o;
  o.canonical = true;
  return write_smiles(m, o);
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

int classify_error(const std::exception& e) {
  if (dynamic_cast<const ApplyError*>(&e)) return kExitDomain;
  if (dynamic_cast<const ExtractionFailed*>(&e)) return kExitDomain;
  return kExitData;
}

// ---- canon ------------------------------------------------------------------

int run_canon(const std::vector<std::string>& inline_smiles,
              const std::string& input_file, bool kekulized, bool no_maps) {
  std::vector<std::pair<std::string, std::string>> lines;
  if (!inline_smiles.empty()) {
    for (std::size_t i = 0; i < inline_smiles.size(); ++i) {
      lines.push_back({"arg" + std::to_string(i), inline_smiles[i]});
    }
  } else if (!input_file.empty()) {
    lines = read_smiles_file(input_file);
  } else {
    std::ostringstream all;
    all << std::cin.rdbuf();
    lines = parse_smiles_lines(all.str());
  }

  SmilesOptions opts;
  opts.include_atom_maps = !no_maps;
  opts.kekulized_output = kekulized;
  opts.canonical = true;

  int failures = 0;
  std::size_t lineno = 0;
  for (const auto& [id, smiles] : lines) {
    ++lineno;
    try {
      Molecule m = parse_smiles(smiles);
      std::cout << write_smiles(m, opts) << "\n";
    } catch (const std::exception& e) {
      std::cerr << "line " << lineno << " (" << id << "): " << e.what()
                << "\n";
      ++failures;
    }
  }
  return failures ? kExitData : kExitOk;
}

// ---- apply-edits ------------------------------------------------------------

int run_apply(const std::string& mol_smiles, const std::string& edits_file,
              bool non_strict, bool allow_fragments) {
  Molecule m;
  EditSequence seq;
  try {
    m = parse_smiles(mol_smiles);
    std::vector<std::string> warnings;
    seq = parse_edit_json(read_file(edits_file), !non_strict, &warnings);
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  try {
    ApplyPolicy policy;
    policy.strict_stop = !non_strict;
    policy.require_connected_result = !allow_fragments;
    Molecule result = apply_edits(m, seq, policy);
    std::cout << mapped_smiles(result) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}

// ---- extract-edits ----------------------------------------------------------

int run_extract(const std::string& src, const std::string& tgt, long budget) {
  Molecule s, t;
  try {
    s = parse_smiles(src);
    t = parse_smiles(tgt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  try {
    SearchBudget b;
    b.max_expansions = budget;
    EditSequence seq = extract_edits(s, t, b);
    std::cout << serialize_edits(seq) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}

// ---- build-kb ---------------------------------------------------------------

int run_build_kb(const std::string& pairs_file, const std::string& out_file,
                 long budget) {
  std::vector<Exemplar> exemplars;
  int failures = 0;
  try {
    std::istringstream in(read_file(pairs_file));
    std::string line;
    std::size_t lineno = 0;
    std::size_t count = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> cols;
      std::size_t start = 0;
      for (;;) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
          cols.push_back(line.substr(start));
          break;
        }
        cols.push_back(line.substr(start, tab - start));
        start = tab + 1;
      }
      if (cols.size() < 2) {
        std::cerr << "line " << lineno << ": need source<TAB>target\n";
        ++failures;
        continue;
      }
      std::string id = cols.size() > 2 && !cols[2].empty()
                           ? cols[2]
                           : [&] {
                               char buf[16];
                               std::snprintf(buf, sizeof(buf), "ex%03zu",
                                             count);
                               return std::string(buf);
                             }();
      std::string rationale = cols.size() > 3 ? cols[3] : "";
      try {
        CliffPair pair;
        pair.source = parse_smiles(cols[0]);
        pair.target = parse_smiles(cols[1]);
        SearchBudget b;
        b.max_expansions = budget;
        pair.edits = extract_edits(pair.source, pair.target, b);
        pair.similarity = tanimoto(morgan_fingerprint(pair.source, 2, 2048),
                                   morgan_fingerprint(pair.target, 2, 2048));
        exemplars.push_back(make_exemplar(id, pair, rationale));
        ++count;
      } catch (const std::exception& e) {
        std::cerr << "line " << lineno << " (" << id << "): " << e.what()
                  << "\n";
        ++failures;
      }
    }
    save_exemplars(exemplars, out_file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  std::cerr << "wrote " << exemplars.size() << " exemplar(s) to " << out_file
            << "\n";
  return failures ? kExitData : kExitOk;
}

// ---- retrieve ---------------------------------------------------------------

int run_retrieve(const std::string& kb_file, const std::string& query_smiles,
                 int k) {
  try {
    auto exemplars = load_exemplars(kb_file);
    auto built = build_index(exemplars);
    for (const auto& rej : built.rejected) {
      std::cerr << "rejected " << rej.id << ": " << rej.reason << "\n";
    }
    Molecule q = parse_smiles(query_smiles);
    auto hits = query_top_k(built.index, morgan_fingerprint(q, 2, 2048), k);
    for (const auto& hit : hits) {
      char sim[32];
      std::snprintf(sim, sizeof(sim), "%.6f", hit.similarity);
      std::cout << hit.exemplar.id << "\t" << sim << "\t"
                << hit.exemplar.source_smiles << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify_error(e);
  }
}

// ---- optimize ---------------------------------------------------------------

struct OptimizeArgs {
  std::string input_file;
  std::string kb_file;
  std::string mode = "edits";
  int shots = 5;
  int n = 5;
  std::string constraints_file;
  std::string provider = "mock";
  std::string script_file;
  std::string out_dir = "out";
  bool dump_prompts = false;
  bool allow_fewer_shots = false;
  int jobs = 1;
  std::string endpoint;
  std::string model;
  int max_retries = 3;
  double temperature = 1.0;
  std::string api_key_env = "EDITCRAFT_API_KEY";
  int timeout_ms = 60'000;
};

json candidate_to_json(int run, const CandidateResult& cand) {
  json c;
  c["run"] = run;
  c["status"] = std::string(candidate_status_name(cand.status));
  c["attempts"] = cand.attempts;
  c["reasoning"] = cand.reasoning;
  if (cand.edits) {
    c["edits"] = json::parse(serialize_edits(*cand.edits));
  }
  if (cand.molecule) {
    c["result_smiles"] = plain_smiles(*cand.molecule);
    c["result_smiles_mapped"] = mapped_smiles(*cand.molecule);
  }
  if (!cand.error.empty()) c["error"] = cand.error;
  c["transcript"] = cand.transcript;
  return c;
}

int run_optimize(const OptimizeArgs& args) {
  PromptMode mode;
  if (args.mode == "edits") {
    mode.output_kind = OutputKind::Edits;
  } else if (args.mode == "direct-smiles") {
    mode.output_kind = OutputKind::DirectSmiles;
  } else {
    std::cerr << "error: --mode must be 'edits' or 'direct-smiles'\n";
    return kExitUsage;
  }

  std::string input_raw;
  std::vector<std::pair<std::string, std::string>> inputs;
  ExemplarIndex index;
  std::optional<InteractionProfile> profile;
  try {
    input_raw = read_file(args.input_file);
    inputs = parse_smiles_lines(input_raw);
    if (!args.kb_file.empty()) {
      auto built = build_index(load_exemplars(args.kb_file));
      for (const auto& rej : built.rejected) {
        std::cerr << "rejected exemplar " << rej.id << ": " << rej.reason
                  << "\n";
      }
      index = std::move(built.index);
    }
    if (!args.constraints_file.empty()) {
      profile = load_interaction_profile(args.constraints_file);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }

  if (args.shots > 0 && static_cast<int>(index.size()) < args.shots &&
      !args.allow_fewer_shots) {
    std::cerr << "error: knowledge base has " << index.size()
              << " exemplar(s) but --shots is " << args.shots
              << " (use --allow-fewer-shots to proceed)\n";
    return kExitData;
  }

  std::unique_ptr<Provider> provider;
  bool mock_mode = args.provider == "mock";
  try {
    if (mock_mode) {
      if (args.script_file.empty()) {
        std::cerr << "error: --provider mock needs --script\n";
        return kExitUsage;
      }
      provider = std::make_unique<MockProvider>(
          MockProvider::from_jsonl_file(args.script_file));
    } else if (args.provider == "http") {
      if (args.endpoint.empty()) {
        std::cerr << "error: --provider http needs --endpoint\n";
        return kExitUsage;
      }
      provider = std::make_unique<HttpChatProvider>();
    } else {
      std::cerr << "error: unknown provider '" << args.provider << "'\n";
      return kExitUsage;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }

  ProviderConfig config;
  config.endpoint_url = args.endpoint;
  config.model_name = args.model;
  config.api_key_env_var = args.api_key_env;
  config.temperature = args.temperature;
  config.timeout_ms = args.timeout_ms;
  config.max_retries = args.max_retries;

  fs::create_directories(args.out_dir);
  if (args.dump_prompts) {
    fs::create_directories(fs::path(args.out_dir) / "prompts");
  }

  auto started = std::chrono::steady_clock::now();
  struct PerInput {
    std::string id;
    std::string status;
    std::string path;
  };
  std::vector<PerInput> manifest_rows(inputs.size());
  std::mutex io_mu;

  auto process = [&](std::size_t idx) {
    const auto& [id, smiles] = inputs[idx];
    PerInput row;
    row.id = id;
    Molecule query;
    try {
      query = parse_smiles(smiles);
    } catch (const std::exception& e) {
      row.status = "INPUT_PARSE_FAILED";
      std::lock_guard<std::mutex> lock(io_mu);
      std::cerr << "input " << id << ": " << e.what() << "\n";
      manifest_rows[idx] = row;
      return;
    }

    OptimizeContext context;
    context.mode = mode;
    context.mode.n_shots = std::min<int>(args.shots, index.size());
    if (context.mode.n_shots > 0) {
      auto hits = query_top_k(index, morgan_fingerprint(query, 2, 2048),
                              context.mode.n_shots);
      for (auto& hit : hits) context.shots.push_back(std::move(hit.exemplar));
      context.mode.n_shots = static_cast<int>(context.shots.size());
    }
    if (profile) {
      try {
        auto alignment = align_pose_to_graph(profile->pose, query);
        context.constraints = bind_constraints(*profile, alignment, query);
      } catch (const std::exception& e) {
        row.status = "CONSTRAINT_FAILED";
        std::lock_guard<std::mutex> lock(io_mu);
        std::cerr << "input " << id << ": " << e.what() << "\n";
        manifest_rows[idx] = row;
        return;
      }
    }

    if (args.dump_prompts) {
      PromptBundle bundle = assemble_prompt(query, context.shots,
                                            context.constraints, context.mode);
      std::ostringstream dump;
      dump << "=== SYSTEM ===\n" << bundle.system << "\n=== USER ===\n"
           << bundle.user;
      write_file_atomic(
          (fs::path(args.out_dir) / "prompts" / (id + ".prompt.txt")).string(),
          dump.str());
    }

    auto results =
        optimize_parallel(query, context, *provider, config, args.n);

    json doc;
    doc["input_id"] = id;
    doc["input_smiles"] = mapped_smiles(query);
    doc["mode"] = args.mode;
    doc["shots"] = context.mode.n_shots;
    json cands = json::array();
    int ok = 0;
    for (std::size_t r = 0; r < results.size(); ++r) {
      if (results[r].status == CandidateStatus::Ok) ++ok;
      cands.push_back(candidate_to_json(static_cast<int>(r), results[r]));
    }
    doc["candidates"] = std::move(cands);
    std::string fname = "cand_" + id + ".json";
    write_file_atomic((fs::path(args.out_dir) / fname).string(),
                      doc.dump(2) + "\n");
    row.status = std::to_string(ok) + "/" + std::to_string(args.n) + " ok";
    row.path = fname;
    manifest_rows[idx] = row;
  };

  if (args.jobs <= 1) {
    for (std::size_t i = 0; i < inputs.size(); ++i) process(i);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= inputs.size()) return;
        process(i);
      }
    };
    std::vector<std::thread> pool;
    int nthreads = std::min<std::size_t>(args.jobs, inputs.size());
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - started)
                     .count();

  json manifest;
  manifest["config"] = {
      {"mode", args.mode},         {"shots", args.shots},
      {"n", args.n},               {"provider", args.provider},
      {"max_retries", args.max_retries},
      {"temperature", args.temperature},
      {"kb", args.kb_file},        {"constraints", args.constraints_file},
      {"input", args.input_file},
  };
  manifest["input_digest"] = "fnv1a:" + hex64(fnv1a(input_raw));
  json rows = json::array();
  for (const PerInput& row : manifest_rows) {
    rows.push_back({{"id", row.id},
                    {"status", row.status},
                    {"candidates", row.path}});
  }
  manifest["inputs"] = std::move(rows);
  // Mock runs must be byte-reproducible; wall time is only recorded for
  // live providers.
  manifest["wall_ms"] = mock_mode ? 0 : elapsed;
  write_file_atomic((fs::path(args.out_dir) / "manifest.json").string(),
                    manifest.dump(2) + "\n");
  return kExitOk;
}

// ---- evaluate ---------------------------------------------------------------

int run_evaluate(const std::string& inputs_file,
                 const std::string& candidates_dir, const std::string& oracle,
                 const std::string& thresholds_csv, const std::string& label,
                 const std::string& tsv_out, int oracle_timeout_ms) {
  try {
    auto inputs = read_smiles_file(inputs_file);
    if (inputs.empty()) throw EmptyRecordSet();

    std::unique_ptr<SynthesizabilityOracle> orc;
    if (oracle == "always-true") {
      orc = std::make_unique<AlwaysTrueOracle>();
    } else if (oracle == "always-false") {
      orc = std::make_unique<AlwaysFalseOracle>();
    } else if (oracle.rfind("set:", 0) == 0) {
      orc = std::make_unique<SetMembershipOracle>(
          SetMembershipOracle::from_file(oracle.substr(4)));
    } else if (oracle.rfind("cmd:", 0) == 0) {
      orc = std::make_unique<ExternalCommandOracle>(oracle.substr(4),
                                                    oracle_timeout_ms);
    } else {
      std::cerr << "error: unknown oracle '" << oracle << "'\n";
      return kExitUsage;
    }

    std::vector<double> thresholds;
    {
      std::istringstream in(thresholds_csv);
      std::string item;
      while (std::getline(in, item, ',')) {
        if (!item.empty()) thresholds.push_back(std::stod(item));
      }
    }

    std::vector<EvalRecord> records;
    for (const auto& [id, smiles] : inputs) {
      Molecule input = parse_smiles(smiles);
      std::vector<CandidateResult> cands;
      fs::path path = fs::path(candidates_dir) / ("cand_" + id + ".json");
      if (fs::exists(path)) {
        json doc = json::parse(read_file(path.string()));
        for (const auto& c : doc["candidates"]) {
          CandidateResult cand;
          auto status =
              candidate_status_from_name(c["status"].get<std::string>());
          cand.status = status.value_or(CandidateStatus::ProviderFailed);
          if (cand.status == CandidateStatus::Ok &&
              c.contains("result_smiles")) {
            cand.molecule = parse_smiles(c["result_smiles"].get<std::string>());
          }
          cands.push_back(std::move(cand));
        }
      } else {
        std::cerr << "warning: no candidate file for input " << id << "\n";
      }
      records.push_back(score_candidates(input, id, cands, *orc));
    }

    SuccessTable table = success_table(records, thresholds);
    ReportText report = render_report(table, label);
    std::cout << report.pretty;
    if (!tsv_out.empty()) write_file_atomic(tsv_out, report.tsv);
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify_error(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Molecular edit engine and retrieval-augmented optimization "
               "pipeline"};
  app.require_subcommand(1);

  // canon
  std::vector<std::string> canon_smiles;
  std::string canon_input;
  bool canon_kekulized = false;
  bool canon_no_maps = false;
  auto* canon = app.add_subcommand(
      "canon", "Canonicalize SMILES (stdin, file, or arguments)");
  canon->alias("parse");
  canon->add_option("smiles", canon_smiles, "SMILES strings");
  canon->add_option("-i,--input", canon_input, "newline-delimited SMILES file");
  canon->add_flag("--kekulized", canon_kekulized, "kekulized output");
  canon->add_flag("--no-maps", canon_no_maps, "omit atom map numbers");

  // apply-edits
  std::string apply_mol, apply_edits_file;
  bool apply_non_strict = false;
  bool apply_allow_fragments = false;
  auto* apply = app.add_subcommand("apply-edits",
                                   "Apply an edit-sequence JSON to a molecule");
  apply->add_option("--mol", apply_mol, "source SMILES")->required();
  apply->add_option("--edits", apply_edits_file, "edit JSON file")->required();
  apply->add_flag("--non-strict", apply_non_strict,
                  "tolerate missing STOP / trailing commands");
  apply->add_flag("--allow-fragments", apply_allow_fragments,
                  "permit multi-fragment results");

  // extract-edits
  std::string ex_src, ex_tgt;
  long ex_budget = SearchBudget{}.max_expansions;
  auto* extract = app.add_subcommand(
      "extract-edits", "Derive the edit sequence between two molecules");
  extract->add_option("--src", ex_src, "source SMILES")->required();
  extract->add_option("--tgt", ex_tgt, "target SMILES")->required();
  extract->add_option("--budget", ex_budget, "search node budget");

  // build-kb
  std::string kb_pairs, kb_out;
  long kb_budget = SearchBudget{}.max_expansions;
  auto* buildkb = app.add_subcommand(
      "build-kb", "Build an exemplar knowledge base from a pair TSV");
  buildkb->add_option("--pairs", kb_pairs,
                      "TSV: source<TAB>target[<TAB>id[<TAB>rationale]]")
      ->required();
  buildkb->add_option("--out", kb_out, "output JSONL")->required();
  buildkb->add_option("--budget", kb_budget, "search node budget");

  // retrieve
  std::string rt_kb, rt_query;
  int rt_k = 5;
  auto* retrieve =
      app.add_subcommand("retrieve", "Top-k similar exemplars for a query");
  retrieve->add_option("--kb", rt_kb, "exemplar JSONL")->required();
  retrieve->add_option("--query", rt_query, "query SMILES")->required();
  retrieve->add_option("-k", rt_k, "number of hits");

  // optimize
  OptimizeArgs oa;
  auto* optimize = app.add_subcommand(
      "optimize", "Run the retrieval-augmented optimization loop");
  optimize->add_option("--input", oa.input_file, "input SMILES file")
      ->required();
  optimize->add_option("--kb", oa.kb_file, "exemplar JSONL");
  optimize->add_option("--mode", oa.mode, "edits | direct-smiles");
  optimize->add_option("--shots", oa.shots, "few-shot count");
  optimize->add_option("--n", oa.n, "parallel candidates per input");
  optimize->add_option("--constraints", oa.constraints_file,
                       "interaction profile (.iprof.json)");
  optimize->add_option("--provider", oa.provider, "mock | http");
  optimize->add_option("--script", oa.script_file, "mock response JSONL");
  optimize->add_option("--out", oa.out_dir, "output directory");
  optimize->add_flag("--dump-prompts", oa.dump_prompts,
                     "write every prompt bundle for audit");
  optimize->add_flag("--allow-fewer-shots", oa.allow_fewer_shots,
                     "shrink --shots to the knowledge-base size");
  optimize->add_option("--jobs", oa.jobs, "parallel inputs");
  optimize->add_option("--endpoint", oa.endpoint, "chat-completions base URL");
  optimize->add_option("--model", oa.model, "model name");
  optimize->add_option("--max-retries", oa.max_retries,
                       "retries for malformed outputs");
  optimize->add_option("--temperature", oa.temperature, "sampling temperature");
  optimize->add_option("--api-key-env", oa.api_key_env,
                       "environment variable holding the API key");
  optimize->add_option("--timeout-ms", oa.timeout_ms, "request timeout");

  // evaluate
  std::string ev_inputs, ev_dir, ev_oracle;
  std::string ev_thresholds = "0.5,0.6,0.7,0.8,0.9";
  std::string ev_label = "run";
  std::string ev_tsv;
  int ev_timeout = 30 * 60 * 1000;
  auto* evaluate = app.add_subcommand(
      "evaluate", "Score candidate outputs against an oracle");
  evaluate->add_option("--inputs", ev_inputs, "input SMILES file")->required();
  evaluate->add_option("--candidates", ev_dir, "candidate directory")
      ->required();
  evaluate
      ->add_option("--oracle", ev_oracle,
                   "set:<file> | always-true | always-false | cmd:<exe>")
      ->required();
  evaluate->add_option("--thresholds", ev_thresholds,
                       "comma-separated similarity thresholds");
  evaluate->add_option("--label", ev_label, "configuration label");
  evaluate->add_option("--tsv", ev_tsv, "write machine-readable TSV here");
  evaluate->add_option("--oracle-timeout-ms", ev_timeout,
                       "external oracle timeout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (canon->parsed()) {
    return run_canon(canon_smiles, canon_input, canon_kekulized,
                     canon_no_maps);
  }
  if (apply->parsed()) {
    return run_apply(apply_mol, apply_edits_file, apply_non_strict,
                     apply_allow_fragments);
  }
  if (extract->parsed()) return run_extract(ex_src, ex_tgt, ex_budget);
  if (buildkb->parsed()) return run_build_kb(kb_pairs, kb_out, kb_budget);
  if (retrieve->parsed()) return run_retrieve(rt_kb, rt_query, rt_k);
  if (optimize->parsed()) return run_optimize(oa);
  if (evaluate->parsed()) {
    return run_evaluate(ev_inputs, ev_dir, ev_oracle, ev_thresholds, ev_label,
                        ev_tsv, ev_timeout);
  }
  return kExitUsage;
}
