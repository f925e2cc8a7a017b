#include "editcraft/evalharness.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "editcraft/fingerprint.hpp"
#include "editcraft/ioutil.hpp"
#include "editcraft/smiles.hpp"

namespace editcraft {

namespace {

std::string canonical_key(const Molecule& mol) {
  SmilesOptions opts;
  opts.canonical = true;
  opts.include_atom_maps = false;
  return write_smiles(mol, opts);
}

}  // namespace

SetMembershipOracle::SetMembershipOracle(
    const std::vector<std::string>& smiles_list) {
  for (const std::string& s : smiles_list) {
    members_.insert(canonical_key(parse_smiles(s)));
  }
}

SetMembershipOracle SetMembershipOracle::from_file(const std::string& path) {
  std::vector<std::string> list;
  for (const auto& [id, smiles] : read_smiles_file(path)) {
    (void)id;
    list.push_back(smiles);
  }
  return SetMembershipOracle(list);
}

bool SetMembershipOracle::is_synthesizable(const Molecule& mol) {
  return members_.count(canonical_key(mol)) > 0;
}

ExternalCommandOracle::ExternalCommandOracle(std::string command,
                                             int timeout_ms)
    : command_(std::move(command)), timeout_ms_(timeout_ms) {}

bool ExternalCommandOracle::is_synthesizable(const Molecule& mol) {
  std::string input = canonical_key(mol) + "\n";

  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
    throw IoError("cannot create pipes for oracle command");
  }
  pid_t pid = fork();
  if (pid < 0) throw IoError("fork failed for oracle command");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), (char*)nullptr);
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);

  ssize_t written = write(in_pipe[1], input.data(), input.size());
  (void)written;
  close(in_pipe[1]);

  std::string output;
  char buf[256];
  int waited = 0;
  bool timed_out = false;
  for (;;) {
    struct pollfd pfd = {out_pipe[0], POLLIN, 0};
    int step = 50;
    int rv = poll(&pfd, 1, step);
    if (rv > 0) {
      ssize_t got = read(out_pipe[0], buf, sizeof(buf));
      if (got <= 0) break;
      output.append(buf, static_cast<std::size_t>(got));
    } else {
      waited += step;
      if (waited >= timeout_ms_) {
        timed_out = true;
        break;
      }
    }
  }
  close(out_pipe[0]);
  if (timed_out) {
    kill(pid, SIGKILL);
  }
  int status = 0;
  waitpid(pid, &status, 0);
  if (timed_out) return false;

  for (char c : output) {
    if (c == '1') return true;
    if (c == '0') return false;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return false;
}

EvalRecord score_candidates(const Molecule& input, const std::string& input_id,
                            const std::vector<CandidateResult>& candidates,
                            SynthesizabilityOracle& oracle) {
  EvalRecord record;
  record.input_id = input_id;
  Fingerprint input_fp = morgan_fingerprint(input, 2, 4096);
  for (const CandidateResult& cand : candidates) {
    if (cand.status != CandidateStatus::Ok || !cand.molecule) continue;
    if (!oracle.is_synthesizable(*cand.molecule)) continue;
    double sim =
        tanimoto(input_fp, morgan_fingerprint(*cand.molecule, 2, 4096));
    if (!record.solved || sim > *record.best_similarity) {
      record.best_similarity = sim;
    }
    record.solved = true;
  }
  return record;
}

SuccessTable success_table(const std::vector<EvalRecord>& records,
                           const std::vector<double>& thresholds) {
  if (records.empty()) throw EmptyRecordSet();
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (thresholds[i] <= 0.0 || thresholds[i] >= 1.0) {
      throw BadParameter("thresholds must lie strictly inside (0,1)");
    }
    if (i > 0 && thresholds[i] <= thresholds[i - 1]) {
      throw BadParameter("thresholds must be strictly increasing");
    }
  }

  SuccessTable table;
  table.thresholds = thresholds;
  table.n = records.size();
  std::size_t solved = 0;
  for (const EvalRecord& r : records) {
    if (r.solved) ++solved;
  }
  table.total_solved = static_cast<double>(solved) / records.size();
  for (double t : thresholds) {
    std::size_t count = 0;
    for (const EvalRecord& r : records) {
      if (r.solved && r.best_similarity && *r.best_similarity > t) ++count;
    }
    table.rates.push_back(static_cast<double>(count) / records.size());
  }
  return table;
}

namespace {

std::string pct(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", rate * 100.0);
  return buf;
}

std::string full(double rate) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", rate);
  return buf;
}

}  // namespace

ReportText render_report(const SuccessTable& table, const std::string& label) {
  std::vector<std::string> headers = {"Configuration", "Total Solved"};
  for (double t : table.thresholds) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "Sim>%.1f", t);
    headers.push_back(buf);
  }
  std::vector<std::string> row = {label, pct(table.total_solved)};
  for (double r : table.rates) row.push_back(pct(r));

  std::vector<std::size_t> widths(headers.size());
  for (std::size_t i = 0; i < headers.size(); ++i) {
    widths[i] = std::max(headers[i].size(), row[i].size());
  }
  std::ostringstream pretty;
  for (std::size_t i = 0; i < headers.size(); ++i) {
    if (i) pretty << "  ";
    pretty << headers[i]
           << std::string(widths[i] - headers[i].size(), ' ');
  }
  pretty << "\n";
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) pretty << "  ";
    pretty << row[i] << std::string(widths[i] - row[i].size(), ' ');
  }
  pretty << "\n";

  std::ostringstream tsv;
  tsv << "configuration\tn\ttotal_solved";
  for (double t : table.thresholds) tsv << "\t" << full(t);
  tsv << "\n" << label << "\t" << table.n << "\t" << full(table.total_solved);
  for (double r : table.rates) tsv << "\t" << full(r);
  tsv << "\n";

  return {pretty.str(), tsv.str()};
}

ParsedReport parse_report_tsv(const std::string& tsv) {
  std::istringstream in(tsv);
  std::string header;
  std::string row;
  if (!std::getline(in, header) || !std::getline(in, row)) {
    throw SchemaError("report TSV needs a header and a data row", 1, "");
  }
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        out.push_back(line.substr(start));
        break;
      }
      out.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    return out;
  };
  auto hcols = split(header);
  auto rcols = split(row);
  if (hcols.size() != rcols.size() || hcols.size() < 3) {
    throw SchemaError("report TSV is ragged", 2, "");
  }
  ParsedReport out;
  out.label = rcols[0];
  out.table.n = static_cast<std::size_t>(std::stoull(rcols[1]));
  out.table.total_solved = std::stod(rcols[2]);
  for (std::size_t i = 3; i < hcols.size(); ++i) {
    out.table.thresholds.push_back(std::stod(hcols[i]));
    out.table.rates.push_back(std::stod(rcols[i]));
  }
  return out;
}

}  // namespace editcraft
