#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "editcraft/constraints.hpp"
#include "editcraft/editextract.hpp"
#include "editcraft/evalharness.hpp"
#include "editcraft/fingerprint.hpp"
#include "editcraft/llmclient.hpp"
#include "editcraft/prompting.hpp"
#include "editcraft/retrieval.hpp"
#include "editcraft/smiles.hpp"

namespace py = pybind11;
using namespace editcraft;

namespace {

SmilesOptions make_opts(bool maps, bool kekulized, bool canonical) {
  SmilesOptions o;
  o.include_atom_maps = maps;
  o.kekulized_output = kekulized;
  o.canonical = canonical;
  return o;
}

PromptMode make_mode(const std::string& kind, int shots) {
  PromptMode mode;
  if (kind == "edits") {
    mode.output_kind = OutputKind::Edits;
  } else if (kind == "direct-smiles") {
    mode.output_kind = OutputKind::DirectSmiles;
  } else {
    throw BadParameter("mode must be 'edits' or 'direct-smiles'");
  }
  mode.n_shots = shots;
  return mode;
}

py::dict candidate_dict(const CandidateResult& cand) {
  py::dict d;
  d["status"] = std::string(candidate_status_name(cand.status));
  d["attempts"] = cand.attempts;
  d["reasoning"] = cand.reasoning;
  if (cand.edits) d["edits"] = serialize_edits(*cand.edits);
  if (cand.molecule) {
    d["smiles"] = write_smiles(*cand.molecule, make_opts(false, false, true));
  }
  if (!cand.error.empty()) d["error"] = cand.error;
  return d;
}

}  // namespace

PYBIND11_MODULE(editcraft, m) {
  m.doc() = "Molecular edit engine: SMILES, edit sequences, fingerprints, "
            "retrieval and the optimization loop";

  py::register_exception<Error>(m, "EditcraftError");

  py::class_<Molecule>(m, "Molecule")
      .def(py::init<>())
      .def_property_readonly("num_atoms", &Molecule::atom_count)
      .def_property_readonly("num_bonds", &Molecule::bond_count)
      .def_property_readonly("sanitized", &Molecule::sanitized)
      .def("map_numbers",
           [](const Molecule& mol) {
             std::vector<int> out;
             for (const Atom& a : mol.atoms()) out.push_back(a.map_num);
             return out;
           })
      .def(
          "smiles",
          [](const Molecule& mol, bool maps, bool kekulized, bool canonical) {
            return write_smiles(mol, make_opts(maps, kekulized, canonical));
          },
          py::arg("maps") = false, py::arg("kekulized") = false,
          py::arg("canonical") = true)
      .def("__repr__", [](const Molecule& mol) {
        return "<Molecule " +
               write_smiles(mol, make_opts(true, false, true)) + ">";
      });

  m.def("parse_smiles", [](const std::string& text) {
    return parse_smiles(text);
  });
  m.def("is_isomorphic", &is_isomorphic);
  m.def("canonical_rank", &canonical_rank);
  m.def("implicit_h_count", &implicit_h_count);

  py::class_<EditSequence>(m, "EditSequence")
      .def(py::init<>())
      .def("__len__",
           [](const EditSequence& s) { return s.commands.size(); })
      .def_property_readonly("edit_count", &EditSequence::edit_count)
      .def("to_json", &serialize_edits)
      .def("__repr__", [](const EditSequence& s) {
        return "<EditSequence " + serialize_edits(s) + ">";
      });

  m.def(
      "parse_edit_json",
      [](const std::string& text, bool strict) {
        return parse_edit_json(text, strict);
      },
      py::arg("text"), py::arg("strict") = true);
  m.def(
      "apply_edits",
      [](const Molecule& mol, const EditSequence& seq, bool strict_stop,
         bool require_connected) {
        ApplyPolicy policy;
        policy.strict_stop = strict_stop;
        policy.require_connected_result = require_connected;
        return apply_edits(mol, seq, policy);
      },
      py::arg("mol"), py::arg("edits"), py::arg("strict_stop") = true,
      py::arg("require_connected") = true);
  m.def(
      "extract_edits",
      [](const Molecule& src, const Molecule& tgt, long budget) {
        SearchBudget b;
        b.max_expansions = budget;
        return extract_edits(src, tgt, b);
      },
      py::arg("src"), py::arg("tgt"),
      py::arg("budget") = SearchBudget{}.max_expansions);
  m.def(
      "max_common_substructure",
      [](const Molecule& src, const Molecule& tgt, long budget) {
        SearchBudget b;
        b.max_expansions = budget;
        AtomMapping mm = max_common_substructure(src, tgt, b);
        return py::make_tuple(mm.pairs, mm.score, mm.optimal);
      },
      py::arg("src"), py::arg("tgt"),
      py::arg("budget") = SearchBudget{}.max_expansions);

  py::class_<Fingerprint>(m, "Fingerprint")
      .def_property_readonly("length",
                             [](const Fingerprint& fp) { return fp.length; })
      .def_property_readonly("radius",
                             [](const Fingerprint& fp) { return fp.radius; })
      .def("popcount", &Fingerprint::popcount)
      .def("to_hex", &Fingerprint::to_hex)
      .def_static("from_hex", &Fingerprint::from_hex, py::arg("hex"),
                  py::arg("radius") = 2)
      .def("__eq__", [](const Fingerprint& a, const Fingerprint& b) {
        return a == b;
      });

  m.def("morgan_fingerprint", &morgan_fingerprint, py::arg("mol"),
        py::arg("radius") = 2, py::arg("nbits") = 2048);
  m.def("tanimoto", &tanimoto);

  m.def("load_exemplars_info", [](const std::string& path) {
    py::list out;
    for (const Exemplar& ex : load_exemplars(path)) {
      py::dict d;
      d["id"] = ex.id;
      d["source_smiles"] = ex.source_smiles;
      d["target_smiles"] = ex.target_smiles;
      d["edits"] = serialize_edits(ex.edits);
      d["rationale"] = ex.rationale;
      out.append(d);
    }
    return out;
  });
  m.def(
      "retrieve_top_k",
      [](const std::string& kb_path, const std::string& query_smiles, int k) {
        auto built = build_index(load_exemplars(kb_path));
        Molecule q = parse_smiles(query_smiles);
        auto hits = query_top_k(built.index, morgan_fingerprint(q, 2, 2048), k);
        py::list out;
        for (const auto& hit : hits) {
          out.append(py::make_tuple(hit.exemplar.id, hit.similarity,
                                    hit.exemplar.source_smiles));
        }
        return out;
      },
      py::arg("kb_path"), py::arg("query_smiles"), py::arg("k") = 5);

  m.def(
      "render_system_prompt",
      [](const std::string& mode, int shots) {
        return render_system_prompt(make_mode(mode, shots));
      },
      py::arg("mode") = "edits", py::arg("shots") = 5);
  m.def(
      "parse_model_response",
      [](const std::string& text, const std::string& mode) {
        ModelResponse r = parse_model_response(text, make_mode(mode, 0));
        py::dict d;
        d["reasoning"] = r.reasoning;
        if (make_mode(mode, 0).output_kind == OutputKind::Edits) {
          d["edits"] = serialize_edits(r.edits);
        } else {
          d["smiles"] = write_smiles(r.molecule, make_opts(false, false, true));
        }
        return d;
      },
      py::arg("text"), py::arg("mode") = "edits");

  m.def(
      "optimize_with_mock",
      [](const std::string& query_smiles, const std::string& kb_path,
         const std::string& mode, int shots, int n,
         const std::vector<std::string>& responses, int max_retries) {
        Molecule query = parse_smiles(query_smiles);
        OptimizeContext context;
        context.mode = make_mode(mode, shots);
        if (shots > 0) {
          auto built = build_index(load_exemplars(kb_path));
          auto hits =
              query_top_k(built.index, morgan_fingerprint(query, 2, 2048),
                          shots);
          for (auto& hit : hits) {
            context.shots.push_back(std::move(hit.exemplar));
          }
          context.mode.n_shots = static_cast<int>(context.shots.size());
        }
        MockProvider provider{responses};
        ProviderConfig config;
        config.max_retries = max_retries;
        auto results = optimize_parallel(query, context, provider, config, n);
        py::list out;
        for (const auto& cand : results) out.append(candidate_dict(cand));
        return out;
      },
      py::arg("query_smiles"), py::arg("kb_path") = std::string(),
      py::arg("mode") = "edits", py::arg("shots") = 0, py::arg("n") = 1,
      py::arg("responses") = std::vector<std::string>{},
      py::arg("max_retries") = 3);

  m.def(
      "success_table",
      [](const std::vector<std::pair<bool, double>>& records,
         const std::vector<double>& thresholds) {
        std::vector<EvalRecord> rs;
        for (std::size_t i = 0; i < records.size(); ++i) {
          EvalRecord r;
          r.input_id = std::to_string(i);
          r.solved = records[i].first;
          if (r.solved) r.best_similarity = records[i].second;
          rs.push_back(r);
        }
        SuccessTable t = success_table(rs, thresholds);
        py::dict d;
        d["thresholds"] = t.thresholds;
        d["rates"] = t.rates;
        d["total_solved"] = t.total_solved;
        d["n"] = t.n;
        return d;
      },
      py::arg("records"), py::arg("thresholds") = kDefaultThresholds);

  m.def("bind_constraint_block",
        [](const std::string& profile_json, const std::string& smiles) {
          InteractionProfile profile = parse_interaction_profile(profile_json);
          Molecule mol = parse_smiles(smiles);
          auto alignment = align_pose_to_graph(profile.pose, mol);
          auto constraints = bind_constraints(profile, alignment, mol);
          return render_constraint_block(constraints, mol);
        });
}
