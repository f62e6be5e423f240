// Python bindings. Structured values cross the boundary as plain dicts/lists
// in the same JSON shapes the REST API uses.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "kgqa/config.h"
#include "kgqa/embeddings.h"
#include "kgqa/execution.h"
#include "kgqa/fixture_endpoint.h"
#include "kgqa/json_io.h"
#include "kgqa/linker.h"
#include "kgqa/pipeline.h"
#include "kgqa/planner.h"
#include "kgqa/question_understanding.h"
#include "kgqa/sparql_client.h"

namespace py = pybind11;
using nlohmann::json;

namespace {

py::object to_py(const json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

json from_py(const py::handle& obj) {
  return json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

std::vector<kgqa::PhraseTriplePattern> patterns_from(const py::handle& obj) {
  std::vector<kgqa::PhraseTriplePattern> out;
  for (const auto& p : from_py(obj)) out.push_back(kgqa::json_io::pattern_from_json(p));
  return out;
}

py::list patterns_to(const std::vector<kgqa::PhraseTriplePattern>& patterns) {
  py::list out;
  for (const auto& p : patterns) out.append(to_py(kgqa::json_io::to_json(p)));
  return out;
}

std::vector<kgqa::RawAnswer> raw_answers_from(const py::handle& obj) {
  std::vector<kgqa::RawAnswer> out;
  for (const auto& j : from_py(obj)) {
    kgqa::RawAnswer a;
    a.term = kgqa::json_io::rdf_term_from_json(j.at("term"));
    if (j.contains("class_types")) a.class_types = j["class_types"].get<std::vector<std::string>>();
    a.source_rank = j.value("source_rank", std::size_t{1});
    out.push_back(std::move(a));
  }
  return out;
}

kgqa::PipelineConfig config_from(const py::dict& settings) {
  kgqa::PipelineConfig cfg;
  kgqa::apply_overrides(cfg, from_py(settings));
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_kgqa, m) {
  m.doc() = "On-demand question answering over SPARQL endpoints";

  // KgqaError(code, message); the exception type lives as long as the module.
  static PyObject* kgqa_error = PyErr_NewException("kgqa.KgqaError", PyExc_RuntimeError, nullptr);
  m.add_object("KgqaError", py::handle(kgqa_error));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const kgqa::Error& e) {
      py::tuple args = py::make_tuple(std::string(kgqa::to_string(e.code())), std::string(e.what()));
      PyErr_SetObject(kgqa_error, args.ptr());
    }
  });

  // Question understanding.
  m.def("encode_patterns", [](const py::list& patterns) {
    return kgqa::encode_patterns(patterns_from(patterns));
  });
  m.def("parse_model_output", [](const std::string& text) {
    return patterns_to(kgqa::parse_model_output(text));
  });
  m.def("extract_patterns", [](const std::string& question) {
    return patterns_to(kgqa::extract_offline(question));
  });
  m.def("predict_data_type", [](const std::string& question) {
    return std::string(kgqa::to_string(kgqa::predict_data_type(question)));
  });
  m.def("predict_semantic_type", [](const std::string& question) {
    return kgqa::predict_semantic_type(question);
  });

  // Graph model and planning.
  m.def(
      "build_pgp",
      [](const py::list& patterns, bool boolean_question) {
        return to_py(kgqa::json_io::to_json(kgqa::build_pgp(patterns_from(patterns), boolean_question)));
      },
      py::arg("patterns"), py::arg("boolean_question") = false);
  m.def("classify_shape", [](const py::dict& pgp) {
    return std::string(kgqa::to_string(kgqa::classify_shape(kgqa::json_io::pgp_from_json(from_py(pgp)))));
  });
  m.def("enumerate_bgps", [](const py::dict& agp) {
    py::list out;
    for (const auto& b : kgqa::enumerate_bgps(kgqa::json_io::pgp_from_json(from_py(agp)))) {
      out.append(to_py(kgqa::json_io::to_json(b)));
    }
    return out;
  });
  m.def("score_bgp", [](const py::dict& bgp, const py::dict& agp) {
    return kgqa::score_bgp(kgqa::json_io::bgp_from_json(from_py(bgp)),
                           kgqa::json_io::pgp_from_json(from_py(agp)));
  });
  m.def(
      "plan",
      [](const py::dict& agp, const py::dict& prediction, std::size_t k) {
        py::list out;
        auto plans = kgqa::plan(kgqa::json_io::pgp_from_json(from_py(agp)),
                                kgqa::json_io::prediction_from_json(from_py(prediction)), k);
        for (const auto& p : plans) out.append(to_py(kgqa::json_io::to_json(p)));
        return out;
      },
      py::arg("agp"), py::arg("prediction"), py::arg("k") = kgqa::kDefaultMaxQueries);

  // Linking helpers.
  m.def("render_contains",
        [](const std::string& dialect, const std::string& var, const std::vector<std::string>& keywords) {
          return kgqa::render_contains(kgqa::parse_dialect(dialect), var, keywords);
        });
  m.def("is_human_readable", [](const std::string& iri) { return kgqa::is_human_readable(iri); });

  // Affinity.
  m.def(
      "char_embed",
      [](const std::string& token, std::size_t dimension) { return kgqa::char_embed(token, dimension); },
      py::arg("token"), py::arg("dimension") = kgqa::EmbeddingStore::kDefaultDimension);

  py::class_<kgqa::EmbeddingStore, std::shared_ptr<kgqa::EmbeddingStore>>(m, "EmbeddingStore")
      .def(py::init<std::size_t>(), py::arg("dimension") = kgqa::EmbeddingStore::kDefaultDimension)
      .def_static("load", [](const std::filesystem::path& path) {
        return std::make_shared<kgqa::EmbeddingStore>(kgqa::EmbeddingStore::load(path));
      })
      .def("add", &kgqa::EmbeddingStore::add)
      .def("__contains__", [](const kgqa::EmbeddingStore& s, const std::string& t) { return s.find(t) != nullptr; })
      .def("__len__", &kgqa::EmbeddingStore::size)
      .def_property_readonly("dimension", &kgqa::EmbeddingStore::dimension)
      .def("affinity", [](const kgqa::EmbeddingStore& s, const std::string& x, const std::string& y) {
        return kgqa::affinity(x, y, s);
      })
      .def("embed_label", [](const kgqa::EmbeddingStore& s, const std::string& label) {
        py::list out;
        for (const auto& e : kgqa::embed_label(label, s)) {
          py::dict d;
          d["token"] = e.token;
          d["vector"] = e.vector;
          d["source"] = e.source == kgqa::EmbeddingSource::kWord ? "word" : "char";
          out.append(d);
        }
        return out;
      });

  // Filtering and metrics.
  m.def(
      "filter_answers",
      [](const py::list& raw, const py::dict& prediction, const kgqa::EmbeddingStore& store, double tau) {
        auto answers = raw_answers_from(raw);
        kgqa::AnswerSet set = kgqa::filter_answers(
            answers, kgqa::json_io::prediction_from_json(from_py(prediction)), store, tau);
        json kept = json::array(), dropped = json::array();
        for (const auto& a : set.answers) kept.push_back(kgqa::json_io::to_json(a));
        for (const auto& d : set.dropped) dropped.push_back(kgqa::json_io::to_json(d));
        return to_py({{"answers", kept}, {"dropped", dropped}});
      },
      py::arg("raw"), py::arg("prediction"), py::arg("store"), py::arg("tau") = kgqa::kDefaultTau);
  m.def("evaluate", [](const std::set<std::string>& predicted, const std::set<std::string>& gold) {
    kgqa::Prf p = kgqa::evaluate(predicted, gold);
    return py::make_tuple(p.precision, p.recall, p.f1);
  });

  // End to end.
  py::class_<kgqa::Pipeline, std::shared_ptr<kgqa::Pipeline>>(m, "Pipeline")
      .def(py::init([](const py::dict& settings) {
             return std::make_shared<kgqa::Pipeline>(config_from(settings));
           }),
           py::arg("settings") = py::dict())
      .def("answer",
           [](const kgqa::Pipeline& p, const std::string& question) {
             kgqa::PipelineResult r;
             {
               py::gil_scoped_release release;
               r = p.answer(question);
             }
             return to_py(kgqa::to_json(r));
           })
      .def("run_benchmark",
           [](const kgqa::Pipeline& p, const std::string& text) {
             kgqa::BenchmarkReport r;
             {
               py::gil_scoped_release release;
               r = p.run_benchmark_text(text);
             }
             return to_py(kgqa::to_json(r));
           })
      .def_property_readonly("config", [](const kgqa::Pipeline& p) {
        return to_py(kgqa::config_to_json(p.config()));
      });

  py::class_<kgqa::FixtureEndpoint, std::shared_ptr<kgqa::FixtureEndpoint>>(m, "FixtureEndpoint")
      .def(py::init([](const std::vector<std::filesystem::path>& paths, bool bif_contains) {
             kgqa::FixtureOptions options;
             options.bif_contains = bif_contains;
             return kgqa::FixtureEndpoint::load(paths, options);
           }),
           py::arg("paths"), py::arg("bif_contains") = true)
      .def("query", [](kgqa::FixtureEndpoint& e, const std::string& query) {
        kgqa::HttpReply reply = e.handle(query);
        if (reply.status != 200) throw kgqa::EndpointError(reply.status, reply.body);
        return to_py(json::parse(reply.body));
      })
      .def("__len__", [](const kgqa::FixtureEndpoint& e) { return e.store().size(); });
}
