#include "debiaskit/embedding.hpp"
#include "debiaskit/error.hpp"
#include "debiaskit/job.hpp"
#include "debiaskit/metrics.hpp"
#include "debiaskit/serialize.hpp"
#include "debiaskit/comparison.hpp"
#include "debiaskit/view.hpp"
#include "debiaskit/wordlists.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace debiaskit;

PYBIND11_MODULE(_debiaskit, m) {
  m.doc() = "Concept-subspace debiasing for word embeddings (native core)";

  // Raised as DebiasError(message, kind, missing_tokens).
  static py::exception<Error> error_type(m, "DebiasError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const UnknownTokenError& e) {
      PyErr_SetObject(error_type.ptr(), py::make_tuple(e.what(), to_string(e.kind()), e.missing()).ptr());
    } catch (const Error& e) {
      PyErr_SetObject(error_type.ptr(),
                      py::make_tuple(e.what(), to_string(e.kind()), std::vector<std::string>{}).ptr());
    }
  });

  py::class_<EmbeddingSnapshot>(m, "Embedding")
      .def(py::init<std::vector<std::string>, Matrix>(), py::arg("tokens"), py::arg("matrix"))
      .def_property_readonly("tokens", &EmbeddingSnapshot::tokens)
      .def_property_readonly("matrix", [](const EmbeddingSnapshot& s) { return Matrix(s.matrix()); })
      .def_property_readonly("id", &EmbeddingSnapshot::id)
      .def_property_readonly("dim", &EmbeddingSnapshot::dim)
      .def("__len__", &EmbeddingSnapshot::size)
      .def("__contains__", [](const EmbeddingSnapshot& s, const std::string& t) { return s.contains(t); })
      .def("vector", [](const EmbeddingSnapshot& s, const std::string& t) { return Vector(s.vector(t)); },
           py::arg("token"));

  m.def(
      "load_embedding",
      [](const std::string& path, const std::string& format, std::optional<std::size_t> limit) {
        return load_embedding_file(path, parse_format(format), limit);
      },
      py::arg("path"), py::arg("format") = "glove_text", py::arg("limit") = py::none());
  m.def(
      "parse_embedding",
      [](const std::string& text, const std::string& format) { return load_embedding_string(text, parse_format(format)); },
      py::arg("text"), py::arg("format") = "glove_text");
  m.def(
      "export_embedding",
      [](const EmbeddingSnapshot& s, const std::string& format, int digits) {
        return export_embedding_string(s, parse_format(format), {digits});
      },
      py::arg("embedding"), py::arg("format") = "glove_text", py::arg("digits") = 0);

  m.def(
      "run_job_json",
      [](const EmbeddingSnapshot& s, const std::string& job_json) {
        const DebiasJob job = job_from_json(Json::parse(job_json));
        TraceResult result = [&] {
          py::gil_scoped_release release;
          return build_trace(s, job);
        }();
        return py::make_tuple(result.job.transform.output, job_result_json(result).dump());
      },
      py::arg("embedding"), py::arg("job_json"));
  m.def(
      "identify_json",
      [](const EmbeddingSnapshot& s, const std::string& job_json, std::size_t k) {
        const ConceptDirection dir = identify_direction(s, job_from_json(Json::parse(job_json)));
        return direction_summary(s, dir, k).dump();
      },
      py::arg("embedding"), py::arg("job_json"), py::arg("k") = 10);
  m.def(
      "evaluate_json",
      [](const EmbeddingSnapshot& s, const std::string& sets_json) {
        return to_json(evaluate_metrics(s, metric_sets_from_json(Json::parse(sets_json)))).dump();
      },
      py::arg("embedding"), py::arg("sets_json"));

  m.def(
      "weat_effect_size", [](const Matrix& x, const Matrix& y, const Matrix& a, const Matrix& b) {
        return weat_effect_size(x, y, a, b).effect_size;
      },
      py::arg("x"), py::arg("y"), py::arg("a"), py::arg("b"));
  m.def(
      "ect_score", [](const Matrix& x, const Matrix& y, const Matrix& attrs) { return ect_score(x, y, attrs).score; },
      py::arg("x"), py::arg("y"), py::arg("attributes"));

  m.def(
      "nearest_neighbors",
      [](const EmbeddingSnapshot& s, const std::string& token, std::size_t k) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& n : nearest_neighbors(s, token, k)) out.emplace_back(n.token, n.similarity);
        return out;
      },
      py::arg("embedding"), py::arg("token"), py::arg("k") = 10);

  m.def(
      "compare_subspaces",
      [](const EmbeddingSnapshot& s, const std::vector<std::string>& names_f, const std::vector<std::string>& names_m) {
        const auto rows = compare_subspaces(s, default_comparison_sets(WordSet::make("Female names", names_f),
                                                                       WordSet::make("Male names", names_m)));
        std::vector<std::tuple<std::string, double, double>> out;
        for (const auto& r : rows) out.emplace_back(r.method, r.ect, r.weat);
        return out;
      },
      py::arg("embedding"), py::arg("names_f"), py::arg("names_m"));

  m.def("bundled_word_list", [](const std::string& name) { return bundled_word_set(name).tokens; }, py::arg("name"));
  m.def("data_dir", &data_dir);
}
