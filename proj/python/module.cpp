// Python bindings. Documents cross the boundary as JSON text; duetui/__init__.py
// decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "duet/schema/codec.hpp"
#include "duet/schema/validate.hpp"
#include "duet/service/http.hpp"
#include "duet/service/replay.hpp"

namespace py = pybind11;

namespace {

// Python-side exception carrying the engine's error code name.
PyObject* g_duet_error = nullptr;

std::string validate_text(const std::string& schema, const std::string& text) {
  const auto doc = duet::Json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw duet::Error(duet::ErrorCode::malformed_document, "not JSON");
  return duet::canonical_dump(duet::validate(std::string_view(schema), doc).to_json());
}

py::tuple replay_text(const std::string& trace, const std::string& fixtures, const std::string& catalog) {
  duet::ReplayReport report;
  {
    py::gil_scoped_release release;
    report = duet::replay_files(trace, fixtures, catalog);
  }
  return py::make_tuple(report.passed, report.bytes(), duet::canonical_dump(report.final_state));
}

class PyService {
 public:
  explicit PyService(const duet::ServiceConfig& config) : service_(duet::make_service(config)) {}

  py::tuple handle(const std::string& method, const std::string& path,
                   const std::map<std::string, std::string>& query, const std::string& body) {
    duet::ApiResponse response;
    {
      py::gil_scoped_release release;
      response = service_->handle(method, path, query, body);
    }
    return py::make_tuple(response.status, response.body.dump());
  }

  void quiesce(const std::string& session_id) {
    py::gil_scoped_release release;
    service_->orchestrator().quiesce(session_id);
  }

  std::vector<std::string> load_problems() const { return service_->load_problems(); }

 private:
  std::unique_ptr<duet::DuetService> service_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the duetui package";

  g_duet_error = PyErr_NewException("duetui._core.DuetError", PyExc_RuntimeError, nullptr);
  m.attr("DuetError") = py::handle(g_duet_error);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const duet::Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(g_duet_error)(e.what());
      exc.attr("code") = std::string(duet::to_string(e.code()));
      exc.attr("detail") = e.detail().dump();
      PyErr_SetObject(g_duet_error, exc.ptr());
    }
  });

  m.def("schema_names", [] {
    std::vector<std::string> out;
    for (auto id : duet::all_schema_ids()) out.emplace_back(duet::to_string(id));
    return out;
  });
  m.def("validate", &validate_text, py::arg("schema"), py::arg("text"),
        "Validates JSON text against a named schema; returns the report as JSON text.");
  m.def("replay", &replay_text, py::arg("trace"), py::arg("fixtures") = std::string{},
        py::arg("catalog") = std::string{},
        "Replays a trace; returns (passed, report_json, final_state_json).");

  py::class_<PyService>(m, "Service")
      .def_static("from_config_file",
                  [](const std::filesystem::path& file) { return std::make_unique<PyService>(duet::ServiceConfig::load(file)); })
      .def_static("from_config_text",
                  [](const std::string& text, const std::filesystem::path& base_dir) {
                    return std::make_unique<PyService>(duet::ServiceConfig::parse(text, base_dir));
                  },
                  py::arg("text"), py::arg("base_dir") = std::filesystem::path{})
      .def("handle", &PyService::handle, py::arg("method"), py::arg("path"),
           py::arg("query") = std::map<std::string, std::string>{}, py::arg("body") = std::string{})
      .def("quiesce", &PyService::quiesce, py::arg("session_id"))
      .def("load_problems", &PyService::load_problems);
}
