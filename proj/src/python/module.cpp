#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mpst/codegen.hpp"
#include "mpst/compose.hpp"
#include "mpst/efsm_io.hpp"
#include "mpst/local_type.hpp"
#include "mpst/parser.hpp"
#include "mpst/projector.hpp"
#include "mpst/validator.hpp"

namespace py = pybind11;
using namespace mpst;

namespace {

Efsm efsm_of(const std::string& source, const std::string& protocol, const std::string& role,
             bool split) {
  auto m = ast::parse_module(source);
  auto e = to_efsm(*project(m, protocol, role), protocol, role);
  return split ? split_labels(e) : e;
}

py::list check(const std::string& source) {
  py::list out;
  for (const auto& d : check_well_formed(ast::parse_module(source))) {
    py::dict item;
    item["severity"] = std::string(to_string(d.severity));
    item["code"] = d.code;
    item["message"] = d.message;
    item["line"] = d.span.line;
    item["column"] = d.span.column;
    out.append(item);
  }
  return out;
}

py::dict compose(const std::string& source, const std::string& protocol, std::size_t buffer_bound,
                 std::size_t state_cap) {
  auto r = compose_check(ast::parse_module(source), protocol, {buffer_bound, state_cap});
  py::dict out;
  out["result"] = std::string(to_string(r.result));
  out["explored_states"] = r.explored_states;
  out["message"] = r.message;
  py::list trace;
  for (const auto& step : r.trace) {
    py::dict item;
    item["action"] = step.action == Action::send ? "send" : "receive";
    item["sender"] = step.sender;
    item["receiver"] = step.receiver;
    item["label"] = step.label;
    trace.append(item);
  }
  out["trace"] = trace;
  return out;
}

std::map<std::string, std::string> generate(const std::string& source, const std::string& protocol,
                                            const std::optional<std::string>& import_map) {
  std::optional<codegen::ImportMap> imports;
  if (import_map) imports = codegen::parse_import_map(*import_map);
  return codegen::generate_protocol(ast::parse_module(source), protocol, {}, imports).files;
}

}  // namespace

PYBIND11_MODULE(_mpst, m) {
  m.doc() = "Scribble protocols: validation, projection, EFSMs, composition and C++ API generation.";

  py::register_exception<ast::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ProjectError>(m, "ProjectError", PyExc_ValueError);
  py::register_exception<codegen::CodegenError>(m, "CodegenError", PyExc_ValueError);

  m.def("check", &check, py::arg("source"),
        "Well-formedness diagnostics as dicts with severity, code, message, line and column.");
  m.def("render", [](const std::string& s) { return ast::render_module(ast::parse_module(s)); },
        py::arg("source"), "Canonical pretty-printed form of a module.");
  m.def(
      "project",
      [](const std::string& s, const std::string& p, const std::string& r) {
        return to_string(*project(ast::parse_module(s), p, r));
      },
      py::arg("source"), py::arg("protocol"), py::arg("role"));
  m.def(
      "efsm_json",
      [](const std::string& s, const std::string& p, const std::string& r, bool split) {
        return export_efsm_json(efsm_of(s, p, r, split));
      },
      py::arg("source"), py::arg("protocol"), py::arg("role"), py::arg("split") = true);
  m.def(
      "efsm_dot",
      [](const std::string& s, const std::string& p, const std::string& r, bool split) {
        return export_dot(efsm_of(s, p, r, split));
      },
      py::arg("source"), py::arg("protocol"), py::arg("role"), py::arg("split") = true);
  m.def("compose", &compose, py::arg("source"), py::arg("protocol"), py::arg("buffer_bound") = 1,
        py::arg("state_cap") = 1'000'000);
  m.def("generate", &generate, py::arg("source"), py::arg("protocol"),
        py::arg("import_map") = std::nullopt,
        "Generated headers keyed by relative path.");
}
