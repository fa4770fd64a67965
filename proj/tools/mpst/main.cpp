#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <spdlog/spdlog.h>
#include <sstream>

#include "mpst/codegen.hpp"
#include "mpst/compose.hpp"
#include "mpst/efsm_io.hpp"
#include "mpst/log.hpp"
#include "mpst/parser.hpp"
#include "mpst/projector.hpp"
#include "mpst/validator.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kIoError = 2;

struct InputError {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError{"cannot read " + path};
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string position(const std::string& file, const mpst::ast::SourceSpan& s) {
  return file + ":" + std::to_string(s.line + 1) + ":" + std::to_string(s.column + 1);
}

mpst::ast::ScribbleModule load(const std::string& file) {
  const std::string text = read_file(file);
  try {
    return mpst::ast::parse_module(text);
  } catch (const mpst::ast::ParseError& e) {
    throw InputError{"error[PARSE] " + position(file, e.span()) + " " + e.what()};
  }
}

// Prints diagnostics; true when there were errors.
bool report(const std::string& file, const std::vector<mpst::Diagnostic>& ds) {
  for (const auto& d : ds) {
    std::cout << mpst::to_string(d.severity) << "[" << d.code << "] " << position(file, d.span)
              << " " << d.message << "\n";
  }
  return mpst::has_errors(ds);
}

int cmd_check(const std::string& file) {
  auto m = load(file);
  return report(file, mpst::check_well_formed(m)) ? kFailed : kOk;
}

int cmd_project(const std::string& file, const std::string& protocol, const std::string& role,
                const std::string& format, const std::string& out) {
  auto m = load(file);
  auto ds = mpst::check_well_formed(m);
  if (mpst::has_errors(ds)) {
    report(file, ds);
    return kFailed;
  }
  std::string text;
  try {
    auto e = mpst::split_labels(mpst::to_efsm(*mpst::project(m, protocol, role), protocol, role));
    text = format == "dot" ? mpst::export_dot(e) : mpst::export_efsm_json(e) + "\n";
  } catch (const mpst::ProjectError& e) {
    std::cerr << "error[" << mpst::to_string(e.kind()) << "] " << e.what() << "\n";
    return kFailed;
  }
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out, std::ios::binary);
    f << text;
    if (!f) throw InputError{"cannot write " + out};
  }
  return kOk;
}

int cmd_generate(const std::string& file, const std::string& protocol,
                 const std::vector<std::string>& roles, const std::string& import_map,
                 const std::string& out) {
  auto m = load(file);
  auto ds = mpst::check_well_formed(m);
  if (mpst::has_errors(ds)) {
    report(file, ds);
    return kFailed;
  }
  std::optional<mpst::codegen::ImportMap> imports;
  try {
    if (!import_map.empty()) imports = mpst::codegen::parse_import_map(read_file(import_map));
    auto art = mpst::codegen::generate_protocol(m, protocol, roles, imports);
    mpst::codegen::write_artifact(art, out);
    for (const auto& [rel, text] : art.files) {
      std::cout << (std::filesystem::path(out) / rel).string() << "\n";
    }
  } catch (const mpst::codegen::CodegenError& e) {
    std::cerr << "error[" << mpst::codegen::to_string(e.kind()) << "] " << e.what() << "\n";
    return kFailed;
  } catch (const mpst::ProjectError& e) {
    std::cerr << "error[" << mpst::to_string(e.kind()) << "] " << e.what() << "\n";
    return kFailed;
  }
  return kOk;
}

int cmd_compose(const std::string& file, const std::string& protocol, std::size_t buffer) {
  auto m = load(file);
  auto ds = mpst::check_well_formed(m);
  if (mpst::has_errors(ds)) {
    report(file, ds);
    return kFailed;
  }
  try {
    auto r = mpst::compose_check(m, protocol, {buffer});
    std::cout << mpst::to_string(r.result) << " (" << r.explored_states << " states)\n";
    if (r.result == mpst::ComposedReport::Result::ok) return kOk;
    std::cout << r.message << "\n";
    for (const auto& t : r.trace) {
      std::cout << "  " << t.sender << " -> " << t.receiver << ": " << t.label << " ("
                << mpst::to_string(t.action) << ")\n";
    }
    return kFailed;
  } catch (const mpst::ProjectError& e) {
    std::cerr << "error[" << mpst::to_string(e.kind()) << "] " << e.what() << "\n";
  } catch (const mpst::ExplosionLimit& e) {
    std::cerr << "error[EXPLOSION] " << e.what() << "\n";
  }
  return kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  mpst::init_logging_from_env();
  CLI::App app{"Scribble toolchain: check, project, generate"};
  app.require_subcommand(1);

  std::string file, protocol, role, format = "json", out, import_map;
  std::vector<std::string> roles;
  std::size_t buffer = 1;

  auto* check = app.add_subcommand("check", "Check a module for well-formedness");
  check->add_option("file", file, "Scribble module")->required();

  auto* project = app.add_subcommand("project", "Project a protocol onto a role as an EFSM");
  project->add_option("file", file, "Scribble module")->required();
  project->add_option("--protocol", protocol)->required();
  project->add_option("--role", role)->required();
  project->add_option("--format", format)->check(CLI::IsMember({"json", "dot"}));
  project->add_option("-o,--output", out, "Output file (default stdout)");

  auto* generate = app.add_subcommand("generate", "Generate typestate APIs and message types");
  generate->add_option("file", file, "Scribble module")->required();
  generate->add_option("--protocol", protocol)->required();
  generate->add_option("--role", roles, "Role to generate (repeatable; default all)");
  generate->add_option("--import-map", import_map, "JSON alias to C++ type mapping");
  generate->add_option("-o,--output", out, "Output directory")->required();

  auto* compose = app.add_subcommand("compose", "Explore the composition of all roles");
  compose->add_option("file", file, "Scribble module")->required();
  compose->add_option("--protocol", protocol)->required();
  compose->add_option("--buffer", buffer, "Channel bound; 0 is synchronous");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kIoError;
  }

  try {
    if (*check) return cmd_check(file);
    if (*project) return cmd_project(file, protocol, role, format, out);
    if (*generate) return cmd_generate(file, protocol, roles, import_map, out);
    if (*compose) return cmd_compose(file, protocol, buffer);
  } catch (const InputError& e) {
    std::cerr << e.message << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kIoError;
  }
  return kIoError;
}
