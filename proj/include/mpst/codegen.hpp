#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpst/ast.hpp"
#include "mpst/efsm.hpp"

namespace mpst::codegen {

class CodegenError : public std::runtime_error {
 public:
  enum class Kind { unknown_alias, invalid_efsm, not_split, name_collision, bad_import_map };

  CodegenError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(CodegenError::Kind k);

struct EntryNames {
  std::vector<std::string> states;
  std::vector<std::string> roles;
  std::vector<std::string> messages;

  bool operator==(const EntryNames&) const = default;
};

/// Generated sources keyed by path relative to the output directory.
struct GeneratedArtifact {
  std::map<std::string, std::string> files;
  EntryNames entry_names;

  bool operator==(const GeneratedArtifact&) const = default;
  void merge(const GeneratedArtifact& other);
};

/// Payload alias resolution: alias -> C++ type, plus headers the message
/// file must include for those types.
struct ImportMap {
  std::map<std::string, std::string> aliases;
  std::vector<std::string> includes;
};

/// Parses {"aliases": {...}, "includes": [...]}; "includes" is optional.
ImportMap parse_import_map(std::string_view json_text);

struct ApiOptions {
  /// Dotted Scribble module name; selects the directory and namespace.
  std::string module_name;
};

/// Typestate API for one role from its label-split EFSM.
GeneratedArtifact generate_api(const Efsm& e, const ApiOptions& opts);

/// Message records and their wire codecs for every message of the module.
/// With an import map every used alias must be mapped; without one the
/// `type ... as` path is used.
GeneratedArtifact generate_message_types(const ast::ScribbleModule& m,
                                         const std::optional<ImportMap>& imports = std::nullopt);

/// Projects, splits and generates every requested role of `protocol`
/// (all roles when `roles` is empty) together with the message file.
GeneratedArtifact generate_protocol(const ast::ScribbleModule& m, const std::string& protocol,
                                    const std::vector<std::string>& roles,
                                    const std::optional<ImportMap>& imports = std::nullopt);

/// Writes every file below `dir`, creating directories as needed.
void write_artifact(const GeneratedArtifact& a, const std::string& dir);

// Naming scheme shared by the generator and code written against it.

/// Record name for a message signature: the label followed by `_<alias>` per
/// payload, e.g. Hit, Hit_Location.
std::string message_type_name(std::string_view label, const std::vector<std::string>& payloads);
std::string state_type_name(StateId s);
std::string branch_record_name(StateId s);
/// Handler field for a branch label: the lowercased label, with a trailing
/// underscore when that is a C++ keyword.
std::string handler_field_name(std::string_view label);
/// e.g. Game::messages for module Game.
std::string messages_namespace(std::string_view module_name);
/// e.g. Game::BattleShips_P2.
std::string api_namespace(std::string_view module_name, std::string_view protocol,
                          std::string_view role);
/// e.g. Game/BattleShips_P2.hpp.
std::string api_path(std::string_view module_name, std::string_view protocol,
                     std::string_view role);
std::string messages_path(std::string_view module_name);

/// One deliberately ill-typed endpoint program.
struct CompileFailCase {
  std::string name;
  std::string program;
  /// Regular expression the compiler's diagnostics must match.
  std::string diagnostic;
};

/// Import map the compile-fail programs are written against.
ImportMap compile_fail_import_map();

/// Programs against the generated Battleship API (module Game, protocol
/// BattleShips) that must be rejected by the compiler.
std::vector<CompileFailCase> compile_fail_corpus(const ast::ScribbleModule& battleship);

/// A well-typed P2 client skeleton against the same API.
std::string positive_control_program(const ast::ScribbleModule& battleship);

}  // namespace mpst::codegen
