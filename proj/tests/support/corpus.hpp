#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mpst/parser.hpp"

namespace mpst::testing {

inline std::filesystem::path corpus_dir() { return MPST_CORPUS_DIR; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline ast::ScribbleModule load(const std::string& name) {
  return ast::parse_module(read_file(corpus_dir() / name));
}

/// Well-formed protocol files, in a fixed order.
inline std::vector<std::string> valid_corpus() {
  return {"battleship.scr", "two_buyer.scr", "ping_pong.scr", "rec_adder.scr", "fetch.scr"};
}

/// Ill-formed files paired with the single diagnostic code each must produce.
inline std::vector<std::pair<std::string, std::string>> invalid_corpus() {
  return {
      {"invalid/choice_sender.scr", "CHOICE_SENDER"},
      {"invalid/dup_label.scr", "DUP_LABEL"},
      {"invalid/do_arity.scr", "DO_ARITY"},
      {"invalid/unknown_alias.scr", "UNKNOWN_ALIAS"},
      {"invalid/unknown_role.scr", "UNKNOWN_ROLE"},
      {"invalid/unmergeable.scr", "UNMERGEABLE"},
  };
}

}  // namespace mpst::testing
