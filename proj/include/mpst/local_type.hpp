#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace mpst {

struct LocalType;
using LocalTypePtr = std::shared_ptr<const LocalType>;

/// One message exchanged with a peer and what follows it.
struct LocalMessage {
  std::string label;
  std::vector<std::string> payloads;
  LocalTypePtr cont;
};

namespace local {

struct SendMsg {
  std::string to;
  LocalMessage msg;
};
struct RecvMsg {
  std::string from;
  LocalMessage msg;
};
/// Internal choice: the role picks one of `branches` (labels distinct).
struct Select {
  std::string to;
  std::vector<LocalMessage> branches;
};
/// External choice offered by `from`.
struct Branch {
  std::string from;
  std::vector<LocalMessage> branches;
};
/// `initiator` is true on the side that dials; the other side accepts.
struct ConnectTo {
  std::string peer;
  bool initiator = true;
  LocalTypePtr cont;
};
struct DisconnectFrom {
  std::string peer;
  bool initiator = true;
  LocalTypePtr cont;
};
struct RecVar {
  int id = 0;
};
struct Rec {
  int id = 0;
  std::string name;  // human-readable binding, e.g. "Game(Atk=P1, Svr=GameServer, Def=P2)"
  LocalTypePtr body;
};
struct End {};

}  // namespace local

struct LocalType {
  std::variant<local::SendMsg, local::RecvMsg, local::Select, local::Branch, local::ConnectTo,
               local::DisconnectFrom, local::RecVar, local::Rec, local::End>
      node;
};

/// Structural equality (recursion binders compared by id).
bool operator==(const LocalType& a, const LocalType& b);
bool same(const LocalTypePtr& a, const LocalTypePtr& b);

LocalTypePtr make_end();
LocalTypePtr make_local(decltype(LocalType::node) node);

/// Indented, human-readable rendering for diagnostics and tests.
std::string to_string(const LocalType& t);

}  // namespace mpst
