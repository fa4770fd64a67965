#include "mpst/parser.hpp"

#include <algorithm>
#include <array>
#include <vector>

namespace mpst::ast {

const GlobalProtocolDecl* ScribbleModule::find_protocol(std::string_view protocol) const {
  auto it = std::find_if(protocols.begin(), protocols.end(),
                         [&](const auto& p) { return p.name == protocol; });
  return it == protocols.end() ? nullptr : &*it;
}

const PayloadTypeDecl* ScribbleModule::find_type(std::string_view alias) const {
  auto it = std::find_if(type_decls.begin(), type_decls.end(),
                         [&](const auto& t) { return t.alias == alias; });
  return it == type_decls.end() ? nullptr : &*it;
}

namespace {

enum class Tok { ident, string, lparen, rparen, lbrace, rbrace, comma, semi, dot, eof };

constexpr std::array kKeywords = {"module", "type",  "as", "global", "protocol",
                                  "role",   "from",  "to", "choice", "at",
                                  "or",     "do",    "connect", "disconnect", "and"};

bool is_keyword(std::string_view s) {
  return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end();
}

std::string describe(Tok t) {
  switch (t) {
    case Tok::ident: return "identifier";
    case Tok::string: return "string literal";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::comma: return "','";
    case Tok::semi: return "';'";
    case Tok::dot: return "'.'";
    case Tok::eof: return "end of input";
  }
  return "token";
}

struct Token {
  Tok kind = Tok::eof;
  std::string text;  // identifier text or unescaped string contents
  SourceSpan span;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token t;
      t.span = here();
      if (pos_ >= src_.size()) {
        t.kind = Tok::eof;
        out.push_back(std::move(t));
        return out;
      }
      char c = src_[pos_];
      if (is_ident_start(c)) {
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
        t.kind = Tok::ident;
        t.text = std::string(src_.substr(t.span.begin, pos_ - t.span.begin));
      } else if (c == '"') {
        advance();
        lex_string(t);
      } else {
        switch (c) {
          case '(': t.kind = Tok::lparen; break;
          case ')': t.kind = Tok::rparen; break;
          case '{': t.kind = Tok::lbrace; break;
          case '}': t.kind = Tok::rbrace; break;
          case ',': t.kind = Tok::comma; break;
          case ';': t.kind = Tok::semi; break;
          case '.': t.kind = Tok::dot; break;
          default: {
            SourceSpan s = here();
            s.end = s.begin + 1;
            throw ParseError("unexpected character", s, {});
          }
        }
        advance();
      }
      t.span.end = static_cast<std::uint32_t>(pos_);
      out.push_back(std::move(t));
    }
  }

 private:
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

  SourceSpan here() const {
    auto p = static_cast<std::uint32_t>(pos_);
    return SourceSpan{line_, col_, p, p};
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 0;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  void lex_string(Token& t) {
    t.kind = Tok::string;
    for (;;) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        SourceSpan s = t.span;
        s.end = static_cast<std::uint32_t>(pos_);
        throw ParseError("unterminated string literal", s, {"'\"'"});
      }
      char c = src_[pos_];
      advance();
      if (c == '"') return;
      if (c == '\\') {
        if (pos_ >= src_.size()) continue;
        char e = src_[pos_];
        if (e != '"' && e != '\\') {
          SourceSpan s = here();
          s.end = s.begin + 1;
          throw ParseError("unknown escape sequence", s, {"'\\\"'", "'\\\\'"});
        }
        advance();
        t.text.push_back(e);
      } else {
        t.text.push_back(c);
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 0;
  std::uint32_t col_ = 0;
};

constexpr int kMaxNesting = 200;

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ScribbleModule parse() {
    ScribbleModule m;
    m.span = peek().span;
    expect_keyword("module");
    m.name = parse_dotted();
    expect(Tok::semi);
    while (at_keyword("type")) m.type_decls.push_back(parse_type_decl());
    while (at_keyword("global")) m.protocols.push_back(parse_protocol());
    if (peek().kind != Tok::eof) {
      fail(at_keyword_set() ? "unexpected token" : "expected declaration",
           {"'type'", "'global'", describe(Tok::eof)});
    }
    m.span.end = peek().span.begin;
    return m;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }

  const Token& take() {
    const Token& t = toks_[pos_];
    if (t.kind != Tok::eof) ++pos_;
    return t;
  }

  std::uint32_t last_end() const { return pos_ == 0 ? 0 : toks_[pos_ - 1].span.end; }

  bool at_keyword(std::string_view kw) const {
    return peek().kind == Tok::ident && peek().text == kw;
  }

  bool at_keyword_set() const { return peek().kind == Tok::ident && is_keyword(peek().text); }

  [[noreturn]] void fail(const std::string& what, std::set<std::string> expected) const {
    std::string msg = what;
    if (!expected.empty()) {
      msg += "; expected ";
      bool first = true;
      for (const auto& e : expected) {
        if (!first) msg += " or ";
        msg += e;
        first = false;
      }
    }
    const Token& t = peek();
    switch (t.kind) {
      case Tok::eof: msg += ", found end of input"; break;
      case Tok::ident: msg += ", found '" + t.text + "'"; break;
      case Tok::string: msg += ", found string literal"; break;
      default: msg += ", found " + describe(t.kind); break;
    }
    throw ParseError(msg, t.span, std::move(expected));
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind) fail("syntax error", {describe(kind)});
    return take();
  }

  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail("syntax error", {"'" + std::string(kw) + "'"});
    take();
  }

  std::string expect_ident() {
    if (peek().kind != Tok::ident || is_keyword(peek().text)) fail("syntax error", {"identifier"});
    return take().text;
  }

  std::string parse_dotted() {
    std::string name = expect_ident();
    while (peek().kind == Tok::dot) {
      take();
      name += '.';
      name += expect_ident();
    }
    return name;
  }

  SourceSpan finish(SourceSpan start) const {
    start.end = last_end();
    return start;
  }

  PayloadTypeDecl parse_type_decl() {
    PayloadTypeDecl d;
    SourceSpan start = peek().span;
    expect_keyword("type");
    d.alias = expect_ident();
    expect_keyword("as");
    d.target_path = expect(Tok::string).text;
    expect(Tok::semi);
    d.span = finish(start);
    return d;
  }

  GlobalProtocolDecl parse_protocol() {
    GlobalProtocolDecl p;
    SourceSpan start = peek().span;
    expect_keyword("global");
    expect_keyword("protocol");
    p.name = expect_ident();
    expect(Tok::lparen);
    for (;;) {
      expect_keyword("role");
      p.role_params.push_back(expect_ident());
      if (peek().kind != Tok::comma) break;
      take();
    }
    expect(Tok::rparen);
    p.body = parse_block(0);
    p.span = finish(start);
    return p;
  }

  Block parse_block(int depth) {
    if (depth > kMaxNesting) fail("nesting too deep", {});
    expect(Tok::lbrace);
    Block b;
    while (peek().kind != Tok::rbrace) {
      if (peek().kind == Tok::eof) fail("unterminated block", {"'}'", "statement"});
      b.push_back(parse_statement(depth));
    }
    take();
    return b;
  }

  std::vector<std::string> parse_ident_list() {
    std::vector<std::string> out;
    expect(Tok::lparen);
    if (peek().kind != Tok::rparen) {
      for (;;) {
        out.push_back(expect_ident());
        if (peek().kind != Tok::comma) break;
        take();
      }
    }
    expect(Tok::rparen);
    return out;
  }

  Statement parse_statement(int depth) {
    SourceSpan start = peek().span;
    if (at_keyword("choice")) {
      take();
      Choice c;
      expect_keyword("at");
      c.at = expect_ident();
      c.branches.push_back(parse_block(depth + 1));
      while (at_keyword("or")) {
        take();
        c.branches.push_back(parse_block(depth + 1));
      }
      c.span = finish(start);
      return Statement{std::move(c)};
    }
    if (at_keyword("do")) {
      take();
      Do d;
      d.protocol = expect_ident();
      d.role_args = parse_ident_list();
      expect(Tok::semi);
      d.span = finish(start);
      return Statement{std::move(d)};
    }
    if (at_keyword("connect")) {
      take();
      Connect c;
      c.from = expect_ident();
      expect_keyword("to");
      c.to = expect_ident();
      expect(Tok::semi);
      c.span = finish(start);
      return Statement{std::move(c)};
    }
    if (at_keyword("disconnect")) {
      take();
      Disconnect d;
      d.from = expect_ident();
      expect_keyword("and");
      d.to = expect_ident();
      expect(Tok::semi);
      d.span = finish(start);
      return Statement{std::move(d)};
    }
    if (peek().kind != Tok::ident || is_keyword(peek().text)) {
      fail("expected statement",
           {"message label", "'choice'", "'do'", "'connect'", "'disconnect'", "'}'"});
    }
    Transfer t;
    t.label = take().text;
    t.payloads = parse_ident_list();
    expect_keyword("from");
    t.from = expect_ident();
    expect_keyword("to");
    t.to = expect_ident();
    expect(Tok::semi);
    t.span = finish(start);
    return Statement{std::move(t)};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ScribbleModule parse_module(std::string_view text) {
  Parser p(Lexer(text).run());
  return p.parse();
}

}  // namespace mpst::ast
