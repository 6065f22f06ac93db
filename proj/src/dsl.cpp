#include "tmw/dsl.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace tmw {

std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream os;
  os << d.span.file << ":" << d.span.line << ":" << d.span.column << ": "
     << to_string(d.severity) << " [" << d.code << "] " << d.message;
  return os.str();
}

bool is_syntax_diagnostic(const Diagnostic& d) {
  return d.code == "Syntax" || d.code == "UnresolvedReference";
}

namespace {

enum class Tok { Ident, String, LBrace, RBrace, Semi, Arrow, Dot, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::string file, std::vector<Diagnostic>& diags)
      : src_(src), file_(std::move(file)), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      SourceSpan at = here();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", at});
        return out;
      }
      char c = src_[pos_];
      if (is_ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
        out.push_back({Tok::Ident, std::string(src_.substr(start, pos_ - start)), at});
      } else if (c == '"') {
        out.push_back({Tok::String, read_string(at), at});
      } else if (c == '{') {
        advance();
        out.push_back({Tok::LBrace, "{", at});
      } else if (c == '}') {
        advance();
        out.push_back({Tok::RBrace, "}", at});
      } else if (c == ';') {
        advance();
        out.push_back({Tok::Semi, ";", at});
      } else if (c == '.') {
        advance();
        out.push_back({Tok::Dot, ".", at});
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
        advance();
        advance();
        out.push_back({Tok::Arrow, "->", at});
      } else {
        std::string shown = (static_cast<unsigned char>(c) < 0x20 ||
                             static_cast<unsigned char>(c) >= 0x80)
                                ? "byte 0x" + hex(static_cast<unsigned char>(c))
                                : "'" + std::string(1, c) + "'";
        diags_.push_back({Severity::Error, "Syntax", "unexpected " + shown, at});
        advance();
      }
    }
  }

 private:
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
  }
  static std::string hex(unsigned char c) {
    const char* digits = "0123456789abcdef";
    return {digits[c >> 4], digits[c & 0xf]};
  }

  SourceSpan here() const { return {file_, line_, column_}; }

  void advance() {
    unsigned char c = static_cast<unsigned char>(src_[pos_++]);
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else if ((c & 0xC0) != 0x80) {
      ++column_;  // UTF-8 continuation bytes do not start a new column
    }
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  std::string read_string(const SourceSpan& at) {
    advance();  // opening quote
    std::string out;
    while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') {
      if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) {
        advance();
        char e = src_[pos_];
        out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
        advance();
        continue;
      }
      out += src_[pos_];
      advance();
    }
    if (pos_ < src_.size() && src_[pos_] == '"') {
      advance();
    } else {
      diags_.push_back({Severity::Error, "Syntax", "unterminated string literal", at});
    }
    return out;
  }

  std::string_view src_;
  std::string file_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

struct RefAst {
  std::vector<std::string> parts;
  SourceSpan span;
};

struct StageDecl {
  StageKind kind = StageKind::Create;
  Port port = Port::None;  // for Transfer: None means both ports
  SourceSpan span;
};

struct EdgeStmt {
  bool trigger = false;
  std::vector<RefAst> chain;
  std::string scope;  // enclosing thimac id, empty at top level
  SourceSpan span;
};

struct ThimacAst {
  std::string name;
  SourceSpan span;
  std::vector<StageDecl> stages;
  std::vector<ThimacAst> children;
  std::vector<EdgeStmt> edges;
};

struct FileAst {
  std::string model_name;
  std::vector<ThimacAst> thimacs;
  std::vector<EdgeStmt> edges;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags)
      : toks_(std::move(toks)), diags_(diags) {}

  FileAst run() {
    FileAst file;
    while (!at(Tok::End)) {
      if (is_kw("model")) {
        next();
        if (at(Tok::String)) {
          file.model_name = next().text;
        } else {
          error("expected a quoted model label after 'model'");
        }
        accept(Tok::Semi);
      } else if (is_kw("thimac")) {
        if (auto t = parse_thimac("")) file.thimacs.push_back(std::move(*t));
      } else if (is_kw("flow") || is_kw("trigger")) {
        if (auto e = parse_edge("")) file.edges.push_back(std::move(*e));
      } else if (accept(Tok::Semi)) {
        // stray separator
      } else {
        error("expected 'thimac', 'flow', 'trigger' or 'model', found " + describe(peek()));
        next();
        recover_top();
      }
    }
    return file;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool is_kw(std::string_view kw) const { return at(Tok::Ident) && peek().text == kw; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  void error(std::string msg) {
    diags_.push_back({Severity::Error, "Syntax", std::move(msg), peek().span});
  }
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::String: return "string literal";
      default: return "'" + t.text + "'";
    }
  }

  // Skip to the start of the next top-level item.
  void recover_top() {
    while (!at(Tok::End) && !is_kw("thimac") && !is_kw("flow") && !is_kw("trigger") &&
           !is_kw("model")) {
      next();
    }
  }

  // Skip past the current statement without eating a closing brace.
  void recover_statement() {
    while (!at(Tok::End) && !at(Tok::RBrace)) {
      if (accept(Tok::Semi)) return;
      next();
    }
  }

  std::optional<ThimacAst> parse_thimac(const std::string& scope) {
    ThimacAst t;
    t.span = next().span;  // 'thimac'
    if (!at(Tok::Ident)) {
      error("expected a thimac name, found " + describe(peek()));
      recover_statement();
      return std::nullopt;
    }
    t.name = next().text;
    const std::string id = scope.empty() ? t.name : scope + "." + t.name;
    if (!accept(Tok::LBrace)) {
      error("expected '{' after thimac name '" + t.name + "'");
      recover_statement();
      return t;
    }
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) {
        diags_.push_back({Severity::Error, "Syntax",
                          "unterminated block for thimac '" + t.name + "'", t.span});
        return t;
      }
      if (accept(Tok::Semi)) continue;
      if (is_kw("thimac")) {
        if (auto child = parse_thimac(id)) t.children.push_back(std::move(*child));
        continue;
      }
      if (is_kw("flow") || is_kw("trigger")) {
        if (auto e = parse_edge(id)) t.edges.push_back(std::move(*e));
        continue;
      }
      if (at(Tok::Ident)) {
        if (auto kind = stage_kind_from_string(peek().text)) {
          StageDecl decl{*kind, Port::None, next().span};
          if (*kind == StageKind::Transfer && at(Tok::Ident)) {
            if (auto port = port_from_string(peek().text); port && *port != Port::None) {
              decl.port = *port;
              next();
            }
          }
          t.stages.push_back(decl);
          if (!at(Tok::Semi) && !at(Tok::RBrace)) {
            error("expected ';' after stage declaration, found " + describe(peek()));
          }
          continue;
        }
      }
      error("expected a stage, 'thimac', 'flow' or 'trigger' inside '" + t.name +
            "', found " + describe(peek()));
      next();
    }
    next();  // '}'
    return t;
  }

  std::optional<RefAst> parse_ref() {
    RefAst ref;
    ref.span = peek().span;
    if (!at(Tok::Ident)) {
      error("expected a stage reference, found " + describe(peek()));
      return std::nullopt;
    }
    ref.parts.push_back(next().text);
    while (accept(Tok::Dot)) {
      if (!at(Tok::Ident)) {
        error("expected a name after '.', found " + describe(peek()));
        return std::nullopt;
      }
      ref.parts.push_back(next().text);
    }
    return ref;
  }

  std::optional<EdgeStmt> parse_edge(const std::string& scope) {
    EdgeStmt e;
    e.trigger = peek().text == "trigger";
    e.scope = scope;
    e.span = next().span;
    auto first = parse_ref();
    if (!first) {
      recover_statement();
      return std::nullopt;
    }
    e.chain.push_back(std::move(*first));
    while (accept(Tok::Arrow)) {
      auto r = parse_ref();
      if (!r) {
        recover_statement();
        return std::nullopt;
      }
      e.chain.push_back(std::move(*r));
    }
    if (e.chain.size() < 2) {
      error("expected '->' in " + std::string(e.trigger ? "trigger" : "flow"));
      recover_statement();
      return std::nullopt;
    }
    if (e.trigger && e.chain.size() > 2) {
      diags_.push_back({Severity::Error, "Syntax",
                        "a trigger connects exactly two stages", e.span});
      recover_statement();
      return std::nullopt;
    }
    if (!accept(Tok::Semi)) {
      error("expected ';' to end the " + std::string(e.trigger ? "trigger" : "flow") +
            ", found " + describe(peek()));
      recover_statement();
    }
    return e;
  }

  std::vector<Token> toks_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
};

struct PartialRef {
  ThimacId thimac;
  StageKind kind = StageKind::Create;
  std::optional<Port> port;  // unset: a Transfer whose port comes from its role
};

class Builder {
 public:
  Builder(StaticModel& model, std::vector<Diagnostic>& diags)
      : model_(model), diags_(diags) {}

  void build(const FileAst& file) {
    model_.set_name(file.model_name);
    std::vector<const EdgeStmt*> edges;
    for (const auto& t : file.thimacs) add_thimac(t, std::nullopt, edges);
    for (const auto& e : file.edges) edges.push_back(&e);
    for (const auto* e : edges) add_edge(*e);
  }

 private:
  void report(const std::string& code, const std::string& message, const SourceSpan& at) {
    diags_.push_back({Severity::Error, code, message, at});
  }

  void add_thimac(const ThimacAst& t, const std::optional<ThimacId>& parent,
                  std::vector<const EdgeStmt*>& edges) {
    ThimacId id;
    try {
      id = model_.add_thimac(t.name, parent);
    } catch (const Error& err) {
      report(std::string(to_string(err.code())), err.detail(), t.span);
      return;
    }
    for (const auto& s : t.stages) {
      std::vector<Port> ports{s.port};
      if (s.kind == StageKind::Transfer && s.port == Port::None) ports = {Port::In, Port::Out};
      for (Port p : ports) {
        try {
          model_.add_stage(id, s.kind, p);
        } catch (const Error& err) {
          report(std::string(to_string(err.code())), err.detail(), s.span);
        }
      }
    }
    for (const auto& c : t.children) add_thimac(c, id, edges);
    for (const auto& e : t.edges) edges.push_back(&e);
  }

  std::optional<PartialRef> resolve(const RefAst& ref, const std::string& scope) {
    const auto& p = ref.parts;
    PartialRef out;
    std::size_t prefix_len = 0;
    if (p.size() >= 2 && p[p.size() - 2] == "transfer" &&
        (p.back() == "in" || p.back() == "out")) {
      out.kind = StageKind::Transfer;
      out.port = *port_from_string(p.back());
      prefix_len = p.size() - 2;
    } else if (auto kind = stage_kind_from_string(p.back())) {
      out.kind = *kind;
      if (*kind != StageKind::Transfer) out.port = Port::None;
      prefix_len = p.size() - 1;
    } else {
      report("UnresolvedReference", "'" + joined(p, p.size()) + "' does not name a stage",
             ref.span);
      return std::nullopt;
    }

    const std::string path = joined(p, prefix_len);
    if (path.empty()) {
      if (scope.empty()) {
        report("UnresolvedReference",
               "bare stage '" + p.back() + "' is only allowed inside a thimac", ref.span);
        return std::nullopt;
      }
      out.thimac = scope;
      return out;
    }
    // Innermost enclosing thimac first, then outward to the top level.
    std::optional<ThimacId> s = scope.empty() ? std::nullopt : std::optional(scope);
    while (true) {
      ThimacId cand = s ? *s + "." + path : path;
      if (model_.find_thimac(cand) != nullptr) {
        out.thimac = cand;
        return out;
      }
      if (!s) break;
      const Thimac* t = model_.find_thimac(*s);
      s = t != nullptr ? t->parent : std::nullopt;
    }
    report("UnresolvedReference", "no thimac '" + path + "'", ref.span);
    return std::nullopt;
  }

  static std::string joined(const std::vector<std::string>& parts, std::size_t n) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out += ".";
      out += parts[i];
    }
    return out;
  }

  // Picks the concrete stage for a reference; `preferred` is the port the
  // role implies for a Transfer written without one.
  std::optional<StageId> concretize(const PartialRef& r, Port preferred,
                                    const SourceSpan& at) {
    if (r.kind == StageKind::Transfer && !r.port) {
      Port other = preferred == Port::In ? Port::Out : Port::In;
      for (Port p : {preferred, other}) {
        if (const Stage* s = model_.stage_of(r.thimac, StageKind::Transfer, p)) return s->id;
      }
      report("UnresolvedReference", "thimac '" + r.thimac + "' has no transfer stage", at);
      return std::nullopt;
    }
    if (const Stage* s = model_.stage_of(r.thimac, r.kind, r.port.value_or(Port::None))) {
      return s->id;
    }
    report("UnresolvedReference",
           "thimac '" + r.thimac + "' has no " +
               make_stage_id("", r.kind, r.port.value_or(Port::None)).substr(1) + " stage",
           at);
    return std::nullopt;
  }

  void add_edge(const EdgeStmt& e) {
    std::vector<std::optional<PartialRef>> refs;
    for (const auto& r : e.chain) refs.push_back(resolve(r, e.scope));
    for (std::size_t i = 0; i + 1 < refs.size(); ++i) {
      if (!refs[i] || !refs[i + 1]) continue;
      const auto& a = *refs[i];
      const auto& b = *refs[i + 1];
      const SourceSpan& at = e.chain[i].span;
      std::optional<StageId> from;
      std::optional<StageId> to;
      if (e.trigger) {
        from = concretize_trigger_end(a, at);
        to = concretize_trigger_end(b, e.chain[i + 1].span);
      } else {
        const bool intra = a.thimac == b.thimac;
        from = concretize(a, intra ? Port::In : Port::Out, at);
        to = concretize(b, intra ? Port::Out : Port::In, e.chain[i + 1].span);
      }
      if (!from || !to) continue;
      try {
        if (e.trigger) {
          model_.add_trigger(*from, *to);
        } else {
          model_.add_flow(*from, *to);
        }
      } catch (const Error& err) {
        report(std::string(to_string(err.code())), err.detail(), at);
      }
    }
  }

  std::optional<StageId> concretize_trigger_end(const PartialRef& r, const SourceSpan& at) {
    if (r.kind == StageKind::Transfer && !r.port) {
      const Stage* in = model_.stage_of(r.thimac, StageKind::Transfer, Port::In);
      const Stage* out = model_.stage_of(r.thimac, StageKind::Transfer, Port::Out);
      if (in != nullptr && out != nullptr) {
        report("UnresolvedReference",
               "'" + r.thimac + ".transfer' is ambiguous in a trigger; write .in or .out",
               at);
        return std::nullopt;
      }
      if (in != nullptr) return in->id;
      if (out != nullptr) return out->id;
    }
    return concretize(r, Port::None, at);
  }

  StaticModel& model_;
  std::vector<Diagnostic>& diags_;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\t') {
      out += "\\t";
    } else {
      out += c;
    }
  }
  return out + "\"";
}

void print_thimac(const StaticModel& m, const Thimac& t, int depth, std::ostringstream& os) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  os << pad << "thimac " << t.name << " {\n";
  for (StageKind k : kAllStageKinds) {
    if (k == StageKind::Transfer) {
      bool in = m.stage_of(t.id, k, Port::In) != nullptr;
      bool out = m.stage_of(t.id, k, Port::Out) != nullptr;
      if (in && out) {
        os << pad << "  transfer;\n";
      } else if (in || out) {
        os << pad << "  transfer " << (in ? "in" : "out") << ";\n";
      }
    } else if (m.stage_of(t.id, k) != nullptr) {
      os << pad << "  " << to_string(k) << ";\n";
    }
  }
  for (const Thimac* c : m.children_of(t.id)) print_thimac(m, *c, depth + 1, os);
  os << pad << "}\n";
}

}  // namespace

ParseResult parse_model(std::string_view text, std::string_view file) {
  ParseResult result;
  auto tokens = Lexer(text, std::string(file), result.diagnostics).run();
  FileAst ast = Parser(std::move(tokens), result.diagnostics).run();
  Builder(result.model, result.diagnostics).build(ast);
  std::stable_sort(result.diagnostics.begin(), result.diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return a.span < b.span; });
  return result;
}

std::string print_model(const StaticModel& model) {
  std::ostringstream os;
  if (!model.name().empty()) os << "model " << quote(model.name()) << ";\n\n";
  for (const Thimac* t : model.children_of(std::nullopt)) print_thimac(model, *t, 0, os);
  if (!model.flows().empty()) os << "\n";
  for (const auto& f : model.flows()) os << "flow " << f.from << " -> " << f.to << ";\n";
  if (!model.triggers().empty()) os << "\n";
  for (const auto& t : model.triggers()) {
    os << "trigger " << t.from << " -> " << t.to << ";\n";
  }
  return os.str();
}

}  // namespace tmw
