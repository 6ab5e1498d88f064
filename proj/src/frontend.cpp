#include "nsbtune/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <sstream>
#include <utility>

namespace nsbtune {

std::string_view symbol(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
  }
  return "?";
}

std::string_view symbol(UnFun fn) {
  switch (fn) {
    case UnFun::Sqrt: return "sqrt";
    case UnFun::Sin: return "sin";
    case UnFun::Cos: return "cos";
    case UnFun::Atan: return "atan";
  }
  return "?";
}

std::string_view symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Gt: return ">";
    case CmpOp::Le: return "<=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "==";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { Id, Num, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.pos = {line_, col_};
      if (i_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t b = i_;
        while (i_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) {
          advance();
        }
        t.kind = Tok::Id;
        t.text = std::string(src_.substr(b, i_ - b));
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && i_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
        t.kind = Tok::Num;
        t.text = number();
      } else {
        static constexpr std::string_view two[] = {"<=", ">=", "=="};
        t.kind = Tok::Punct;
        bool matched = false;
        for (auto op : two) {
          if (src_.substr(i_, 2) == op) {
            t.text = std::string(op);
            advance();
            advance();
            matched = true;
            break;
          }
        }
        if (!matched) {
          if (std::string_view("=;(){}[],+-*/<>").find(c) == std::string_view::npos) {
            throw SyntaxError(t.pos, std::string("unexpected character '") + c + "'");
          }
          t.text = std::string(1, c);
          advance();
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_space() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#' || (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '/')) {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string number() {
    size_t b = i_;
    auto digits = [&] {
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) advance();
    };
    digits();
    if (i_ < src_.size() && src_[i_] == '.') {
      advance();
      digits();
    }
    if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
      size_t save = i_;
      int line = line_, col = col_;
      advance();
      if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) advance();
      if (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) {
        digits();
      } else {
        i_ = save;
        line_ = line;
        col_ = col;
      }
    }
    return std::string(src_.substr(b, i_ - b));
  }

  std::string_view src_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parse tree, flattened into the labeled arena once parsing succeeds.

struct PNode {
  Node node;  // label fields unused until flattening
  std::vector<std::unique_ptr<PNode>> kids;
  std::unique_ptr<PNode> cond_lhs, cond_rhs;
  std::vector<std::unique_ptr<PNode>> body, orelse;
};

using PPtr = std::unique_ptr<PNode>;

bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw = {"input", "in", "while", "if", "else",
                                           "require_nsb", "sqrt", "sin", "cos", "atan"};
  return kw.count(s) != 0;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::vector<PPtr> program() {
    std::vector<PPtr> out;
    while (peek().kind != Tok::End) {
      if (is_id("input")) {
        out.push_back(input_decl());
      } else {
        out.push_back(statement());
      }
    }
    return out;
  }

 private:
  const Token& peek(size_t k = 0) const { return toks_[std::min(p_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[std::min(p_++, toks_.size() - 1)]; }

  bool is_punct(std::string_view s) const {
    return peek().kind == Tok::Punct && peek().text == s;
  }
  bool is_id(std::string_view s) const { return peek().kind == Tok::Id && peek().text == s; }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(t.pos, what + ", found " + found);
  }

  void expect(std::string_view s) {
    if (!is_punct(s)) fail("expected '" + std::string(s) + "'");
    next();
  }

  void expect_kw(std::string_view s) {
    if (!is_id(s)) fail("expected '" + std::string(s) + "'");
    next();
  }

  Token identifier() {
    if (peek().kind != Tok::Id || is_keyword(peek().text)) fail("expected identifier");
    return next();
  }

  std::string signed_number() {
    std::string sign;
    if (is_punct("-")) {
      next();
      sign = "-";
    }
    if (peek().kind != Tok::Num) fail("expected number");
    return sign + next().text;
  }

  PPtr make(NodeKind k, SourcePos pos) {
    auto n = std::make_unique<PNode>();
    n->node.kind = k;
    n->node.pos = pos;
    return n;
  }

  PPtr input_decl() {
    SourcePos pos = peek().pos;
    expect_kw("input");
    Token id = identifier();
    expect_kw("in");
    expect("[");
    auto n = make(NodeKind::Input, pos);
    n->node.name = id.text;
    n->node.lo = signed_number();
    expect(",");
    n->node.hi = signed_number();
    expect("]");
    expect(";");
    return n;
  }

  std::vector<PPtr> block() {
    expect("{");
    std::vector<PPtr> out;
    while (!is_punct("}")) {
      if (peek().kind == Tok::End) fail("expected '}'");
      out.push_back(statement());
    }
    next();
    return out;
  }

  void condition(PNode& n) {
    expect("(");
    n.cond_lhs = expr();
    static const std::pair<std::string_view, CmpOp> ops[] = {
        {"<", CmpOp::Lt}, {">", CmpOp::Gt}, {"<=", CmpOp::Le}, {">=", CmpOp::Ge}, {"==", CmpOp::Eq}};
    bool found = false;
    for (auto [s, op] : ops) {
      if (is_punct(s)) {
        n.node.cond.op = op;
        next();
        found = true;
        break;
      }
    }
    if (!found) fail("expected comparison operator");
    n.cond_rhs = expr();
    expect(")");
  }

  PPtr statement() {
    SourcePos pos = peek().pos;
    if (is_id("while")) {
      next();
      auto n = make(NodeKind::While, pos);
      condition(*n);
      n->body = block();
      if (is_punct(";")) next();
      return n;
    }
    if (is_id("if")) {
      next();
      auto n = make(NodeKind::If, pos);
      condition(*n);
      n->body = block();
      if (is_id("else")) {
        next();
        n->node.has_else = true;
        n->orelse = block();
      }
      if (is_punct(";")) next();
      return n;
    }
    if (is_id("require_nsb")) {
      next();
      auto n = make(NodeKind::Require, pos);
      expect("(");
      n->node.name = identifier().text;
      expect(",");
      if (peek().kind != Tok::Num ||
          peek().text.find_first_not_of("0123456789") != std::string::npos) {
        fail("expected integer bit count");
      }
      n->node.nsb = std::stoi(next().text);
      if (n->node.nsb < 1) throw SyntaxError(pos, "require_nsb needs at least 1 bit");
      expect(")");
      expect(";");
      return n;
    }
    Token id = identifier();
    auto n = make(NodeKind::Assign, id.pos);
    n->node.name = id.text;
    expect("=");
    n->kids.push_back(expr());
    expect(";");
    return n;
  }

  PPtr binary(PPtr lhs, BinOp op, PPtr rhs, SourcePos pos) {
    auto n = make(NodeKind::Binary, pos);
    n->node.bin = op;
    n->kids.push_back(std::move(lhs));
    n->kids.push_back(std::move(rhs));
    return n;
  }

  PPtr expr() {
    PPtr lhs = term();
    while (is_punct("+") || is_punct("-")) {
      SourcePos pos = peek().pos;
      BinOp op = next().text == "+" ? BinOp::Add : BinOp::Sub;
      lhs = binary(std::move(lhs), op, term(), pos);
    }
    return lhs;
  }

  PPtr term() {
    PPtr lhs = factor();
    while (is_punct("*") || is_punct("/")) {
      SourcePos pos = peek().pos;
      BinOp op = next().text == "*" ? BinOp::Mul : BinOp::Div;
      lhs = binary(std::move(lhs), op, factor(), pos);
    }
    return lhs;
  }

  PPtr factor() {
    const Token& t = peek();
    if (t.kind == Tok::Num) {
      auto n = make(NodeKind::Const, t.pos);
      n->node.literal = next().text;
      return n;
    }
    if (is_punct("(")) {
      next();
      PPtr e = expr();
      expect(")");
      return e;
    }
    static const std::pair<std::string_view, UnFun> funs[] = {
        {"sqrt", UnFun::Sqrt}, {"sin", UnFun::Sin}, {"cos", UnFun::Cos}, {"atan", UnFun::Atan}};
    for (auto [name, fn] : funs) {
      if (is_id(name)) {
        auto n = make(NodeKind::Unary, t.pos);
        n->node.fun = fn;
        next();
        expect("(");
        n->kids.push_back(expr());
        expect(")");
        return n;
      }
    }
    if (t.kind == Tok::Id && !is_keyword(t.text)) {
      auto n = make(NodeKind::Var, t.pos);
      n->node.name = next().text;
      return n;
    }
    fail("expected expression");
  }

  std::vector<Token> toks_;
  size_t p_ = 0;
};

}  // namespace

class ProgramBuilder {
 public:
  Program build(std::vector<PPtr>& top) {
    for (auto& s : top) prog_.top_.push_back(flatten(*s, false));
    return std::move(prog_);
  }

 private:
  Label flatten(PNode& p, bool control) {
    Label id = static_cast<Label>(prog_.nodes_.size());
    prog_.nodes_.push_back(p.node);
    prog_.nodes_[id].label = id;
    prog_.nodes_[id].control = control;
    std::vector<Label> kids;
    for (auto& k : p.kids) kids.push_back(flatten(*k, control));
    Cond cond = p.node.cond;
    if (p.cond_lhs) {
      cond.lhs = flatten(*p.cond_lhs, true);
      cond.rhs = flatten(*p.cond_rhs, true);
    }
    std::vector<Label> body, orelse;
    for (auto& s : p.body) body.push_back(flatten(*s, false));
    for (auto& s : p.orelse) orelse.push_back(flatten(*s, false));
    Node& n = prog_.nodes_[id];
    n.kids = std::move(kids);
    n.cond = cond;
    n.body = std::move(body);
    n.orelse = std::move(orelse);
    return id;
  }

  Program prog_;
};

Program parse(std::string_view source) {
  auto toks = Lexer(source).run();
  Parser parser(std::move(toks));
  auto top = parser.program();
  Program prog = ProgramBuilder().build(top);
  std::set<std::string> required;
  for (const Node& n : prog.nodes()) {
    if (n.kind == NodeKind::Require && !required.insert(n.name).second) {
      throw DuplicateRequire(n.pos, n.name);
    }
  }
  return prog;
}

// ---------------------------------------------------------------------------
// Program queries

bool Program::is_expr(Label l) const {
  switch (at(l).kind) {
    case NodeKind::Const:
    case NodeKind::Var:
    case NodeKind::Binary:
    case NodeKind::Unary:
      return true;
    default:
      return false;
  }
}

bool Program::is_tuned(Label l) const {
  const Node& n = at(l);
  if (is_expr(l)) return !n.control;
  return n.kind == NodeKind::Assign || n.kind == NodeKind::Input;
}

bool Program::is_op(Label l) const {
  const Node& n = at(l);
  return !n.control && (n.kind == NodeKind::Binary || n.kind == NodeKind::Unary);
}

bool Program::is_def(Label l) const {
  NodeKind k = at(l).kind;
  return k == NodeKind::Assign || k == NodeKind::Input;
}

namespace {
template <class Pred>
std::vector<Label> collect(const Program& p, Pred pred) {
  std::vector<Label> out;
  for (Label l = 0; l < p.size(); ++l) {
    if (pred(l)) out.push_back(l);
  }
  return out;
}
}  // namespace

std::vector<Label> Program::tuned_labels() const {
  return collect(*this, [&](Label l) { return is_tuned(l); });
}
std::vector<Label> Program::op_labels() const {
  return collect(*this, [&](Label l) { return is_op(l); });
}
std::vector<Label> Program::def_labels() const {
  return collect(*this, [&](Label l) { return is_def(l); });
}
std::vector<Label> Program::input_labels() const {
  return collect(*this, [&](Label l) { return at(l).kind == NodeKind::Input; });
}
std::vector<Label> Program::require_labels() const {
  return collect(*this, [&](Label l) { return at(l).kind == NodeKind::Require; });
}

void Program::set_requirement(const std::string& var, int nsb) {
  for (Node& n : nodes_) {
    if (n.kind == NodeKind::Require && n.name == var) {
      n.nsb = nsb;
      return;
    }
  }
  Node n;
  n.kind = NodeKind::Require;
  n.label = static_cast<Label>(nodes_.size());
  n.name = var;
  n.nsb = nsb;
  nodes_.push_back(n);
  top_.push_back(n.label);
}

std::optional<int> Program::requirement(const std::string& var) const {
  for (const Node& n : nodes_) {
    if (n.kind == NodeKind::Require && n.name == var) return n.nsb;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Node& n) {
  if (n.kind != NodeKind::Binary) return 3;
  return (n.bin == BinOp::Add || n.bin == BinOp::Sub) ? 1 : 2;
}

class Printer {
 public:
  Printer(const Program& p, const Annotator& a) : p_(p), ann_(a) {}

  std::string run() {
    for (Label s : p_.top()) stmt(s, 0);
    return out_.str();
  }

 private:
  std::string tag(Label l) const {
    if (!ann_ || p_.at(l).control) return "";
    return ann_(l);
  }

  void expr(Label l) {
    const Node& n = p_.at(l);
    switch (n.kind) {
      case NodeKind::Const:
        out_ << n.literal << tag(l);
        break;
      case NodeKind::Var:
        out_ << n.name << tag(l);
        break;
      case NodeKind::Unary:
        out_ << symbol(n.fun) << tag(l) << "(";
        expr(n.kids[0]);
        out_ << ")";
        break;
      case NodeKind::Binary: {
        int prec = precedence(n);
        bool lp = precedence(p_.at(n.kids[0])) < prec;
        bool rp = precedence(p_.at(n.kids[1])) <= prec;
        if (lp) out_ << "(";
        expr(n.kids[0]);
        if (lp) out_ << ")";
        out_ << " " << symbol(n.bin) << tag(l) << " ";
        if (rp) out_ << "(";
        expr(n.kids[1]);
        if (rp) out_ << ")";
        break;
      }
      default:
        break;
    }
  }

  void cond(const Cond& c) {
    out_ << "(";
    expr(c.lhs);
    out_ << " " << symbol(c.op) << " ";
    expr(c.rhs);
    out_ << ")";
  }

  void block(const std::vector<Label>& body, int depth) {
    out_ << "{\n";
    for (Label s : body) stmt(s, depth + 1);
    out_ << std::string(2 * depth, ' ') << "}";
  }

  void stmt(Label l, int depth) {
    const Node& n = p_.at(l);
    out_ << std::string(2 * depth, ' ');
    switch (n.kind) {
      case NodeKind::Input:
        out_ << "input " << n.name << tag(l) << " in [" << n.lo << ", " << n.hi << "];\n";
        break;
      case NodeKind::Assign:
        out_ << n.name << tag(l) << " = ";
        expr(n.kids[0]);
        out_ << ";\n";
        break;
      case NodeKind::Require:
        out_ << "require_nsb(" << n.name << ", " << n.nsb << ");\n";
        break;
      case NodeKind::While:
        out_ << "while ";
        cond(n.cond);
        out_ << " ";
        block(n.body, depth);
        out_ << ";\n";
        break;
      case NodeKind::If:
        out_ << "if ";
        cond(n.cond);
        out_ << " ";
        block(n.body, depth);
        if (n.has_else) {
          out_ << " else ";
          block(n.orelse, depth);
        }
        out_ << "\n";
        break;
      default:
        break;
    }
  }

  const Program& p_;
  const Annotator& ann_;
  std::ostringstream out_;
};

}  // namespace

std::string print(const Program& program, const Annotator& annotate) {
  return Printer(program, annotate).run();
}

// ---------------------------------------------------------------------------
// Reaching definitions

namespace {

constexpr Label kUndefined = static_cast<Label>(-1);

using DefState = std::map<std::string, std::set<Label>>;

DefState join(const DefState& a, const DefState& b) {
  DefState out = a;
  for (const auto& [var, defs] : b) out[var].insert(defs.begin(), defs.end());
  // A variable missing on one side is undefined along that path.
  for (auto& [var, defs] : out) {
    if (!a.count(var) || !b.count(var)) defs.insert(kUndefined);
  }
  return out;
}

class ReachingDefs {
 public:
  explicit ReachingDefs(const Program& p) : p_(p) {
    result_.eval_order.assign(p.size(), 0);
  }

  DefUseMap run() {
    order_block(p_.top());
    DefState state;
    walk_block(p_.top(), state);
    for (Label l = 0; l < p_.size(); ++l) {
      const Node& n = p_.at(l);
      if (n.kind == NodeKind::Var || p_.is_def(l)) result_.occurrences[n.name].push_back(l);
    }
    check(result_.reaching);
    check(result_.require_defs);
    return std::move(result_);
  }

 private:
  void check(std::map<Label, std::vector<Label>>& m) {
    for (auto& [use, defs] : m) {
      std::set<Label>& s = pending_[use];
      if (s.empty() || s.count(kUndefined)) {
        throw UseBeforeDef(use, p_.at(use).pos, p_.at(use).name);
      }
      defs.assign(s.begin(), s.end());
    }
  }

  void order_expr(Label l) {
    for (Label k : p_.at(l).kids) order_expr(k);
    result_.eval_order[l] = next_++;
  }

  void order_block(const std::vector<Label>& body) {
    for (Label s : body) {
      const Node& n = p_.at(s);
      switch (n.kind) {
        case NodeKind::Assign:
          order_expr(n.kids[0]);
          result_.eval_order[s] = next_++;
          break;
        case NodeKind::While:
        case NodeKind::If:
          result_.eval_order[s] = next_++;
          order_expr(n.cond.lhs);
          order_expr(n.cond.rhs);
          order_block(n.body);
          order_block(n.orelse);
          break;
        default:
          result_.eval_order[s] = next_++;
          break;
      }
    }
  }

  void read(Label use, const std::string& var, const DefState& state,
            std::map<Label, std::vector<Label>>& into) {
    into[use];
    auto it = state.find(var);
    if (it == state.end()) {
      pending_[use].insert(kUndefined);
    } else {
      pending_[use].insert(it->second.begin(), it->second.end());
    }
  }

  void walk_expr(Label l, const DefState& state) {
    const Node& n = p_.at(l);
    if (n.kind == NodeKind::Var) read(l, n.name, state, result_.reaching);
    for (Label k : n.kids) walk_expr(k, state);
  }

  void walk_block(const std::vector<Label>& body, DefState& state) {
    for (Label s : body) {
      const Node& n = p_.at(s);
      switch (n.kind) {
        case NodeKind::Input:
          state[n.name] = {s};
          break;
        case NodeKind::Assign:
          walk_expr(n.kids[0], state);
          state[n.name] = {s};
          break;
        case NodeKind::Require:
          read(s, n.name, state, result_.require_defs);
          break;
        case NodeKind::If: {
          walk_expr(n.cond.lhs, state);
          walk_expr(n.cond.rhs, state);
          DefState then_state = state;
          DefState else_state = state;
          walk_block(n.body, then_state);
          walk_block(n.orelse, else_state);
          state = join(then_state, else_state);
          break;
        }
        case NodeKind::While: {
          DefState head = state;
          for (;;) {
            walk_expr(n.cond.lhs, head);
            walk_expr(n.cond.rhs, head);
            DefState out = head;
            walk_block(n.body, out);
            DefState next = join(state, out);
            if (next == head) break;
            head = std::move(next);
          }
          state = std::move(head);
          break;
        }
        default:
          break;
      }
    }
  }

  const Program& p_;
  DefUseMap result_;
  std::map<Label, std::set<Label>> pending_;
  size_t next_ = 0;
};

}  // namespace

DefUseMap resolve_defs(const Program& program) { return ReachingDefs(program).run(); }

}  // namespace nsbtune
