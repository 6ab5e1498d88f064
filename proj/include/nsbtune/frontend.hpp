// Lexer, parser and labeler for the tuning mini-language, plus reaching
// definitions.
//
// A parsed program is a flat arena of nodes where a node's index is its
// label. Labels are handed out in pre-order, so they are stable across runs
// and across print/parse round trips.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nsbtune/errors.hpp"

namespace nsbtune {

enum class NodeKind { Const, Var, Binary, Unary, Assign, While, If, Require, Input };
enum class BinOp { Add, Sub, Mul, Div };
enum class UnFun { Sqrt, Sin, Cos, Atan };
enum class CmpOp { Lt, Gt, Le, Ge, Eq };

std::string_view symbol(BinOp op);
std::string_view symbol(UnFun fn);
std::string_view symbol(CmpOp op);

struct Cond {
  Label lhs = 0;
  CmpOp op = CmpOp::Lt;
  Label rhs = 0;
};

struct Node {
  NodeKind kind = NodeKind::Const;
  Label label = 0;
  SourcePos pos;
  /// Variable name for Var, Assign, Require and Input.
  std::string name;
  /// Decimal text of a Const.
  std::string literal;
  BinOp bin = BinOp::Add;
  UnFun fun = UnFun::Sqrt;
  /// Binary: {lhs, rhs}. Unary: {arg}. Assign: {rhs}.
  std::vector<Label> kids;
  /// While and If.
  Cond cond;
  std::vector<Label> body;
  std::vector<Label> orelse;
  bool has_else = false;
  /// Require.
  int nsb = 0;
  /// Input interval bounds, decimal text.
  std::string lo, hi;
  /// True for expression nodes inside a while/if condition. Those nodes are
  /// labeled but never tuned.
  bool control = false;
};

class Program {
 public:
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& at(Label l) const { return nodes_.at(l); }
  const std::vector<Label>& top() const { return top_; }
  size_t size() const { return nodes_.size(); }

  bool is_expr(Label l) const;
  /// Labels that carry a value and receive an nsb: non-control constants,
  /// variable reads, operators, assignment and input definitions.
  bool is_tuned(Label l) const;
  bool is_op(Label l) const;
  bool is_def(Label l) const;

  std::vector<Label> tuned_labels() const;
  std::vector<Label> op_labels() const;
  std::vector<Label> def_labels() const;
  std::vector<Label> input_labels() const;
  std::vector<Label> require_labels() const;

  /// Sets the requirement on `var`: updates its require_nsb directive, or
  /// appends one at the end of the program (taking the next free label).
  void set_requirement(const std::string& var, int nsb);
  std::optional<int> requirement(const std::string& var) const;

 private:
  friend class ProgramBuilder;
  std::vector<Node> nodes_;
  std::vector<Label> top_;
};

/// Parses and labels `source`. Throws SyntaxError or DuplicateRequire.
Program parse(std::string_view source);

/// Per-label annotation hook for printing; returns the text placed after a
/// node (e.g. "|12|") or an empty string.
using Annotator = std::function<std::string(Label)>;

/// Pretty-prints a program in concrete syntax, inserting only the
/// parentheses the grammar needs.
std::string print(const Program& program, const Annotator& annotate = {});

struct DefUseMap {
  /// Variable read (including condition reads) -> reaching definitions.
  std::map<Label, std::vector<Label>> reaching;
  /// Require directive -> definitions reaching it.
  std::map<Label, std::vector<Label>> require_defs;
  /// Variable -> labels of all its reads and definitions.
  std::map<std::string, std::vector<Label>> occurrences;
  /// Position of each label in evaluation order (operands before their
  /// operator, right-hand side before its definition).
  std::vector<size_t> eval_order;

  /// A reaching pair is loop-carried when the definition is evaluated after
  /// the read, i.e. it only reaches the read through a loop back edge.
  bool loop_carried(Label def, Label use) const {
    return eval_order.at(def) > eval_order.at(use);
  }
};

/// Reaching definitions over the structured control flow. Throws
/// UseBeforeDef if some path reads a variable before assigning it.
DefUseMap resolve_defs(const Program& program);

}  // namespace nsbtune
