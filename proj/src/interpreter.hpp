// Shared tree-walking evaluator for the reference run and the emulator.
//
// Each expression label owns a value slot. The Hooks policy decides the
// precision an operator is computed at and sees (and may rewrite) every value
// right after it is produced.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsbtune/bigreal.hpp"
#include "nsbtune/frontend.hpp"

namespace nsbtune::detail {

template <class Hooks>
class Interpreter {
 public:
  Interpreter(const Program& program, Hooks& hooks, mpfr_prec_t slot_prec, long iter_cap)
      : p_(program), hooks_(hooks), iter_cap_(iter_cap) {
    slots_.reserve(p_.size());
    exact_.assign(p_.size(), 0);
    var_of_.assign(p_.size(), -1);
    std::map<std::string, int> vars;
    for (Label l = 0; l < p_.size(); ++l) {
      const Node& n = p_.at(l);
      slots_.emplace_back(slot_prec);
      if (!n.name.empty()) {
        auto [it, fresh] = vars.emplace(n.name, static_cast<int>(vars.size()));
        var_of_[l] = it->second;
      }
    }
    for (size_t i = 0; i < vars.size(); ++i) env_.emplace_back(slot_prec);
    env_exact_.assign(vars.size(), 0);
    scratch_.reserve(p_.size());
    for (Label l = 0; l < p_.size(); ++l) {
      const Node& n = p_.at(l);
      mpfr_prec_t prec = (n.kind == NodeKind::Binary || n.kind == NodeKind::Unary)
                             ? hooks_.op_precision(l)
                             : MPFR_PREC_MIN;
      scratch_.emplace_back(prec);
      if (n.kind == NodeKind::Const) {
        consts_.emplace(l, BigReal::from_decimal(n.literal, slot_prec));
      }
    }
  }

  /// Runs the program once. `inputs` holds one value per input declaration,
  /// in label order.
  void run(const std::vector<BigReal>& inputs) {
    inputs_ = &inputs;
    required_.clear();
    next_input_ = 0;
    iteration_ = 0;
    block(p_.top());
  }

  /// Value of the required variable when its directive last executed.
  const std::map<Label, BigReal>& required_values() const { return required_; }

 private:
  void produce(Label l, bool exact) {
    exact_[l] = exact;
    bool e = exact;
    hooks_.on_value(l, slots_[l], e);
    exact_[l] = e;
  }

  void expr(Label l) {
    const Node& n = p_.at(l);
    BigReal& out = slots_[l];
    switch (n.kind) {
      case NodeKind::Const:
        mpfr_set(out.get(), consts_.at(l).get(), MPFR_RNDN);
        produce(l, true);
        return;
      case NodeKind::Var:
        mpfr_set(out.get(), env_[var_of_[l]].get(), MPFR_RNDN);
        produce(l, env_exact_[var_of_[l]] != 0);
        return;
      case NodeKind::Binary: {
        Label a = n.kids[0], b = n.kids[1];
        expr(a);
        expr(b);
        mpfr_ptr r = scratch_[l].get();
        mpfr_srcptr x = slots_[a].get();
        mpfr_srcptr y = slots_[b].get();
        int t = 0;
        switch (n.bin) {
          case BinOp::Add: t = mpfr_add(r, x, y, MPFR_RNDN); break;
          case BinOp::Sub: t = mpfr_sub(r, x, y, MPFR_RNDN); break;
          case BinOp::Mul: t = mpfr_mul(r, x, y, MPFR_RNDN); break;
          case BinOp::Div:
            if (mpfr_zero_p(y)) throw MathDomainError(l, iteration_, "division by zero");
            t = mpfr_div(r, x, y, MPFR_RNDN);
            break;
        }
        int t2 = mpfr_set(out.get(), r, MPFR_RNDN);
        produce(l, t == 0 && t2 == 0 && exact_[a] && exact_[b]);
        return;
      }
      case NodeKind::Unary: {
        Label a = n.kids[0];
        expr(a);
        mpfr_ptr r = scratch_[l].get();
        mpfr_srcptr x = slots_[a].get();
        int t = 0;
        switch (n.fun) {
          case UnFun::Sqrt:
            if (mpfr_sgn(x) < 0) throw MathDomainError(l, iteration_, "sqrt of a negative value");
            t = mpfr_sqrt(r, x, MPFR_RNDN);
            break;
          case UnFun::Sin: t = mpfr_sin(r, x, MPFR_RNDN); break;
          case UnFun::Cos: t = mpfr_cos(r, x, MPFR_RNDN); break;
          case UnFun::Atan: t = mpfr_atan(r, x, MPFR_RNDN); break;
        }
        int t2 = mpfr_set(out.get(), r, MPFR_RNDN);
        produce(l, t == 0 && t2 == 0 && exact_[a]);
        return;
      }
      default:
        return;
    }
  }

  bool test(const Cond& c) {
    expr(c.lhs);
    expr(c.rhs);
    int cmp = mpfr_cmp(slots_[c.lhs].get(), slots_[c.rhs].get());
    switch (c.op) {
      case CmpOp::Lt: return cmp < 0;
      case CmpOp::Gt: return cmp > 0;
      case CmpOp::Le: return cmp <= 0;
      case CmpOp::Ge: return cmp >= 0;
      case CmpOp::Eq: return cmp == 0;
    }
    return false;
  }

  void block(const std::vector<Label>& body) {
    for (Label s : body) stmt(s);
  }

  void stmt(Label s) {
    const Node& n = p_.at(s);
    switch (n.kind) {
      case NodeKind::Input: {
        // mpfr_set is a macro that evaluates its source twice.
        const BigReal& in = inputs_->at(next_input_);
        ++next_input_;
        mpfr_set(slots_[s].get(), in.get(), MPFR_RNDN);
        produce(s, false);
        assign(s);
        return;
      }
      case NodeKind::Assign: {
        Label rhs = n.kids[0];
        expr(rhs);
        mpfr_set(slots_[s].get(), slots_[rhs].get(), MPFR_RNDN);
        produce(s, exact_[rhs] != 0);
        assign(s);
        return;
      }
      case NodeKind::Require: {
        hooks_.on_visit(s);
        auto it = required_.find(s);
        const BigReal& v = env_[var_of_[s]];
        if (it == required_.end()) {
          required_.emplace(s, v);
        } else {
          it->second = v;
        }
        return;
      }
      case NodeKind::If:
        hooks_.on_visit(s);
        if (test(n.cond)) {
          block(n.body);
        } else {
          block(n.orelse);
        }
        return;
      case NodeKind::While: {
        hooks_.on_visit(s);
        long saved = iteration_;
        long count = 0;
        while (test(n.cond)) {
          if (++count > iter_cap_) throw DivergenceError(s, iter_cap_);
          iteration_ = count;
          block(n.body);
        }
        iteration_ = saved;
        return;
      }
      default:
        return;
    }
  }

  void assign(Label def) {
    int v = var_of_[def];
    mpfr_set(env_[v].get(), slots_[def].get(), MPFR_RNDN);
    env_exact_[v] = exact_[def];
  }

  const Program& p_;
  Hooks& hooks_;
  long iter_cap_;
  std::vector<BigReal> slots_;
  std::vector<BigReal> scratch_;
  std::vector<char> exact_;
  std::vector<int> var_of_;
  std::vector<BigReal> env_;
  std::vector<char> env_exact_;
  std::map<Label, BigReal> consts_;
  std::map<Label, BigReal> required_;
  const std::vector<BigReal>* inputs_ = nullptr;
  size_t next_input_ = 0;
  long iteration_ = 0;
};

}  // namespace nsbtune::detail
