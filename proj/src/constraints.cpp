#include "nsbtune/constraints.hpp"

#include <algorithm>
#include <regex>
#include <set>
#include <sstream>

namespace nsbtune {

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::Requirement: return "requirement";
    case Origin::ControlGuard: return "control";
    case Origin::Operand: return "operand";
    case Origin::Assignment: return "assignment";
    case Origin::ReachingDef: return "reaching";
    case Origin::LoopCarried: return "loop";
    case Origin::Uniform: return "uniform";
  }
  return "?";
}

bool Constraint::holds(const Tuning& t) const {
  switch (kind) {
    case ConstraintKind::LowerBound: return t.at(v) >= c;
    case ConstraintKind::Difference: return t.at(v) >= t.at(w) + c;
    case ConstraintKind::Equal: return t.at(v) == t.at(w);
  }
  return false;
}

std::string Constraint::to_string() const {
  std::string s = "T" + std::to_string(v);
  switch (kind) {
    case ConstraintKind::LowerBound:
      return s + " >= " + std::to_string(c);
    case ConstraintKind::Equal:
      return s + " == T" + std::to_string(w);
    case ConstraintKind::Difference:
      s += " >= T" + std::to_string(w);
      if (c > 0) s += " + " + std::to_string(c);
      if (c < 0) s += " - " + std::to_string(-c);
      return s;
  }
  return s;
}

std::string ConstraintSystem::dump() const {
  std::string out;
  for (const Constraint& c : constraints) out += c.to_string() + "\n";
  return out;
}

std::vector<Constraint> parse_constraints(const std::string& text) {
  static const std::regex lower(R"(\s*T(\d+)\s*>=\s*(-?\d+)\s*)");
  static const std::regex diff(R"(\s*T(\d+)\s*>=\s*T(\d+)\s*(?:([+-])\s*(\d+))?\s*)");
  static const std::regex equal(R"(\s*T(\d+)\s*==\s*T(\d+)\s*)");
  std::vector<Constraint> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::smatch m;
    Constraint c;
    if (std::regex_match(line, m, lower)) {
      c.kind = ConstraintKind::LowerBound;
      c.v = static_cast<Label>(std::stoul(m[1]));
      c.c = std::stoi(m[2]);
    } else if (std::regex_match(line, m, diff)) {
      c.kind = ConstraintKind::Difference;
      c.v = static_cast<Label>(std::stoul(m[1]));
      c.w = static_cast<Label>(std::stoul(m[2]));
      if (m[3].matched) c.c = (m[3] == "-" ? -1 : 1) * std::stoi(m[4]);
    } else if (std::regex_match(line, m, equal)) {
      c.kind = ConstraintKind::Equal;
      c.v = static_cast<Label>(std::stoul(m[1]));
      c.w = static_cast<Label>(std::stoul(m[2]));
    } else {
      throw Error("malformed constraint: " + line);
    }
    out.push_back(c);
  }
  return out;
}

int carry_bit(const ErrInfo& x, const ErrInfo& y) {
  if (x.exact() || y.exact()) return 0;
  if (*x.ulp_e >= *y.ufp_e || *y.ulp_e >= *x.ufp_e) return 0;
  return 1;
}

CarryPolicy pessimistic_policy(const Program& program) {
  CarryPolicy p;
  for (Label l : program.op_labels()) p[l] = 1;
  return p;
}

namespace {

class Generator {
 public:
  Generator(const Program& p, const RangeMap& r, const DefUseMap& d, const CarryPolicy& pol,
            int slack)
      : p_(p), r_(r), d_(d), pol_(pol), slack_(slack) {}

  ConstraintSystem run() {
    if (r_.size() < p_.size()) throw MissingRange(static_cast<Label>(r_.size()));
    sys_.vars = p_.tuned_labels();
    sys_.op_labels = p_.op_labels();
    for (const auto& [name, labels] : d_.occurrences) {
      for (Label l : labels) {
        if (p_.is_tuned(l)) sys_.var_occurrences[name].push_back(l);
      }
    }
    int guard = 0;
    for (Label l : p_.require_labels()) {
      const Node& n = p_.at(l);
      sys_.requirements.push_back({n.name, l, n.nsb, d_.require_defs.at(l)});
      guard = std::max(guard, n.nsb + slack_);
    }
    for (Label l = 0; l < p_.size(); ++l) {
      const Node& n = p_.at(l);
      switch (n.kind) {
        case NodeKind::Binary:
          if (!n.control && reached(l)) binary(n);
          break;
        case NodeKind::Unary:
          if (!n.control && reached(l)) unary(n);
          break;
        case NodeKind::Assign:
          if (reached(l)) diff(n.kids[0], l, 0, Origin::Assignment, l);
          break;
        case NodeKind::Var:
          if (!reached(l)) break;
          for (Label def : d_.reaching.at(l)) {
            if (n.control) {
              if (guard > 0) lower(def, guard, Origin::ControlGuard, l);
            } else {
              Origin o = d_.loop_carried(def, l) ? Origin::LoopCarried : Origin::ReachingDef;
              diff(def, l, 0, o, l);
            }
          }
          break;
        case NodeKind::Require:
          for (Label def : d_.require_defs.at(l)) {
            lower(def, n.nsb + slack_, Origin::Requirement, l);
          }
          break;
        default:
          break;
      }
    }
    return std::move(sys_);
  }

 private:
  bool reached(Label l) const { return r_.at(l).reached; }
  int u(Label l) const { return r_.at(l).ufp; }

  int xi(const Node& op) const {
    for (Label k : op.kids) {
      if (p_.at(k).kind == NodeKind::Const) return 0;
    }
    auto it = pol_.find(op.label);
    return it == pol_.end() ? 1 : it->second;
  }

  void lower(Label v, int c, Origin o, Label site) {
    sys_.constraints.push_back({ConstraintKind::LowerBound, v, 0, c, o, site, false});
  }
  void diff(Label v, Label w, int c, Origin o, Label site, bool carry = false) {
    sys_.constraints.push_back({ConstraintKind::Difference, v, w, c, o, site, carry});
  }

  int lfp(Label y) const {
    const RangeInfo& r = r_.at(y);
    if (r.always_zero || !r.lfp) throw DivisorMayVanish(y, p_.at(y).pos);
    return *r.lfp;
  }

  void binary(const Node& n) {
    Label z = n.label, x = n.kids[0], y = n.kids[1];
    int carry = xi(n);
    switch (n.bin) {
      case BinOp::Add:
      case BinOp::Sub:
        diff(x, z, u(x) - u(z) + carry, Origin::Operand, z, true);
        diff(y, z, u(y) - u(z) + carry, Origin::Operand, z, true);
        break;
      case BinOp::Mul: {
        int c = u(x) + u(y) + 1 - u(z) + carry;
        diff(x, z, c, Origin::Operand, z, true);
        diff(y, z, c, Origin::Operand, z, true);
        break;
      }
      case BinOp::Div: {
        int ly = lfp(y);
        diff(x, z, u(x) - ly - u(z) + carry, Origin::Operand, z, true);
        diff(y, z, u(x) + u(y) - 2 * ly - u(z) + carry, Origin::Operand, z, true);
        break;
      }
    }
  }

  void unary(const Node& n) {
    Label z = n.label, x = n.kids[0];
    const auto& k = r_.at(z).deriv_ufp;
    if (!k) throw DivisorMayVanish(x, p_.at(x).pos);
    diff(x, z, u(x) + *k - u(z) + 1, Origin::Operand, z);
  }

  const Program& p_;
  const RangeMap& r_;
  const DefUseMap& d_;
  const CarryPolicy& pol_;
  int slack_;
  ConstraintSystem sys_;
};

}  // namespace

ConstraintSystem generate(const Program& program, const RangeMap& ranges,
                          const DefUseMap& defuse, const CarryPolicy& policy,
                          int requirement_slack) {
  return Generator(program, ranges, defuse, policy, requirement_slack).run();
}

ConstraintSystem uniformize(ConstraintSystem system) {
  std::set<std::pair<Label, Label>> present;
  for (const Constraint& c : system.constraints) {
    if (c.kind == ConstraintKind::Equal) present.insert(std::minmax(c.v, c.w));
  }
  for (const auto& [name, labels] : system.var_occurrences) {
    std::vector<Label> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 1; i < sorted.size(); ++i) {
      auto key = std::minmax(sorted[i - 1], sorted[i]);
      if (!present.insert(key).second) continue;
      system.constraints.push_back(
          {ConstraintKind::Equal, sorted[i - 1], sorted[i], 0, Origin::Uniform, sorted[i - 1], false});
    }
  }
  system.uniform = true;
  return system;
}

std::map<Label, ErrInfo> error_info(const Program& program, const RangeMap& ranges,
                                    const DefUseMap& defuse, const Tuning& tuning) {
  std::map<Label, ErrInfo> info;
  std::map<Label, std::vector<Label>> inputs;
  for (Label l : program.tuned_labels()) {
    const Node& n = program.at(l);
    if (n.kind == NodeKind::Const || !ranges.at(l).reached) {
      info[l] = ErrInfo::exact_value();
      continue;
    }
    int own = ranges.at(l).ufp - tuning.at(l);
    info[l] = {own, own};
    switch (n.kind) {
      case NodeKind::Binary:
      case NodeKind::Unary:
      case NodeKind::Assign:
        inputs[l] = n.kids;
        break;
      case NodeKind::Var:
        inputs[l] = defuse.reaching.at(l);
        break;
      default:
        break;
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [l, srcs] : inputs) {
      ErrInfo& e = info[l];
      for (Label s : srcs) {
        const ErrInfo& se = info[s];
        if (se.exact()) continue;
        if (*se.ulp_e < *e.ulp_e) {
          e.ulp_e = se.ulp_e;
          changed = true;
        }
      }
    }
  }
  return info;
}

CarryPolicy refine_policy(const Program& program, const CarryPolicy& current,
                          const std::map<Label, ErrInfo>& errors) {
  CarryPolicy next = current;
  for (auto& [l, bit] : next) {
    const Node& n = program.at(l);
    if (n.kind != NodeKind::Binary || bit == 0) continue;
    bit = carry_bit(errors.at(n.kids[0]), errors.at(n.kids[1]));
  }
  return next;
}

}  // namespace nsbtune
