// Label lookups shared by the unit tests.

#pragma once

#include <string>
#include <vector>

#include "nsbtune/bench.hpp"
#include "nsbtune/frontend.hpp"

namespace nsbtune::test {

inline std::vector<Label> defs_of(const Program& p, const std::string& name) {
  std::vector<Label> out;
  for (const Node& n : p.nodes()) {
    if ((n.kind == NodeKind::Assign || n.kind == NodeKind::Input) && n.name == name) {
      out.push_back(n.label);
    }
  }
  return out;
}

inline std::vector<Label> reads_of(const Program& p, const std::string& name) {
  std::vector<Label> out;
  for (const Node& n : p.nodes()) {
    if (n.kind == NodeKind::Var && n.name == name) out.push_back(n.label);
  }
  return out;
}

inline std::vector<Label> consts_of(const Program& p, const std::string& literal) {
  std::vector<Label> out;
  for (const Node& n : p.nodes()) {
    if (n.kind == NodeKind::Const && n.literal == literal) out.push_back(n.label);
  }
  return out;
}

inline Label first_op(const Program& p) {
  for (const Node& n : p.nodes()) {
    if (p.is_op(n.label)) return n.label;
  }
  return 0;
}

inline Program pid() { return parse(find_case("pid").source); }

}  // namespace nsbtune::test
