#include "nsbtune/formats.hpp"

#include <algorithm>

namespace nsbtune {

int significand_bits(IeeeFormat f) {
  switch (f) {
    case IeeeFormat::FP16: return 11;
    case IeeeFormat::FP32: return 24;
    case IeeeFormat::FP64: return 53;
    case IeeeFormat::FP128: return 113;
  }
  return 0;
}

std::string_view to_string(IeeeFormat f) {
  switch (f) {
    case IeeeFormat::FP16: return "FP16";
    case IeeeFormat::FP32: return "FP32";
    case IeeeFormat::FP64: return "FP64";
    case IeeeFormat::FP128: return "FP128";
  }
  return "?";
}

IeeeFormat to_format(int nsb) {
  int bits = std::max(nsb, 1);
  for (IeeeFormat f : kFormats) {
    if (significand_bits(f) >= bits) return f;
  }
  throw Unrepresentable(nsb);
}

namespace {

double savings(const Tuning& t, const std::vector<Label>& labels) {
  if (labels.empty()) return 0.0;
  long sum = 0;
  for (Label l : labels) sum += t.at(l);
  return 100.0 * (1.0 - static_cast<double>(sum) / (kBaselineBits * static_cast<double>(labels.size())));
}

}  // namespace

Summary summarize(const Tuning& tuning, const Program& program) {
  Summary s;
  std::vector<Label> defs = program.def_labels();
  for (Label l : defs) {
    int v = tuning.at(l);
    s.counts.count[static_cast<size_t>(to_format(v))]++;
  }
  for (const auto& [l, v] : tuning.nsb) s.counts.mp = std::max(s.counts.mp, v);
  s.savings.var_savings_pct = savings(tuning, defs);
  s.savings.op_savings_pct = savings(tuning, program.op_labels());
  return s;
}

}  // namespace nsbtune
