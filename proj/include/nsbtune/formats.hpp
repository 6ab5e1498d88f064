// IEEE 754 format buckets and storage/operator savings of a tuning.

#pragma once

#include <array>
#include <string_view>

#include "nsbtune/constraints.hpp"

namespace nsbtune {

enum class IeeeFormat { FP16, FP32, FP64, FP128 };

inline constexpr std::array<IeeeFormat, 4> kFormats = {IeeeFormat::FP16, IeeeFormat::FP32,
                                                       IeeeFormat::FP64, IeeeFormat::FP128};

/// Significand width including the implicit bit.
int significand_bits(IeeeFormat f);
std::string_view to_string(IeeeFormat f);

/// Smallest format holding max(nsb, 1) bits. Throws Unrepresentable above 113.
IeeeFormat to_format(int nsb);

inline constexpr int kBaselineBits = 53;

struct FormatCounts {
  std::array<int, 4> count{};
  /// Largest nsb over the whole tuning.
  int mp = 0;

  int operator[](IeeeFormat f) const { return count[static_cast<size_t>(f)]; }
};

struct SavingsReport {
  double var_savings_pct = 0;
  double op_savings_pct = 0;
  int baseline_bits = kBaselineBits;
};

struct Summary {
  FormatCounts counts;
  SavingsReport savings;
};

/// Counts and variable savings range over definition labels (assignments
/// and inputs); operator savings over operator labels.
Summary summarize(const Tuning& tuning, const Program& program);

}  // namespace nsbtune
