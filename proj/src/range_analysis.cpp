#include "nsbtune/range_analysis.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "interpreter.hpp"

namespace nsbtune {

int ufp_of(double x) {
  if (x == 0.0 || !std::isfinite(x)) return 0;
  return std::ilogb(x);
}

int ufp_of(const BigReal& x) { return x.ufp(); }

void RangeInfo::observe(const BigReal& v, bool v_exact) {
  if (!reached) {
    mpfr_set_prec(max_abs.get(), v.precision());
    mpfr_set_prec(min_abs.get(), v.precision());
    mpfr_abs(max_abs.get(), v.get(), MPFR_RNDN);
    mpfr_abs(min_abs.get(), v.get(), MPFR_RNDN);
  } else {
    if (mpfr_cmpabs(v.get(), max_abs.get()) > 0) mpfr_abs(max_abs.get(), v.get(), MPFR_RNDN);
    if (mpfr_cmpabs(v.get(), min_abs.get()) < 0) mpfr_abs(min_abs.get(), v.get(), MPFR_RNDN);
  }
  reached = true;
  exact = exact && v_exact;
  if (!v.is_zero()) always_zero = false;
}

void RangeInfo::finalize() {
  if (!reached || always_zero) {
    ufp = 0;
    lfp = 0;
    return;
  }
  ufp = max_abs.ufp();
  if (min_abs.is_zero()) {
    lfp.reset();
  } else {
    lfp = min_abs.ufp();
  }
}

void RangeMap::merge(const RangeMap& other) {
  if (entries_.empty()) {
    entries_ = other.entries_;
    return;
  }
  for (size_t i = 0; i < entries_.size(); ++i) {
    RangeInfo& a = entries_[i];
    const RangeInfo& b = other.entries_.at(i);
    if (!b.reached) continue;
    if (!a.reached) {
      a = b;
      continue;
    }
    if (b.max_abs > a.max_abs) a.max_abs = b.max_abs;
    if (b.min_abs < a.min_abs) a.min_abs = b.min_abs;
    a.exact = a.exact && b.exact;
    a.always_zero = a.always_zero && b.always_zero;
    a.finalize();
  }
}

std::string RangeMap::dump() const {
  std::ostringstream out;
  out << "# label max_abs min_abs ufp lfp flags deriv_ufp\n";
  for (size_t i = 0; i < entries_.size(); ++i) {
    const RangeInfo& r = entries_[i];
    std::string flags;
    if (r.always_zero) flags += 'Z';
    if (r.exact) flags += 'E';
    if (!r.reached) flags += 'U';
    if (flags.empty()) flags = "-";
    out << i << ' ' << r.max_abs.to_string(45) << ' ' << r.min_abs.to_string(45) << ' '
        << r.ufp << ' ' << (r.lfp ? std::to_string(*r.lfp) : "-") << ' ' << flags << ' '
        << (r.deriv_ufp ? std::to_string(*r.deriv_ufp) : "-") << '\n';
  }
  return out.str();
}

RangeMap RangeMap::load(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<RangeInfo> entries;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    size_t label;
    std::string mx, mn, lfp, flags, kf;
    RangeInfo r;
    if (!(row >> label >> mx >> mn >> r.ufp >> lfp >> flags >> kf)) {
      throw Error("malformed range record: " + line);
    }
    if (label != entries.size()) throw Error("range records out of order at label " + std::to_string(label));
    r.max_abs = BigReal::from_decimal(mx);
    r.min_abs = BigReal::from_decimal(mn);
    r.lfp = lfp == "-" ? std::nullopt : std::optional<int>(std::stoi(lfp));
    r.always_zero = flags.find('Z') != std::string::npos;
    r.exact = flags.find('E') != std::string::npos;
    r.reached = flags.find('U') == std::string::npos;
    r.deriv_ufp = kf == "-" ? std::nullopt : std::optional<int>(std::stoi(kf));
    entries.push_back(std::move(r));
  }
  RangeMap m;
  m.entries_ = std::move(entries);
  return m;
}

std::vector<std::vector<BigReal>> sample_inputs(const Program& program, int trials,
                                                std::uint64_t seed) {
  std::vector<Label> decls = program.input_labels();
  if (decls.empty()) return {{}};
  std::mt19937_64 rng(seed);
  std::vector<std::vector<BigReal>> out;
  out.reserve(static_cast<size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    std::vector<BigReal> row;
    for (Label l : decls) {
      const Node& n = program.at(l);
      BigReal lo = BigReal::from_decimal(n.lo);
      BigReal hi = BigReal::from_decimal(n.hi);
      // 53 uniform bits; the platform-specific std distributions are avoided
      // so samples are reproducible everywhere.
      double u = static_cast<double>(rng() >> 11) * 0x1p-53;
      BigReal width = sub(hi, lo, kReferencePrecision);
      BigReal v = add(lo, mul(width, BigReal(u, 53), kReferencePrecision), kReferencePrecision);
      row.push_back(std::move(v));
    }
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

struct RangeHooks {
  const Program& program;
  std::vector<RangeInfo>& info;

  mpfr_prec_t op_precision(Label) const { return kReferencePrecision; }
  void on_value(Label l, BigReal& v, bool& exact) { info[l].observe(v, exact); }
  void on_visit(Label l) { info[l].reached = true; }
};

/// Largest |f'(x)| for |x| in [lo, hi]; +inf when unbounded.
double max_derivative(UnFun fn, double lo, double hi) {
  constexpr double pi = std::numbers::pi;
  auto contains = [&](double offset) {
    // Is some offset + k*pi inside [lo, hi]?
    double k = std::ceil((lo - offset) / pi);
    return offset + k * pi <= hi;
  };
  switch (fn) {
    case UnFun::Sqrt:
      return lo > 0 ? 0.5 / std::sqrt(lo) : INFINITY;
    case UnFun::Sin:  // |cos|
      return contains(0.0) ? 1.0 : std::max(std::abs(std::cos(lo)), std::abs(std::cos(hi)));
    case UnFun::Cos:  // |sin|
      return contains(pi / 2) ? 1.0 : std::max(std::abs(std::sin(lo)), std::abs(std::sin(hi)));
    case UnFun::Atan:
      return 1.0 / (1.0 + lo * lo);
  }
  return INFINITY;
}

}  // namespace

RangeMap analyze_inputs(const Program& program,
                        const std::vector<std::vector<BigReal>>& inputs, long iter_cap) {
  RangeMap map(program.size());
  std::vector<RangeInfo> info(program.size());
  RangeHooks hooks{program, info};
  detail::Interpreter<RangeHooks> interp(program, hooks, kReferencePrecision, iter_cap);
  for (const auto& row : inputs) interp.run(row);
  for (Label l = 0; l < program.size(); ++l) {
    RangeInfo& r = info[l];
    r.finalize();
    map.at(l) = r;
  }
  for (Label l = 0; l < program.size(); ++l) {
    const Node& n = program.at(l);
    if (n.kind != NodeKind::Unary || !map.at(l).reached) continue;
    const RangeInfo& arg = map.at(n.kids[0]);
    double lo = arg.min_abs.to_double();
    double hi = arg.max_abs.to_double();
    // Pad the interval so double rounding of the endpoints cannot hide a
    // larger derivative.
    double d = max_derivative(n.fun, lo * (1 - 1e-12), hi * (1 + 1e-12));
    if (std::isfinite(d)) {
      map.at(l).deriv_ufp = ufp_of(d * (1 + 1e-12));
    }
  }
  return map;
}

RangeMap analyze(const Program& program, int trials, std::uint64_t seed, long iter_cap) {
  return analyze_inputs(program, sample_inputs(program, trials, seed), iter_cap);
}

}  // namespace nsbtune
