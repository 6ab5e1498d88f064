#include "nsbtune/emulator.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

#include "interpreter.hpp"
#include "nsbtune/range_analysis.hpp"

namespace nsbtune {

BigReal MixedValue::to_real() const {
  BigReal r(std::max<mpfr_prec_t>(nsb_used, MPFR_PREC_MIN));
  mpfr_set_z_2exp(r.get(), significand.get_mpz_t(), exponent, MPFR_RNDN);
  return r;
}

MixedValue round_to(const BigReal& x, int nsb) {
  if (nsb < 1) throw std::invalid_argument("round_to needs at least one bit");
  if (!x.is_finite()) throw std::invalid_argument("round_to of a non-finite value");
  MixedValue m;
  m.nsb_used = nsb;
  if (x.is_zero()) return m;
  mpz_class z;
  long e = mpfr_get_z_2exp(z.get_mpz_t(), x.get());
  const bool neg = sgn(z) < 0;
  z = abs(z);
  const size_t bits = mpz_sizeinbase(z.get_mpz_t(), 2);
  if (bits > static_cast<size_t>(nsb)) {
    const mp_bitcnt_t shift = bits - static_cast<size_t>(nsb);
    mpz_class q, r, half;
    mpz_fdiv_q_2exp(q.get_mpz_t(), z.get_mpz_t(), shift);
    mpz_fdiv_r_2exp(r.get_mpz_t(), z.get_mpz_t(), shift);
    mpz_setbit(half.get_mpz_t(), shift - 1);
    int c = cmp(r, half);
    if (c > 0 || (c == 0 && mpz_odd_p(q.get_mpz_t()))) ++q;
    e += static_cast<long>(shift);
    if (mpz_sizeinbase(q.get_mpz_t(), 2) > static_cast<size_t>(nsb)) {
      // Carried into a new leading bit: q == 2^nsb.
      q >>= 1;
      ++e;
    }
    z = q;
  }
  m.significand = neg ? mpz_class(-z) : z;
  m.exponent = e;
  return m;
}

namespace {

struct ReferenceHooks {
  std::vector<char>& visited;

  mpfr_prec_t op_precision(Label) const { return kReferencePrecision; }
  void on_value(Label l, BigReal&, bool&) { visited[l] = 1; }
  void on_visit(Label l) { visited[l] = 1; }
};

struct EmulationHooks {
  const Program& program;
  const std::vector<char>* visited;
  RoundingSites sites;
  mpfr_prec_t slot_prec;
  std::vector<int> nsb;
  std::map<Label, BigReal> consts;

  EmulationHooks(const Program& p, const Tuning& t, const std::vector<char>* vis,
                 RoundingSites s)
      : program(p), visited(vis), sites(s), nsb(p.size(), -1) {
    int top = 0;
    for (Label l : p.tuned_labels()) {
      nsb[l] = t.at(l);
      top = std::max(top, nsb[l]);
    }
    slot_prec = std::max<mpfr_prec_t>(kWorkPrecision, top + 8);
    for (Label l : p.tuned_labels()) {
      const Node& n = p.at(l);
      if (n.kind == NodeKind::Const) {
        consts.emplace(l, BigReal::from_decimal(n.literal, std::max(nsb[l], 1)));
      }
    }
  }

  mpfr_prec_t op_precision(Label l) const {
    return nsb[l] < 0 ? slot_prec : std::max<mpfr_prec_t>(nsb[l], MPFR_PREC_MIN);
  }

  void on_visit(Label) {}

  void on_value(Label l, BigReal& v, bool& exact) {
    int bits = nsb[l];
    if (bits < 0) return;
    const Node& n = program.at(l);
    const bool read = n.kind == NodeKind::Const || n.kind == NodeKind::Var;
    if (sites == RoundingSites::WritesOnly && read) return;
    if (bits == 0) {
      if (!visited || !(*visited)[l]) throw ReachedZeroNsb(l);
      bits = 1;
    }
    if (n.kind == NodeKind::Const) {
      const BigReal& c = consts.at(l);
      if (c.precision() >= bits) {
        mpfr_set(v.get(), c.get(), MPFR_RNDN);
        return;
      }
    }
    if (v.is_zero() || mpfr_min_prec(v.get()) <= bits) return;
    MixedValue m = round_to(v, bits);
    mpfr_set_z_2exp(v.get(), m.significand.get_mpz_t(), m.exponent, MPFR_RNDN);
    exact = false;
  }
};

std::map<std::string, BigReal> by_name(const Program& program,
                                       const std::map<Label, BigReal>& values) {
  std::map<std::string, BigReal> out;
  for (const auto& [l, v] : values) out.emplace(program.at(l).name, v);
  return out;
}

}  // namespace

ReferenceRun reference_run(const Program& program, const std::vector<BigReal>& inputs,
                           long iter_cap) {
  ReferenceRun run;
  run.visited.assign(program.size(), 0);
  ReferenceHooks hooks{run.visited};
  detail::Interpreter<ReferenceHooks> interp(program, hooks, kReferencePrecision, iter_cap);
  interp.run(inputs);
  run.required = by_name(program, interp.required_values());
  return run;
}

std::vector<ReferenceRun> reference_runs(const Program& program, int trials, std::uint64_t seed,
                                         long iter_cap) {
  std::vector<ReferenceRun> out;
  for (const auto& row : sample_inputs(program, trials, seed)) {
    out.push_back(reference_run(program, row, iter_cap));
  }
  return out;
}

std::map<std::string, BigReal> emulate(const Program& program, const Tuning& tuning,
                                       const std::vector<BigReal>& inputs,
                                       const EmulationOptions& options,
                                       const std::vector<char>* visited) {
  EmulationHooks hooks(program, tuning, visited, options.sites);
  detail::Interpreter<EmulationHooks> interp(program, hooks, hooks.slot_prec, options.iter_cap);
  interp.run(inputs);
  return by_name(program, interp.required_values());
}

ValidationReport validate(const Program& program, const Tuning& tuning, const std::string& var,
                          int nsb, int trials, std::uint64_t seed,
                          const EmulationOptions& options,
                          const std::vector<ReferenceRun>* cache) {
  if (!program.requirement(var)) throw Error("no require_nsb directive on '" + var + "'");
  std::vector<std::vector<BigReal>> inputs = sample_inputs(program, trials, seed);
  std::vector<ReferenceRun> fresh;
  if (!cache) {
    for (const auto& row : inputs) fresh.push_back(reference_run(program, row, options.iter_cap));
    cache = &fresh;
  }
  if (cache->size() != inputs.size()) throw Error("reference cache does not match the trials");

  ValidationReport rep;
  rep.target_var = var;
  rep.nsb_required = nsb;
  rep.trials = static_cast<int>(inputs.size());
  rep.max_err = BigReal(0.0, 64);
  rep.pass = true;
  for (size_t i = 0; i < inputs.size(); ++i) {
    const ReferenceRun& ref = (*cache)[i];
    auto it = ref.required.find(var);
    if (it == ref.required.end()) throw Error("require_nsb on '" + var + "' was never executed");
    TrialRow row;
    row.reference = it->second;
    bool ran = true;
    try {
      std::map<std::string, BigReal> emu =
          emulate(program, tuning, inputs[i], options, &ref.visited);
      auto e = emu.find(var);
      if (e == emu.end()) {
        ran = false;
      } else {
        row.emulated = e->second;
      }
    } catch (const DivergenceError&) {
      ran = false;
    } catch (const MathDomainError&) {
      ran = false;
    }
    if (ran) {
      mpfr_prec_t wide = std::max(row.reference.precision(), row.emulated.precision()) + 1024;
      row.error = BigReal(wide);
      mpfr_sub(row.error.get(), row.emulated.get(), row.reference.get(), MPFR_RNDN);
      mpfr_abs(row.error.get(), row.error.get(), MPFR_RNDN);
    } else {
      // Control flow left the reference path.
      mpfr_set_nan(row.emulated.get());
      row.error = BigReal(0.0, 8);
      mpfr_set_inf(row.error.get(), 1);
    }
    row.bound = BigReal(0.0, 8);
    mpfr_set_ui_2exp(row.bound.get(), 1, ufp_of(row.reference) - nsb + 1, MPFR_RNDN);
    row.pass = row.error <= row.bound;
    rep.pass = rep.pass && row.pass;
    if (row.error > rep.max_err) rep.max_err = row.error;
    if (i == 0 || row.bound < rep.bound) rep.bound = row.bound;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::string ValidationReport::to_json() const {
  nlohmann::ordered_json j;
  j["program"] = program;
  j["var"] = target_var;
  j["nsb_required"] = nsb_required;
  j["trials"] = trials;
  j["max_err"] = max_err.to_string(20);
  j["bound"] = bound.to_string(20);
  j["pass"] = pass;
  return j.dump(2);
}

}  // namespace nsbtune
