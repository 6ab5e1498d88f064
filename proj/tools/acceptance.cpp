// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nsbtune/bench.hpp"
#include "nsbtune/emulator.hpp"
#include "oracle.hpp"

using namespace nsbtune;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> problems;

  void fail(const std::string& why) {
    pass = false;
    problems.push_back(why);
  }
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o, double seconds) {
  std::printf("criterion %d %-28s %s  %s (%.1fs)\n", id, name.c_str(), o.pass ? "PASS" : "FAIL",
              o.summary.c_str(), seconds);
  size_t shown = 0;
  for (const std::string& p : o.problems) {
    if (++shown > 12) {
      std::printf("    ... %zu more\n", o.problems.size() - 12);
      break;
    }
    std::printf("    %s\n", p.c_str());
  }
  if (!o.pass) ++failures;
}

template <class F>
void run(int id, const std::string& name, F&& f) {
  auto start = std::chrono::steady_clock::now();
  Outcome o = f();
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(id, name, o, s);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

using Key = std::tuple<std::string, int, Mode, bool>;

std::map<Key, const JobResult*> index(const std::vector<JobResult>& results) {
  std::map<Key, const JobResult*> out;
  for (const JobResult& r : results) {
    out[{r.job.case_name, r.job.requirement, r.job.mode, r.job.uniform}] = &r;
  }
  return out;
}

std::string label(const Key& k) {
  return std::get<0>(k) + " req " + std::to_string(std::get<1>(k)) + " " +
         std::string(to_string(std::get<2>(k))) + (std::get<3>(k) ? " uniform" : " mixed");
}

bool has_inputs(const std::string& name) {
  return !parse(find_case(name).source).input_labels().empty();
}

const std::vector<std::string> kPrograms = {"accelerometer", "odometry", "pendulum",
                                            "pid",           "runge_kutta", "trapezoid"};

// Reference MP values at requirements 8, 12, 16, 32.
const std::map<std::string, std::array<int, 4>> kReferenceMp = {
    {"accelerometer", {9, 13, 17, 25}}, {"odometry", {13, 17, 21, 37}},
    {"pendulum", {17, 21, 25, 33}},     {"pid", {12, 16, 20, 28}},
    {"runge_kutta", {10, 14, 18, 26}},  {"trapezoid", {14, 18, 22, 30}}};

// Reference PID savings, mixed and uniform, at 8, 16, 24, 32.
const std::array<std::pair<double, double>, 4> kPidSavings = {
    {{86, 85}, {73, 73}, {61, 60}, {48, 48}}};

}  // namespace

int main() {
  BenchOptions grid;
  grid.requirements = {8, 12, 16, 24, 32, 48};
  grid.uniform_both = true;
  grid.trials = 100;
  grid.jobs = 4;
  auto grid_start = std::chrono::steady_clock::now();
  std::vector<JobResult> results = run_bench(grid);
  const double grid_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - grid_start).count();
  auto by = index(results);
  std::map<std::string, int> slack;
  for (const JobResult& r : results) slack[r.job.case_name] = r.loop_slack;

  run(1, "soundness", [&] {
    Outcome o;
    int n = 0, ok = 0;
    for (const JobResult& r : results) {
      if (r.job.requirement > 32) continue;
      ++n;
      Key k{r.job.case_name, r.job.requirement, r.job.mode, r.job.uniform};
      if (!r.ok()) {
        o.fail(label(k) + ": " + r.status);
      } else if (!r.validation) {
        o.fail(label(k) + ": not validated");
      } else if (has_inputs(r.job.case_name) && r.validation->trials < 100) {
        o.fail(label(k) + ": too few trials");
      } else if (!r.validation->pass) {
        o.fail(label(k) + ": max_err " + r.validation->max_err.to_string(6) + " > bound " +
               r.validation->bound.to_string(6));
      } else {
        ++ok;
      }
    }
    std::string s;
    for (const auto& [name, k] : slack) s += " " + name + "=" + std::to_string(k);
    o.summary = std::to_string(ok) + "/" + std::to_string(n) + " jobs validated in " +
                fmt("%.1f", grid_seconds) + "s of grid time; slack" + s;
    return o;
  });

  run(2, "solver optimality", [] {
    Outcome o;
    std::mt19937_64 rng(2024);
    int exact = 0, cyclic = 0, total = 0;
    while (exact < 200) {
      ConstraintSystem s = oracle::random_system(rng, 6, 6);
      ++total;
      std::string why = oracle::check(s, 12);
      if (!why.empty()) o.fail(why + "\n" + s.dump());
      if (oracle::exhaustive(s, 12).feasible) {
        ++exact;
      } else {
        ++cyclic;
      }
    }
    o.summary = std::to_string(total) + " systems, " + std::to_string(exact) +
                " compared exactly, " + std::to_string(cyclic) + " infeasible in the box";
    return o;
  });

  run(3, "MP reproduction", [&] {
    BenchOptions mp = grid;
    mp.requirements = {8, 12, 16, 32};
    mp.modes = {Mode::Pi};
    mp.objectives = {Objective::MinMax};
    mp.uniform_both = false;
    mp.validate = false;
    mp.loop_slack.reset();
    // Slack as calibrated on the full grid.
    std::vector<JobResult> rows;
    for (const std::string& name : kPrograms) {
      mp.cases = {name};
      mp.loop_slack = slack.at(name);
      for (JobResult& r : run_bench(mp)) rows.push_back(std::move(r));
    }
    Outcome o;
    std::ostringstream got;
    const std::array<int, 4> reqs = {8, 12, 16, 32};
    for (const std::string& name : kPrograms) {
      const int tol = name == "pid" ? 2 : 3;
      int prev = -1;
      got << " " << name << "=";
      for (size_t i = 0; i < reqs.size(); ++i) {
        const JobResult* r = nullptr;
        for (const JobResult& x : rows) {
          if (x.job.case_name == name && x.job.requirement == reqs[i]) r = &x;
        }
        if (!r || !r->ok()) {
          o.fail(name + " req " + std::to_string(reqs[i]) + ": no tuning");
          continue;
        }
        const int m = r->tune->stats.mp, want = kReferenceMp.at(name)[i];
        got << (i ? "/" : "") << m;
        if (std::abs(m - want) > tol) {
          o.fail(name + " req " + std::to_string(reqs[i]) + ": MP " + std::to_string(m) +
                 " vs " + std::to_string(want) + " (tolerance " + std::to_string(tol) + ")");
        }
        if (m <= prev) o.fail(name + ": MP not strictly increasing at " + std::to_string(reqs[i]));
        prev = m;
      }
    }
    o.summary = "MP at 8/12/16/32:" + got.str();
    return o;
  });

  run(4, "operator bit reduction", [&] {
    Outcome o;
    std::ostringstream got;
    for (const std::string& name : kPrograms) {
      double prev = 101;
      got << " " << name << "=";
      for (int req : grid.requirements) {
        const JobResult* r = by.at({name, req, Mode::Pi, false});
        if (!r->ok()) {
          o.fail(name + " req " + std::to_string(req) + ": " + r->status);
          continue;
        }
        double v = r->summary.savings.op_savings_pct;
        if (req == 8 || req == 48) got << (req == 48 ? "/" : "") << fmt("%.1f", v);
        if (req == 8 && v < 70) o.fail(name + " req 8: " + fmt("%.2f", v) + "% < 70%");
        if (req == 48 && v < 5) o.fail(name + " req 48: " + fmt("%.2f", v) + "% < 5%");
        if (v >= prev) o.fail(name + ": not strictly decreasing at " + std::to_string(req));
        prev = v;
      }
    }
    o.summary = "pi mixed at 8/48:" + got.str();
    return o;
  });

  run(5, "mixed vs uniform savings", [&] {
    Outcome o;
    const std::array<int, 4> reqs = {8, 16, 24, 32};
    std::ostringstream pid;
    for (Mode mode : {Mode::Ilp, Mode::Pi}) {
      for (const std::string& name : kPrograms) {
        double prev_m = 101, prev_u = 101;
        for (size_t i = 0; i < reqs.size(); ++i) {
          const JobResult* m = by.at({name, reqs[i], mode, false});
          const JobResult* u = by.at({name, reqs[i], mode, true});
          std::string where = name + " req " + std::to_string(reqs[i]) + " " +
                              std::string(to_string(mode));
          if (!m->ok() || !u->ok()) {
            o.fail(where + ": missing tuning");
            continue;
          }
          double vm = m->summary.savings.var_savings_pct, vu = u->summary.savings.var_savings_pct;
          if (vu > vm) o.fail(where + ": uniform " + fmt("%.2f", vu) + " > mixed " + fmt("%.2f", vm));
          if (vm >= prev_m || vu >= prev_u) o.fail(where + ": savings not decreasing");
          prev_m = vm;
          prev_u = vu;
          if (name == "pid" && mode == Mode::Pi) {
            auto [pm, pu] = kPidSavings[i];
            pid << " " << reqs[i] << ":" << fmt("%.1f", vm) << "/" << fmt("%.1f", vu);
            if (std::abs(vm - pm) > 10) {
              o.fail(where + ": mixed " + fmt("%.2f", vm) + " vs " + fmt("%.0f", pm) + " +-10");
            }
            if (std::abs(vu - pu) > 10) {
              o.fail(where + ": uniform " + fmt("%.2f", vu) + " vs " + fmt("%.0f", pu) + " +-10");
            }
          }
        }
      }
    }
    o.summary = "pid pi mixed/uniform" + pid.str();
    return o;
  });

  run(6, "policy iteration descent", [&] {
    Outcome o;
    const size_t ops = parse(find_case("pid").source).op_labels().size();
    std::ostringstream got;
    for (int req : grid.requirements) {
      for (bool uniform : {false, true}) {
        const JobResult* pi = by.at({"pid", req, Mode::Pi, uniform});
        const JobResult* ilp = by.at({"pid", req, Mode::Ilp, uniform});
        std::string where = "pid req " + std::to_string(req) + (uniform ? " uniform" : " mixed");
        if (!pi->ok() || !ilp->ok()) {
          o.fail(where + ": missing tuning");
          continue;
        }
        const SolveStats& s = pi->tune->stats;
        if (!uniform && req == 12) {
          got << "req 12 msum pi " << s.msum << " ilp " << ilp->tune->stats.msum << ", "
              << s.policy_iterations << " iterations";
        }
        if (s.msum > ilp->tune->stats.msum) o.fail(where + ": pi msum above ilp");
        if (static_cast<size_t>(s.policy_iterations) > ops + 1) o.fail(where + ": too many iterations");
        for (size_t i = 1; i < s.msum_trace.size(); ++i) {
          if (s.msum_trace[i] > s.msum_trace[i - 1]) o.fail(where + ": msum rose during iteration");
        }
      }
    }
    o.summary = got.str();
    return o;
  });

  run(7, "round_to bit exactness", [] {
    Outcome o;
    auto r = [](const char* x, int k) { return round_to(BigReal::from_decimal(x), k).to_real(); };
    if (!(r("2.75", 4) == BigReal::from_decimal("2.75"))) o.fail("2.75 @ 4");
    if (!(r("2.75", 3) == BigReal::from_decimal("3.0"))) o.fail("2.75 @ 3");
    if (!(r("2.75", 1) == BigReal::from_decimal("2.0"))) o.fail("2.75 @ 1");
    if (!(r("2.5", 2) == BigReal::from_decimal("2.0"))) o.fail("2.5 @ 2 ties to even");
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> bits(1, 150);
    std::uniform_int_distribution<long> expo(-200, 60);
    int checked = 0;
    for (int i = 0; i < 100000; ++i) {
      BigReal x(160);
      mpfr_set_ui(x.get(), rng(), MPFR_RNDN);
      mpfr_mul_2ui(x.get(), x.get(), 64, MPFR_RNDN);
      mpfr_add_ui(x.get(), x.get(), rng(), MPFR_RNDN);
      mpfr_mul_2si(x.get(), x.get(), expo(rng), MPFR_RNDN);
      if (rng() & 1) mpfr_neg(x.get(), x.get(), MPFR_RNDN);
      if (x.is_zero()) continue;
      const int k = bits(rng);
      BigReal y = round_to(x, k).to_real();
      if (!(round_to(y, k).to_real() == y)) o.fail("not idempotent: " + x.to_string() + " @ " + std::to_string(k));
      BigReal err(400), half(64);
      mpfr_sub(err.get(), y.get(), x.get(), MPFR_RNDN);
      mpfr_abs(err.get(), err.get(), MPFR_RNDN);
      mpfr_set_ui_2exp(half.get(), 1, x.ufp() - k, MPFR_RNDN);
      if (err > half) o.fail("beyond half ulp: " + x.to_string() + " @ " + std::to_string(k));
      BigReal want = x;
      want.round_to_precision(k);
      if (!(want == y)) o.fail("differs from MPFR: " + x.to_string() + " @ " + std::to_string(k));
      ++checked;
    }
    o.summary = "hand cases and " + std::to_string(checked) + " random values";
    return o;
  });

  run(8, "determinism", [] {
    BenchOptions d;
    d.jobs = 1;
    std::string a = bench_csv(run_bench(d));
    d.jobs = 4;
    std::string b = bench_csv(run_bench(d));
    Outcome o;
    if (a != b) o.fail("CSV differs between runs");
    o.summary = "default grid twice, " + std::to_string(a.size()) + " CSV bytes";
    return o;
  });

  std::printf("%d of 8 criteria failed\n", failures);
  return failures ? 1 : 0;
}
