// nsbtune: tune, validate and benchmark significant-bit allocations.
//
// Exit codes: 0 success, 1 input or usage error, 2 positive constraint
// cycle, 3 validation failed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nsbtune/bench.hpp"

namespace fs = std::filesystem;
using namespace nsbtune;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spill(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

std::pair<std::string, int> parse_require(const std::string& arg) {
  auto colon = arg.rfind(':');
  int n = 0;
  try {
    if (colon == std::string::npos || colon == 0) throw std::invalid_argument(arg);
    size_t used = 0;
    n = std::stoi(arg.substr(colon + 1), &used);
    if (used != arg.size() - colon - 1 || n < 1) throw std::invalid_argument(arg);
  } catch (const std::exception&) {
    throw Error("--require expects VAR:N with N >= 1, got '" + arg + "'");
  }
  return {arg.substr(0, colon), n};
}

/// Applies --require flags. An in-source directive wins; a differing flag
/// for the same variable is an error.
void apply_requires(Program& program, const std::vector<std::string>& specs) {
  for (const std::string& s : specs) {
    auto [var, n] = parse_require(s);
    if (auto have = program.requirement(var)) {
      if (*have != n) {
        throw Error("--require " + s + " conflicts with require_nsb(" + var + ", " +
                    std::to_string(*have) + ") in the source");
      }
      continue;
    }
    program.set_requirement(var, n);
  }
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string describe(const Program& p, Label l) {
  const Node& n = p.at(l);
  std::string s = "label " + std::to_string(l) + " at " + to_string(n.pos);
  if (!n.name.empty()) s += " (" + n.name + ")";
  return s;
}

struct TuneArgs {
  std::string file;
  std::vector<std::string> requires_;
  std::string objective = "sum";
  bool uniform = false;
  std::string mode = "pi";
  std::optional<int> loop_slack;
  std::string emit = "annotated";
  int trials = 100;
  std::uint64_t seed = 1;
  std::string json_out;
  std::string ranges_in;
  std::string ranges_out;
  std::string constraints_out;
};

int run_tune(const TuneArgs& a) {
  Program program = parse(slurp(a.file));
  apply_requires(program, a.requires_);
  DefUseMap defuse = resolve_defs(program);
  RangeMap ranges = a.ranges_in.empty() ? analyze(program, a.trials, a.seed)
                                        : RangeMap::load(slurp(a.ranges_in));
  if (!a.ranges_out.empty()) spill(a.ranges_out, ranges.dump());
  TuneOptions opt{parse_objective(a.objective), parse_mode(a.mode), a.uniform, a.loop_slack};
  auto out = policy_iterate(program, ranges, defuse, opt);
  if (auto* cycle = std::get_if<CycleDiagnostic>(&out)) {
    std::cerr << "error: " << cycle->to_string() << "\n";
    for (Label l : cycle->labels) std::cerr << "  " << describe(program, l) << "\n";
    std::cerr << "hint: --loop-slack K relaxes loop-carried cycles\n";
    return 2;
  }
  const TuneResult& r = std::get<TuneResult>(out);
  if (!a.constraints_out.empty()) spill(a.constraints_out, r.system.dump());
  std::string json = tuning_json(program, r, opt.objective, opt.uniform);
  if (!a.json_out.empty()) spill(a.json_out, json + "\n");
  if (a.emit == "json") {
    std::cout << json << "\n";
  } else if (a.emit == "csv") {
    JobResult jr;
    jr.job = {fs::path(a.file).stem().string(), 0, opt.mode, opt.objective, opt.uniform};
    for (Label l : program.require_labels()) jr.job.requirement = std::max(jr.job.requirement, program.at(l).nsb);
    jr.status = "ok";
    jr.tune = r;
    jr.summary = summarize(r.tuning, program);
    std::cout << bench_csv({jr});
  } else {
    std::cout << print(program, [&](Label l) -> std::string {
      auto it = r.tuning.nsb.find(l);
      return it == r.tuning.nsb.end() ? "" : "|" + std::to_string(it->second) + "|";
    });
  }
  std::cerr << "mp=" << r.stats.mp << " msum=" << r.stats.msum << " mop=" << r.stats.mop
            << " policy_iterations=" << r.stats.policy_iterations << "\n";
  return 0;
}

struct ValidateArgs {
  std::string file;
  std::string tuning;
  std::string require;
  int trials = 100;
  std::uint64_t seed = 1;
  bool write_only = false;
};

int run_validate(const ValidateArgs& a) {
  Program program = parse(slurp(a.file));
  apply_requires(program, {a.require});
  resolve_defs(program);
  auto [var, n] = parse_require(a.require);
  Tuning t = tuning_from_json(slurp(a.tuning));
  for (Label l : program.tuned_labels()) {
    if (!t.nsb.count(l)) throw Error("tuning has no entry for " + describe(program, l));
  }
  EmulationOptions opt;
  if (a.write_only) opt.sites = RoundingSites::WritesOnly;
  ValidationReport rep = validate(program, t, var, n, a.trials, a.seed, opt);
  rep.program = fs::path(a.file).stem().string();
  std::cout << rep.to_json() << "\n";
  return rep.pass ? 0 : 3;
}

struct BenchArgs {
  std::string cases;
  bool cases_given = false;
  std::string requirements = "8,12,16,24,32,48";
  std::string modes = "ilp,pi";
  std::string objectives = "sum";
  bool uniform_both = false;
  int jobs = 1;
  std::string out = "bench_out";
  std::uint64_t seed = 1;
  int trials = 100;
  std::optional<int> loop_slack;
  bool timings = false;
  bool no_validate = false;
};

int run_bench_cmd(const BenchArgs& a, const std::string& usage) {
  BenchOptions o;
  o.cases = split(a.cases);
  o.requirements.clear();
  for (const std::string& s : split(a.requirements)) {
    int v = 0;
    try {
      v = std::stoi(s);
    } catch (const std::exception&) {
      throw Error("bad requirement '" + s + "'");
    }
    if (v < 1) throw Error("requirements must be positive");
    o.requirements.push_back(v);
  }
  o.modes.clear();
  for (const std::string& s : split(a.modes)) o.modes.push_back(parse_mode(s));
  o.objectives.clear();
  for (const std::string& s : split(a.objectives)) o.objectives.push_back(parse_objective(s));
  if ((a.cases_given && o.cases.empty()) || o.requirements.empty() || o.modes.empty() ||
      o.objectives.empty()) {
    std::cerr << "error: empty experiment grid\n" << usage;
    return 1;
  }
  for (const std::string& c : o.cases) find_case(c);
  o.uniform_both = a.uniform_both;
  o.jobs = a.jobs;
  o.seed = a.seed;
  o.trials = a.trials;
  o.loop_slack = a.loop_slack;
  o.validate = !a.no_validate;

  std::vector<JobResult> results = run_bench(o);
  fs::path out(a.out);
  fs::create_directories(out / "tunings");
  spill(out / "bench.csv", bench_csv(results, a.timings));
  spill(out / "report.md", bench_markdown(results, a.timings));
  for (const JobResult& r : results) {
    if (!r.ok()) continue;
    std::string stem = r.job.case_name + "_" + std::to_string(r.job.requirement) + "_" +
                       std::string(to_string(r.job.mode)) + "_" +
                       std::string(to_string(r.job.objective)) + "_" +
                       (r.job.uniform ? "uniform" : "mixed");
    spill(out / "tunings" / (stem + ".json"), r.tuning_json + "\n");
  }
  int failed = 0;
  for (const JobResult& r : results) {
    if (!r.ok() || (r.validation && !r.validation->pass)) ++failed;
  }
  std::cerr << results.size() << " jobs, " << failed << " failed or unvalidated; wrote "
            << (out / "bench.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Significant-bit precision tuner"};
  app.require_subcommand(1);

  TuneArgs ta;
  auto* tune = app.add_subcommand("tune", "Tune a program and print the annotated result");
  tune->add_option("file", ta.file, "Source program")->required()->check(CLI::ExistingFile);
  tune->add_option("--require", ta.requires_, "Accuracy requirement VAR:N (repeatable)");
  tune->add_option("--objective", ta.objective, "sum|minmax|ops")
      ->check(CLI::IsMember({"sum", "minmax", "ops"}));
  tune->add_flag("--uniform", ta.uniform, "One precision per variable");
  tune->add_option("--mode", ta.mode, "ilp|pi")->check(CLI::IsMember({"ilp", "pi"}));
  tune->add_option("--loop-slack", ta.loop_slack, "Extra requirement bits; breaks loop cycles")
      ->check(CLI::NonNegativeNumber);
  tune->add_option("--emit", ta.emit, "annotated|json|csv")
      ->check(CLI::IsMember({"annotated", "json", "csv"}));
  tune->add_option("--trials", ta.trials, "Range-analysis executions")->check(CLI::PositiveNumber);
  tune->add_option("--seed", ta.seed, "Input sampling seed");
  tune->add_option("--json-out", ta.json_out, "Also write the tuning JSON here");
  tune->add_option("--ranges", ta.ranges_in, "Load ranges from a dump instead of executing");
  tune->add_option("--dump-ranges", ta.ranges_out, "Write the range dump");
  tune->add_option("--dump-constraints", ta.constraints_out, "Write the final constraint system");

  ValidateArgs va;
  auto* val = app.add_subcommand("validate", "Check a tuning against the reference interpreter");
  val->add_option("file", va.file, "Source program")->required()->check(CLI::ExistingFile);
  val->add_option("--tuning", va.tuning, "Tuning JSON")->required()->check(CLI::ExistingFile);
  val->add_option("--require", va.require, "VAR:N")->required();
  val->add_option("--trials", va.trials, "Sampled executions")->check(CLI::PositiveNumber);
  val->add_option("--seed", va.seed, "Input sampling seed");
  val->add_flag("--write-only", va.write_only, "Round only operator results and definitions");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run the embedded corpus over a requirement grid");
  auto* cases_opt = bench->add_option("--cases", ba.cases, "Comma-separated case names");
  bench->add_option("--requirements", ba.requirements, "Comma-separated bit requirements");
  bench->add_option("--modes", ba.modes, "Comma-separated: ilp,pi");
  bench->add_option("--objectives", ba.objectives, "Comma-separated: sum,minmax,ops");
  bench->add_flag("--uniform-both", ba.uniform_both, "Run mixed and uniform precision");
  bench->add_option("--jobs", ba.jobs, "Concurrent jobs")->check(CLI::PositiveNumber);
  bench->add_option("--out", ba.out, "Output directory");
  bench->add_option("--seed", ba.seed, "Input sampling seed");
  bench->add_option("--trials", ba.trials, "Sampled executions per case")->check(CLI::PositiveNumber);
  bench->add_option("--loop-slack", ba.loop_slack,
                    "Extra requirement bits (default: smallest passing value per case)")
      ->check(CLI::NonNegativeNumber);
  bench->add_flag("--timings", ba.timings, "Record wall-clock times (CSV no longer reproducible)");
  bench->add_flag("--no-validate", ba.no_validate, "Skip emulation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*tune) return run_tune(ta);
    if (*val) return run_validate(va);
    if (*bench) {
      ba.cases_given = cases_opt->count() > 0;
      return run_bench_cmd(ba, bench->help());
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
