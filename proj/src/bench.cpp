#include "nsbtune/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace nsbtune {

namespace detail {
const std::vector<std::pair<std::string, std::string>>& corpus_sources();
}

const std::vector<BenchmarkCase>& corpus() {
  static const std::vector<BenchmarkCase> cases = [] {
    std::vector<BenchmarkCase> out;
    for (const auto& [name, text] : detail::corpus_sources()) {
      Program p = parse(text);
      std::vector<Label> req = p.require_labels();
      if (req.size() != 1) throw Error("corpus case '" + name + "' needs exactly one require_nsb");
      out.push_back({name, text, p.at(req[0]).name});
    }
    return out;
  }();
  return cases;
}

const BenchmarkCase& find_case(const std::string& name) {
  for (const BenchmarkCase& c : corpus()) {
    if (c.name == name) return c;
  }
  throw Error("unknown benchmark case '" + name + "'");
}

std::vector<Job> expand_grid(const BenchOptions& o) {
  std::vector<std::string> cases = o.cases;
  if (cases.empty()) {
    for (const BenchmarkCase& c : corpus()) cases.push_back(c.name);
  }
  std::vector<bool> flavors = {false};
  if (o.uniform_both) flavors.push_back(true);
  std::vector<Job> jobs;
  for (const std::string& c : cases) {
    for (int r : o.requirements) {
      for (Mode m : o.modes) {
        for (Objective obj : o.objectives) {
          for (bool u : flavors) jobs.push_back({c, r, m, obj, u});
        }
      }
    }
  }
  return jobs;
}

std::string tuning_json(const Program& program, const TuneResult& result, Objective objective,
                        bool uniform) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json labels = nlohmann::json::array();
  for (Label l : program.tuned_labels()) {
    const Node& n = program.at(l);
    nlohmann::ordered_json e;
    e["id"] = l;
    e["kind"] = program.is_op(l) ? "op" : n.kind == NodeKind::Const ? "const" : "var";
    if (n.name.empty()) {
      e["name"] = nullptr;
    } else {
      e["name"] = n.name;
    }
    int v = result.tuning.at(l);
    e["nsb"] = v;
    if (v <= 113) {
      e["format"] = to_string(to_format(v));
    } else {
      e["format"] = nullptr;
    }
    labels.push_back(e);
  }
  j["labels"] = labels;
  j["mp"] = result.stats.mp;
  j["msum"] = result.stats.msum;
  j["mop"] = result.stats.mop;
  j["policy_iterations"] = result.stats.policy_iterations;
  j["objective"] = to_string(objective);
  j["uniform"] = uniform;
  return j.dump(2);
}

Tuning tuning_from_json(const std::string& text) {
  Tuning t;
  try {
    auto j = nlohmann::json::parse(text);
    for (const auto& e : j.at("labels")) t.nsb[e.at("id").get<Label>()] = e.at("nsb").get<int>();
  } catch (const nlohmann::json::exception& ex) {
    throw Error(std::string("malformed tuning JSON: ") + ex.what());
  }
  return t;
}

namespace {

struct PreparedCase {
  const BenchmarkCase* bench = nullptr;
  Program program;
  RangeMap ranges;
  std::vector<ReferenceRun> refs;
  int slack = 0;
  std::string error;
};

PreparedCase prepare(const BenchmarkCase& c, const BenchOptions& o) {
  PreparedCase p;
  p.bench = &c;
  try {
    p.program = parse(c.source);
    resolve_defs(p.program);
    p.ranges = analyze(p.program, o.trials, o.seed);
    if (o.validate) p.refs = reference_runs(p.program, o.trials, o.seed);
  } catch (const Error& e) {
    p.error = e.what();
  }
  return p;
}

JobResult run_job(const Job& job, const PreparedCase& pc, const BenchOptions& o, int slack,
                  std::uint64_t seed, const std::vector<ReferenceRun>& refs, bool validate_job) {
  JobResult r;
  r.job = job;
  r.loop_slack = slack;
  auto start = std::chrono::steady_clock::now();
  try {
    if (!pc.error.empty()) throw Error(pc.error);
    Program program = pc.program;
    program.set_requirement(pc.bench->target, job.requirement);
    DefUseMap defuse = resolve_defs(program);
    TuneOptions topt{job.objective, job.mode, job.uniform, slack};
    auto out = policy_iterate(program, pc.ranges, defuse, topt);
    if (auto* cycle = std::get_if<CycleDiagnostic>(&out)) {
      r.status = "cycle: " + cycle->to_string();
    } else {
      r.tune = std::get<TuneResult>(std::move(out));
      r.summary = summarize(r.tune->tuning, program);
      r.tuning_json = tuning_json(program, *r.tune, job.objective, job.uniform);
      if (validate_job) {
        r.validation = validate(program, r.tune->tuning, pc.bench->target, job.requirement,
                                o.trials, seed, {}, &refs);
        r.validation->program = job.case_name;
      }
      r.status = "ok";
    }
  } catch (const Error& e) {
    r.status = std::string("error: ") + e.what();
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void calibrate(PreparedCase& pc, const std::vector<Job>& jobs, const BenchOptions& o) {
  if (!pc.error.empty()) return;
  std::vector<ReferenceRun> refs;
  try {
    refs = reference_runs(pc.program, o.trials, calibration_seed(o.seed));
  } catch (const Error&) {
    return;
  }
  for (int k = 0; k <= o.max_loop_slack; ++k) {
    pc.slack = k;
    bool all = true;
    for (const Job& job : jobs) {
      if (job.case_name != pc.bench->name) continue;
      JobResult r = run_job(job, pc, o, k, calibration_seed(o.seed), refs, true);
      if (!r.ok() || !r.validation->pass) {
        all = false;
        break;
      }
    }
    if (all) return;
  }
}

template <class F>
void parallel_for(size_t n, int workers, F&& f) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (workers == 1) {
    for (size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::vector<JobResult> run_bench(const BenchOptions& o) {
  std::vector<Job> jobs = expand_grid(o);
  std::vector<std::string> names;
  for (const Job& j : jobs) {
    if (std::find(names.begin(), names.end(), j.case_name) == names.end()) names.push_back(j.case_name);
  }
  std::vector<PreparedCase> prepared(names.size());
  parallel_for(names.size(), o.jobs, [&](size_t i) { prepared[i] = prepare(find_case(names[i]), o); });
  std::map<std::string, const PreparedCase*> by_name;
  for (const PreparedCase& p : prepared) by_name[p.bench->name] = &p;

  if (o.loop_slack) {
    for (PreparedCase& p : prepared) p.slack = *o.loop_slack;
  } else {
    parallel_for(prepared.size(), o.jobs, [&](size_t i) { calibrate(prepared[i], jobs, o); });
  }

  std::vector<JobResult> results(jobs.size());
  parallel_for(jobs.size(), o.jobs, [&](size_t i) {
    const PreparedCase& pc = *by_name.at(jobs[i].case_name);
    results[i] = run_job(jobs[i], pc, o, pc.slack, o.seed, pc.refs, o.validate);
  });
  return results;
}

std::uint64_t calibration_seed(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ULL; }

std::string bench_csv(const std::vector<JobResult>& results, bool timings) {
  std::ostringstream out;
  out << "program,requirement,mode,objective,mp,fp16,fp32,fp64,fp128,var_savings_pct,"
         "op_savings_pct,policy_iterations,wall_ms,uniform,msum,mop,validated,status\n";
  for (const JobResult& r : results) {
    const Job& j = r.job;
    out << j.case_name << ',' << j.requirement << ',' << to_string(j.mode) << ','
        << to_string(j.objective) << ',';
    if (r.ok()) {
      const FormatCounts& c = r.summary.counts;
      out << r.tune->stats.mp << ',' << c[IeeeFormat::FP16] << ',' << c[IeeeFormat::FP32] << ','
          << c[IeeeFormat::FP64] << ',' << c[IeeeFormat::FP128] << ','
          << pct(r.summary.savings.var_savings_pct) << ',' << pct(r.summary.savings.op_savings_pct)
          << ',' << r.tune->stats.policy_iterations << ',';
    } else {
      out << ",,,,,,,,";
    }
    if (timings) out << pct(r.wall_ms);
    out << ',' << (j.uniform ? "uniform" : "mixed") << ',';
    if (r.ok()) {
      out << r.tune->stats.msum << ',' << r.tune->stats.mop << ',';
      out << (!r.validation ? "skipped" : r.validation->pass ? "pass" : "fail");
    } else {
      out << ",,";
    }
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << ',' << status << '\n';
  }
  return out.str();
}

namespace {

const JobResult* pick(const std::vector<JobResult>& results, const std::string& name, int req,
                      Mode mode, bool uniform) {
  for (const JobResult& r : results) {
    if (r.job.case_name == name && r.job.requirement == req && r.job.mode == mode &&
        r.job.uniform == uniform && r.ok()) {
      return &r;
    }
  }
  return nullptr;
}

}  // namespace

std::string bench_markdown(const std::vector<JobResult>& results, bool timings) {
  std::vector<std::string> names;
  std::set<int> reqs;
  std::set<Mode> modes;
  for (const JobResult& r : results) {
    if (std::find(names.begin(), names.end(), r.job.case_name) == names.end()) {
      names.push_back(r.job.case_name);
    }
    reqs.insert(r.job.requirement);
    modes.insert(r.job.mode);
  }
  Mode mode = modes.count(Mode::Pi) ? Mode::Pi : Mode::Ilp;
  auto present = [&](std::initializer_list<int> wanted) {
    std::vector<int> out;
    for (int w : wanted) {
      if (reqs.count(w)) out.push_back(w);
    }
    return out;
  };
  std::ostringstream md;
  md << "# Precision tuning report\n\nRows use mode `" << to_string(mode)
     << "`; `-` marks a failed or missing job.\n\n";

  md << "## Requirement slack\n\n| Program | Slack bits |\n|---|---|\n";
  for (const std::string& name : names) {
    for (const JobResult& r : results) {
      if (r.job.case_name == name) {
        md << "| " << name << " | " << r.loop_slack << " |\n";
        break;
      }
    }
  }
  md << "\n";

  md << "## Largest precision and format counts\n\n"
     << "Counts are over definition labels.\n\n";
  for (int req : present({8, 12, 16, 24, 32, 48})) {
    md << "### Requirement " << req << " bits\n\n"
       << "| Program | MP | FP16 | FP32 | FP64 | FP128 |\n|---|---|---|---|---|---|\n";
    for (const std::string& n : names) {
      const JobResult* r = pick(results, n, req, mode, false);
      if (!r) {
        md << "| " << n << " | - | - | - | - | - |\n";
        continue;
      }
      const FormatCounts& c = r->summary.counts;
      md << "| " << n << " | " << r->tune->stats.mp << " | " << c[IeeeFormat::FP16] << " | "
         << c[IeeeFormat::FP32] << " | " << c[IeeeFormat::FP64] << " | " << c[IeeeFormat::FP128]
         << " |\n";
    }
    md << '\n';
  }

  std::vector<int> fig = present({8, 16, 32, 48});
  md << "## Operator bit reduction (%)\n\n| Program |";
  for (int r : fig) md << ' ' << r << " |";
  md << "\n|---|";
  for (size_t i = 0; i < fig.size(); ++i) md << "---|";
  md << '\n';
  for (const std::string& n : names) {
    md << "| " << n << " |";
    for (int req : fig) {
      const JobResult* r = pick(results, n, req, mode, false);
      md << ' ' << (r ? pct(r->summary.savings.op_savings_pct) : "-") << " |";
    }
    md << '\n';
  }
  md << '\n';

  std::vector<int> tab = present({8, 16, 24, 32});
  md << "## Variable storage savings, mixed / uniform (%)\n\n| Program |";
  for (int r : tab) md << ' ' << r << " |";
  md << "\n|---|";
  for (size_t i = 0; i < tab.size(); ++i) md << "---|";
  md << '\n';
  for (const std::string& n : names) {
    md << "| " << n << " |";
    for (int req : tab) {
      const JobResult* m = pick(results, n, req, mode, false);
      const JobResult* u = pick(results, n, req, mode, true);
      md << ' ' << (m ? pct(m->summary.savings.var_savings_pct) : "-") << " / "
         << (u ? pct(u->summary.savings.var_savings_pct) : "-") << " |";
    }
    md << '\n';
  }
  md << '\n';

  int pass = 0, fail = 0, other = 0;
  for (const JobResult& r : results) {
    if (!r.ok() || !r.validation) {
      ++other;
    } else if (r.validation->pass) {
      ++pass;
    } else {
      ++fail;
    }
  }
  md << "## Validation\n\n" << pass << " passed, " << fail << " failed, " << other
     << " not validated, out of " << results.size() << " jobs.\n";
  for (const JobResult& r : results) {
    if (r.ok() && r.validation && r.validation->pass) continue;
    md << "- " << r.job.case_name << " req " << r.job.requirement << ' ' << to_string(r.job.mode)
       << (r.job.uniform ? " uniform" : " mixed") << ": ";
    if (r.ok() && r.validation) {
      md << "max_err " << r.validation->max_err.to_string(6) << " > bound "
         << r.validation->bound.to_string(6) << '\n';
    } else {
      md << r.status << '\n';
    }
  }

  if (timings) {
    double total = 0, worst = 0;
    for (const JobResult& r : results) {
      total += r.wall_ms;
      worst = std::max(worst, r.wall_ms);
    }
    md << "\n## Timings\n\nTotal " << pct(total) << " ms, slowest job " << pct(worst) << " ms.\n";
  }
  return md.str();
}

}  // namespace nsbtune
