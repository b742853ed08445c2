// Copyright 2026 The hima-sim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// hima: compile circuits, validate assembly, simulate scenarios and run the
// load-average and CLOPS benchmarks.
//
// Exit codes: 0 ok, 1 error, 2 deadlock, 3 underflow under --strict.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "hima/audit.hpp"
#include "hima/bench.hpp"
#include "hima/circuit.hpp"
#include "hima/compiler.hpp"
#include "hima/engine.hpp"
#include "hima/error.hpp"
#include "hima/isa.hpp"
#include "hima/metrics.hpp"
#include "hima/scenario.hpp"
#include "hima/topology_config.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitDeadlock = 2;
constexpr int kExitUnderflow = 3;

struct Globals {
  std::optional<std::uint64_t> seed;
  bool strict = false;
  std::string out_dir = "hima-out";
};

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw hima::Error(hima::Errc::kIoError, "cannot write " + path.string());
  f << text;
}

std::uint64_t require_seed(const Globals& g, const hima::Scenario& s) {
  if (g.seed) return *g.seed;
  if (s.seed) return *s.seed;
  throw hima::Error(hima::Errc::kConfigError, "no seed: pass --seed or set 'seed' in the scenario");
}

void warn_sti(const hima::Scenario& s) {
  if (!s.has_sti) std::cerr << "warning: scenario has no STI table; using zero STI\n";
}

// ---------------------------------------------------------------------------

struct CompileArgs {
  std::string circuit;
  std::string topology;
  std::vector<hima::QubitId> mapping;
  hima::ProcessId pid = 0;
  std::uint32_t shots = 1024;
  std::int64_t shot_period_ns = 100'000;
};

int cmd_compile(const Globals& g, const CompileArgs& a) {
  const hima::System sys = hima::load_system(a.topology);
  const hima::Circuit c = hima::parse_circuit(hima::read_file(a.circuit), a.circuit);
  hima::CompileOptions co;
  co.process_id = a.pid;
  co.shots = a.shots;
  co.shot_period_ns = a.shot_period_ns;
  co.mapping = a.mapping;
  const hima::CompiledTask task = hima::compile(c, hima::GateTimeTable{}, sys, co);
  const auto& h = sys.hierarchy;
  const fs::path out(g.out_dir);
  for (const auto& up : task.programs)
    write_file(out / (h.node(up.unit).name + ".s"), hima::format_program(up.program));
  write_file(out / "controller.s", hima::format_program(task.controller));
  write_file(out / "masks.txt", hima::dump_masks(h, task.masks));
  write_file(out / "feedback.txt", hima::format_feedback(h, task.feedback));
  fmt::print("{}: {} unit programs, {} feedback entries, depth {}, {} ns per shot\n", task.name,
             task.programs.size(), task.feedback.size(), task.depth, task.circuit_duration_ns);
  fmt::print("wrote {}\n", out.string());
  return kExitOk;
}

// ---------------------------------------------------------------------------

std::optional<hima::UnitScope> infer_scope(const std::string& path) {
  const std::string stem = fs::path(path).stem().string();
  if (stem == "controller") return hima::UnitScope::kController;
  if (stem.find(".in") != std::string::npos) return hima::UnitScope::kReadoutInput;
  if (!stem.empty()) return hima::UnitScope::kDriveOrReadoutOutput;
  return std::nullopt;
}

int cmd_validate(const std::vector<std::string>& files, const std::string& scope_text) {
  int rc = kExitOk;
  for (const auto& file : files) {
    std::optional<hima::UnitScope> scope =
        scope_text.empty() ? infer_scope(file) : hima::scope_from_letter(scope_text);
    if (!scope) throw hima::Error(hima::Errc::kInvalidArgument, "scope must be C, I or O");
    try {
      const hima::Program p =
          hima::parse_program(hima::read_file(file), *scope, hima::ParseOptions{file});
      hima::ValidateOptions vo;
      vo.filename = file;
      const auto diags = hima::validate_program(p, *scope, vo);
      for (const auto& d : diags) std::cerr << d.render() << '\n';
      if (!diags.empty()) {
        rc = kExitError;
        continue;
      }
      fmt::print("{}: ok ({} instructions, scope {})\n", file, p.size(),
                 hima::scope_letter(*scope));
    } catch (const hima::AsmError& e) {
      for (const auto& d : e.diagnostics()) std::cerr << d.render() << '\n';
      rc = kExitError;
    }
  }
  return rc;
}

// ---------------------------------------------------------------------------

std::string summary_text(const hima::RunResult& r, const hima::Scenario& s) {
  std::string out = fmt::format("scenario {}\nend_time_ns {}\nevents {}\nunderflows {}\n"
                                "overruns {}\ndeadlock {}\n",
                                s.name, r.end_time, r.events_seen, r.underflows, r.overruns,
                                r.deadlock ? *r.deadlock : "none");
  for (const auto& t : r.tasks)
    out += fmt::format(
        "task {} name={} pid={} qubits={} admitted={} done={} shots={} t_qpu={} "
        "feedbacks={} underflows={} overruns={}\n",
        t.task, t.name, t.pid, t.n_qubits, t.admitted, t.done, t.shots_done, t.t_qpu,
        t.feedbacks, t.underflows, t.overruns);
  const auto sync = hima::audit_sync_alignment(r.timeline, s.system.hierarchy.sync_period_ns());
  const auto stagger = hima::audit_staggering(r.timeline, s.sim.scheduler.sti);
  const auto contract = hima::audit_feedback_contract(r.timeline);
  out += fmt::format("audit sync_alignment {}\naudit staggering {}\naudit feedback_contract {}\n",
                     sync.size(), stagger.size(), contract.size());
  return out;
}

int cmd_simulate(const Globals& g, const std::string& path) {
  hima::Scenario s = hima::load_scenario(path);
  s.sim.seed = require_seed(g, s);
  s.sim.throw_on_deadlock = false;
  warn_sti(s);
  const hima::RunResult r = hima::run_scenario(s);

  const fs::path out(g.out_dir);
  write_file(out / "timeline.txt", hima::export_timeline(r.timeline, s.system.hierarchy));
  const std::string summary = summary_text(r, s);
  write_file(out / "summary.txt", summary);
  std::cout << summary;
  if (r.deadlock) {
    std::cerr << "error: Deadlock: " << *r.deadlock << '\n';
    return kExitDeadlock;
  }
  if (g.strict && r.underflows > 0) {
    std::cerr << "error: " << r.underflows << " FIFO underflows under --strict\n";
    return kExitUnderflow;
  }
  return kExitOk;
}

int cmd_bench(const Globals& g, const std::string& kind, const std::string& path,
              const std::vector<std::uint32_t>& processes) {
  hima::Scenario s = hima::load_scenario(path);
  const std::uint64_t seed = require_seed(g, s);
  warn_sti(s);
  const auto total = static_cast<std::uint32_t>(s.system.qcns.size());
  const fs::path out(g.out_dir);
  std::vector<hima::MetricsReport> reports;
  if (kind == "qla") {
    hima::QlaBenchConfig cfg = s.qla.value_or(hima::QlaBenchConfig{});
    if (!s.qla) {
      cfg.name = s.name;
      cfg.sim = s.sim;
      cfg.sim.record = hima::RecordMode::kNone;
      cfg.times = s.times;
    }
    cfg.sim.seed = seed;
    reports = hima::run_qla_benchmark(cfg, s.system);
    fmt::print("{:>6} {:>5} {:>10} {:>10} {:>8} {:>10}\n", "qubits", "procs", "qla_serial",
               "qla", "speedup", "efficiency");
    for (const auto& r : reports)
      fmt::print("{:>6} {:>5} {:>10.4f} {:>10.4f} {:>8.3f} {:>10.4f}\n", r.task_qubits,
                 r.processes, r.qla_serial, r.qla, r.speedup, r.speedup_efficiency);
  } else {
    hima::ClopsBenchConfig cfg = s.clops.value_or(hima::ClopsBenchConfig{});
    if (!s.clops) {
      cfg.name = s.name;
      cfg.sim = s.sim;
      cfg.sim.record = hima::RecordMode::kNone;
      cfg.times = s.times;
    }
    if (!processes.empty()) cfg.processes = processes;
    cfg.sim.seed = seed;
    reports = hima::run_clops_sweep(cfg, s.system);
    fmt::print("{:>5} {:>12} {:>12} {:>12} {:>14}\n", "procs", "clops", "per_process",
               "eff_factor", "elapsed_ns");
    for (const auto& r : reports)
      fmt::print("{:>5} {:>12.1f} {:>12.1f} {:>12.1f} {:>14}\n", r.processes, r.clops,
                 r.clops_per_process, r.efficiency_factor, r.elapsed_ns);
  }
  write_file(out / (kind + ".csv"), hima::reports_to_csv(reports, total));
  write_file(out / (kind + ".json"), hima::reports_to_json(reports, total));
  fmt::print("wrote {}\n", (out / (kind + ".csv")).string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HiMA control-system simulator"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the scenario)");
  app.add_flag("--strict", g.strict, "Exit 3 when any FIFO underflow occurs");
  app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();

  CompileArgs ca;
  auto* compile = app.add_subcommand("compile", "Compile a circuit to per-unit assembly");
  compile->fallthrough();
  compile->add_option("circuit", ca.circuit, "Circuit file")->required()->check(CLI::ExistingFile);
  compile->add_option("--topology,-t", ca.topology, "Topology config")
      ->required()
      ->check(CLI::ExistingFile);
  compile->add_option("--mapping", ca.mapping, "Physical qubit per logical qubit")->delimiter(',');
  compile->add_option("--pid", ca.pid, "Process id")->capture_default_str();
  compile->add_option("--shots", ca.shots)->capture_default_str();
  compile->add_option("--shot-period", ca.shot_period_ns, "Shot period in ns")
      ->capture_default_str();

  std::vector<std::string> vfiles;
  std::string vscope;
  auto* validate = app.add_subcommand("validate", "Assemble and check unit programs");
  validate->fallthrough();
  validate->add_option("files", vfiles, "Assembly files")->required()->check(CLI::ExistingFile);
  validate->add_option("--scope", vscope,
                       "C, I or O (default: from the file name, controller.s is C, *.in*.s is I)");

  std::string scenario;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario and export its timeline");
  simulate->fallthrough();
  simulate->add_option("scenario", scenario, "Scenario file")
      ->required()
      ->check(CLI::ExistingFile);

  std::string kind;
  std::vector<std::uint32_t> procs;
  auto* bench = app.add_subcommand("bench", "Run the qla or clops benchmark");
  bench->fallthrough();
  bench->add_option("kind", kind, "qla or clops")
      ->required()
      ->check(CLI::IsMember({"qla", "clops"}));
  bench->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  bench->add_option("--processes", procs, "CLOPS process counts")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*compile) return cmd_compile(g, ca);
    if (*validate) return cmd_validate(vfiles, vscope);
    if (*simulate) return cmd_simulate(g, scenario);
    if (*bench) return cmd_bench(g, kind, scenario, procs);
  } catch (const hima::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.code() == hima::Errc::kDeadlock) return kExitDeadlock;
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
