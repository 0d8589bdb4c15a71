// Command-line front door: exact oracles, schedules, classical and quantum
// runs, walk spectra, and the epsilon-scaling bench sweep.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qpf/classical.hpp"
#include "qpf/errors.hpp"
#include "qpf/markov.hpp"
#include "qpf/model.hpp"
#include "qpf/qestimate.hpp"
#include "qpf/report.hpp"
#include "qpf/szegedy.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCap = 3;
constexpr int kExitGuarantee = 4;

struct CommonArgs {
  std::string model;
  double beta = 1.0;
  double eps = 0.2;
  std::string mode = "perfect";
  std::optional<std::uint64_t> seed;
  std::string out;
  std::uint64_t trials = 1;
  std::size_t cap = qpf::kDefaultAmplitudeCap;
  double target_low = 0.5;
  double target_high = 0.75;
};

void write_or_print(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qpf::ConfigError("cannot write " + path);
  out << payload;
}

std::uint64_t require_seed(const CommonArgs& args) {
  if (!args.seed) throw qpf::ConfigError("this verb is stochastic: --seed is required");
  return *args.seed;
}

int run_exact(const CommonArgs& args) {
  const qpf::System system = qpf::load_system(args.model);
  const double z = qpf::unshifted_partition(system, args.beta);
  const auto pi = qpf::boltzmann(system, args.beta);
  qpf::JsonWriter w;
  w.begin_object();
  w.key("model").value(args.model);
  w.key("beta").value(args.beta);
  w.key("states").value(static_cast<std::uint64_t>(system.size()));
  w.key("z").value(z);
  w.key("z_shifted").value(qpf::exact_partition(system, args.beta));
  w.key("energy_offset").value(system.energy_offset());
  double pi_min = pi[0], pi_max = pi[0];
  for (double p : pi) {
    pi_min = std::min(pi_min, p);
    pi_max = std::max(pi_max, p);
  }
  w.key("pi_min").value(pi_min);
  w.key("pi_max").value(pi_max);
  w.end_object();
  write_or_print(args.out, w.str() + "\n");
  return kExitOk;
}

int run_schedule(const CommonArgs& args) {
  const qpf::System system = qpf::load_system(args.model);
  const qpf::Schedule sched =
      qpf::build_schedule(system, args.beta, args.target_low, args.target_high);
  qpf::JsonWriter w;
  w.begin_object();
  w.key("model").value(args.model);
  w.key("beta_final").value(args.beta);
  w.key("levels").value(static_cast<std::uint64_t>(sched.levels()));
  w.key("betas").begin_array();
  for (double b : sched.betas()) w.value(b);
  w.end_array();
  w.key("alphas").begin_array();
  for (double a : sched.alphas()) w.value(a);
  w.end_array();
  w.end_object();
  write_or_print(args.out, w.str() + "\n");
  return kExitOk;
}

int run_classical(const CommonArgs& args) {
  const qpf::System system = qpf::load_system(args.model);
  const qpf::Schedule sched =
      qpf::build_schedule(system, args.beta, args.target_low, args.target_high);
  const std::uint64_t seed = require_seed(args);
  qpf::RandomStream rng(seed);
  std::string payload;
  for (std::uint64_t trial = 0; trial < args.trials; ++trial) {
    qpf::RandomStream sub = rng.fork(trial);
    const qpf::ClassicalEstimate est = qpf::classical_fpras(system, sched, args.eps, sub);
    payload += qpf::classical_report_json(est, sched,
                                          qpf::unshifted_partition(system, args.beta), seed);
  }
  write_or_print(args.out, payload);
  return kExitOk;
}

int run_quantum(const CommonArgs& args) {
  const qpf::System system = qpf::load_system(args.model);
  const qpf::Schedule sched =
      qpf::build_schedule(system, args.beta, args.target_low, args.target_high);
  const std::uint64_t seed = require_seed(args);
  if (args.mode != "perfect" && args.mode != "walk") {
    throw qpf::ConfigError("mode must be 'perfect' or 'walk'");
  }
  const qpf::SampleMode mode =
      args.mode == "perfect" ? qpf::SampleMode::exact : qpf::SampleMode::walk;
  qpf::PipelineOptions opt;
  opt.cap = args.cap;
  qpf::RandomStream rng(seed);
  std::string payload;
  for (std::uint64_t trial = 0; trial < args.trials; ++trial) {
    qpf::RandomStream sub = rng.fork(trial);
    const qpf::PipelineResult res = qpf::quantum_fpras(system, sched, args.eps, mode, sub, opt);
    payload += qpf::quantum_report_json(
        res, sched, seed, qpf::classical_chain_step_cost(system, sched, args.eps));
  }
  write_or_print(args.out, payload);
  return kExitOk;
}

int run_walk_analyze(const CommonArgs& args, const std::string& dump_chain) {
  const qpf::System system = qpf::load_system(args.model);
  const qpf::TransitionMatrix chain = qpf::metropolis_chain(system, args.beta);
  if (!dump_chain.empty()) qpf::dump_chain_csv(chain, dump_chain);
  const qpf::WalkOperator walk = qpf::build_walk(chain);
  const qpf::WalkSpectrum spec = qpf::walk_spectrum(walk);
  if (!args.out.empty()) qpf::dump_walk_csv(spec, args.out);
  const double bound = 2.0 * std::sqrt(spec.chain_gap);
  const bool pass = spec.phase_gap >= bound - 1e-12;
  std::printf("delta = %s\n", qpf::format_g17(spec.chain_gap).c_str());
  std::printf("phase gap = %s\n", qpf::format_g17(spec.phase_gap).c_str());
  std::printf("phase gap >= 2*sqrt(delta): %s\n", pass ? "PASS" : "FAIL");
  return pass ? kExitOk : kExitGuarantee;
}

int run_bench(const CommonArgs& args, const std::vector<double>& eps_list,
              std::vector<double> beta_list) {
  const qpf::System system = qpf::load_system(args.model);
  const std::uint64_t seed = require_seed(args);
  if (beta_list.empty()) beta_list.push_back(args.beta);
  std::string csv = "eps,beta_final,levels,classical_chain_steps,quantum_reflections\n";
  std::vector<double> log_eps, log_cls, log_q;
  for (double beta_f : beta_list) {
    const qpf::Schedule sched =
        qpf::build_schedule(system, beta_f, args.target_low, args.target_high);
    for (double eps : eps_list) {
      const std::uint64_t cls = qpf::classical_chain_step_cost(system, sched, eps);
      qpf::RandomStream rng(seed);
      const qpf::PipelineResult res =
          qpf::quantum_fpras(system, sched, eps, qpf::SampleMode::exact, rng);
      csv += qpf::format_g17(eps) + "," + qpf::format_g17(beta_f) + "," +
             std::to_string(sched.levels()) + "," + std::to_string(cls) + "," +
             std::to_string(res.ledger.total.reflection_ops) + "\n";
      if (beta_list.size() == 1) {
        log_eps.push_back(std::log(eps));
        log_cls.push_back(std::log(static_cast<double>(cls)));
        log_q.push_back(std::log(static_cast<double>(res.ledger.total.reflection_ops)));
      }
    }
  }
  write_or_print(args.out, csv);
  if (log_eps.size() >= 2) {
    auto slope = [&](const std::vector<double>& ys) {
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < log_eps.size(); ++i) {
        mx += log_eps[i];
        my += ys[i];
      }
      mx /= static_cast<double>(log_eps.size());
      my /= static_cast<double>(log_eps.size());
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < log_eps.size(); ++i) {
        num += (log_eps[i] - mx) * (ys[i] - my);
        den += (log_eps[i] - mx) * (log_eps[i] - mx);
      }
      return num / den;
    };
    std::printf("classical slope = %s\n", qpf::format_g17(slope(log_cls)).c_str());
    std::printf("quantum slope = %s\n", qpf::format_g17(slope(log_q)).c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partition-function estimation: classical sampling baseline and "
               "its quantum-walk counterpart, simulated exactly at desk scale"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string dump_chain;
  std::vector<double> eps_list{0.4, 0.2, 0.1};
  std::vector<double> beta_list;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--model", args.model, "model file")->required();
    cmd->add_option("--beta", args.beta, "inverse temperature (final for schedules)");
    cmd->add_option("--eps", args.eps, "relative accuracy");
    cmd->add_option("--seed", args.seed, "random seed (required for stochastic verbs)");
    cmd->add_option("--out", args.out, "output path (stdout if omitted)");
    cmd->add_option("--trials", args.trials, "independent runs to emit");
    cmd->add_option("--cap-amplitudes", args.cap, "simulated amplitude cap");
    cmd->add_option("--target-low", args.target_low, "schedule ratio lower target");
    cmd->add_option("--target-high", args.target_high, "schedule ratio upper target");
  };

  auto* exact = app.add_subcommand("exact", "exact partition function and Boltzmann summary");
  add_common(exact);
  auto* schedule = app.add_subcommand("schedule", "build and print a cooling schedule");
  add_common(schedule);
  auto* classical = app.add_subcommand("classical", "classical sampling estimate");
  add_common(classical);
  auto* quantum = app.add_subcommand("quantum", "quantum estimate (perfect or walk mode)");
  add_common(quantum);
  quantum->add_option("--mode", args.mode, "perfect|walk");
  auto* analyze = app.add_subcommand("walk-analyze", "walk spectrum and gap check");
  add_common(analyze);
  analyze->add_option("--dump-chain", dump_chain, "also dump the transition matrix CSV");
  auto* bench = app.add_subcommand("bench", "epsilon sweep: classical steps vs quantum queries");
  add_common(bench);
  bench->add_option("--eps-list", eps_list, "accuracies to sweep");
  bench->add_option("--beta-list", beta_list, "final betas to sweep (schedule lengths)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (exact->parsed()) return run_exact(args);
    if (schedule->parsed()) return run_schedule(args);
    if (classical->parsed()) return run_classical(args);
    if (quantum->parsed()) return run_quantum(args);
    if (analyze->parsed()) return run_walk_analyze(args, dump_chain);
    if (bench->parsed()) return run_bench(args, eps_list, beta_list);
  } catch (const qpf::PipelineError& e) {
    std::cerr << (e.cap ? "cap exceeded: " : "error: ") << e.what()
              << " (queries so far: walk_ops " << e.ledger.total.walk_ops << ", reflections "
              << e.ledger.total.reflection_ops << ", samples "
              << e.ledger.total.samples_prepared << ")\n";
    return e.cap ? kExitCap : kExitConfig;
  } catch (const qpf::CapError& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return kExitCap;
  } catch (const qpf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
