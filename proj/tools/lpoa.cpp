// Command-line front end: single runs, p-sweeps and trace verification.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lpoa/analysis.hpp"
#include "lpoa/experiment.hpp"
#include "lpoa/lp_checks.hpp"
#include "lpoa/svg_plot.hpp"
#include "lpoa/trace_io.hpp"

namespace {

using namespace lpoa;

constexpr int kExitUsage = 64;
constexpr int kExitDataErr = 65;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("LPOA_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring unparsable LPOA_SEED='" << env << "'\n";
    }
  }
  return kDefaultSeed;
}

struct RunFlags {
  std::string problem;
  double p = 2.0;
  double eps = 0.0;
  int max_iters = 1000;
  std::string out;
  std::string svg;
  std::optional<std::uint64_t> seed;
  bool record_pairs = false;
};

struct SweepFlags {
  std::string problem;
  std::string p_list = "1.25,1.5,2,3,4,8";
  std::optional<double> eps;
  std::string out_dir;
  int jobs = 1;
  int max_iters = 1000;
  std::optional<std::uint64_t> seed;
  bool svg = false;
  bool record_pairs = false;
};

struct VerifyFlags {
  std::string trace;
  double eta = 0.1;
  bool self_test = false;
  int samples = kDefaultPropertySamples;
};

int usage_error(const CLI::App& app, const std::string& msg) {
  std::cerr << "error: " << msg << "\n\n" << app.help();
  return kExitUsage;
}

int cmd_run(const RunFlags& f, const CLI::App& app) {
  RunConfig cfg;
  cfg.problem_key = f.problem;
  cfg.p = f.p;
  cfg.epsilon = f.eps;
  cfg.max_iterations = f.max_iters;
  cfg.seed = f.seed.value_or(default_seed());
  cfg.record_pairs = f.record_pairs;
  ProblemInstance prob;
  try {
    prob = make_problem(f.problem);
    cfg.validate();
  } catch (const InvalidInput& e) {
    return usage_error(app, e.what());
  }
  const RunTrace trace = run(prob, cfg);
  const std::string doc = serialize_trace(trace);
  if (f.out.empty()) {
    std::cout << doc;
  } else {
    write_file_atomic(f.out, doc);
  }
  const auto series = hausdorff_series(trace);
  const RateFit fit = fit_trace(trace, prob.q);
  if (!f.svg.empty()) {
    write_file_atomic(f.svg, render_loglog_svg({{"p = " + p_label(f.p), monotone_envelope(series),
                                                 fit.points_used >= 2 ? std::optional(fit) : std::nullopt}},
                                               f.problem));
  }
  std::fprintf(stderr, "%s p=%g eps=%g: %s after %zu iterations, final error %.6g",
               f.problem.c_str(), f.p, f.eps, to_string(trace.termination).c_str(),
               trace.iterations.size(), series.empty() ? 0.0 : series.back());
  if (fit.reliable) {
    std::fprintf(stderr, ", c_hat %.4f (r2 %.4f)\n", fit.c_hat, fit.r_squared);
  } else {
    std::fprintf(stderr, ", too few points for a rate fit\n");
  }
  if (!trace.termination_message.empty()) std::fprintf(stderr, "  %s\n", trace.termination_message.c_str());
  switch (trace.termination) {
    case Termination::Converged:
      return 0;
    case Termination::MaxIterations:
      return 2;
    case Termination::SolverFailure:
      return 3;
  }
  return 3;
}

int cmd_sweep(const SweepFlags& f, const CLI::App& app) {
  SweepOptions opt;
  opt.problem_key = f.problem;
  opt.epsilon = f.eps;
  opt.max_iterations = f.max_iters;
  opt.seed = f.seed.value_or(default_seed());
  opt.jobs = f.jobs;
  opt.record_pairs = f.record_pairs;
  try {
    make_problem(f.problem);
    opt.p_values = parse_p_list(f.p_list);
    if (f.eps && !(*f.eps > 0.0)) throw InvalidInput("--eps must be positive");
    if (f.jobs < 1) throw InvalidInput("--jobs must be at least 1");
  } catch (const InvalidInput& e) {
    return usage_error(app, e.what());
  }
  const SweepResult res = run_sweep(opt);
  const std::string dir = f.out_dir.empty() ? "sweep-" + f.problem : f.out_dir;
  write_sweep_outputs(res, dir, f.svg);
  std::cout << summary_csv(res);
  for (const auto& e : res.entries) {
    if (!e.ok()) std::cerr << "p=" << p_label(e.p) << ": " << e.status << " " << e.message << "\n";
  }
  return res.any_failed() ? 1 : 0;
}

int cmd_verify(const VerifyFlags& f, const CLI::App& app) {
  if (f.self_test == !f.trace.empty()) {
    return usage_error(app, "give exactly one of --trace FILE or --self-test");
  }
  Json report;
  bool passed = true;
  if (f.self_test) {
    const auto checks = geometry_self_test({1.25, 1.5, 2.0, 3.0, 4.0, 8.0}, {2, 3, 4}, f.samples,
                                           default_seed());
    report["checks"] = Json::array();
    for (const auto& c : checks) {
      report["checks"].push_back(property_check_to_json(c));
      passed = passed && c.violations == 0;
    }
    report["passed"] = passed;
  } else {
    if (!(f.eta > 0.0)) return usage_error(app, "--eta must be positive");
    RunTrace trace;
    try {
      trace = load_trace(f.trace);
    } catch (const MalformedTrace& e) {
      std::cerr << "malformed trace: " << e.what() << "\n";
      return kExitDataErr;
    }
    const TraceVerification v = verify_trace(trace, f.eta);
    report = verification_to_json(v);
    report["trace"] = f.trace;
    report["eta"] = f.eta;
    passed = v.passed();
  }
  std::cout << report.dump(2) << "\n";
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outer approximation of convex vector optimization problems in l_p norms"};
  app.require_subcommand(1);

  RunFlags rf;
  auto* run_cmd = app.add_subcommand("run", "Run the outer approximation for one (problem, p)");
  run_cmd->add_option("--problem", rf.problem, "example1-q2 | example1-q3 | ellipse | example2")
      ->required();
  run_cmd->add_option("--p", rf.p, "Norm exponent in (1, inf)")->required();
  run_cmd->add_option("--eps", rf.eps, "Hausdorff tolerance")->required();
  run_cmd->add_option("--max-iters", rf.max_iters, "Iteration limit")->capture_default_str();
  run_cmd->add_option("--out", rf.out, "Trace JSON path (stdout if omitted)");
  run_cmd->add_option("--svg", rf.svg, "Log-log plot of the error series");
  run_cmd->add_option("--seed", rf.seed, "Seed (default: LPOA_SEED or 42)");
  run_cmd->add_flag("--record-pairs", rf.record_pairs,
                    "Store every solved support point for verification");

  SweepFlags sf;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run one problem for a list of p values");
  sweep_cmd->add_option("--problem", sf.problem, "Problem key")->required();
  sweep_cmd->add_option("--p-list", sf.p_list, "Comma-separated p values")->capture_default_str();
  sweep_cmd->add_option("--eps", sf.eps, "Tolerance (default per problem)");
  sweep_cmd->add_option("--out-dir", sf.out_dir, "Output directory (default sweep-<problem>)");
  sweep_cmd->add_option("--jobs", sf.jobs, "Runs executed in parallel")->capture_default_str();
  sweep_cmd->add_option("--max-iters", sf.max_iters, "Iteration limit per run")
      ->capture_default_str();
  sweep_cmd->add_option("--seed", sf.seed, "Seed (default: LPOA_SEED or 42)");
  sweep_cmd->add_flag("--svg", sf.svg, "Also write sweep.svg");
  sweep_cmd->add_flag("--record-pairs", sf.record_pairs,
                      "Store every solved support point in the traces");

  VerifyFlags vf;
  auto* verify_cmd = app.add_subcommand("verify", "Check a trace against the lemma suite");
  verify_cmd->add_option("--trace", vf.trace, "Trace JSON written by run or sweep");
  verify_cmd->add_option("--eta", vf.eta, "Deviation parameter")->capture_default_str();
  verify_cmd->add_flag("--self-test", vf.self_test, "Run the sampled l_p geometry checks");
  verify_cmd->add_option("--samples", vf.samples, "Samples per self-test check")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  try {
    if (*run_cmd) return cmd_run(rf, *run_cmd);
    if (*sweep_cmd) return cmd_sweep(sf, *sweep_cmd);
    return cmd_verify(vf, *verify_cmd);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 70;
  }
}
