#include "lpoa/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "lpoa/svg_plot.hpp"
#include "lpoa/trace_io.hpp"

namespace lpoa {

ExperimentMatrix ExperimentMatrix::defaults() {
  return {{"example1-q3", "example1-q2", "ellipse", "example2"},
          {1.25, 1.5, 2.0, 3.0, 4.0, 8.0},
          {{"example1-q2", 1e-4}, {"example1-q3", 0.01}, {"ellipse", 1e-3}, {"example2", 0.05}}};
}

double ExperimentMatrix::epsilon_for(const std::string& key) const {
  const auto it = epsilons.find(key);
  if (it == epsilons.end()) throw UnknownProblem(key);
  return it->second;
}

bool SweepResult::any_failed() const {
  return std::any_of(entries.begin(), entries.end(), [](const SweepEntry& e) { return !e.ok(); });
}

RateFit fit_trace(const RunTrace& trace, int q) {
  const auto series = hausdorff_series(trace);
  if (series.empty()) return {};
  return fit_rate(monotone_envelope(series), q, trace.config.epsilon);
}

namespace {

SweepEntry run_entry(const ProblemInstance& prob, const SweepOptions& opt, double p, double eps) {
  SweepEntry e;
  e.p = p;
  e.epsilon = eps;
  try {
    e.p_star = NormExponent(p).p_star();
    RunConfig cfg;
    cfg.problem_key = opt.problem_key;
    cfg.p = p;
    cfg.epsilon = eps;
    cfg.max_iterations = opt.max_iterations;
    cfg.seed = opt.seed;
    cfg.record_pairs = opt.record_pairs;
    e.trace = run(prob, cfg);
    e.status = to_string(e.trace.termination);
    e.message = e.trace.termination_message;
    e.iterations = static_cast<int>(e.trace.iterations.size());
    e.fit = fit_trace(e.trace, prob.q);
  } catch (const std::exception& ex) {
    e.status = "error";
    e.message = ex.what();
  }
  return e;
}

SweepResult prepare(const SweepOptions& opt, ProblemInstance& prob, double& eps) {
  prob = make_problem(opt.problem_key);
  eps = opt.epsilon ? *opt.epsilon : ExperimentMatrix::defaults().epsilon_for(opt.problem_key);
  if (opt.p_values.empty()) throw InvalidInput("sweep: empty p list");
  SweepResult res;
  res.problem_key = opt.problem_key;
  res.q = prob.q;
  res.entries.resize(opt.p_values.size());
  return res;
}

void sort_by_p(SweepResult& res) {
  std::stable_sort(res.entries.begin(), res.entries.end(),
                   [](const SweepEntry& a, const SweepEntry& b) { return a.p < b.p; });
}

}  // namespace

SweepResult run_sweep(const SweepOptions& opt) {
  ProblemInstance prob;
  double eps = 0.0;
  SweepResult res = prepare(opt, prob, eps);
  const int n = static_cast<int>(opt.p_values.size());
  const int jobs = std::max(1, std::min(opt.jobs, n));
  // Runs share only the read-only problem instance.
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (int i = 0; i < n; ++i) res.entries[i] = run_entry(prob, opt, opt.p_values[i], eps);
  sort_by_p(res);
  return res;
}

SweepResult run_sweep_serial(const SweepOptions& opt) {
  ProblemInstance prob;
  double eps = 0.0;
  SweepResult res = prepare(opt, prob, eps);
  for (size_t i = 0; i < opt.p_values.size(); ++i) {
    res.entries[i] = run_entry(prob, opt, opt.p_values[i], eps);
  }
  sort_by_p(res);
  return res;
}

std::string summary_csv(const SweepResult& res) {
  std::ostringstream o;
  o << kSummaryHeader << '\n';
  char buf[160];
  for (const auto& e : res.entries) {
    if (!e.ok()) continue;
    std::snprintf(buf, sizeof buf, "%s,%.6g,%.4f,%.4f,%d\n", p_label(e.p).c_str(), e.p_star,
                  e.fit.c_hat, e.fit.r_squared, e.iterations);
    o << buf;
  }
  return o.str();
}

std::string status_csv(const SweepResult& res) {
  std::ostringstream o;
  o << "p,status,iterations,message\n";
  for (const auto& e : res.entries) {
    std::string msg = e.message;
    std::replace(msg.begin(), msg.end(), '"', '\'');
    o << p_label(e.p) << ',' << e.status << ',' << e.iterations << ",\"" << msg << "\"\n";
  }
  return o.str();
}

void write_sweep_outputs(const SweepResult& res, const std::string& dir, bool svg) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  for (const auto& e : res.entries) {
    if (e.status == "error") continue;
    write_file_atomic((base / ("trace_p" + p_label(e.p) + ".json")).string(),
                      serialize_trace(e.trace));
  }
  write_file_atomic((base / "summary.csv").string(), summary_csv(res));
  write_file_atomic((base / "status.csv").string(), status_csv(res));
  if (svg) {
    std::vector<PlotSeries> curves;
    for (const auto& e : res.entries) {
      if (e.status == "error" || e.trace.iterations.empty()) continue;
      curves.push_back({"p = " + p_label(e.p), monotone_envelope(hausdorff_series(e.trace)),
                        e.fit.points_used >= 2 ? std::optional<RateFit>(e.fit) : std::nullopt});
    }
    write_file_atomic((base / "sweep.svg").string(),
                      render_loglog_svg(curves, res.problem_key + ": monotone envelope and fit"));
  }
}

std::vector<double> parse_p_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InvalidInput("bad p value: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw InvalidInput("bad p value: '" + item + "'");
    }
    NormExponent check(p);
    out.push_back(p);
  }
  if (out.empty()) throw InvalidInput("empty p list");
  return out;
}

std::string p_label(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

}  // namespace lpoa
