#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lpoa/experiment.hpp"
#include "lpoa/svg_plot.hpp"
#include "lpoa/trace_io.hpp"

using namespace lpoa;
namespace fs = std::filesystem;

namespace {

RunTrace small_trace(bool pairs = false) {
  RunConfig c;
  c.problem_key = "example1-q2";
  c.p = 1.5;
  c.epsilon = 1e-2;
  c.record_pairs = pairs;
  return run(c);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("lpoa_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("trace round trip") {
  const RunTrace t = small_trace(true);
  const std::string text = serialize_trace(t);
  const RunTrace back = parse_trace(text);
  CHECK(serialize_trace(back) == text);
  REQUIRE(back.iterations.size() == t.iterations.size());
  for (size_t k = 0; k < t.iterations.size(); ++k) {
    // Shortest round-trip formatting restores every double exactly.
    CHECK(back.iterations[k].residual_norm == t.iterations[k].residual_norm);
    CHECK(back.iterations[k].cut_normal == t.iterations[k].cut_normal);
    CHECK(back.iterations[k].support_point == t.iterations[k].support_point);
  }
  CHECK(back.support_pairs.size() == t.support_pairs.size());
  CHECK(back.termination == t.termination);
  CHECK(back.config.p == t.config.p);
  REQUIRE(back.final_polytope.has_value());
  CHECK(back.final_polytope->vertices().size() == t.final_polytope->vertices().size());

  const Json doc = trace_to_json(t);
  CHECK(doc["schema_version"] == 1);
  for (const char* key : {"config", "initial_halfspace_count", "iterations", "termination", "metadata"}) {
    CHECK(doc.contains(key));
  }
  CHECK_FALSE(doc["iterations"][0].contains("wall_ms"));
  CHECK(doc["metadata"]["iteration_wall_ms"].size() == t.iterations.size());
}

TEST_CASE("identical runs serialize identically apart from metadata") {
  RunTrace a = small_trace(), b = small_trace();
  Json ja = trace_to_json(a), jb = trace_to_json(b);
  ja.erase("metadata");
  jb.erase("metadata");
  CHECK(ja.dump() == jb.dump());
  // Timings are the only difference: equalize them and the bytes match.
  b.total_ms = a.total_ms;
  for (size_t k = 0; k < a.iterations.size(); ++k) b.iterations[k].wall_ms = a.iterations[k].wall_ms;
  CHECK(serialize_trace(a) == serialize_trace(b));
}

TEST_CASE("malformed traces") {
  const Json good = trace_to_json(small_trace());
  CHECK_THROWS_AS(parse_trace("not json"), MalformedTrace);
  CHECK_THROWS_AS(parse_trace("[1, 2]"), MalformedTrace);
  auto broken = [&](auto&& edit) {
    Json d = good;
    edit(d);
    return d.dump();
  };
  CHECK_THROWS_AS(parse_trace(broken([](Json& d) { d["schema_version"] = 2; })), MalformedTrace);
  CHECK_THROWS_AS(parse_trace(broken([](Json& d) { d.erase("iterations"); })), MalformedTrace);
  CHECK_THROWS_AS(parse_trace(broken([](Json& d) { d["termination"] = "finished"; })),
                  MalformedTrace);
  CHECK_THROWS_AS(parse_trace(broken([](Json& d) { d["config"]["p"] = 0.5; })), MalformedTrace);
  CHECK_THROWS_AS(parse_trace(broken([](Json& d) { d["iterations"][0]["residual_norm"] = "x"; })),
                  MalformedTrace);
  CHECK_THROWS_AS(parse_trace(broken([](Json& d) { d["iterations"][1]["k"] = 7; })),
                  MalformedTrace);
  CHECK_THROWS_AS(
      parse_trace(broken([](Json& d) { d["iterations"][0]["support_point"] = Json::array({1.0}); })),
      MalformedTrace);
  CHECK_THROWS_AS(parse_trace(broken([](Json& d) { d["initial_halfspace_count"] = 9; })),
                  MalformedTrace);
  CHECK_THROWS_AS(load_trace("/nonexistent/trace.json"), MalformedTrace);
  // Metadata is optional.
  CHECK_NOTHROW(parse_trace(broken([](Json& d) { d.erase("metadata"); })));
}

TEST_CASE("atomic writes") {
  const fs::path dir = scratch_dir("atomic");
  const fs::path f = dir / "out.txt";
  write_file_atomic(f.string(), "first");
  write_file_atomic(f.string(), "second");
  CHECK(read_file(f) == "second");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  CHECK_THROWS(write_file_atomic((dir / "missing" / "x.txt").string(), "x"));
}

TEST_CASE("sweep outputs") {
  SweepOptions opt;
  opt.problem_key = "example1-q2";
  opt.p_values = {3.0, 1.5, 2.0};
  opt.epsilon = 1e-2;
  opt.jobs = 3;
  const SweepResult par = run_sweep(opt);
  const SweepResult ser = run_sweep_serial(opt);
  REQUIRE(par.entries.size() == 3);
  CHECK(par.entries[0].p == 1.5);
  CHECK(par.entries[2].p == 3.0);
  CHECK_FALSE(par.any_failed());
  const std::string csv = summary_csv(par);
  CHECK(csv == summary_csv(ser));
  CHECK(csv.rfind(std::string(kSummaryHeader) + "\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("\n1.5,3,") != std::string::npos);
  for (size_t i = 0; i < 3; ++i) {
    Json a = trace_to_json(par.entries[i].trace), b = trace_to_json(ser.entries[i].trace);
    a.erase("metadata");
    b.erase("metadata");
    CHECK(a == b);
  }

  const fs::path dir = scratch_dir("sweep");
  write_sweep_outputs(par, dir.string(), true);
  for (const char* name : {"summary.csv", "status.csv", "sweep.svg", "trace_p1.5.json",
                           "trace_p2.json", "trace_p3.json"}) {
    CHECK(fs::exists(dir / name));
  }
  CHECK(read_file(dir / "summary.csv") == csv);
  CHECK(read_file(dir / "status.csv").find("2,converged,") != std::string::npos);
  CHECK(parse_trace(read_file(dir / "trace_p2.json")).config.p == 2.0);

  opt.p_values = {2.0};
  const std::string single = summary_csv(run_sweep(opt));
  CHECK(std::count(single.begin(), single.end(), '\n') == 2);
}

TEST_CASE("failed runs are reported in the status table") {
  SweepOptions opt;
  opt.problem_key = "example1-q2";
  opt.p_values = {2.0, 4.0};
  opt.epsilon = 1e-6;
  opt.max_iterations = 2;
  const SweepResult res = run_sweep(opt);
  CHECK(res.any_failed());
  CHECK(summary_csv(res) == std::string(kSummaryHeader) + "\n");
  CHECK(status_csv(res).find("4,max_iterations,2,") != std::string::npos);
}

TEST_CASE("p lists and defaults") {
  CHECK(parse_p_list("1.25,2, 8") == std::vector<double>{1.25, 2.0, 8.0});
  CHECK_THROWS_AS(parse_p_list(""), InvalidInput);
  CHECK_THROWS_AS(parse_p_list("2,x"), InvalidInput);
  CHECK_THROWS_AS(parse_p_list("2,1"), InvalidInput);
  CHECK_THROWS_AS(parse_p_list("2abc"), InvalidInput);
  const auto m = ExperimentMatrix::defaults();
  CHECK(m.p_values == std::vector<double>{1.25, 1.5, 2.0, 3.0, 4.0, 8.0});
  CHECK(m.epsilon_for("example1-q2") == 1e-4);
  CHECK(m.epsilon_for("example1-q3") == 0.01);
  CHECK(m.epsilon_for("ellipse") == 1e-3);
  CHECK(m.epsilon_for("example2") == 0.05);
  CHECK(p_label(1.25) == "1.25");
  CHECK(p_label(8.0) == "8");
}

TEST_CASE("svg plot") {
  const RunTrace t = small_trace();
  const auto env = monotone_envelope(hausdorff_series(t));
  const auto fit = fit_rate(env, 2, t.config.epsilon);
  const std::string svg = render_loglog_svg({{"p = 1.5", env, fit}, {"p < & >", env, std::nullopt}},
                                            "example1-q2");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("width=\"800\" height=\"600\"") != std::string::npos);
  CHECK(std::count(svg.begin(), svg.end(), '\n') > 10);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  CHECK(svg.find(">10<") != std::string::npos);
  CHECK(svg.find("p &lt; &amp; &gt;") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  // Empty input still renders a frame.
  CHECK(render_loglog_svg({}, "empty").find("</svg>") != std::string::npos);
}

TEST_CASE("report json") {
  const auto v = verify_trace(small_trace());
  const Json j = verification_to_json(v);
  CHECK(j["passed"] == true);
  CHECK(j["checks"].size() == 5);
  CHECK(j["checks"][0]["name"] == "support_conditions");
}
