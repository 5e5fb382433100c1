#include "lpoa/trace_io.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace lpoa {
namespace {

Json vec(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector to_vec(const Json& j, const char* what) {
  if (!j.is_array()) throw MalformedTrace(std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw MalformedTrace(std::string(what) + ": expected numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

template <typename T>
T field(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw MalformedTrace(std::string("missing field: ") + key);
  }
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw MalformedTrace(std::string("bad value for field: ") + key);
  }
}

const Json& sub(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw MalformedTrace(std::string("missing field: ") + key);
  }
  return obj.at(key);
}

Json halfspaces_json(const std::vector<Halfspace>& hs) {
  Json a = Json::array();
  for (const auto& h : hs) a.push_back({{"normal", vec(h.normal)}, {"offset", h.offset}});
  return a;
}

std::vector<Halfspace> halfspaces_from(const Json& a) {
  if (!a.is_array()) throw MalformedTrace("halfspaces: expected an array");
  std::vector<Halfspace> hs;
  for (const auto& h : a) hs.push_back({to_vec(sub(h, "normal"), "normal"), field<double>(h, "offset")});
  return hs;
}

Json config_json(const RunConfig& c) {
  return {{"problem_key", c.problem_key},
          {"p", c.p},
          {"p_star", NormExponent(c.p).p_star()},
          {"epsilon", c.epsilon},
          {"max_iterations", c.max_iterations},
          {"seed", c.seed},
          {"record_pairs", c.record_pairs},
          {"solver",
           {{"objective", c.solver.objective},
            {"gap", c.solver.gap},
            {"zero", c.solver.zero},
            {"vi", c.solver.vi},
            {"feasibility", c.solver.feasibility},
            {"max_newton", c.solver.max_newton}}},
          {"polytope",
           {{"feasibility", c.polytope.feasibility},
            {"merge", c.polytope.merge},
            {"bounding_box", c.polytope.bounding_box}}}};
}

RunConfig config_from(const Json& j) {
  RunConfig c;
  c.problem_key = field<std::string>(j, "problem_key");
  c.p = field<double>(j, "p");
  c.epsilon = field<double>(j, "epsilon");
  c.max_iterations = field<int>(j, "max_iterations");
  c.seed = field<std::uint64_t>(j, "seed");
  c.record_pairs = field<bool>(j, "record_pairs");
  const Json& s = sub(j, "solver");
  c.solver.objective = field<double>(s, "objective");
  c.solver.gap = field<double>(s, "gap");
  c.solver.zero = field<double>(s, "zero");
  c.solver.vi = field<double>(s, "vi");
  c.solver.feasibility = field<double>(s, "feasibility");
  c.solver.max_newton = field<int>(s, "max_newton");
  const Json& t = sub(j, "polytope");
  c.polytope.feasibility = field<double>(t, "feasibility");
  c.polytope.merge = field<double>(t, "merge");
  c.polytope.bounding_box = field<double>(t, "bounding_box");
  return c;
}

}  // namespace

Json polytope_to_json(const Polytope& poly) {
  Json verts = Json::array();
  for (const auto& v : poly.vertices()) verts.push_back(vec(v));
  return {{"dimension", poly.dimension()},
          {"halfspaces", halfspaces_json(poly.halfspaces())},
          {"vertices", verts},
          {"incidence", poly.incidence()}};
}

Json trace_to_json(const RunTrace& trace) {
  Json iters = Json::array();
  Json iter_ms = Json::array();
  for (const auto& it : trace.iterations) {
    iters.push_back({{"k", it.k},
                     {"farthest_vertex", vec(it.farthest_vertex)},
                     {"residual_norm", it.residual_norm},
                     {"support_point", vec(it.support_point)},
                     {"cut_normal", vec(it.cut_normal)},
                     {"x_opt", vec(it.x_opt)},
                     {"cut_applied", it.cut_applied},
                     {"vertex_count", it.vertex_count},
                     {"new_vertex_count", it.new_vertex_count},
                     {"removed_vertex_count", it.removed_vertex_count},
                     {"cache_hits", it.cache_hits}});
    iter_ms.push_back(it.wall_ms);
  }
  Json doc = {{"schema_version", kTraceSchemaVersion},
              {"config", config_json(trace.config)},
              {"initial_halfspace_count", trace.initial_halfspace_count},
              {"initial_halfspaces", halfspaces_json(trace.initial_halfspaces)},
              {"iterations", iters},
              {"termination", to_string(trace.termination)},
              {"termination_message", trace.termination_message}};
  if (trace.config.record_pairs) {
    Json pairs = Json::array();
    for (const auto& s : trace.support_pairs) {
      pairs.push_back({{"iteration", s.iteration}, {"y", vec(s.y)}, {"w", vec(s.w)}, {"level", s.level}});
    }
    doc["support_pairs"] = pairs;
  }
  if (trace.final_polytope) doc["final_polytope"] = polytope_to_json(*trace.final_polytope);
  doc["metadata"] = {{"total_ms", trace.total_ms},
                     {"threads", trace.threads},
                     {"iteration_wall_ms", iter_ms}};
  return doc;
}

std::string serialize_trace(const RunTrace& trace) { return trace_to_json(trace).dump(1) + "\n"; }

RunTrace trace_from_json(const Json& doc) {
  if (!doc.is_object()) throw MalformedTrace("trace must be a JSON object");
  if (field<int>(doc, "schema_version") != kTraceSchemaVersion) {
    throw MalformedTrace("unsupported schema_version");
  }
  RunTrace t;
  t.config = config_from(sub(doc, "config"));
  try {
    t.config.validate();
    t.termination = termination_from_string(field<std::string>(doc, "termination"));
  } catch (const InvalidInput& e) {
    throw MalformedTrace(e.what());
  }
  t.initial_halfspace_count = field<int>(doc, "initial_halfspace_count");
  t.initial_halfspaces = halfspaces_from(sub(doc, "initial_halfspaces"));
  if (static_cast<int>(t.initial_halfspaces.size()) != t.initial_halfspace_count) {
    throw MalformedTrace("initial_halfspace_count does not match initial_halfspaces");
  }
  if (t.initial_halfspaces.empty()) throw MalformedTrace("no initial halfspaces");
  const auto q = t.initial_halfspaces.front().normal.size();
  auto check_dim = [q](const Vector& v, const char* what) {
    if (v.size() != q) throw MalformedTrace(std::string(what) + ": wrong dimension");
  };
  for (const auto& h : t.initial_halfspaces) check_dim(h.normal, "initial_halfspaces");
  if (doc.contains("termination_message")) {
    t.termination_message = field<std::string>(doc, "termination_message");
  }

  const Json& iters = sub(doc, "iterations");
  if (!iters.is_array()) throw MalformedTrace("iterations: expected an array");
  const Json* iter_ms = nullptr;
  if (doc.contains("metadata") && doc["metadata"].is_object()) {
    const Json& m = doc["metadata"];
    if (m.contains("total_ms") && m["total_ms"].is_number()) t.total_ms = m["total_ms"].get<double>();
    if (m.contains("threads") && m["threads"].is_number_integer()) t.threads = m["threads"].get<int>();
    if (m.contains("iteration_wall_ms") && m["iteration_wall_ms"].is_array()) {
      iter_ms = &m["iteration_wall_ms"];
    }
  }
  for (size_t i = 0; i < iters.size(); ++i) {
    const Json& j = iters[i];
    IterationRecord r;
    r.k = field<int>(j, "k");
    r.farthest_vertex = to_vec(sub(j, "farthest_vertex"), "farthest_vertex");
    r.residual_norm = field<double>(j, "residual_norm");
    r.support_point = to_vec(sub(j, "support_point"), "support_point");
    r.cut_normal = to_vec(sub(j, "cut_normal"), "cut_normal");
    r.x_opt = to_vec(sub(j, "x_opt"), "x_opt");
    r.cut_applied = field<bool>(j, "cut_applied");
    r.vertex_count = field<int>(j, "vertex_count");
    r.new_vertex_count = field<int>(j, "new_vertex_count");
    r.removed_vertex_count = field<int>(j, "removed_vertex_count");
    r.cache_hits = field<int>(j, "cache_hits");
    check_dim(r.farthest_vertex, "farthest_vertex");
    check_dim(r.support_point, "support_point");
    if (r.cut_applied) check_dim(r.cut_normal, "cut_normal");
    if (r.k != static_cast<int>(i)) throw MalformedTrace("iteration indices are not consecutive");
    if (!(r.residual_norm >= 0.0)) throw MalformedTrace("negative residual_norm");
    if (iter_ms && i < iter_ms->size() && (*iter_ms)[i].is_number()) {
      r.wall_ms = (*iter_ms)[i].get<double>();
    }
    t.iterations.push_back(std::move(r));
  }
  if (doc.contains("support_pairs")) {
    const Json& pairs = doc["support_pairs"];
    if (!pairs.is_array()) throw MalformedTrace("support_pairs: expected an array");
    for (const auto& s : pairs) {
      SupportRecord r{field<int>(s, "iteration"), to_vec(sub(s, "y"), "y"), to_vec(sub(s, "w"), "w"),
                      field<double>(s, "level")};
      check_dim(r.y, "support_pairs.y");
      check_dim(r.w, "support_pairs.w");
      t.support_pairs.push_back(std::move(r));
    }
  }
  if (doc.contains("final_polytope")) {
    try {
      t.final_polytope = Polytope::from_halfspaces(
          halfspaces_from(sub(doc["final_polytope"], "halfspaces")), t.config.polytope);
    } catch (const MalformedTrace&) {
      throw;
    } catch (const std::exception& e) {
      throw MalformedTrace(std::string("final_polytope: ") + e.what());
    }
  }
  return t;
}

RunTrace parse_trace(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw MalformedTrace(std::string("invalid JSON: ") + e.what());
  }
  return trace_from_json(doc);
}

RunTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedTrace("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

Json report_to_json(const LemmaReport& r) {
  return {{"name", r.name},
          {"checked", r.checked},
          {"violations", r.violations},
          {"worst_margin", r.worst_margin},
          {"max_ratio", r.max_ratio},
          {"passed", r.passed()}};
}

Json verification_to_json(const TraceVerification& v) {
  return {{"pairs", v.pairs},
          {"checks",
           {report_to_json(v.support), report_to_json(v.hyperplane), report_to_json(v.separation),
            report_to_json(v.dual_norm), report_to_json(v.cut_accounting)}},
          {"passed", v.passed()}};
}

Json property_check_to_json(const PropertyCheck& c) {
  return {{"name", c.name},       {"p", c.p},
          {"q", c.q},             {"samples", c.samples},
          {"violations", c.violations}, {"worst_margin", c.worst_margin}};
}

void write_file_atomic(const std::string& path, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid()) + "." +
                       std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename into " + path + ": " + ec.message());
  }
}

}  // namespace lpoa
