#pragma once

#include <filesystem>
#include <string>

#include "gridplan/errors.hpp"
#include "gridplan/grid_io.hpp"
#include "gridplan/heuristics/search.hpp"
#include "gridplan/json_reader.hpp"

namespace gridplan {

inline constexpr const char* record_format = "gridplan-run-record";

/// Serializes a run record. Without `with_timing` every wall-clock field is
/// left out, so records of evaluation-budgeted runs are reproducible byte for
/// byte.
inline Json record_to_json(const RunRecord& r, bool with_timing) {
  Json j{{"format", record_format},
         {"version", 1},
         {"algorithm", r.algorithm},
         {"problem", r.problem},
         {"seed", r.seed},
         {"status", r.status},
         {"timing", with_timing}};
  if (!r.error.empty()) j["error"] = r.error;
  j["total_evals"] = r.total_evals;
  j["local_optimum"] = r.local_optimum;
  j["best_candidate"] = r.best_candidate.to_string();
  if (r.best) {
    j["best"] = {{"level", r.best->level},
                 {"raw_cost", r.best->raw_cost},
                 {"normalized", r.best->normalized},
                 {"investment", r.best->investment},
                 {"eval_class", to_string(r.best->eval_class)}};
  } else {
    j["best"] = nullptr;
  }
  Json classes = Json::object();
  for (auto c : {EvalClass::topology, EvalClass::powerflow, EvalClass::cost}) {
    Json e{{"count", r.counter(c).count}};
    if (with_timing) e["seconds"] = r.counter(c).seconds;
    classes[to_string(c)] = std::move(e);
  }
  j["eval_classes"] = std::move(classes);
  if (with_timing) {
    j["init_s"] = r.init_s;
    j["elapsed_s"] = r.elapsed_s;
  }
  Json traj = Json::array();
  for (const auto& t : r.trajectory) {
    Json p{{"eval_count", t.eval_count},
           {"level", t.level},
           {"raw_cost", t.raw_cost},
           {"normalized", t.normalized},
           {"candidate_hash", t.candidate_hash}};
    if (with_timing) p["elapsed_s"] = t.elapsed_s;
    traj.push_back(std::move(p));
  }
  j["trajectory"] = std::move(traj);
  return j;
}

/// Whether a parsed record carries wall-clock fields.
inline bool record_has_timing(const Json& doc) { return doc.is_object() && doc.value("timing", false); }

inline EvalClass parse_eval_class(const std::string& s, const std::string& where) {
  for (auto c : {EvalClass::topology, EvalClass::powerflow, EvalClass::cost})
    if (s == to_string(c)) return c;
  throw ParseError(where + ": unknown evaluation class '" + s + "'");
}

inline RunRecord record_from_json(const Json& doc, const std::string& origin = "record") {
  ObjectReader root(doc, origin);
  expect_format(root, record_format, 1);
  RunRecord r;
  r.algorithm = root.required<std::string>("algorithm");
  r.problem = root.required<std::string>("problem");
  r.seed = root.required<std::uint64_t>("seed");
  r.status = root.required<std::string>("status");
  root.value("timing", false);
  r.error = root.value<std::string>("error", "");
  r.total_evals = root.required<std::size_t>("total_evals");
  r.local_optimum = root.value("local_optimum", false);
  r.best_candidate = Candidate::from_string(root.required<std::string>("best_candidate"));
  if (const Json* b = root.child("best")) {
    ObjectReader br(*b, root.child_path("best"));
    EvaluationResult e;
    e.level = br.required<int>("level");
    e.raw_cost = br.required<double>("raw_cost");
    e.normalized = br.required<double>("normalized");
    e.investment = br.value("investment", 0.0);
    e.eval_class = parse_eval_class(br.required<std::string>("eval_class"), br.path());
    br.finish();
    r.best = std::move(e);
  }
  if (const Json* classes = root.child("eval_classes")) {
    ObjectReader cr(*classes, root.child_path("eval_classes"));
    for (auto c : {EvalClass::topology, EvalClass::powerflow, EvalClass::cost}) {
      if (const Json* e = cr.child(to_string(c))) {
        ObjectReader er(*e, cr.child_path(to_string(c)));
        auto& counter = r.by_class[static_cast<std::size_t>(c)];
        counter.count = er.required<std::size_t>("count");
        counter.seconds = er.value("seconds", 0.0);
        er.finish();
      }
    }
    cr.finish();
  }
  r.init_s = root.value("init_s", 0.0);
  r.elapsed_s = root.value("elapsed_s", 0.0);
  detail::for_each_entry(root, "trajectory", [&](ObjectReader& t) {
    TrajectoryPoint p;
    p.eval_count = t.required<std::size_t>("eval_count");
    p.level = t.required<int>("level");
    p.raw_cost = t.required<double>("raw_cost");
    p.normalized = t.required<double>("normalized");
    p.candidate_hash = t.required<std::string>("candidate_hash");
    p.elapsed_s = t.value("elapsed_s", 0.0);
    r.trajectory.push_back(std::move(p));
  });
  root.finish();
  return r;
}

inline void save_record(const RunRecord& r, const std::filesystem::path& path, bool with_timing) {
  write_text_file(path, record_to_json(r, with_timing).dump(1) + "\n");
}

inline RunRecord load_record(const std::filesystem::path& path) {
  return record_from_json(parse_json_text(read_text_file(path), path.string()), path.string());
}

}  // namespace gridplan
