#include "lmirep/pipeline.h"

#include <algorithm>
#include <sstream>

namespace lmirep {

const char* to_string(Route r) {
  switch (r) {
    case Route::SosConcave: return "sos-concave";
    case Route::StrictQc: return "strict-qc";
    case Route::Direct: return "direct";
  }
  return "?";
}

LiftedRepresentation build_direct(const UnionSet& s, int N, MomentMode mode,
                                  const UnionOptions& union_opts) {
  s.validate();
  std::vector<LiftedRepresentation> reps;
  for (const auto& b : s.blocks) reps.push_back(build_moment_lmi(b, N, mode));
  if (reps.size() == 1) return reps[0];
  return build_union(reps, union_opts).output;
}

int minimum_order(const UnionSet& s) {
  int N = 1;
  for (const auto& b : s.blocks) N = std::max(N, minimum_order(b));
  return N;
}

namespace {

int minimum_order(const CoverPlan& plan) {
  int N = 1;
  for (const auto& p : plan.patches) {
    for (const auto& pc : p.pieces) N = std::max(N, minimum_order(pc.set));
  }
  return N;
}

}  // namespace

PipelineResult run_pipeline(const UnionSet& s, const PipelineOptions& opts) {
  s.validate();
  PipelineResult r;
  r.box = opts.box ? *opts.box : bounding_box(s, opts.verify.sdp);
  if (opts.route) {
    r.route = *opts.route;
  } else {
    r.classification = classify(s, r.box, opts.classify);
    const std::string& route = r.classification->route;
    r.route = route == "sos-concave" ? Route::SosConcave : route == "strict-qc" ? Route::StrictQc : Route::Direct;
  }
  int N0 = minimum_order(s);
  if (r.route == Route::StrictQc) {
    r.plan = plan_cover(s, r.box, opts.cover);
    N0 = minimum_order(*r.plan);
  }
  for (int N = N0; N <= std::max(N0, opts.max_order); ++N) {
    r.representation = r.plan ? build_cover_representation(*r.plan, N, opts.mode, opts.union_opts).output
                              : build_direct(s, N, opts.mode, opts.union_opts);
    r.representation.metadata["route"] = to_string(r.route);
    r.report = compare(r.representation, s, r.box, opts.verify);
    r.order = N;
    r.verdict = r.report.verdict;
    r.attempts.push_back({N, r.report.verdict, r.report.max_abs_gap});
    if (r.verdict == "PASS") break;
  }
  return r;
}

nlohmann::json to_json(const PipelineResult& r) {
  nlohmann::json attempts = nlohmann::json::array();
  for (const auto& a : r.attempts) {
    attempts.push_back({{"order", a.order}, {"verdict", a.verdict}, {"max_abs_gap", a.max_abs_gap}});
  }
  nlohmann::json j = {{"route", to_string(r.route)},
                      {"order", r.order},
                      {"verdict", r.verdict},
                      {"box", {{"lo", std::vector<double>(r.box.lo.data(), r.box.lo.data() + r.box.lo.size())},
                               {"hi", std::vector<double>(r.box.hi.data(), r.box.hi.data() + r.box.hi.size())}}},
                      {"attempts", attempts},
                      {"verify", to_json(r.report)}};
  if (r.classification) j["classify"] = to_json(*r.classification);
  if (r.plan) j["cover"] = to_json(*r.plan);
  return j;
}

std::string to_text(const PipelineResult& r) {
  std::ostringstream o;
  if (r.classification) o << to_text(*r.classification);
  o << "route: " << to_string(r.route) << "\n";
  for (const auto& a : r.attempts) {
    o << "  N=" << a.order << ": " << a.verdict << " (max |gap| " << a.max_abs_gap << ")\n";
  }
  o << r.verdict << " at N=" << r.order << ", route=" << to_string(r.route) << "\n";
  return o.str();
}

}  // namespace lmirep
