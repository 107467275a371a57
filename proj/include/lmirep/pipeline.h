#pragma once

// End-to-end construction: classify the constraints, pick a route, build a
// lifted representation and verify it, raising the relaxation order until
// verification passes or the order cap is hit.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "lmirep/certify.h"
#include "lmirep/hull_union.h"
#include "lmirep/localize.h"
#include "lmirep/moment.h"
#include "lmirep/verify.h"

namespace lmirep {

enum class Route { SosConcave, StrictQc, Direct };

const char* to_string(Route r);

struct PipelineOptions {
  MomentMode mode = MomentMode::Preordering;
  int max_order = 5;
  /// Defaults to bounding_box(s).
  std::optional<Box> box;
  /// Skips classification and uses this route.
  std::optional<Route> route;
  ClassifyOptions classify;
  /// Hull-mode centers with cover completion.
  CoverOptions cover = [] {
    CoverOptions c;
    c.mode = CoverMode::Hull;
    c.complete = true;
    return c;
  }();
  VerifyOptions verify;
  UnionOptions union_opts;
};

struct PipelineAttempt {
  int order = 0;
  std::string verdict;
  double max_abs_gap = 0.0;
};

struct PipelineResult {
  Route route = Route::Direct;
  std::optional<ClassifyReport> classification;
  std::optional<CoverPlan> plan;
  Box box;
  std::vector<PipelineAttempt> attempts;
  /// Order of the returned representation (the last one tried).
  int order = 0;
  LiftedRepresentation representation;
  VerifyReport report;
  /// PASS, FAIL or INCONCLUSIVE from the last verification.
  std::string verdict;
};

/// Direct moment build of every block at order N, glued by build_union when
/// there is more than one block.
LiftedRepresentation build_direct(const UnionSet& s, int N, MomentMode mode = MomentMode::Preordering,
                                  const UnionOptions& union_opts = {});

/// Smallest order accepted by every block of s.
int minimum_order(const UnionSet& s);

PipelineResult run_pipeline(const UnionSet& s, const PipelineOptions& opts = {});

nlohmann::json to_json(const PipelineResult& r);
std::string to_text(const PipelineResult& r);

}  // namespace lmirep
