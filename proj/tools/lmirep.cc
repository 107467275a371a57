// lmirep: build, glue, certify, localize and verify lifted LMI
// representations of semialgebraic sets.
//
// Exit codes: 0 success or PASS, 1 FAIL, 2 INCONCLUSIVE, 64 usage, 65 malformed
// input, 66 unreadable or unwritable file, 70 internal error.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "lmirep/certify.h"
#include "lmirep/hull_union.h"
#include "lmirep/localize.h"
#include "lmirep/moment.h"
#include "lmirep/pipeline.h"
#include "lmirep/set_io.h"
#include "lmirep/verify.h"

#ifndef LMIREP_VERSION
#define LMIREP_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lmirep;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitNoInput = 66;
constexpr int kExitSoftware = 70;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream o;
  for (unsigned int i = 0; i < len; ++i) o << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return o.str();
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Provenance {
  std::string command;
  uint64_t seed = 0;
  json inputs = json::array();
  json config = json::object();

  void add_input(const std::string& path, const std::string& contents) {
    inputs.push_back({{"path", path}, {"sha256", sha256_hex(contents)}});
  }

  json to_json() const {
    return {{"tool", "lmirep"},
            {"version", LMIREP_VERSION},
            {"command", command},
            {"seed", seed},
            {"inputs", inputs},
            {"config", config},
            {"timestamp", utc_timestamp()}};
  }
};

// `at` names the provenance object inside doc; its timestamp and the hash
// itself are left out of the hashed bytes.
void write_json(const fs::path& path, json doc, const json::json_pointer& at) {
  json hashed = doc;
  hashed[at].erase("timestamp");
  doc[at]["output_sha256"] = sha256_hex(hashed.dump());
  write_text_file(path, doc.dump(2) + "\n");
}

void write_rep_with_provenance(const fs::path& path, const LiftedRepresentation& rep, const Provenance& p) {
  json j = rep_to_json(rep);
  j["metadata"]["provenance"] = p.to_json();
  write_json(path, std::move(j), json::json_pointer("/metadata/provenance"));
}

void write_report(const fs::path& path, json report, const Provenance& p) {
  report["provenance"] = p.to_json();
  write_json(path, std::move(report), json::json_pointer("/provenance"));
}

UnionSet load_set(const std::string& path, Provenance& p) {
  const std::string text = read_text_file(path);
  p.add_input(path, text);
  try {
    return parse_set(text);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

LiftedRepresentation load_rep(const std::string& path, Provenance& p) {
  const std::string text = read_text_file(path);
  p.add_input(path, text);
  try {
    return rep_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::vector<double> parse_numbers(const std::string& s) {
  std::vector<double> out;
  std::string tok;
  std::istringstream in(s);
  while (std::getline(in, tok, ',')) {
    std::istringstream t(tok);
    double v;
    if (!(t >> v) || !(t >> std::ws).eof()) throw UsageError("not a number list: '" + s + "'");
    out.push_back(v);
  }
  return out;
}

Eigen::VectorXd parse_point(const std::string& s, int n, const char* what) {
  const std::vector<double> v = parse_numbers(s);
  if (static_cast<int>(v.size()) != n) {
    throw UsageError(std::string(what) + " needs " + std::to_string(n) + " comma-separated values");
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), n);
}

// "lo,hi" for every axis or "lo1,hi1,...,lon,hin".
Box parse_box(const std::string& s, int n) {
  const std::vector<double> v = parse_numbers(s);
  Eigen::VectorXd lo(n), hi(n);
  if (v.size() == 2) {
    lo.setConstant(v[0]);
    hi.setConstant(v[1]);
  } else if (static_cast<int>(v.size()) == 2 * n) {
    for (int i = 0; i < n; ++i) {
      lo(i) = v[static_cast<size_t>(2 * i)];
      hi(i) = v[static_cast<size_t>(2 * i + 1)];
    }
  } else {
    throw UsageError("--box expects lo,hi or 2n values");
  }
  if ((hi.array() <= lo.array()).any()) throw UsageError("--box needs lo < hi on every axis");
  return Box(lo, hi);
}

json box_json(const Box& b) {
  return {{"lo", std::vector<double>(b.lo.data(), b.lo.data() + b.lo.size())},
          {"hi", std::vector<double>(b.hi.data(), b.hi.data() + b.hi.size())}};
}

Box resolve_box(const std::string& flag, const UnionSet& s) {
  return flag.empty() ? bounding_box(s) : parse_box(flag, s.n);
}

// One point per line, coordinates separated by commas or blanks; '#' comments.
std::vector<Eigen::VectorXd> read_centers(const std::string& path, int n) {
  const std::string text = read_text_file(path);
  std::vector<Eigen::VectorXd> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = line.substr(0, line.find('#'));
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream ls(line);
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    if (!(ls >> std::ws).eof()) throw FormatError(path + ": bad number", line_no);
    if (v.empty()) continue;
    if (static_cast<int>(v.size()) != n) throw FormatError(path + ": expected " + std::to_string(n) + " coordinates", line_no);
    out.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), n));
  }
  if (out.empty()) throw FormatError(path + ": no centers");
  return out;
}

MomentMode parse_mode(const std::string& m) {
  try {
    return moment_mode_from_string(m);
  } catch (const std::invalid_argument&) {
    throw UsageError("--mode must be preordering or module");
  }
}

int verdict_exit(const std::string& v) { return v == "PASS" ? 0 : v == "FAIL" ? kExitFail : kExitInconclusive; }

std::string eigenvalue_csv(const ClassifyReport& r) {
  std::ostringstream o;
  o.precision(17);
  const int n = r.box.dim();
  o << "block,constraint";
  for (int i = 0; i < n; ++i) o << ",x" << (i + 1);
  o << ",gradient_norm,min_tangent_eigenvalue,nonsingular,quasi_concave\n";
  for (const auto& c : r.constraints) {
    for (const auto& p : c.points) {
      o << c.block << "," << c.constraint;
      for (int i = 0; i < n; ++i) o << "," << p.point(i);
      const double e = p.tangent_eigenvalues.size() ? p.tangent_eigenvalues.minCoeff() : 0.0;
      o << "," << p.gradient_norm << "," << e << "," << p.nonsingular << "," << p.quasi_concave << "\n";
    }
  }
  return o.str();
}

void emit_plots(const std::string& dir, const VerifyReport* v, const ClassifyReport* c) {
  if (dir.empty()) return;
  fs::create_directories(dir);
  if (v) write_text_file(fs::path(dir) / "gaps.csv", gap_csv(*v));
  if (c) write_text_file(fs::path(dir) / "eigenvalues.csv", eigenvalue_csv(*c));
}

// ---------------------------------------------------------------------------

struct BuildArgs {
  std::string set, out;
  int order = 0;
  std::string mode = "preordering";
};

int run_build(const BuildArgs& a) {
  Provenance p{"build-moment"};
  const UnionSet s = load_set(a.set, p);
  const MomentMode mode = parse_mode(a.mode);
  const int N = a.order > 0 ? a.order : minimum_order(s);
  p.config = {{"order", N}, {"mode", a.mode}};
  const LiftedRepresentation rep = build_direct(s, N, mode);
  write_rep_with_provenance(a.out, rep, p);
  std::cout << "wrote " << a.out << ": order " << N << ", " << rep.pencils.size() << " pencils, "
            << rep.num_lifted << " lifted variables\n";
  return 0;
}

struct UnionArgs {
  std::vector<std::string> reps;
  std::string out;
  bool probe = false;
};

int run_union(const UnionArgs& a) {
  Provenance p{"union"};
  std::vector<LiftedRepresentation> reps;
  for (const auto& r : a.reps) reps.push_back(load_rep(r, p));
  UnionOptions o;
  o.probe_boundedness = a.probe;
  p.config = {{"probe_boundedness", a.probe}};
  const UnionLift ul = build_union(reps, o);
  write_rep_with_provenance(a.out, ul.output, p);
  std::cout << "wrote " << a.out << ": " << reps.size() << " inputs, " << ul.output.num_lifted
            << " lifted variables\n";
  return 0;
}

struct CertifyArgs {
  std::string set, json_out, box, plots;
  uint64_t seed = 1;
  int samples = 64;
  double eig_tol = 1e-6;
  std::string pdlh_center;
  double pdlh_delta = 0.3;
  int pdlh_directions = 16;
  int pdlh_block = 0;
};

int run_certify(const CertifyArgs& a) {
  Provenance p{"certify", a.seed};
  const UnionSet s = load_set(a.set, p);
  ClassifyOptions o;
  o.seed = a.seed;
  o.samples_per_block = a.samples;
  o.certify.eig_tol = a.eig_tol;
  const Box box = resolve_box(a.box, s);
  p.config = {{"samples_per_block", a.samples}, {"eig_tol", a.eig_tol}, {"box", box_json(box)}};
  const ClassifyReport r = classify(s, box, o);
  std::cout << to_text(r);
  json report = {{"classify", to_json(r)}};
  int code = r.verdict == "NECESSARY-VIOLATED" ? kExitFail : r.verdict == "SUFFICIENT-PASS" ? 0 : kExitInconclusive;
  if (!a.pdlh_center.empty()) {
    if (a.pdlh_block < 0 || a.pdlh_block >= static_cast<int>(s.blocks.size())) throw UsageError("--pdlh-block out of range");
    PdlhOptions po;
    po.eig_tol = a.eig_tol;
    const PdlhReport pr = pdlh_probe(s.blocks[static_cast<size_t>(a.pdlh_block)],
                                     parse_point(a.pdlh_center, s.n, "--pdlh"), a.pdlh_delta, a.pdlh_directions, a.seed, po);
    std::cout << to_text(pr);
    report["pdlh"] = to_json(pr);
    p.config["pdlh"] = {{"center", a.pdlh_center}, {"delta", a.pdlh_delta}, {"directions", a.pdlh_directions}};
  }
  if (!a.json_out.empty()) write_report(a.json_out, report, p);
  emit_plots(a.plots, nullptr, &r);
  return code;
}

struct LocalizeArgs {
  std::string set, out, centers = "auto:8", delta = "auto", box, cover_mode = "convex", mode = "preordering";
  int order = 0;
  uint64_t seed = 1;
  bool complete = false;
};

int run_localize(const LocalizeArgs& a) {
  Provenance p{"localize", a.seed};
  const UnionSet s = load_set(a.set, p);
  CoverOptions o;
  o.seed = a.seed;
  o.complete = a.complete;
  if (a.cover_mode == "hull") o.mode = CoverMode::Hull;
  else if (a.cover_mode != "convex") throw UsageError("--cover must be convex or hull");
  if (a.centers.rfind("auto:", 0) == 0) {
    const std::vector<double> k = parse_numbers(a.centers.substr(5));
    if (k.size() != 1 || k[0] < 1 || k[0] != static_cast<int>(k[0])) throw UsageError("--centers auto:K needs a positive integer K");
    o.auto_count = static_cast<int>(k[0]);
  } else {
    const std::string text = read_text_file(a.centers);
    p.add_input(a.centers, text);
    o.centers = read_centers(a.centers, s.n);
  }
  if (a.delta != "auto") {
    const std::vector<double> d = parse_numbers(a.delta);
    if (d.size() != 1 || !(d[0] > 0)) throw UsageError("--delta must be auto or a positive number");
    o.delta = d[0];
  }
  const Box box = resolve_box(a.box, s);
  const CoverPlan plan = plan_cover(s, box, o);
  int N = a.order;
  if (N <= 0) {
    N = 1;
    for (const auto& patch : plan.patches) {
      for (const auto& pc : patch.pieces) N = std::max(N, minimum_order(pc.set));
    }
  }
  p.config = {{"centers", a.centers}, {"delta", a.delta}, {"order", N}, {"cover", a.cover_mode},
              {"mode", a.mode}, {"complete", a.complete}, {"box", box_json(box)}};
  const UnionLift ul = build_cover_representation(plan, N, parse_mode(a.mode));
  write_rep_with_provenance(a.out, ul.output, p);
  std::cout << "wrote " << a.out << ": " << plan.patches.size() << " patches (" << plan.provenance
            << " centers), order " << N << "\n";
  for (const auto& patch : plan.patches) {
    std::cout << "  center (";
    for (Eigen::Index i = 0; i < patch.center.size(); ++i) std::cout << (i ? ", " : "") << patch.center(i);
    std::cout << ") delta " << patch.delta << ", " << patch.pieces.size() << " piece(s)\n";
  }
  return 0;
}

struct VerifyArgs {
  std::string rep, set, json_out, csv, plots, box;
  int directions = 64;
  double tol = 1e-3;
  uint64_t seed = 1;
  int membership = 100;
  int resolution = 400;
};

int run_verify(const VerifyArgs& a) {
  Provenance p{"verify", a.seed};
  const LiftedRepresentation rep = load_rep(a.rep, p);
  const UnionSet s = load_set(a.set, p);
  if (rep.n != s.n) throw UsageError("representation and set differ in dimension");
  VerifyOptions o;
  o.directions = a.directions;
  o.tol = a.tol;
  o.seed = a.seed;
  o.membership_samples = a.membership;
  o.oracle.resolution = a.resolution;
  const Box box = resolve_box(a.box, s);
  p.config = {{"directions", a.directions}, {"tol", a.tol}, {"membership_samples", a.membership},
              {"resolution", a.resolution}, {"box", box_json(box)}};
  const VerifyReport r = compare(rep, s, box, o);
  std::cout << to_text(r);
  if (!a.json_out.empty()) write_report(a.json_out, {{"verify", to_json(r)}}, p);
  if (!a.csv.empty()) write_text_file(a.csv, gap_csv(r));
  emit_plots(a.plots, &r, nullptr);
  return verdict_exit(r.verdict);
}

struct PipelineArgs {
  std::string set, out, json_out, plots, box, mode = "preordering";
  int max_order = 5;
  int directions = 64;
  double tol = 1e-3;
  uint64_t seed = 1;
};

int run_pipeline_cmd(const PipelineArgs& a) {
  Provenance p{"pipeline", a.seed};
  const UnionSet s = load_set(a.set, p);
  PipelineOptions o;
  o.mode = parse_mode(a.mode);
  o.max_order = a.max_order;
  o.classify.seed = a.seed;
  o.cover.seed = a.seed;
  o.verify.seed = a.seed;
  o.verify.directions = a.directions;
  o.verify.tol = a.tol;
  if (!a.box.empty()) o.box = parse_box(a.box, s.n);
  const PipelineResult r = run_pipeline(s, o);
  p.config = {{"mode", a.mode}, {"max_order", a.max_order}, {"directions", a.directions},
              {"tol", a.tol}, {"box", box_json(r.box)}};
  std::cout << to_text(r);
  if (!a.out.empty()) write_rep_with_provenance(a.out, r.representation, p);
  if (!a.json_out.empty()) write_report(a.json_out, {{"pipeline", to_json(r)}}, p);
  emit_plots(a.plots, &r.report, r.classification ? &*r.classification : nullptr);
  return verdict_exit(r.verdict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifted LMI representations of semialgebraic sets and their convex hulls"};
  app.set_version_flag("--version", LMIREP_VERSION);
  app.require_subcommand(1);

  BuildArgs build;
  auto* c_build = app.add_subcommand("build-moment", "Moment relaxation of every block (glued when there are several)");
  c_build->add_option("set", build.set, "Set file")->required();
  c_build->add_option("-o,--output", build.out, "Representation JSON")->required();
  c_build->add_option("--order", build.order, "Relaxation order N (default: smallest admissible)");
  c_build->add_option("--mode", build.mode, "preordering or module")->capture_default_str();

  UnionArgs uni;
  auto* c_union = app.add_subcommand("union", "Lift of the convex hull of the union of representations");
  c_union->add_option("reps", uni.reps, "Representation JSON files")->required()->expected(1, -1);
  c_union->add_option("-o,--output", uni.out, "Representation JSON")->required();
  c_union->add_flag("--probe-boundedness", uni.probe, "Record axes along which an input looks unbounded");

  CertifyArgs cert;
  auto* c_cert = app.add_subcommand("certify", "Classify constraints: sos-concavity, quasi-concavity, redundancy");
  c_cert->add_option("set", cert.set, "Set file")->required();
  c_cert->add_option("--json", cert.json_out, "Write the JSON report here");
  c_cert->add_option("--box", cert.box, "Sampling box: lo,hi or lo1,hi1,...; default from a moment relaxation");
  c_cert->add_option("--seed", cert.seed, "Seed")->capture_default_str();
  c_cert->add_option("--samples", cert.samples, "Boundary samples per block")->capture_default_str();
  c_cert->add_option("--eig-tol", cert.eig_tol, "Eigenvalue tolerance")->capture_default_str();
  c_cert->add_option("--pdlh", cert.pdlh_center, "Also run the PDLH probe at this point (comma-separated)");
  c_cert->add_option("--pdlh-delta", cert.pdlh_delta, "Probe ball radius")->capture_default_str();
  c_cert->add_option("--pdlh-directions", cert.pdlh_directions, "Probe directions")->capture_default_str();
  c_cert->add_option("--pdlh-block", cert.pdlh_block, "Block probed")->capture_default_str();
  c_cert->add_option("--emit-plots", cert.plots, "Directory for CSV eigenvalue tables");

  LocalizeArgs loc;
  auto* c_loc = app.add_subcommand("localize", "Cover the boundary with balls and glue local moment relaxations");
  c_loc->add_option("set", loc.set, "Set file")->required();
  c_loc->add_option("-o,--output", loc.out, "Representation JSON")->required();
  c_loc->add_option("--centers", loc.centers, "auto:K or a file of centers")->capture_default_str();
  c_loc->add_option("--delta", loc.delta, "auto or a fixed radius")->capture_default_str();
  c_loc->add_option("--order", loc.order, "Relaxation order N (default: smallest admissible)");
  c_loc->add_option("--cover", loc.cover_mode, "convex (boundary of S) or hull (convex boundary)")->capture_default_str();
  c_loc->add_option("--mode", loc.mode, "preordering or module")->capture_default_str();
  c_loc->add_flag("--complete", loc.complete, "Add centers until every boundary candidate is covered");
  c_loc->add_option("--box", loc.box, "Box containing the set; default from a moment relaxation");
  c_loc->add_option("--seed", loc.seed, "Seed")->capture_default_str();

  VerifyArgs ver;
  auto* c_ver = app.add_subcommand("verify", "Compare a representation with a set (exit 0 PASS, 1 FAIL, 2 INCONCLUSIVE)");
  c_ver->add_option("rep", ver.rep, "Representation JSON")->required();
  c_ver->add_option("set", ver.set, "Set file")->required();
  c_ver->add_option("--directions", ver.directions, "Support directions")->capture_default_str();
  c_ver->add_option("--tol", ver.tol, "Support gap tolerance")->capture_default_str();
  c_ver->add_option("--seed", ver.seed, "Seed")->capture_default_str();
  c_ver->add_option("--membership-samples", ver.membership, "Membership samples")->capture_default_str();
  c_ver->add_option("--resolution", ver.resolution, "Oracle grid nodes per axis")->capture_default_str();
  c_ver->add_option("--box", ver.box, "Oracle box; default from a moment relaxation");
  c_ver->add_option("--json", ver.json_out, "Write the JSON report here");
  c_ver->add_option("--csv", ver.csv, "Write per-direction gaps as CSV");
  c_ver->add_option("--emit-plots", ver.plots, "Directory for CSV gap tables");

  PipelineArgs pipe;
  auto* c_pipe = app.add_subcommand("pipeline", "Classify, build, and verify with increasing order");
  c_pipe->add_option("set", pipe.set, "Set file")->required();
  c_pipe->add_option("-o,--output", pipe.out, "Representation JSON");
  c_pipe->add_option("--json", pipe.json_out, "Write the JSON report here");
  c_pipe->add_option("--max-order", pipe.max_order, "Order cap")->capture_default_str();
  c_pipe->add_option("--mode", pipe.mode, "preordering or module")->capture_default_str();
  c_pipe->add_option("--directions", pipe.directions, "Support directions")->capture_default_str();
  c_pipe->add_option("--tol", pipe.tol, "Support gap tolerance")->capture_default_str();
  c_pipe->add_option("--seed", pipe.seed, "Seed")->capture_default_str();
  c_pipe->add_option("--box", pipe.box, "Box containing the set; default from a moment relaxation");
  c_pipe->add_option("--emit-plots", pipe.plots, "Directory for CSV gap and eigenvalue tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*c_build) return run_build(build);
    if (*c_union) return run_union(uni);
    if (*c_cert) return run_certify(cert);
    if (*c_loc) return run_localize(loc);
    if (*c_ver) return run_verify(ver);
    if (*c_pipe) return run_pipeline_cmd(pipe);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FileError& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return kExitNoInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return kExitNoInput;
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSoftware;
  }
  return kExitUsage;
}
