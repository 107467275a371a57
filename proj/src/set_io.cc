#include "lmirep/set_io.h"

#include <cctype>
#include <fstream>
#include <sstream>

namespace lmirep {

FormatError::FormatError(const std::string& what, int line, int column)
    : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ")"
                                  : what),
      line_(line),
      column_(column) {}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write " + path.string());
  out << contents;
  if (!out) throw FileError("write failed for " + path.string());
}

namespace {

std::string_view trim(std::string_view s, size_t* lead = nullptr) {
  size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  if (lead) *lead = b;
  return s.substr(b, e - b);
}

}  // namespace

UnionSet parse_set(std::string_view text) {
  int n = 0;
  std::vector<BasicSet> blocks;
  bool have_block = false;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    size_t lead = 0;
    std::string_view line = trim(raw, &lead);
    if (line.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    const size_t sp = line.find_first_of(" \t");
    const std::string_view keyword = line.substr(0, sp);
    std::string_view rest;
    size_t rest_col = lead + line.size();
    if (sp != std::string_view::npos) {
      size_t rl = 0;
      rest = trim(line.substr(sp), &rl);
      rest_col = lead + sp + rl;
    }
    const int kw_col = static_cast<int>(lead) + 1;

    if (keyword == "vars") {
      if (n != 0) throw FormatError("duplicate 'vars' declaration", line_no, kw_col);
      std::string digits(rest);
      char* stop = nullptr;
      long v = std::strtol(digits.c_str(), &stop, 10);
      if (digits.empty() || *stop != '\0' || v <= 0 || v > 64) {
        throw FormatError("'vars' expects a positive integer", line_no,
                          static_cast<int>(rest_col) + 1);
      }
      n = static_cast<int>(v);
    } else if (keyword == "set") {
      if (n == 0) throw FormatError("'set' before 'vars'", line_no, kw_col);
      if (rest.empty() || rest.back() != ':') {
        throw FormatError("expected 'set <name>:'", line_no, static_cast<int>(rest_col) + 1);
      }
      std::string name(trim(rest.substr(0, rest.size() - 1)));
      if (name.empty()) throw FormatError("empty set name", line_no, static_cast<int>(rest_col) + 1);
      BasicSet b;
      b.n = n;
      b.name = std::move(name);
      blocks.push_back(std::move(b));
      have_block = true;
    } else if (keyword == "ineq" || keyword == "eq") {
      if (n == 0) throw FormatError("constraint before 'vars'", line_no, kw_col);
      if (!have_block) {
        BasicSet b;
        b.n = n;
        b.name = "main";
        blocks.push_back(std::move(b));
        have_block = true;
      }
      Polynomial p;
      try {
        p = parse_polynomial(rest, n);
      } catch (const ParseError& e) {
        throw FormatError(e.what(), line_no, static_cast<int>(rest_col + e.offset()) + 1);
      }
      if (keyword == "ineq") {
        blocks.back().inequalities.push_back(std::move(p));
      } else {
        blocks.back().equalities.push_back(std::move(p));
      }
    } else {
      throw FormatError("unknown directive '" + std::string(keyword) + "'", line_no, kw_col);
    }
    if (nl == text.size()) break;
  }
  if (n == 0) throw FormatError("missing 'vars' declaration");
  if (blocks.empty()) throw FormatError("no constraints");
  for (const auto& b : blocks) {
    if (b.equalities.empty() && b.inequalities.empty()) {
      throw FormatError("set '" + b.name + "' has no constraints");
    }
  }
  return UnionSet(std::move(blocks));
}

UnionSet read_set(const std::filesystem::path& path) { return parse_set(read_text_file(path)); }

std::string format_set(const UnionSet& s) {
  std::ostringstream out;
  out << "vars " << s.n << "\n";
  for (size_t k = 0; k < s.blocks.size(); ++k) {
    const auto& b = s.blocks[k];
    out << "set " << (b.name.empty() ? "block" + std::to_string(k) : b.name) << ":\n";
    for (const auto& f : b.equalities) out << "eq " << f.to_string() << "\n";
    for (const auto& h : b.inequalities) out << "ineq " << h.to_string() << "\n";
  }
  return out.str();
}

namespace {

nlohmann::json lower_triangle(const Eigen::MatrixXd& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) arr.push_back(m(i, j));
  }
  return arr;
}

Eigen::MatrixXd from_lower_triangle(const nlohmann::json& arr, int size) {
  const size_t expect = static_cast<size_t>(size) * static_cast<size_t>(size + 1) / 2;
  if (!arr.is_array() || arr.size() != expect) {
    throw FormatError("matrix: expected " + std::to_string(expect) + " lower-triangle entries");
  }
  Eigen::MatrixXd m(size, size);
  size_t k = 0;
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j <= i; ++j) {
      m(i, j) = m(j, i) = arr[k++].get<double>();
    }
  }
  return m;
}

}  // namespace

nlohmann::json rep_to_json(const LiftedRepresentation& rep) {
  nlohmann::json j;
  j["format"] = "lmirep.lifted";
  j["format_version"] = kRepFormatVersion;
  j["n"] = rep.n;
  j["num_lifted"] = rep.num_lifted;
  nlohmann::json pencils = nlohmann::json::array();
  for (const auto& p : rep.pencils) {
    nlohmann::json pj;
    pj["size"] = p.size;
    pj["A0"] = lower_triangle(p.A0);
    pj["Ax"] = nlohmann::json::array();
    for (const auto& m : p.Ax) pj["Ax"].push_back(lower_triangle(m));
    pj["Bu"] = nlohmann::json::array();
    for (const auto& m : p.Bu) pj["Bu"].push_back(lower_triangle(m));
    pencils.push_back(std::move(pj));
  }
  j["pencils"] = std::move(pencils);
  nlohmann::json eqs = nlohmann::json::array();
  for (const auto& e : rep.equalities) {
    nlohmann::json ej;
    ej["coeffs"] = std::vector<double>(e.coeffs.data(), e.coeffs.data() + e.coeffs.size());
    ej["constant"] = e.constant;
    eqs.push_back(std::move(ej));
  }
  j["equalities"] = std::move(eqs);
  j["metadata"] = rep.metadata;
  return j;
}

LiftedRepresentation rep_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string()) != "lmirep.lifted") {
      throw FormatError("not a lifted representation document");
    }
    const int version = j.at("format_version").get<int>();
    if (version != kRepFormatVersion) {
      throw FormatError("unsupported format_version " + std::to_string(version));
    }
    LiftedRepresentation rep(j.at("n").get<int>(), j.at("num_lifted").get<int>());
    for (const auto& pj : j.at("pencils")) {
      const int size = pj.at("size").get<int>();
      LinearPencil p;
      p.size = size;
      p.A0 = from_lower_triangle(pj.at("A0"), size);
      for (const auto& m : pj.at("Ax")) p.Ax.push_back(from_lower_triangle(m, size));
      for (const auto& m : pj.at("Bu")) p.Bu.push_back(from_lower_triangle(m, size));
      rep.pencils.push_back(std::move(p));
    }
    for (const auto& ej : j.at("equalities")) {
      AffineEquality e;
      const auto c = ej.at("coeffs").get<std::vector<double>>();
      e.coeffs = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
      e.constant = ej.at("constant").get<double>();
      rep.equalities.push_back(std::move(e));
    }
    if (j.contains("metadata")) rep.metadata = j.at("metadata");
    rep.validate();
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("representation JSON: ") + e.what());
  } catch (const DimensionError& e) {
    throw FormatError(std::string("representation JSON: ") + e.what());
  }
}

void write_rep(const LiftedRepresentation& rep, const std::filesystem::path& path) {
  write_text_file(path, rep_to_json(rep).dump(1) + "\n");
}

LiftedRepresentation read_rep(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
  return rep_from_json(j);
}

}  // namespace lmirep
