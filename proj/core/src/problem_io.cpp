#include "qcone/problem_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qcone {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& ptr, const std::string& msg) {
  throw ParseError(ptr.empty() ? msg : ptr + ": " + msg, 0, 0, ptr);
}

const json& require(const json& j, const std::string& key, const std::string& ptr) {
  if (!j.is_object()) fail(ptr, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(ptr + "/" + key, "missing required key '" + key + "'");
  return *it;
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) fail(ptr, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) fail(ptr, "expected an integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& ptr) {
  if (!j.is_string()) fail(ptr, "expected a string");
  return j.get<std::string>();
}

Complex entry(const json& j, const std::string& ptr) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) fail(ptr, "expected a [re, im] pair");
  return {number(j[0], ptr + "/0"), number(j[1], ptr + "/1")};
}

CMat matrix(const json& j, const std::string& ptr) {
  if (j.is_number()) return CMat::Constant(1, 1, Complex(j.get<double>(), 0.0));
  if (!j.is_array() || j.empty()) fail(ptr, "expected a non-empty array of rows");
  const int rows = static_cast<int>(j.size());
  if (!j[0].is_array()) fail(ptr + "/0", "expected a row array");
  const int cols = static_cast<int>(j[0].size());
  CMat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const std::string rp = ptr + "/" + std::to_string(r);
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols) {
      fail(rp, "expected a row of length " + std::to_string(cols));
    }
    for (int c = 0; c < cols; ++c) m(r, c) = entry(j[r][c], rp + "/" + std::to_string(c));
  }
  return m;
}

HermMatrix herm(const json& j, const std::string& ptr) {
  const CMat m = matrix(j, ptr);
  if (m.rows() != m.cols()) fail(ptr, "matrix must be square");
  try {
    return HermMatrix(m);
  } catch (const std::exception& e) {
    fail(ptr, e.what());
  }
}

RVec vec(const json& j, const std::string& ptr) {
  if (!j.is_array()) fail(ptr, "expected an array of numbers");
  RVec v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v(i) = number(j[i], ptr + "/" + std::to_string(i));
  return v;
}

json matrix_json(const CMat& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

json vec_json(const RVec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ConePoint point(const ConeSpec& c, const json& j, const std::string& ptr) {
  ConePoint p{herm(require(j, "X", ptr), ptr + "/X"), herm(require(j, "Y", ptr), ptr + "/Y"),
              herm(require(j, "Z", ptr), ptr + "/Z")};
  try {
    check_shape(c, p);
  } catch (const std::exception& e) {
    fail(ptr, e.what());
  }
  return p;
}

SolverOptions solver_options(const json& j, const std::string& ptr) {
  if (!j.is_object()) fail(ptr, "expected an object");
  SolverOptions o;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string kp = ptr + "/" + it.key();
    const std::string& k = it.key();
    if (k == "eps") {
      o.eps = number(*it, kp);
    } else if (k == "mode") {
      try {
        o.mode = parse_mode(text(*it, kp));
      } catch (const std::invalid_argument& e) {
        fail(kp, e.what());
      }
    } else if (k == "t0") {
      o.t0 = number(*it, kp);
    } else if (k == "long_step_factor") {
      o.long_step_factor = number(*it, kp);
    } else if (k == "short_step_gamma") {
      o.short_step_gamma = number(*it, kp);
    } else if (k == "center_tol") {
      o.center_tol = number(*it, kp);
    } else if (k == "final_center_tol") {
      o.final_center_tol = number(*it, kp);
    } else if (k == "max_iter") {
      o.max_iter = integer(*it, kp);
    } else if (k == "max_newton") {
      o.max_newton = integer(*it, kp);
    } else {
      fail(kp, "unknown solver option '" + k + "'");
    }
  }
  if (!(o.eps > 0.0)) fail(ptr + "/eps", "eps must be positive");
  if (!(o.t0 > 0.0)) fail(ptr + "/t0", "t0 must be positive");
  if (!(o.long_step_factor > 1.0)) fail(ptr + "/long_step_factor", "must exceed 1");
  if (!(o.short_step_gamma > 0.0)) fail(ptr + "/short_step_gamma", "must be positive");
  if (!(o.center_tol > 0.0 && o.center_tol < 1.0)) fail(ptr + "/center_tol", "must lie in (0,1)");
  return o;
}

json solver_json(const SolverOptions& o) {
  return {{"eps", o.eps},
          {"mode", to_string(o.mode)},
          {"t0", o.t0},
          {"long_step_factor", o.long_step_factor},
          {"short_step_gamma", o.short_step_gamma},
          {"center_tol", o.center_tol},
          {"final_center_tol", o.final_center_tol},
          {"max_iter", o.max_iter},
          {"max_newton", o.max_newton}};
}

json parse_json(const std::string& src) {
  try {
    return json::parse(src);
  } catch (const json::parse_error& e) {
    // Byte offset to line and column.
    const std::size_t pos = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, src.size());
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    const auto at = msg.find("parse error");
    const auto cut = at == std::string::npos ? at : msg.find(": ", at);
    if (cut != std::string::npos) msg = msg.substr(cut + 2);
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                         msg,
                     line, col, "");
  }
}

// Line and column of the value addressed by a JSON pointer, found by walking
// the source text. Stops at the deepest existing ancestor.
class Locator {
 public:
  explicit Locator(const std::string& src) : s_(src) {}

  std::pair<int, int> find(const std::string& pointer) {
    i_ = 0;
    ws();
    std::size_t start = 0;
    while (start < pointer.size()) {
      const std::size_t next = pointer.find('/', start + 1);
      std::string tok = pointer.substr(start + 1, next == std::string::npos ? std::string::npos
                                                                              : next - start - 1);
      start = next == std::string::npos ? pointer.size() : next;
      const std::size_t here = i_;
      if (!step(tok)) {
        i_ = here;
        break;
      }
    }
    int line = 1;
    int col = 1;
    for (std::size_t k = 0; k < i_ && k < s_.size(); ++k) {
      if (s_[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return {line, col};
  }

 private:
  bool step(const std::string& tok) {
    if (i_ >= s_.size()) return false;
    if (s_[i_] == '{') {
      ++i_;
      for (ws(); i_ < s_.size() && s_[i_] != '}'; ws()) {
        const std::string key = str();
        ws();
        ++i_;  // ':'
        ws();
        if (key == tok) return true;
        skip();
        ws();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
      }
      return false;
    }
    if (s_[i_] == '[') {
      int idx = -1;
      try {
        idx = std::stoi(tok);
      } catch (const std::exception&) {
        return false;
      }
      ++i_;
      ws();
      for (int k = 0; i_ < s_.size() && s_[i_] != ']'; ++k) {
        if (k == idx) return true;
        skip();
        ws();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
        ws();
      }
    }
    return false;
  }

  void ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  std::string str() {
    std::string out;
    ++i_;
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\') ++i_;
      if (i_ < s_.size()) out += s_[i_++];
    }
    ++i_;
    return out;
  }

  void skip() {
    if (i_ >= s_.size()) return;
    const char ch = s_[i_];
    if (ch == '"') {
      str();
    } else if (ch == '{' || ch == '[') {
      const char close = ch == '{' ? '}' : ']';
      ++i_;
      for (ws(); i_ < s_.size() && s_[i_] != close; ws()) {
        if (ch == '{') {
          str();
          ws();
          ++i_;
          ws();
        }
        skip();
        ws();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
      }
      ++i_;
    } else {
      while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != '}' && s_[i_] != ']' &&
             !std::isspace(static_cast<unsigned char>(s_[i_]))) {
        ++i_;
      }
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
};

// Adds a source position to pointer-only errors.
template <class F>
auto with_position(const std::string& src, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    if (e.line > 0 || e.pointer.empty()) throw;
    const auto [line, col] = Locator(src).find(e.pointer);
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                         e.what(),
                     line, col, e.pointer);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'", 0, 0, "");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProblemFile parse_problem_json(const json& j);

}  // namespace

ProblemFile parse_problem(const std::string& src) {
  return with_position(src, [&] { return parse_problem_json(parse_json(src)); });
}

namespace {

ProblemFile parse_problem_json(const json& j) {
  if (!j.is_object()) fail("", "problem file must be a JSON object");
  const int version = integer(require(j, "version", ""), "/version");
  if (version != kProblemFileVersion) {
    fail("/version", "unsupported version " + std::to_string(version) + " (expected " +
                         std::to_string(kProblemFileVersion) + ")");
  }
  static const char* known[] = {"version", "name",  "description", "cones", "c", "A",
                                "b",       "start", "solver",      "expected_objective"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known)) {
      fail("/" + it.key(), "unknown key '" + it.key() + "'");
    }
  }
  ProblemFile f;
  if (j.contains("name")) f.name = text(j["name"], "/name");
  if (j.contains("description")) f.description = text(j["description"], "/description");

  const json& cones = require(j, "cones", "");
  if (!cones.is_array() || cones.empty()) fail("/cones", "expected a non-empty array");
  for (std::size_t k = 0; k < cones.size(); ++k) {
    const std::string cp = "/cones/" + std::to_string(k);
    const std::string kind = text(require(cones[k], "kind", cp), cp + "/kind");
    const int n = integer(require(cones[k], "n", cp), cp + "/n");
    std::vector<CMat> kraus;
    if (cones[k].contains("params")) {
      const json& pr = cones[k]["params"];
      if (!pr.is_object()) fail(cp + "/params", "expected an object");
      for (auto it = pr.begin(); it != pr.end(); ++it) {
        if (it.key() != "kraus") fail(cp + "/params/" + it.key(), "unknown parameter");
        if (!it->is_array()) fail(cp + "/params/kraus", "expected an array of matrices");
        for (std::size_t i = 0; i < it->size(); ++i) {
          kraus.push_back(matrix((*it)[i], cp + "/params/kraus/" + std::to_string(i)));
        }
      }
    }
    try {
      f.problem.cones.push_back(make_cone(kind, n, kraus));
    } catch (const std::exception& e) {
      fail(cp + "/kind", e.what());
    }
  }

  f.problem.c = vec(require(j, "c", ""), "/c");
  f.problem.b = vec(require(j, "b", ""), "/b");
  const json& a = require(j, "A", "");
  if (!a.is_array()) fail("/A", "expected an array of rows");
  const int dim = f.problem.dim();
  f.problem.A = RMat::Zero(static_cast<int>(a.size()), dim);
  for (std::size_t r = 0; r < a.size(); ++r) {
    const std::string rp = "/A/" + std::to_string(r);
    const RVec row = vec(a[r], rp);
    if (row.size() != dim) {
      fail(rp, "row has length " + std::to_string(row.size()) + ", expected " +
                   std::to_string(dim));
    }
    f.problem.A.row(static_cast<int>(r)) = row.transpose();
  }
  if (j.contains("start")) {
    const json& st = j["start"];
    if (!st.is_array() || st.size() != f.problem.cones.size()) {
      fail("/start", "expected one point per cone block");
    }
    for (std::size_t k = 0; k < st.size(); ++k) {
      f.problem.start.push_back(point(f.problem.cones[k], st[k], "/start/" + std::to_string(k)));
    }
  }
  if (j.contains("solver")) f.solver = solver_options(j["solver"], "/solver");
  if (j.contains("expected_objective")) {
    f.expected_objective = number(j["expected_objective"], "/expected_objective");
  }
  try {
    f.problem.validate();
  } catch (const std::exception& e) {
    fail("", e.what());
  }
  return f;
}

}  // namespace

ProblemFile load_problem(const std::string& path) { return parse_problem(read_file(path)); }

std::string serialize_problem(const ProblemFile& f) {
  json j;
  j["version"] = kProblemFileVersion;
  if (!f.name.empty()) j["name"] = f.name;
  if (!f.description.empty()) j["description"] = f.description;
  json cones = json::array();
  for (const auto& c : f.problem.cones) {
    json cj = {{"kind", c.to_string()}, {"n", c.n}};
    if (c.map.kind == MapKind::Kraus) {
      json ks = json::array();
      for (const auto& k : c.map.kraus) ks.push_back(matrix_json(k));
      cj["params"] = {{"kraus", ks}};
    }
    cones.push_back(cj);
  }
  j["cones"] = cones;
  j["c"] = vec_json(f.problem.c);
  json a = json::array();
  for (int r = 0; r < f.problem.A.rows(); ++r) a.push_back(vec_json(f.problem.A.row(r).transpose()));
  j["A"] = a;
  j["b"] = vec_json(f.problem.b);
  if (!f.problem.start.empty()) {
    json st = json::array();
    for (const auto& p : f.problem.start) st.push_back(json::parse(serialize_point(p)));
    j["start"] = st;
  }
  if (f.solver) j["solver"] = solver_json(*f.solver);
  if (f.expected_objective) j["expected_objective"] = *f.expected_objective;
  return j.dump(1) + "\n";
}

ConePoint parse_point(const ConeSpec& c, const std::string& src) {
  return with_position(src, [&] { return point(c, parse_json(src), ""); });
}

ConePoint load_point(const ConeSpec& c, const std::string& path) {
  return parse_point(c, read_file(path));
}

std::string serialize_point(const ConePoint& p) {
  json j = {{"X", matrix_json(p.X.mat())}, {"Y", matrix_json(p.Y.mat())},
            {"Z", matrix_json(p.Z.mat())}};
  return j.dump();
}

bool same_problem(const ProblemFile& a, const ProblemFile& b) {
  const ProblemSpec& p = a.problem;
  const ProblemSpec& q = b.problem;
  if (a.name != b.name || a.description != b.description) return false;
  if (a.solver != b.solver || a.expected_objective != b.expected_objective) return false;
  if (p.cones.size() != q.cones.size() || p.start.size() != q.start.size()) return false;
  for (std::size_t k = 0; k < p.cones.size(); ++k) {
    const ConeSpec& x = p.cones[k];
    const ConeSpec& y = q.cones[k];
    if (x.to_string() != y.to_string() || x.n != y.n) return false;
    if (x.map.kraus.size() != y.map.kraus.size()) return false;
    for (std::size_t i = 0; i < x.map.kraus.size(); ++i) {
      if (x.map.kraus[i] != y.map.kraus[i]) return false;
    }
  }
  for (std::size_t k = 0; k < p.start.size(); ++k) {
    if (p.start[k].X.mat() != q.start[k].X.mat() || p.start[k].Y.mat() != q.start[k].Y.mat() ||
        p.start[k].Z.mat() != q.start[k].Z.mat()) {
      return false;
    }
  }
  return p.c == q.c && p.A == q.A && p.b == q.b;
}

}  // namespace qcone
