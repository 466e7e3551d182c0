#pragma once

// Versioned JSON problem files and point files.
//
// Matrices are nested arrays of [re, im] pairs in row-major order. Vectors in
// "c", "A" and "b" follow the concatenated block coordinates.

#include <optional>
#include <stdexcept>
#include <string>

#include "qcone/ipm.hpp"

namespace qcone {

inline constexpr int kProblemFileVersion = 1;

/// Parse or validation failure. Syntax errors carry line and column (1-based);
/// semantic errors carry the JSON pointer of the offending value.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column, std::string pointer)
      : std::runtime_error(what), line(line), column(column), pointer(std::move(pointer)) {}
  int line = 0;
  int column = 0;
  std::string pointer;
};

struct ProblemFile {
  std::string name;
  std::string description;
  ProblemSpec problem;
  std::optional<SolverOptions> solver;
  std::optional<double> expected_objective;
};

ProblemFile parse_problem(const std::string& text);
ProblemFile load_problem(const std::string& path);
std::string serialize_problem(const ProblemFile& f);

/// {"X": matrix, "Y": matrix, "Z": matrix}; scalars may be given as 1 x 1
/// matrices or plain numbers.
ConePoint parse_point(const ConeSpec& c, const std::string& text);
ConePoint load_point(const ConeSpec& c, const std::string& path);
std::string serialize_point(const ConePoint& p);

/// Field-by-field equality of problem files (cones compared by kind string,
/// dimension and Kraus operators).
bool same_problem(const ProblemFile& a, const ProblemFile& b);

}  // namespace qcone
