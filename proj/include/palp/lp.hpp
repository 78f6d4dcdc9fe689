#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace palp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LpVariable {
  std::string name;
  double objective = 0.0;
  double lower = -kInf;
  double upper = kInf;
};

/// coeffs . v >= lower
struct LpRow {
  std::vector<std::pair<int, double>> coeffs;
  double lower = 0.0;
};

/// minimize c . v  subject to  A v >= b,  lower <= v <= upper.
class LinearProgram {
 public:
  int add_variable(std::string name, double objective = 0.0, double lower = -kInf,
                   double upper = kInf);
  void set_bounds(int var, double lower, double upper);
  void add_row(std::vector<std::pair<int, double>> coeffs, double lower);
  /// Stored as the two rows coeffs . v >= value and -coeffs . v >= -value.
  void add_equality(const std::vector<std::pair<int, double>>& coeffs, double value);

  const std::vector<LpVariable>& variables() const { return vars_; }
  const std::vector<LpRow>& rows() const { return rows_; }
  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  friend bool operator==(const LpVariable&, const LpVariable&);
  friend bool operator==(const LinearProgram&, const LinearProgram&);

 private:
  std::vector<LpVariable> vars_;
  std::vector<LpRow> rows_;
};

enum class LpStatus { Optimal, Unbounded, Infeasible, IterationLimit };
const char* to_string(LpStatus s);

struct SimplexOptions {
  double pivot_tolerance = 1e-10;
  long max_iterations = 1'000'000;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;
  double objective = 0.0;
  long iterations = 0;
};

/// Dense two-phase primal simplex with Bland's rule, applied to the dual
/// program so the tableau has one row per variable rather than per
/// constraint. Deterministic for identical input.
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

/// Largest amount by which `values` violates a row or bound (0 if none).
double max_violation(const LinearProgram& lp, const std::vector<double>& values);

/// Plain-text form with OBJECTIVE, CONSTRAINTS and BOUNDS sections, one
/// entry per line, coefficients printed with 17 significant digits.
void export_lp_text(const LinearProgram& lp, std::ostream& out);
void export_lp_text(const LinearProgram& lp, const std::filesystem::path& path);
LinearProgram parse_lp_text(std::istream& in);

}  // namespace palp
