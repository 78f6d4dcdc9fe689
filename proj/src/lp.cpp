#include "palp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace palp {

int LinearProgram::add_variable(std::string name, double objective, double lower, double upper) {
  if (name.empty() || name.find_first_of(" \t\n:") != std::string::npos)
    throw std::invalid_argument("lp: invalid variable name '" + name + "'");
  if (!std::isfinite(objective)) throw std::invalid_argument("lp: non-finite objective");
  if (std::isnan(lower) || std::isnan(upper) || lower > upper || lower == kInf || upper == -kInf)
    throw std::invalid_argument("lp: invalid bounds for " + name);
  vars_.push_back({std::move(name), objective, lower, upper});
  return num_variables() - 1;
}

void LinearProgram::set_bounds(int var, double lower, double upper) {
  if (var < 0 || var >= num_variables()) throw std::invalid_argument("lp: variable out of range");
  if (std::isnan(lower) || std::isnan(upper) || lower > upper)
    throw std::invalid_argument("lp: invalid bounds");
  vars_[static_cast<std::size_t>(var)].lower = lower;
  vars_[static_cast<std::size_t>(var)].upper = upper;
}

void LinearProgram::add_row(std::vector<std::pair<int, double>> coeffs, double lower) {
  if (!std::isfinite(lower)) throw std::invalid_argument("lp: non-finite row bound");
  for (auto [j, a] : coeffs) {
    if (j < 0 || j >= num_variables()) throw std::invalid_argument("lp: row index out of range");
    if (!std::isfinite(a)) throw std::invalid_argument("lp: non-finite row coefficient");
  }
  rows_.push_back({std::move(coeffs), lower});
}

void LinearProgram::add_equality(const std::vector<std::pair<int, double>>& coeffs, double value) {
  add_row(coeffs, value);
  std::vector<std::pair<int, double>> neg = coeffs;
  for (auto& [j, a] : neg) a = -a;
  add_row(std::move(neg), -value);
}

bool operator==(const LpVariable& a, const LpVariable& b) {
  return a.name == b.name && a.objective == b.objective && a.lower == b.lower &&
         a.upper == b.upper;
}

bool operator==(const LinearProgram& a, const LinearProgram& b) {
  if (a.vars_ != b.vars_ || a.rows_.size() != b.rows_.size()) return false;
  for (std::size_t i = 0; i < a.rows_.size(); ++i)
    if (a.rows_[i].coeffs != b.rows_[i].coeffs || a.rows_[i].lower != b.rows_[i].lower)
      return false;
  return true;
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

// maximize g.u  subject to  E u = h, u >= 0   (E dense, row-major)
struct StandardForm {
  int rows = 0;
  int cols = 0;
  std::vector<double> e;
  std::vector<double> h;
  std::vector<double> g;
};

enum class StdStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct StdResult {
  StdStatus status = StdStatus::Infeasible;
  std::vector<double> multipliers;  // pi with pi^T E >= g at optimality
  long iterations = 0;
};

class Tableau {
 public:
  Tableau(const StandardForm& sf, const SimplexOptions& opt, long& iterations)
      : sf_(sf), opt_(opt), iterations_(iterations), rows_(sf.rows), cols_(sf.cols),
        total_(sf.cols + sf.rows), width_(total_ + 1),
        t_(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(width_), 0.0),
        obj_(static_cast<std::size_t>(width_), 0.0), basis_(static_cast<std::size_t>(rows_)),
        sign_(static_cast<std::size_t>(rows_), 1.0) {
    for (int i = 0; i < rows_; ++i) {
      sign_[i] = sf.h[static_cast<std::size_t>(i)] < 0.0 ? -1.0 : 1.0;
      for (int j = 0; j < cols_; ++j) at(i, j) = sign_[i] * sf.e[idx(i, j, cols_)];
      at(i, cols_ + i) = 1.0;
      at(i, total_) = sign_[i] * sf.h[static_cast<std::size_t>(i)];
      basis_[static_cast<std::size_t>(i)] = cols_ + i;
    }
  }

  StdResult run() {
    StdResult res;
    // Phase 1: maximize -sum(artificials).
    std::vector<double> g1(static_cast<std::size_t>(total_), 0.0);
    for (int i = 0; i < rows_; ++i) g1[static_cast<std::size_t>(cols_ + i)] = -1.0;
    price(g1);
    StdStatus s = iterate(total_);
    if (s == StdStatus::IterationLimit) return finish(res, s);
    double hmax = 1.0;
    for (double v : sf_.h) hmax = std::max(hmax, std::abs(v));
    if (obj_[static_cast<std::size_t>(total_)] < -1e-9 * hmax) return finish(res, StdStatus::Infeasible);
    drive_out_artificials();

    std::vector<double> g2(static_cast<std::size_t>(total_), 0.0);
    std::copy(sf_.g.begin(), sf_.g.end(), g2.begin());
    price(g2);
    s = iterate(cols_);
    if (s != StdStatus::Optimal) return finish(res, s);
    res.multipliers = multipliers(g2);
    return finish(res, StdStatus::Optimal);
  }

 private:
  static std::size_t idx(int i, int j, int w) {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(w) + static_cast<std::size_t>(j);
  }
  double& at(int i, int j) { return t_[idx(i, j, width_)]; }
  double at(int i, int j) const { return t_[idx(i, j, width_)]; }

  StdResult& finish(StdResult& r, StdStatus s) {
    r.status = s;
    r.iterations = iterations_;
    return r;
  }

  void price(const std::vector<double>& g) {
    std::fill(obj_.begin(), obj_.end(), 0.0);
    for (int i = 0; i < rows_; ++i) {
      double cb = g[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
      if (cb == 0.0) continue;
      for (int j = 0; j < width_; ++j) obj_[static_cast<std::size_t>(j)] += cb * at(i, j);
    }
    for (int j = 0; j < total_; ++j) obj_[static_cast<std::size_t>(j)] -= g[static_cast<std::size_t>(j)];
  }

  void pivot(int r, int c) {
    double p = at(r, c);
    for (int j = 0; j < width_; ++j) at(r, j) /= p;
    at(r, c) = 1.0;
    for (int i = 0; i < rows_; ++i) {
      if (i == r) continue;
      double f = at(i, c);
      if (f == 0.0) continue;
      for (int j = 0; j < width_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    double f = obj_[static_cast<std::size_t>(c)];
    if (f != 0.0) {
      for (int j = 0; j < width_; ++j) obj_[static_cast<std::size_t>(j)] -= f * at(r, j);
      obj_[static_cast<std::size_t>(c)] = 0.0;
    }
    basis_[static_cast<std::size_t>(r)] = c;
    ++iterations_;
  }

  // Bland's rule: lowest-index improving column, lowest-index basic
  // variable among tied ratios.
  // Reduced costs of row columns are primal row slacks, so the optimality
  // test stays absolute.
  StdStatus iterate(int enter_limit) {
    const double opt_tol = opt_.pivot_tolerance;
    while (true) {
      if (iterations_ >= opt_.max_iterations) return StdStatus::IterationLimit;
      int enter = -1;
      for (int j = 0; j < enter_limit; ++j)
        if (obj_[static_cast<std::size_t>(j)] < -opt_tol) {
          enter = j;
          break;
        }
      if (enter < 0) return StdStatus::Optimal;
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < rows_; ++i) {
        double a = at(i, enter);
        if (a <= opt_.pivot_tolerance) continue;
        double ratio = std::max(0.0, at(i, total_)) / a;
        if (leave < 0) {
          leave = i;
          best = ratio;
          continue;
        }
        double tie = 1e-12 * (1.0 + std::abs(best));
        if (ratio < best - tie ||
            (ratio <= best + tie && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          leave = i;
          best = std::min(best, ratio);
        }
      }
      if (leave < 0) return StdStatus::Unbounded;
      pivot(leave, enter);
    }
  }

  void drive_out_artificials() {
    for (int i = 0; i < rows_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < cols_) continue;
      int best = -1;
      double mag = 1e-9;
      for (int j = 0; j < cols_; ++j)
        if (std::abs(at(i, j)) > mag) {
          best = j;
          mag = std::abs(at(i, j));
        }
      if (best >= 0) pivot(i, best);
    }
    for (int i = 0; i < rows_; ++i) at(i, total_) = std::max(0.0, at(i, total_));
  }

  // Solves B^T pi = g_B against the original columns; falls back to the
  // tableau prices if the basis matrix looks singular.
  std::vector<double> multipliers(const std::vector<double>& g) const {
    const int n = rows_;
    std::vector<double> m(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    std::vector<double> rhs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      int b = basis_[static_cast<std::size_t>(i)];
      for (int k = 0; k < n; ++k)
        m[idx(i, k, n)] = b < cols_ ? sign_[static_cast<std::size_t>(k)] * sf_.e[idx(k, b, cols_)]
                                    : (b - cols_ == k ? 1.0 : 0.0);
      rhs[static_cast<std::size_t>(i)] = g[static_cast<std::size_t>(b)];
    }
    std::vector<double> pi(static_cast<std::size_t>(n));
    bool ok = true;
    for (int c = 0; c < n && ok; ++c) {
      int p = c;
      for (int r = c + 1; r < n; ++r)
        if (std::abs(m[idx(r, c, n)]) > std::abs(m[idx(p, c, n)])) p = r;
      if (std::abs(m[idx(p, c, n)]) < 1e-13) {
        ok = false;
        break;
      }
      if (p != c) {
        for (int k = 0; k < n; ++k) std::swap(m[idx(p, k, n)], m[idx(c, k, n)]);
        std::swap(rhs[static_cast<std::size_t>(p)], rhs[static_cast<std::size_t>(c)]);
      }
      for (int r = c + 1; r < n; ++r) {
        double f = m[idx(r, c, n)] / m[idx(c, c, n)];
        if (f == 0.0) continue;
        for (int k = c; k < n; ++k) m[idx(r, k, n)] -= f * m[idx(c, k, n)];
        rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(c)];
      }
    }
    if (ok) {
      for (int r = n; r-- > 0;) {
        double s = rhs[static_cast<std::size_t>(r)];
        for (int k = r + 1; k < n; ++k) s -= m[idx(r, k, n)] * pi[static_cast<std::size_t>(k)];
        pi[static_cast<std::size_t>(r)] = s / m[idx(r, r, n)];
      }
    } else {
      for (int k = 0; k < n; ++k) pi[static_cast<std::size_t>(k)] = obj_[static_cast<std::size_t>(cols_ + k)];
    }
    for (int k = 0; k < n; ++k) pi[static_cast<std::size_t>(k)] *= sign_[static_cast<std::size_t>(k)];
    return pi;
  }

  const StandardForm& sf_;
  const SimplexOptions& opt_;
  long& iterations_;
  int rows_, cols_, total_, width_;
  std::vector<double> t_;
  std::vector<double> obj_;
  std::vector<int> basis_;
  std::vector<double> sign_;
};

// Dual of  min c.v  s.t.  A v >= b,  l <= v <= u:
//   max b.y + l.z_l - u.z_u  s.t.  A^T y + z_l - z_u = c,  y, z >= 0.
StandardForm dual_form(const LinearProgram& lp, bool zero_objective) {
  StandardForm sf;
  const int n = lp.num_variables();
  sf.rows = n;
  std::vector<std::vector<double>> columns;
  for (const auto& row : lp.rows()) {
    std::vector<double> col(static_cast<std::size_t>(n), 0.0);
    for (auto [j, a] : row.coeffs) col[static_cast<std::size_t>(j)] += a;
    columns.push_back(std::move(col));
    sf.g.push_back(row.lower);
  }
  for (int j = 0; j < n; ++j) {
    const auto& v = lp.variables()[static_cast<std::size_t>(j)];
    if (std::isfinite(v.lower)) {
      std::vector<double> col(static_cast<std::size_t>(n), 0.0);
      col[static_cast<std::size_t>(j)] = 1.0;
      columns.push_back(std::move(col));
      sf.g.push_back(v.lower);
    }
    if (std::isfinite(v.upper)) {
      std::vector<double> col(static_cast<std::size_t>(n), 0.0);
      col[static_cast<std::size_t>(j)] = -1.0;
      columns.push_back(std::move(col));
      sf.g.push_back(-v.upper);
    }
  }
  sf.cols = static_cast<int>(columns.size());
  sf.e.assign(static_cast<std::size_t>(sf.rows) * static_cast<std::size_t>(sf.cols), 0.0);
  for (int c = 0; c < sf.cols; ++c)
    for (int r = 0; r < n; ++r)
      sf.e[static_cast<std::size_t>(r) * static_cast<std::size_t>(sf.cols) + static_cast<std::size_t>(c)] =
          columns[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
  for (const auto& v : lp.variables()) sf.h.push_back(zero_objective ? 0.0 : v.objective);
  return sf;
}

}  // namespace

double max_violation(const LinearProgram& lp, const std::vector<double>& values) {
  double worst = 0.0;
  for (const auto& row : lp.rows()) {
    double s = 0.0;
    for (auto [j, a] : row.coeffs) s += a * values[static_cast<std::size_t>(j)];
    worst = std::max(worst, row.lower - s);
  }
  for (std::size_t j = 0; j < lp.variables().size(); ++j) {
    worst = std::max(worst, lp.variables()[j].lower - values[j]);
    worst = std::max(worst, values[j] - lp.variables()[j].upper);
  }
  return worst;
}

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  LpSolution sol;
  const int n = lp.num_variables();
  if (n == 0) {
    bool feasible = std::all_of(lp.rows().begin(), lp.rows().end(),
                                [](const LpRow& r) { return r.lower <= 0.0; });
    sol.status = feasible ? LpStatus::Optimal : LpStatus::Infeasible;
    return sol;
  }

  long iterations = 0;
  StandardForm dual = dual_form(lp, false);
  StdResult r = Tableau(dual, options, iterations).run();

  if (r.status == StdStatus::Infeasible) {
    // The dual has no feasible point: the primal is unbounded if it has any
    // feasible point at all. Its feasibility problem (zero objective) has a
    // dual that is always feasible and is bounded iff the primal is feasible.
    StandardForm probe = dual_form(lp, true);
    StdResult p = Tableau(probe, options, iterations).run();
    sol.iterations = iterations;
    if (p.status == StdStatus::IterationLimit) sol.status = LpStatus::IterationLimit;
    else sol.status = p.status == StdStatus::Unbounded ? LpStatus::Infeasible : LpStatus::Unbounded;
    return sol;
  }
  sol.iterations = iterations;
  if (r.status == StdStatus::Unbounded) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }
  if (r.status == StdStatus::IterationLimit) {
    sol.status = LpStatus::IterationLimit;
    return sol;
  }
  sol.status = LpStatus::Optimal;
  sol.values = std::move(r.multipliers);
  for (int j = 0; j < n; ++j) {
    const auto& v = lp.variables()[static_cast<std::size_t>(j)];
    double& x = sol.values[static_cast<std::size_t>(j)];
    x = std::clamp(x, v.lower, v.upper);
  }
  sol.objective = 0.0;
  for (int j = 0; j < n; ++j)
    sol.objective += lp.variables()[static_cast<std::size_t>(j)].objective * sol.values[static_cast<std::size_t>(j)];
  return sol;
}

namespace {

std::string fmt17(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

double parse_number(const std::string& tok, int line) {
  if (tok == "inf" || tok == "+inf") return kInf;
  if (tok == "-inf") return -kInf;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size())
    throw std::runtime_error("lp text line " + std::to_string(line) + ": bad number '" + tok + "'");
  return v;
}

}  // namespace

void export_lp_text(const LinearProgram& lp, std::ostream& out) {
  out << "# minimize objective . v subject to every constraint row >= its bound\n";
  out << "OBJECTIVE\n";
  for (const auto& v : lp.variables()) out << "  " << v.name << ' ' << fmt17(v.objective) << '\n';
  out << "CONSTRAINTS\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto& row = lp.rows()[static_cast<std::size_t>(i)];
    out << "  r" << i << " >= " << fmt17(row.lower) << " :";
    for (auto [j, a] : row.coeffs)
      out << ' ' << lp.variables()[static_cast<std::size_t>(j)].name << ' ' << fmt17(a);
    out << '\n';
  }
  out << "BOUNDS\n";
  for (const auto& v : lp.variables())
    out << "  " << v.name << ' ' << fmt17(v.lower) << ' ' << fmt17(v.upper) << '\n';
  out << "END\n";
}

void export_lp_text(const LinearProgram& lp, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  export_lp_text(lp, out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

LinearProgram parse_lp_text(std::istream& in) {
  LinearProgram lp;
  std::map<std::string, int> index;
  std::string section;
  std::string line;
  int lineno = 0;
  bool ended = false;
  auto need_var = [&](const std::string& name, int ln) {
    auto it = index.find(name);
    if (it == index.end())
      throw std::runtime_error("lp text line " + std::to_string(ln) + ": unknown variable '" + name + "'");
    return it->second;
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first[0] == '#') continue;
    if (first == "OBJECTIVE" || first == "CONSTRAINTS" || first == "BOUNDS") {
      section = first;
      continue;
    }
    if (first == "END") {
      ended = true;
      break;
    }
    if (section == "OBJECTIVE") {
      std::string coef;
      if (!(ls >> coef)) throw std::runtime_error("lp text line " + std::to_string(lineno) + ": missing coefficient");
      index[first] = lp.add_variable(first, parse_number(coef, lineno));
    } else if (section == "CONSTRAINTS") {
      std::string op, bound, colon;
      if (!(ls >> op >> bound >> colon) || op != ">=" || colon != ":")
        throw std::runtime_error("lp text line " + std::to_string(lineno) + ": malformed row");
      std::vector<std::pair<int, double>> coeffs;
      std::string name, coef;
      while (ls >> name) {
        if (!(ls >> coef)) throw std::runtime_error("lp text line " + std::to_string(lineno) + ": dangling term");
        coeffs.emplace_back(need_var(name, lineno), parse_number(coef, lineno));
      }
      lp.add_row(std::move(coeffs), parse_number(bound, lineno));
    } else if (section == "BOUNDS") {
      std::string lo, hi;
      if (!(ls >> lo >> hi)) throw std::runtime_error("lp text line " + std::to_string(lineno) + ": malformed bound");
      lp.set_bounds(need_var(first, lineno), parse_number(lo, lineno), parse_number(hi, lineno));
    } else {
      throw std::runtime_error("lp text line " + std::to_string(lineno) + ": content outside a section");
    }
  }
  if (!ended) throw std::runtime_error("lp text: missing END");
  return lp;
}

}  // namespace palp
