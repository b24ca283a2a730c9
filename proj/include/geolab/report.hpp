#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace geolab {

struct Check {
  std::string name;
  std::string paper_ref;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::optional<double> slope;
  double tolerance = 0.0;
  bool pass = false;
};

// residual-style check: pass iff value <= tol
Check residual_check(const std::string& name, const std::string& ref, double value,
                     double tol);
// bound-style check: pass iff lhs <= rhs * (1 + tol)
Check bound_check(const std::string& name, const std::string& ref, double lhs, double rhs,
                  double tol);
// ratio recorded, pass iff finite (and <= cap when cap > 0)
Check ratio_check(const std::string& name, const std::string& ref, double ratio,
                  double cap = 0.0);
// slope fit: pass iff |slope - target| <= tol
Check slope_check(const std::string& name, const std::string& ref, double slope,
                  double target, double tol);

struct Report {
  std::vector<Check> checks;
  nlohmann::json environment = nlohmann::json::object();
  double wall_time_s = 0.0;

  void add(Check c) { checks.push_back(std::move(c)); }
  void merge(const Report& other);
  bool all_pass() const;
  int n_failed() const;

  nlohmann::json to_json() const;
  static Report from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static Report load(const std::string& path);

  // one CSV per check family (prefix up to the first '/'), columns
  // x,lhs,rhs,ratio where x is the check name tail
  void export_plotdata(const std::string& dir) const;
};

// least-squares slope of y against x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace geolab
