#include "geolab/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

namespace geolab {

Check residual_check(const std::string& name, const std::string& ref, double value,
                     double tol) {
  Check c;
  c.name = name;
  c.paper_ref = ref;
  c.lhs = value;
  c.rhs = tol;
  c.ratio = (tol > 0) ? value / tol : value;
  c.tolerance = tol;
  c.pass = std::isfinite(value) && value <= tol;
  return c;
}

Check bound_check(const std::string& name, const std::string& ref, double lhs, double rhs,
                  double tol) {
  Check c;
  c.name = name;
  c.paper_ref = ref;
  c.lhs = lhs;
  c.rhs = rhs;
  c.ratio = (rhs != 0.0) ? lhs / rhs : (lhs == 0.0 ? 0.0 : INFINITY);
  c.tolerance = tol;
  c.pass = std::isfinite(lhs) && lhs <= rhs * (1.0 + tol) + 1e-300;
  return c;
}

Check ratio_check(const std::string& name, const std::string& ref, double ratio,
                  double cap) {
  Check c;
  c.name = name;
  c.paper_ref = ref;
  c.lhs = ratio;
  c.rhs = cap;
  c.ratio = ratio;
  c.tolerance = cap;
  c.pass = std::isfinite(ratio) && (cap <= 0.0 || ratio <= cap);
  return c;
}

Check slope_check(const std::string& name, const std::string& ref, double slope,
                  double target, double tol) {
  Check c;
  c.name = name;
  c.paper_ref = ref;
  c.lhs = slope;
  c.rhs = target;
  c.slope = slope;
  c.ratio = slope - target;
  c.tolerance = tol;
  c.pass = std::isfinite(slope) && std::abs(slope - target) <= tol;
  return c;
}

void Report::merge(const Report& other) {
  for (const auto& c : other.checks) checks.push_back(c);
}

bool Report::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

int Report::n_failed() const {
  int n = 0;
  for (const auto& c : checks)
    if (!c.pass) ++n;
  return n;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["environment"] = environment;
  j["wall_time_s"] = wall_time_s;
  j["all_pass"] = all_pass();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json cj = {{"name", c.name},   {"paper_ref", c.paper_ref},
                         {"lhs", c.lhs},     {"rhs", c.rhs},
                         {"ratio", c.ratio}, {"tolerance", c.tolerance},
                         {"pass", c.pass}};
    if (c.slope) cj["slope"] = *c.slope;
    j["checks"].push_back(cj);
  }
  return j;
}

Report Report::from_json(const nlohmann::json& j) {
  Report r;
  r.environment = j.value("environment", nlohmann::json::object());
  r.wall_time_s = j.value("wall_time_s", 0.0);
  for (const auto& cj : j.at("checks")) {
    Check c;
    c.name = cj.at("name").get<std::string>();
    c.paper_ref = cj.at("paper_ref").get<std::string>();
    c.lhs = cj.at("lhs").get<double>();
    c.rhs = cj.at("rhs").get<double>();
    c.ratio = cj.at("ratio").get<double>();
    c.tolerance = cj.at("tolerance").get<double>();
    c.pass = cj.at("pass").get<bool>();
    if (cj.contains("slope")) c.slope = cj.at("slope").get<double>();
    r.checks.push_back(std::move(c));
  }
  return r;
}

void Report::save(const std::string& path) const {
  std::ofstream out(path);
  out << to_json().dump(2) << "\n";
}

Report Report::load(const std::string& path) {
  std::ifstream in(path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

void Report::export_plotdata(const std::string& dir) const {
  if (checks.empty()) return;
  std::filesystem::create_directories(dir);
  std::map<std::string, std::vector<const Check*>> families;
  for (const auto& c : checks) {
    auto slash = c.name.find('/');
    std::string fam = (slash == std::string::npos) ? c.name : c.name.substr(0, slash);
    families[fam].push_back(&c);
  }
  for (const auto& [fam, list] : families) {
    std::ofstream out(dir + "/" + fam + ".csv");
    out << "x,lhs,rhs,ratio\n";
    for (const auto* c : list) {
      auto slash = c->name.find('/');
      std::string x = (slash == std::string::npos) ? c->name : c->name.substr(slash + 1);
      out.precision(17);
      out << x << "," << c->lhs << "," << c->rhs << "," << c->ratio << "\n";
    }
  }
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t n = x.size();
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double den = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / den;
}

}  // namespace geolab
