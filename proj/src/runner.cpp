#include "geolab/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "geolab/charts.hpp"
#include "geolab/eucl.hpp"
#include "geolab/hodge_ell.hpp"
#include "geolab/nullcone.hpp"
#include "geolab/par.hpp"

namespace geolab {

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> names = {
      "identities",     "gns",           "lp",
      "glp_properties", "evolution",     "commutators",
      "transport",      "jacobian",      "convergence",
      "besov_comparison", "mixed_decay", "charts_identities",
      "charts_constants", "geom_products", "sharp_trace",
      "eucl_invariants",  "eucl_products", "eucl_trace",
      "eucl_intertwining", "elliptic",    "besov_elliptic",
      "renormalization",   "nullcone_structure", "nullcone_flux"};
  return names;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  c.suites = j.value("suites", std::vector<std::string>{});
  for (const auto& s : c.suites) {
    bool ok = false;
    for (const auto& k : known_suites()) ok = ok || (k == s);
    if (!ok) throw std::invalid_argument("unknown suite name: " + s);
  }
  if (j.contains("resolution")) {
    const auto& r = j.at("resolution");
    c.L = r.value("L", c.L);
    c.M = r.value("M", c.M);
    c.n = r.value("n", c.n);
    c.T = r.value("T", c.T);
  }
  c.delta = j.value("delta", c.delta);
  c.seed = j.value("seed", c.seed);
  c.trials = j.value("trials", c.trials);
  if (j.contains("foliation")) c.foliation = j.at("foliation");
  if (j.contains("tolerances"))
    for (auto& [k, v] : j.at("tolerances").items())
      c.tolerances[k] = v.get<double>();
  c.out = j.value("out", std::string{});
  if (c.L < 4 || c.L > 96) throw std::invalid_argument("L out of supported range");
  if (c.M < 4 || c.M > 512) throw std::invalid_argument("M out of supported range");
  if (c.n < 16 || c.n > 2048 || (c.n & (c.n - 1)) != 0)
    throw std::invalid_argument("n must be a power of two in [16, 2048]");
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  return from_json(j);
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["suites"] = suites;
  j["resolution"] = {{"L", L}, {"M", M}, {"n", n}, {"T", T}};
  j["delta"] = delta;
  j["seed"] = seed;
  j["trials"] = trials;
  j["foliation"] = foliation;
  nlohmann::json t = nlohmann::json::object();
  for (const auto& [k, v] : tolerances) t[k] = v;
  j["tolerances"] = t;
  return j;
}

namespace {

Foliation foliation_from_config(const RunConfig& cfg) {
  const auto& f = cfg.foliation;
  std::string type = f.value("type", std::string("wave"));
  if (f.contains("file")) return Foliation::load(f.at("file").get<std::string>());
  if (type == "wave")
    return Foliation::conformal_wave(cfg.seed ^ 0xf01ull, f.value("amp", 0.2),
                                     f.value("band", 4), cfg.delta, cfg.M, cfg.L);
  if (type == "expanding") return Foliation::expanding(cfg.delta, cfg.M, cfg.L);
  if (type == "sheared")
    return Foliation::sheared(cfg.seed ^ 0xf02ull, f.value("amp", 0.15),
                              f.value("band", 3), cfg.delta, cfg.M, cfg.L);
  if (type == "static_round")
    return Foliation::static_metric(SurfaceMetric::round_sphere(cfg.L), cfg.delta,
                                    cfg.M);
  if (type == "static_conformal")
    return Foliation::static_metric(
        SurfaceMetric::conformal(random_conformal_factor(
            cfg.seed ^ 0xf03ull, 1, f.value("band", 4), f.value("amp", 0.2), cfg.L)),
        cfg.delta, cfg.M);
  if (type == "minkowski" || type == "schwarzschild") {
    NullConeData d = generate_cone(
        type == "minkowski" ? ConeModel::minkowski : ConeModel::schwarzschild,
        f.value("mass", 0.01), f.value("r0", 1.0), cfg.delta, cfg.M, cfg.L);
    if (f.value("perturb", 0.0) > 0.0)
      d = perturb_cone(d, f.value("perturb", 0.0), cfg.seed ^ 0xf04ull);
    return d.gamma;
  }
  throw std::invalid_argument("unknown foliation type: " + type);
}

double tol_or(const RunConfig& cfg, const std::string& key, double dflt) {
  auto it = cfg.tolerances.find(key);
  return it == cfg.tolerances.end() ? dflt : it->second;
}

Report dispatch(const RunConfig& cfg, const std::string& name) {
  if (name == "identities")
    return surface_identity_suite(cfg.L, cfg.trials, cfg.seed,
                                  tol_or(cfg, "identities", 1e-6));
  if (name == "gns") {
    Foliation fol = foliation_from_config(cfg);
    return gns_suite(fol.metric_node(0), cfg.trials, cfg.seed);
  }
  if (name == "lp") {
    Foliation fol = foliation_from_config(cfg);
    return lp_structure_suite(fol.metric_node(0), std::min(cfg.trials, 20), cfg.seed);
  }
  if (name == "glp_properties") {
    Foliation fol = foliation_from_config(cfg);
    return lp_property_suite(fol.metric_node(0), std::min(cfg.trials, 10), cfg.seed);
  }
  Foliation fol = foliation_from_config(cfg);
  if (name == "evolution")
    return evolution_identity_suite(fol, std::min(cfg.trials, 10), cfg.seed,
                                    tol_or(cfg, "evolution", 1e-7));
  if (name == "commutators")
    return commutator_suite(fol, std::min(cfg.trials, 10), cfg.seed,
                            tol_or(cfg, "commutators", 1e-6));
  if (name == "transport")
    return transport_estimate_suite(fol, std::min(cfg.trials, 6), cfg.seed);
  if (name == "jacobian")
    return jacobian_identity_check(fol, tol_or(cfg, "jacobian", 1e-8));
  if (name == "convergence") return integral_convergence_study(cfg.seed);
  if (name == "besov_comparison") {
    Atlas atlas = build_atlas(fol, true, cfg.n);
    return besov_comparison_suite(atlas, std::min(cfg.trials, 50), cfg.seed);
  }
  if (name == "mixed_decay") return mixed_intertwining_decay(fol, cfg.seed, 512);
  if (name == "charts_identities") {
    Atlas atlas = build_atlas(fol, true, cfg.n);
    return scalar_reduction_identities(atlas, std::min(cfg.trials, 10), cfg.seed,
                                       tol_or(cfg, "charts", 1e-7));
  }
  if (name == "charts_constants") {
    Atlas atlas = build_atlas(fol, true, cfg.n);
    Report rep;
    for (const char* lvl : {"r0", "r1", "R0", "R1", "F0", "F1", "F2"})
      rep.merge(regularity_constants(atlas, lvl));
    return rep;
  }
  if (name == "geom_products")
    return geometric_product_suite(fol, std::min(cfg.trials, 8), cfg.seed);
  if (name == "sharp_trace")
    return sharp_trace_check(fol, std::min(cfg.trials, 6), cfg.seed);
  if (name == "eucl_invariants")
    return eucl::eucl_lp_invariants(cfg.n, std::min(cfg.trials, 10), cfg.seed);
  if (name == "eucl_products")
    return eucl::eucl_product_suite(cfg.n, cfg.trials, cfg.seed);
  if (name == "eucl_trace")
    return eucl::eucl_trace_embedding_suite(cfg.n, cfg.trials, cfg.seed);
  if (name == "eucl_intertwining") return eucl::eucl_intertwining_decay(cfg.n, cfg.seed);
  if (name == "elliptic") return elliptic_suite(fol, std::min(cfg.trials, 6), cfg.seed);
  if (name == "besov_elliptic")
    return besov_elliptic_suite(fol, std::min(cfg.trials, 4), cfg.seed);
  if (name == "renormalization")
    return renormalization_suite(fol, tol_or(cfg, "renormalization", 1e-7));
  if (name == "nullcone_structure" || name == "nullcone_flux") {
    std::string type = cfg.foliation.value("type", std::string("minkowski"));
    NullConeData d = generate_cone(
        type == "schwarzschild" ? ConeModel::schwarzschild : ConeModel::minkowski,
        cfg.foliation.value("mass", 0.01), cfg.foliation.value("r0", 1.0), cfg.delta,
        cfg.M, cfg.L);
    return name == "nullcone_structure" ? structure_residuals(d) : flux_report(d);
  }
  throw std::invalid_argument("unknown suite name: " + name);
}

}  // namespace

Report run_suites(const RunConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  Report rep;
  for (const auto& s : cfg.suites) {
    Report r = dispatch(cfg, s);
    for (auto& c : r.checks) {
      c.name = s + ":" + c.name;
      rep.add(c);
    }
  }
  rep.environment = {{"config", cfg.to_json()}, {"threads", hardware_threads()}};
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

Report run_sweep(const RunConfig& cfg, const std::string& axis,
                 const std::vector<double>& values) {
  if (values.size() < 3) throw std::invalid_argument("sweep needs at least 3 points");
  if (axis != "L" && axis != "M" && axis != "k" && axis != "amplitude")
    throw std::invalid_argument("unknown sweep axis: " + axis);
  Report rep;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (double v : values) {
    RunConfig c = cfg;
    if (axis == "L") c.L = static_cast<int>(v);
    if (axis == "M") c.M = static_cast<int>(v);
    if (axis == "amplitude") c.foliation["amp"] = v;
    if (axis == "k") c.tolerances["k_probe"] = v;  // recorded; suites use k ranges
    Report r = run_suites(c);
    for (auto& ch : r.checks) {
      std::string name = ch.name;
      ch.name = axis + "=" + std::to_string(v) + "/" + name;
      if (ch.lhs > 0 && std::isfinite(ch.lhs))
        series[name].push_back({std::log2(v), std::log2(ch.lhs)});
      rep.add(ch);
    }
  }
  for (const auto& [name, pts] : series) {
    if (pts.size() < 3) continue;
    std::vector<double> xs, ys;
    for (auto [x, y] : pts) {
      xs.push_back(x);
      ys.push_back(y);
    }
    double slope = fit_slope(xs, ys);
    double res = 0.0;
    {
      double sy = 0, sx = 0;
      for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
      }
      double b = sy / xs.size() - slope * sx / xs.size();
      for (size_t i = 0; i < xs.size(); ++i)
        res += std::pow(ys[i] - slope * xs[i] - b, 2);
      res = std::sqrt(res / xs.size());
    }
    Check c;
    c.name = "sweep_slope/" + name;
    c.paper_ref = "scaling study";
    c.lhs = slope;
    c.slope = slope;
    c.rhs = res;
    c.ratio = slope;
    c.pass = std::isfinite(slope);
    rep.add(c);
  }
  return rep;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"geolab: numerical verification of geometric-analysis estimates"};
  app.require_subcommand(1);

  std::string config_path, out_path, plot_dir;
  auto* run = app.add_subcommand("run", "run verification suites");
  run->add_option("--config", config_path, "JSON config")->required();
  run->add_option("--out", out_path, "report output path");
  run->add_option("--export-plotdata", plot_dir, "CSV directory");

  std::string axis, values_arg;
  auto* sweep = app.add_subcommand("sweep", "scaling sweep over an axis");
  sweep->add_option("--config", config_path, "JSON config")->required();
  sweep->add_option("--axis", axis, "L | M | k | amplitude")->required();
  sweep->add_option("--values", values_arg, "comma list or a..b range")->required();
  sweep->add_option("--out", out_path, "report output path");
  sweep->add_option("--export-plotdata", plot_dir, "CSV directory");

  std::string model = "minkowski", cone_out;
  double mass = 0.0, r0 = 1.0, cdelta = 1.0, perturb_amp = 0.0;
  int cm = 16, cl = 15;
  std::uint64_t pseed = 1;
  auto* cone = app.add_subcommand("nullcone", "generate a null-cone foliation");
  cone->add_option("--model", model, "minkowski | schwarzschild");
  cone->add_option("--mass", mass, "Schwarzschild mass");
  cone->add_option("--r0", r0, "initial sphere radius");
  cone->add_option("--delta", cdelta, "affine extent");
  cone->add_option("--M", cm, "time intervals");
  cone->add_option("--L", cl, "band limit");
  cone->add_option("--perturb", perturb_amp, "conformal perturbation amplitude");
  cone->add_option("--seed", pseed, "perturbation seed");
  cone->add_option("--out", cone_out, "output .fol path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cone->parsed()) {
      if (model != "minkowski" && model != "schwarzschild")
        throw std::invalid_argument("unknown model: " + model);
      NullConeData d = generate_cone(
          model == "schwarzschild" ? ConeModel::schwarzschild : ConeModel::minkowski,
          mass, r0, cdelta, cm, cl);
      if (perturb_amp > 0.0) d = perturb_cone(d, perturb_amp, pseed);
      d.gamma.save(cone_out);
      return 0;
    }
    RunConfig cfg = RunConfig::from_file(config_path);
    Report rep;
    if (sweep->parsed()) {
      std::vector<double> values;
      auto dots = values_arg.find("..");
      if (dots != std::string::npos) {
        double a = std::stod(values_arg.substr(0, dots));
        double b = std::stod(values_arg.substr(dots + 2));
        for (double v = a; v <= b + 1e-12; v += 1.0) values.push_back(v);
      } else {
        size_t pos = 0;
        while (pos < values_arg.size()) {
          auto comma = values_arg.find(',', pos);
          if (comma == std::string::npos) comma = values_arg.size();
          values.push_back(std::stod(values_arg.substr(pos, comma - pos)));
          pos = comma + 1;
        }
      }
      rep = run_sweep(cfg, axis, values);
    } else {
      rep = run_suites(cfg);
    }
    std::string target = out_path.empty() ? cfg.out : out_path;
    if (!target.empty()) rep.save(target);
    if (!plot_dir.empty()) rep.export_plotdata(plot_dir);
    for (const auto& c : rep.checks)
      std::printf("%-4s %-60s %.6g\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.lhs);
    return rep.all_pass() ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace geolab
