#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tropical/equil.hpp"
#include "tropical/errors.hpp"
#include "tropical/report.hpp"
#include "tropical/sim.hpp"
#include "tropical/trop.hpp"
#include "tropical/tyson.hpp"

namespace tropical::cli {

namespace fs = std::filesystem;

namespace {

// Collects every output in memory and publishes them only at the end: each
// file goes to a hidden temporary in the output directory and is renamed
// into place once all temporaries are written.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }

  void commit() {
    fs::create_directories(dir_);
    std::vector<std::pair<fs::path, fs::path>> staged;
    try {
      for (const auto& [name, content] : files_) {
        const fs::path tmp = dir_ / ("." + name + ".tmp");
        staged.emplace_back(tmp, dir_ / name);
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
      }
    } catch (...) {
      for (const auto& [tmp, dest] : staged) {
        std::error_code ec;
        fs::remove(tmp, ec);
      }
      throw;
    }
    for (const auto& [tmp, dest] : staged) fs::rename(tmp, dest);
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

struct Loaded {
  OdeSystem sys;
  std::optional<tyson::Params> params;  // set for the builtin
  double eps;
};

tyson::Params profile_params(const Config& cfg) {
  if (!cfg.profile.empty()) return tyson::load_profile(cfg.profile);
  const fs::path shipped = fs::path(TROPICAL_DATA_DIR) / "tyson_profile.json";
  return fs::exists(shipped) ? tyson::load_profile(shipped) : tyson::Params{};
}

void check_config(const Config& cfg) {
  if (cfg.eps && !(*cfg.eps > 0)) throw std::invalid_argument("--eps must be positive");
  if (!(cfg.tol > 0)) throw std::invalid_argument("--tol must be positive");
  if (cfg.t_end && !(*cfg.t_end > 0)) throw std::invalid_argument("--t-end must be positive");
}

Loaded load(const Config& cfg) {
  check_config(cfg);
  if (cfg.model == "tyson") {
    auto p = profile_params(cfg);
    if (cfg.eps) p.epsilon = *cfg.eps;
    return {tyson::build(p), p, p.epsilon};
  }
  auto sys = load_model(cfg.model);
  const double eps = cfg.eps ? *cfg.eps : sys.epsilon().value_or(0.1);
  return {std::move(sys), std::nullopt, eps};
}

std::vector<double> start_state(const Config& cfg, const Loaded& m, double eps) {
  if (!cfg.x0.empty()) {
    if (cfg.x0.size() != m.sys.dimension())
      throw std::invalid_argument("--x0 needs " + std::to_string(m.sys.dimension()) + " values");
    return cfg.x0;
  }
  if (m.params) return tyson::initial_state(*m.params, eps);
  return std::vector<double>(m.sys.dimension(), 0.5);
}

Method method_for(const Config& cfg, const Loaded& m) {
  if (cfg.method == "auto") return m.params ? Method::stiff : Method::explicit_rk;
  return parse_method(cfg.method);
}

WallPolicy parse_wall(const std::string& s) {
  if (s == "equilibrate") return WallPolicy::equilibrate;
  if (s == "abort") return WallPolicy::abort;
  throw std::invalid_argument("unknown wall policy '" + s + "'");
}

std::string join(const RationalVector& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_string(v[i]);
  return s;
}

std::string join(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

EquilibrationOptions equil_options(const Config& cfg) {
  EquilibrationOptions opts;
  if (!cfg.subset.empty()) opts.subset = cfg.subset;
  opts.use_conservation = cfg.conservation;
  opts.permanency = !cfg.no_permanency;
  opts.exclusive = cfg.exclusive;
  return opts;
}

// A single-signed selected equation has no equilibration at all; reported as
// "no solution" rather than as an input error.
std::optional<std::string> one_signed_equation(const OdeSystem& sys, const EquilibrationOptions& opts) {
  std::vector<std::size_t> idx;
  if (opts.subset) {
    idx = *opts.subset;
  } else {
    for (std::size_t i = 0; i < sys.dimension(); ++i) idx.push_back(i);
  }
  for (std::size_t i : idx) {
    if (i >= sys.dimension()) continue;
    bool pos = false, neg = false;
    for (const auto& t : sys.equation(i).num) (t.coeff > 0 ? pos : neg) = true;
    if (!pos || !neg)
      return "equation for " + sys.variables()[i] +
             " must contain at least two terms of opposite sign to be equilibrated";
  }
  return std::nullopt;
}

std::vector<ExponentSolution> solve(const Loaded& m, const Config& cfg, int& status) {
  const auto opts = equil_options(cfg);
  if (auto msg = one_signed_equation(m.sys, opts)) {
    std::cerr << "no solution: " << *msg << "\n";
    status = kNoSolution;
    return {};
  }
  auto sols = all_equilibrations(m.sys, opts);
  status = sols.empty() ? kNoSolution : kOk;
  if (sols.empty()) std::cerr << "no solution: the equilibration polyhedra are all empty\n";
  return sols;
}

std::string csv(const Trajectory& t) {
  std::ostringstream s;
  write_trajectory_csv(t, s);
  return s.str();
}

std::string events_csv(const Trajectory& t) {
  std::ostringstream s;
  write_events_csv(t, s);
  return s.str();
}

Trajectory run_kind(const std::string& kind, const Loaded& m, std::span<const double> x0, double t_end, double eps,
                    const Config& cfg) {
  const Method method = method_for(cfg, m);
  if (kind == "full") {
    IntegrationOptions opts;
    opts.tol = cfg.tol;
    opts.method = method;
    return integrate_full(m.sys, x0, t_end, eps, opts);
  }
  HybridOptions opts;
  opts.tol = cfg.tol;
  opts.method = method;
  opts.wall = parse_wall(cfg.wall);
  return integrate_hybrid(tropicalize(m.sys, parse_trop_kind(kind)), x0, t_end, eps, opts);
}

void print_summary(const Trajectory& traj, const Loaded& m, double eps) {
  std::cout << "samples: " << traj.size() << "\n";
  std::cout << "t_end: " << format_double(traj.times.back()) << "\n";
  std::map<std::string, std::size_t> events;
  for (const auto& e : traj.events) ++events[e.kind];
  for (const auto& [kind, count] : events) std::cout << "events " << kind << ": " << count << "\n";

  std::map<std::string, double> occupancy;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) occupancy[traj.modes[k + 1]] += traj.times[k + 1] - traj.times[k];
  const double span = traj.times.back() - traj.times.front();
  if (span > 0)
    for (const auto& [mode, time] : occupancy)
      std::cout << "occupancy " << mode << ": " << format_double(time / span) << "\n";

  if (!m.sys.conservation_laws().empty())
    std::cout << "conservation drift: " << format_double(conservation_drift(m.sys, traj, eps)) << "\n";

  if (traj.size() >= 8) {
    try {
      const auto info = detect_cycle(traj, 0.5, m.params ? 2 : 0);
      if (info.status == CycleInfo::Status::cycle)
        std::cout << "cycle: period " << format_double(info.period) << (info.converged ? "" : " (not converged)")
                  << "\n";
      else if (info.status == CycleInfo::Status::rest_point)
        std::cout << "rest point: " << join(*info.rest_point) << "\n";
      else
        std::cout << "cycle: inconclusive\n";
    } catch (const DomainError& e) {
      std::cout << "cycle: inconclusive (" << e.what() << ")\n";
    }
  }
}

}  // namespace

int cmd_equilibrate(const Config& cfg) {
  const auto m = load(cfg);
  int status = kOk;
  const auto sols = solve(m, cfg, status);
  if (status != kOk) return status;
  Outputs out(cfg.out);
  out.add("equilibration.json", equilibration_report(m.sys, sols));
  out.commit();
  std::cout << sols.size() << " solution(s)\n";
  for (std::size_t k = 0; k < sols.size(); ++k) {
    std::cout << "solution " << k << ": a=(" << join(sols[k].a.values) << ")";
    if (!sols[k].pinned()) std::cout << " family of dimension " << sols[k].family.size();
    std::cout << "\n";
  }
  return kOk;
}

int cmd_tropicalize(const Config& cfg) {
  const auto m = load(cfg);
  const auto kind = parse_trop_kind(cfg.kind == "full" ? "complete" : cfg.kind);
  const auto hsys = tropicalize(m.sys, kind);
  const auto x0 = start_state(cfg, m, m.eps);

  nlohmann::json doc;
  doc["kind"] = to_string(kind);
  doc["epsilon"] = m.eps;
  auto groups = nlohmann::json::array();
  for (const auto& g : hsys.groups())
    groups.push_back({{"equation", g.equation}, {"denominator", g.denominator}, {"terms", g.terms}});
  doc["groups"] = std::move(groups);
  const auto sample = hsys.sample(x0, m.eps);
  doc["state"] = x0;
  doc["signature"] = sample.signature.id();
  doc["tie"] = sample.tie;
  doc["mode_system"] = nlohmann::json::parse(serialize_model(*hsys.mode_system(sample.signature)));

  Outputs out(cfg.out);
  out.add("tropicalization.json", doc.dump(2) + "\n");
  out.commit();
  std::cout << "kind: " << to_string(kind) << "\n";
  std::cout << "groups: " << hsys.groups().size() << "\n";
  std::cout << "signature at x0: " << sample.signature.id() << (sample.tie ? " (tie)" : "") << "\n";
  return kOk;
}

int cmd_simulate(const Config& cfg) {
  const auto m = load(cfg);
  Outputs out(cfg.out);
  if (cfg.kind == "hybrid3") {
    if (!m.params) throw std::invalid_argument("--kind hybrid3 needs --model tyson");
    const auto hc = tyson::hybrid_cycle(*m.params, m.eps, std::min(cfg.tol, 1e-9));
    if (!hc.closed) {
      if (hc.rest_point) {
        std::cout << "no oscillation; stable rest point: " << join(*hc.rest_point) << "\n";
        return kOk;
      }
      throw IntegrationError("three-mode orbit did not close", hc.orbit.empty() ? 0.0 : hc.orbit.times.back());
    }
    out.add("trajectory.csv", csv(hc.orbit));
    out.add("events.csv", events_csv(hc.orbit));
    out.commit();
    std::cout << "O: " << join(hc.O) << "\n";
    std::cout << "O2: " << join(hc.O2) << "\n";
    std::cout << "O1: " << join(hc.O1) << "\n";
    std::cout << "durations mode1,mode2,mode3: " << join(hc.durations) << "\n";
    std::cout << "period: " << format_double(hc.durations[0] + hc.durations[1] + hc.durations[2]) << "\n";
    return kOk;
  }
  const auto x0 = start_state(cfg, m, m.eps);
  const double t_end = cfg.t_end.value_or(m.params ? 1000.0 : 10.0);
  const auto traj = run_kind(cfg.kind, m, x0, t_end, m.eps, cfg);
  out.add("trajectory.csv", csv(traj));
  out.add("events.csv", events_csv(traj));
  out.commit();
  print_summary(traj, m, m.eps);
  return kOk;
}

int cmd_reduce(const Config& cfg) {
  const auto m = load(cfg);
  int status = kOk;
  const auto sols = solve(m, cfg, status);
  if (status != kOk) return status;
  if (cfg.solution >= sols.size())
    throw std::invalid_argument("--solution " + std::to_string(cfg.solution) + " out of range (" +
                                std::to_string(sols.size()) + " solution(s))");
  const auto& sol = sols[cfg.solution];
  const auto tr = truncate(m.sys, sol);
  const auto seq = order_sequence(tr);
  Outputs out(cfg.out);
  out.add("reduced_model.json", serialize_model(tr.system));
  out.commit();
  std::cout << "a=(" << join(sol.a.values) << ")\n";
  std::cout << "prefactor orders: " << join(tr.prefactor_orders) << "\n";
  std::cout << "order sequence:";
  for (std::size_t k = 0; k < seq.equations.size(); ++k)
    std::cout << " " << m.sys.variables()[seq.equations[k]] << ":" << to_string(seq.sorted_orders[k]);
  std::cout << "\nchain: " << (seq.is_chain ? "yes" : "no") << "\n";
  return kOk;
}

int cmd_compare(const Config& cfg) {
  const auto m = load(cfg);
  if (cfg.eps_list.size() < 2) throw std::invalid_argument("--eps-list needs at least two values");
  const double t_end = cfg.t_end.value_or(1.0);
  std::vector<double> errors;
  std::ostringstream table;
  table << "eps,sup_error\n";
  for (double e : cfg.eps_list) {
    if (!(e > 0)) throw std::invalid_argument("--eps-list values must be positive");
    const auto x0 = start_state(cfg, m, e);
    const auto a = run_kind(cfg.kind_a, m, x0, t_end, e, cfg);
    const auto b = run_kind(cfg.kind_b, m, x0, t_end, e, cfg);
    errors.push_back(compare(a, b).sup_error);
    table << format_double(e) << "," << format_double(errors.back()) << "\n";
  }
  double worst = 0;
  bool positive = true;
  for (double v : errors) {
    worst = std::max(worst, v);
    positive = positive && v > 0;
  }
  std::string verdict;
  if (worst <= 10 * cfg.tol) {
    verdict = "identical";
  } else if (!positive) {
    verdict = "gamma undefined (zero error at some eps)";
  } else {
    const auto fit = fit_loglog(cfg.eps_list, errors);
    verdict = "gamma=" + format_double(fit.slope) + (fit.slope > 0 ? " > 0" : " <= 0");
  }
  Outputs out(cfg.out);
  out.add("compare.csv", table.str());
  out.commit();
  std::cout << table.str() << "verdict: " << verdict << "\n";
  return kOk;
}

int cmd_tyson_demo(const Config& cfg) {
  check_config(cfg);
  auto p = profile_params(cfg);
  if (cfg.eps) p.epsilon = *cfg.eps;
  const double eps = p.epsilon;
  const auto red = tyson::reduced_2d(p);
  const auto rest = tyson::refine_rest_point(red, red.rest_point(), eps);
  const auto eig = linearize_eigen(make_field(red.system, eps), rest);
  double growth = -INFINITY;
  for (const auto& l : eig) growth = std::max(growth, l.real());
  const auto nf = tyson::normal_form(p);

  std::cout << "epsilon: " << format_double(eps) << "\n";
  std::cout << "Case I exponents: (" << join(tyson::known_exponents(tyson::Case::I).a.values) << ")\n";
  std::cout << "Case III exponents: (" << join(tyson::known_exponents(tyson::Case::III).a.values) << ")\n";
  std::cout << "rest point (y3,y4): " << join(rest) << "\n";
  std::cout << "eigenvalues:";
  for (const auto& l : eig) std::cout << " " << format_double(l.real()) << (l.imag() < 0 ? "" : "+") << format_double(l.imag()) << "i";
  std::cout << "\nrest point " << (growth < 0 ? "stable" : "unstable") << "\n";
  std::cout << "normal form: s=" << format_double(nf.s) << " k0=" << format_double(nf.k0)
            << " k1=" << format_double(nf.k1) << " (k1 > k0: " << (nf.k1 > nf.k0 ? "yes" : "no") << ")\n";

  Outputs out(cfg.out);
  out.add("profile.json", tyson::serialize_profile(p, "tyson-demo"));
  const auto hc = tyson::hybrid_cycle(p, eps);
  if (hc.closed) {
    out.add("hybrid_orbit.csv", csv(hc.orbit));
    std::cout << "three-mode orbit: O=(" << join(hc.O) << ") O2=(" << join(hc.O2) << ") O1=(" << join(hc.O1)
              << ")\n";
    std::cout << "durations mode1,mode2,mode3: " << join(hc.durations) << "\n";
  } else {
    std::cout << "three-mode orbit: not closed\n";
  }
  out.commit();
  return kOk;
}

}  // namespace tropical::cli
