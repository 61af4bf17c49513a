#include "obstacle/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "obstacle/errors.hpp"

namespace obstacle {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;
constexpr double kBoundTol = 1e-12;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json observables_json(const std::vector<ObservableRecord>& records) {
  json out = json::array();
  for (const auto& r : records) {
    out.push_back({{"t", r.t},
                   {"energy", num(r.energy)},
                   {"lip_minus", num(r.lip_minus)},
                   {"lip_plus", num(r.lip_plus)},
                   {"umax", num(r.umax)},
                   {"umin", num(r.umin)},
                   {"contacts", r.contacts}});
  }
  return out;
}

std::pair<double, double> interval_of(const LatticeDomain& domain) {
  if (const auto* p = std::get_if<PeriodicDomain>(&domain)) return {p->origin, p->origin + p->period};
  const auto& w = std::get<WindowDomain>(domain);
  return {w.a, w.b};
}

std::vector<double> sample_grid(const LatticeDomain& domain, int n) {
  const auto [a, b] = interval_of(domain);
  std::vector<double> xs(static_cast<std::size_t>(n));
  const bool periodic = std::holds_alternative<PeriodicDomain>(domain);
  const double h = periodic || n == 1 ? (b - a) / n : (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = a + i * h;
  return xs;
}

struct Writer {
  fs::path dir;
  std::vector<std::string> files;

  template <class F>
  void csv(const std::string& name, F&& body) {
    std::ofstream out(dir / name);
    if (!out) throw InputError("cannot write " + (dir / name).string());
    body(out);
    files.push_back(name);
  }
  void json_file(const std::string& name, const json& doc) {
    std::ofstream out(dir / name);
    if (!out) throw InputError("cannot write " + (dir / name).string());
    out << doc.dump(2) << '\n';
    files.push_back(name);
  }
};

fs::path prepare(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
  return dir;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FrontierOptions exact_options(const InitialData& data, const LatticeDomain& domain, double T) {
  FrontierOptions fo;
  if (!data.u0.is_periodic() && !data.u1.is_periodic()) {
    const auto [a, b] = interval_of(domain);
    fo.window = AnalysisWindow{a, b, T};
  }
  return fo;
}

struct ExactSample {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> u;
  double energy = 0.0;
  LipschitzNorms norms;
};

}  // namespace

double central_w_t(const RiemannPair& pair, double x, double t, double span) {
  return (eval_w(pair, x, t + span) - eval_w(pair, x, t - span)) / (2 * span);
}

double max_excess(const SolutionField& field, double t, double lo, double hi, int n) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    best = std::max(best, eval_u(field, x, t) - eval_w(field.pair(), x, t));
  }
  return best;
}

double falsification_margin(const SolutionField& field, double t, double lo, double hi, int n) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    const double bound = eval_w(field.pair(), x, t) + 2.0 * cone_negative_sup(field.pair(), x, t);
    best = std::max(best, eval_u(field, x, t) - bound);
  }
  return best;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  return f;
}

double lattice_discrepancy(const LatticeState& state, const SolutionField& field, double lo,
                           double hi) {
  double worst = 0.0;
  for (std::size_t i = state.first_valid(); i <= state.last_valid(); ++i) {
    const double x = state.x_at(i);
    if (x < lo || x > hi) continue;
    const double e = std::abs(state.current()[i] - eval_u(field, x, state.time()));
    if (!(e <= worst)) worst = e;
  }
  return worst;
}

RunReport run_scenario(const ScenarioConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep("run", cfg.name);
  rep.config_hash = config_hash(cfg.source);
  rep.metrics()["scenario"] = to_json(cfg);

  const bool exact = cfg.engine != Engine::lattice;
  const bool lattice = cfg.engine != Engine::exact;
  const bool periodic = std::holds_alternative<PeriodicDomain>(cfg.domain);
  const auto [a, b] = interval_of(cfg.domain);

  std::vector<double> times = cfg.snapshots;
  times.push_back(cfg.T);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  std::optional<Writer> out;
  if (!cfg.output_dir.empty()) out = Writer{prepare(cfg.output_dir), {}};
  const bool csv = cfg.format == OutputFormat::csv;
  json results = json::object();

  try {
    std::optional<SolutionField> field;
    if (exact) {
      field = SolutionField::solve(cfg.data, exact_options(cfg.data, cfg.domain, cfg.T));
      const std::pair<double, double> iv{a, b};
      const std::vector<double> xs = sample_grid(cfg.domain, cfg.N);
      std::vector<ExactSample> samples;
      std::vector<double> sample_times{0.0};
      sample_times.insert(sample_times.end(), times.begin(), times.end());
      for (double t : sample_times) {
        ExactSample s;
        s.t = t;
        s.x = xs;
        for (double x : xs) s.u.push_back(eval_u(*field, x, t));
        s.energy = energy(*field, t, iv);
        s.norms = lipschitz_norms(*field, t, iv);
        samples.push_back(std::move(s));
      }
      double umin = std::numeric_limits<double>::infinity();
      json obs = json::array();
      for (const auto& s : samples) {
        const auto [lo, hi] = std::minmax_element(s.u.begin(), s.u.end());
        umin = std::min(umin, *lo);
        obs.push_back({{"t", s.t},
                       {"energy", s.energy},
                       {"lip_minus", s.norms.minus},
                       {"lip_plus", s.norms.plus},
                       {"umax", *hi},
                       {"umin", *lo}});
      }
      const ContactCurve& curve = field->curve();
      rep.metrics()["exact"] = {{"observables", obs},
                                {"contact", !curve.is_empty()},
                                {"per_period_mass", num(field->measure().per_period_mass().value_or(
                                                        std::numeric_limits<double>::quiet_NaN()))}};
      rep.add(at_least("exact.bounds", umin, -kBoundTol, "min of u over the sample grid"));
      if (periodic && cfg.data.u0.is_periodic()) {
        double drift = 0.0;
        double lip = 0.0;
        const auto& s0 = samples.front();
        for (const auto& s : samples) {
          drift = std::max(drift, std::abs(s.energy - s0.energy) / std::max(s0.energy, 1e-300));
          lip = std::max({lip, std::abs(s.norms.minus - s0.norms.minus),
                          std::abs(s.norms.plus - s0.norms.plus)});
        }
        rep.add(at_most("exact.energy", drift, 1e-6, "relative drift of the energy over one period"));
        rep.add(at_most("exact.lipschitz", lip, 1e-9, "change of ||u_x +- u_t|| over one period"));
      } else {
        const char* why = "fixed x-interval of aperiodic data: waves leave and enter it";
        rep.add(skipped("exact.energy", why));
        rep.add(skipped("exact.lipschitz", why));
      }
      if (out) {
        if (csv) {
          out->csv("exact_curve.csv", [&](std::ostream& os) { write_curve_csv(curve, os); });
          out->csv("exact_observables.csv", [&](std::ostream& os) {
            os << "t,energy,lip_minus,lip_plus,umax,umin\n" << std::setprecision(17);
            for (const auto& o : obs) {
              os << o["t"].get<double>() << ',' << o["energy"].get<double>() << ','
                 << o["lip_minus"].get<double>() << ',' << o["lip_plus"].get<double>() << ','
                 << o["umax"].get<double>() << ',' << o["umin"].get<double>() << '\n';
            }
          });
          for (std::size_t k = 1; k < samples.size(); ++k) {
            out->csv("exact_snapshot_" + std::to_string(k - 1) + ".csv", [&](std::ostream& os) {
              os << "x,u\n" << std::setprecision(17);
              for (std::size_t i = 0; i < samples[k].x.size(); ++i) {
                os << samples[k].x[i] << ',' << samples[k].u[i] << '\n';
              }
            });
          }
        } else {
          json snaps = json::array();
          for (std::size_t k = 1; k < samples.size(); ++k) {
            snaps.push_back({{"t", samples[k].t}, {"x", samples[k].x}, {"u", samples[k].u}});
          }
          std::ostringstream curve_csv;
          write_curve_csv(curve, curve_csv);
          results["exact"] = {{"observables", obs}, {"snapshots", snaps}, {"curve_csv", curve_csv.str()}};
        }
      }
    }

    if (lattice) {
      LatticeOptions lo;
      lo.restitution = cfg.restitution;
      LatticeState state = init(cfg.data, cfg.dx, cfg.domain, lo);
      RunResult run_result;
      std::vector<double> discrepancy;
      // Step snapshot by snapshot so the exact engine can be compared on the fly.
      {
        std::vector<ObservableRecord> records;
        std::vector<Snapshot> snaps;
        for (double t : times) {
          RunResult part = run(state, t, cfg.record_every, {t});
          if (records.empty()) records = part.observables;
          else records.insert(records.end(), part.observables.begin() + 1, part.observables.end());
          snaps.push_back(part.snapshots.back());
          if (field) discrepancy.push_back(lattice_discrepancy(state, *field));
        }
        run_result.observables = std::move(records);
        run_result.snapshots = std::move(snaps);
      }
      const auto& rec = run_result.observables;
      const ObservableRecord& r0 = rec.front();
      double umin = std::numeric_limits<double>::infinity();
      double umax = -std::numeric_limits<double>::infinity();
      double rise = 0.0;
      double drift = 0.0;
      double lip_up = 0.0;
      double lip_change = 0.0;
      for (std::size_t k = 0; k < rec.size(); ++k) {
        umin = std::min(umin, rec[k].umin);
        umax = std::max(umax, rec[k].umax);
        drift = std::max(drift, std::abs(rec[k].energy - r0.energy));
        if (k > 0) rise = std::max(rise, rec[k].energy - rec[k - 1].energy);
        lip_up = std::max({lip_up, rec[k].lip_minus - r0.lip_minus, rec[k].lip_plus - r0.lip_plus});
        lip_change = std::max({lip_change, std::abs(rec[k].lip_minus - r0.lip_minus),
                               std::abs(rec[k].lip_plus - r0.lip_plus)});
      }
      const double E0 = std::max(r0.energy, 1e-300);
      const double lip0 = std::max(r0.lip_minus, r0.lip_plus);
      rep.metrics()["lattice"] = {{"steps", state.steps()},
                                  {"nodes", state.size()},
                                  {"events", state.events().size()},
                                  {"energy_initial", r0.energy},
                                  {"energy_final", rec.back().energy},
                                  {"lip_initial", lip0}};
      rep.add(at_least("lattice.lower_bound", umin, -kBoundTol, "min of u over all records"));
      if (cfg.data.mode == ObstacleMode::twin) {
        rep.add(at_most("lattice.upper_bound", umax, 1.0 + kBoundTol, "max of u over all records"));
      } else {
        rep.add(skipped("lattice.upper_bound", "single obstacle"));
      }
      if (!periodic) {
        const char* why = "window domain: the valid range shrinks and waves leave it";
        rep.add(skipped("lattice.energy", why));
        rep.add(at_most("lattice.lipschitz", lip_up / std::max(lip0, 1e-300), 2.0 * cfg.dx,
                        "relative growth of the discrete ||u_x +- u_t|| (may only shrink)"));
      } else if (cfg.restitution == 1.0) {
        rep.add(at_most("lattice.energy", drift / (E0 * cfg.dx), kLatticeEnergyDrift,
                        "relative energy drift in units of dx"));
        rep.add(at_most("lattice.lipschitz", lip_change / std::max(lip0, 1e-300), 2.0 * cfg.dx,
                        "relative change of the discrete ||u_x +- u_t||"));
      } else {
        rep.add(at_most("lattice.energy", rise / E0, 1e-10,
                        "largest relative energy increase between records (h < 1)"));
        rep.add(at_most("lattice.lipschitz", lip_up / std::max(lip0, 1e-300), 2.0 * cfg.dx,
                        "relative growth of the discrete ||u_x +- u_t|| (h < 1)"));
      }
      if (field) {
        const double tol = cfg.cross_tolerance.value_or(5.0 * cfg.dx);
        const double worst = *std::max_element(discrepancy.begin(), discrepancy.end());
        rep.metrics()["cross_validation"] = {{"times", times}, {"sup_node_discrepancy", discrepancy}};
        rep.add(at_most("cross.sup_node", worst, tol, "max over snapshot times of |lattice - exact|"));
      }
      if (out) {
        if (csv) {
          out->csv("lattice_observables.csv",
                   [&](std::ostream& os) { write_observables_csv(rec, os); });
          out->csv("lattice_events.csv",
                   [&](std::ostream& os) { write_events_csv(state.events(), os); });
          for (std::size_t k = 0; k < run_result.snapshots.size(); ++k) {
            out->csv("lattice_snapshot_" + std::to_string(k) + ".csv",
                     [&](std::ostream& os) { write_snapshot_csv(run_result.snapshots[k], os); });
          }
        } else {
          json snaps = json::array();
          for (const auto& s : run_result.snapshots) {
            json u = json::array();
            for (double v : s.u) u.push_back(num(v));
            snaps.push_back({{"t", s.t}, {"x", s.x}, {"u", u}});
          }
          json events = json::array();
          for (const auto& e : state.events()) {
            events.push_back({{"t", e.t}, {"x", e.x}, {"kind", to_string(e.kind)},
                              {"velocity_before", e.velocity_before}});
          }
          results["lattice"] = {{"observables", observables_json(rec)},
                                {"snapshots", snaps},
                                {"events", events}};
        }
      }
    }
  } catch (const EngineError& e) {
    throw EngineError(cfg.name + ": " + e.what());
  }

  if (out) {
    if (!csv) out->json_file("results.json", results);
    out->files.push_back("report.json");
    rep.metrics()["outputs"] = out->files;
    out->files.pop_back();
    out->json_file("report.json", rep.to_json(false));
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

RunReport run_counterexample(const CounterexampleOptions& opt) {
  if (opt.periods < 1) throw InputError("counterexample: periods must be >= 1");
  if (!(opt.dx > 0.0)) throw InputError("counterexample: dx must be positive");
  if (opt.N < 4) throw InputError("counterexample: N must be >= 4");
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep("counterexample", "sine-velocity");
  const InitialData data = presets::sine_velocity(0.5, 1.0, opt.N);
  rep.config_hash = config_hash({{"periods", opt.periods}, {"dx", opt.dx}, {"N", opt.N}});
  json& m = rep.metrics();
  m["data"] = to_json(data);

  const SolutionField field = SolutionField::solve(data);
  const PiecewiseLinear& tau = field.curve().tau();
  const double x0 = -kPi / 2;
  const double tau0 = tau(x0);
  const double slope = std::max(std::abs(tau.slope_left(x0)), std::abs(tau.slope_right(x0)));
  const double wt = central_w_t(field.pair(), x0, tau0, 2 * kPi / opt.N);
  const double analytic = std::sin(x0) * std::cos(kPi / 6);  // d/dt of 1/2 + sin x sin t
  const double stated = (1.0 - std::sqrt(3.0)) / 2.0;
  const double c0 = *field.measure().per_period_mass() / 2.0;
  m["contact"] = {{"x", x0},
                  {"tau", tau0},
                  {"tau_slope_left", tau.slope_left(x0)},
                  {"tau_slope_right", tau.slope_right(x0)},
                  {"w_t", wt},
                  {"w_t_analytic", analytic},
                  {"w_t_stated", stated},
                  {"w_t_stated_consistent", std::abs(stated - analytic) <= 1e-4}};
  m["c0"] = c0;
  rep.add(at_most("tau(-pi/2)", std::abs(tau0 - kPi / 6), 1e-4, "|tau - pi/6|"));
  rep.add(at_most("tau'(-pi/2)", slope, 1e-6, "max of the one-sided slopes"));
  rep.add(at_most("w_t at contact", std::abs(wt - analytic), 1e-4, "|w_t + sqrt(3)/2|"));
  rep.add(at_least("stated w_t flagged", std::abs(stated - analytic), 1e-4,
                   "(1 - sqrt 3)/2 differs from the derivative sin x cos t = -sqrt(3)/2"));
  rep.add(at_least("c0 positive", c0, 1e-12, "half the per-period mass of the measure"));

  // Lattice alongside, sampled at the grid time nearest each t_k.
  LatticeState state = init(data, opt.dx, PeriodicDomain{2 * kPi, -kPi});
  json rows = json::array();
  double best_margin = -std::numeric_limits<double>::infinity();
  int first_k = 0;
  for (int k = 1; k <= opt.periods; ++k) {
    const double t = 2 * k * kPi + 7 * kPi / 6;
    const double excess = max_excess(field, t, -kPi, kPi, opt.N);
    const double margin = falsification_margin(field, t, -kPi, kPi, opt.N);
    double umax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < opt.N; ++i) umax = std::max(umax, eval_u(field, -kPi + 2 * kPi * i / opt.N, t));
    run(state, t, 1u << 30);
    double lattice_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < state.size(); ++i) {
      lattice_excess = std::max(lattice_excess, state.current()[i] - eval_w(field.pair(), state.x_at(i), state.time()));
    }
    if (margin > 0.0 && first_k == 0) first_k = k;
    best_margin = std::max(best_margin, margin);
    rows.push_back({{"k", k},
                    {"t", t},
                    {"max_u_minus_w", excess},
                    {"lower_bound", k * c0},
                    {"lattice_t", state.time()},
                    {"lattice_max_u_minus_w", lattice_excess},
                    {"falsification_margin", margin},
                    {"max_u", umax},
                    {"exceeds_9_2", umax > 4.5}});
    rep.add(at_least("growth k=" + std::to_string(k), excess, k * c0 - 1e-2,
                     "max_x (u - w) at 2k pi + 7pi/6 against k c0 - 1e-2"));
  }
  m["periods"] = rows;
  m["first_falsifying_k"] = first_k == 0 ? json(nullptr) : json(first_k);
  rep.add(at_least("falsification", best_margin, 0.0,
                   "max over k and x of u - w - 2 sup (w)^- over the backward cone"));

  if (!opt.output_dir.empty()) {
    Writer out{prepare(opt.output_dir), {}};
    out.csv("growth.csv", [&](std::ostream& os) {
      os << "k,t,max_u_minus_w,lower_bound,lattice_max_u_minus_w,falsification_margin,max_u\n"
         << std::setprecision(17);
      for (const auto& r : rows) {
        os << r["k"].get<int>() << ',' << r["t"].get<double>() << ','
           << r["max_u_minus_w"].get<double>() << ',' << r["lower_bound"].get<double>() << ','
           << r["lattice_max_u_minus_w"].get<double>() << ','
           << r["falsification_margin"].get<double>() << ',' << r["max_u"].get<double>() << '\n';
      }
    });
    out.csv("contact_curve.csv", [&](std::ostream& os) { write_curve_csv(field.curve(), os); });
    out.files.push_back("report.json");
    m["outputs"] = out.files;
    out.files.pop_back();
    out.json_file("report.json", rep.to_json(false));
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

RunReport compare(const ScenarioConfig& cfg, const CompareOptions& opt) {
  if (opt.dx_list.size() < 2) throw InputError("compare: need at least two dx values");
  if (opt.offsets < 1) throw InputError("compare: offsets must be >= 1");
  if (cfg.data.mode == ObstacleMode::twin || cfg.restitution != 1.0) {
    throw InputError("compare: the exact engine covers the single elastic obstacle only");
  }
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep("compare", cfg.name);
  rep.config_hash = config_hash(cfg.source);
  std::vector<double> dxs = opt.dx_list;
  std::sort(dxs.begin(), dxs.end(), std::greater<>());
  const SolutionField field =
      SolutionField::solve(cfg.data, exact_options(cfg.data, cfg.domain, cfg.T));
  const auto [a, b] = interval_of(cfg.domain);
  std::vector<double> errors;
  for (double dx : dxs) {
    if (!(dx > 0.0)) throw InputError("compare: dx values must be positive");
    double sum = 0.0;
    for (int j = 0; j < opt.offsets; ++j) {
      const double shift = opt.offsets == 1 ? 0.0 : (j + 0.5) / opt.offsets * dx;
      LatticeDomain dom = cfg.domain;
      if (auto* p = std::get_if<PeriodicDomain>(&dom)) p->origin += shift;
      else std::get<WindowDomain>(dom).a += shift;
      LatticeState s = init(cfg.data, dx, dom);
      run(s, cfg.T, 1u << 30);
      sum += lattice_discrepancy(s, field, a, b);
    }
    errors.push_back(sum / opt.offsets);
  }
  std::vector<double> lx;
  std::vector<double> ly;
  json rows = json::array();
  for (std::size_t i = 0; i < dxs.size(); ++i) {
    lx.push_back(std::log(dxs[i]));
    ly.push_back(std::log(std::max(errors[i], 1e-300)));
    json r = {{"dx", dxs[i]}, {"sup_node_discrepancy", errors[i]}};
    if (i > 0) r["factor"] = errors[i - 1] / errors[i];
    rows.push_back(r);
  }
  const double order = fit_line(lx, ly).slope;
  rep.metrics()["runs"] = rows;
  rep.metrics()["observed_order"] = order;
  rep.metrics()["offsets"] = opt.offsets;
  // Straight contact lines and kinks between active segments are reproduced
  // exactly, leaving only roundoff to fit.
  const double largest = *std::max_element(errors.begin(), errors.end());
  if (largest <= kRoundoffDiscrepancy) {
    rep.add(at_most("exact on every grid", largest, kRoundoffDiscrepancy,
                    "largest sup-node discrepancy; no order to fit"));
    rep.add(skipped("observed order", "the lattice is exact to roundoff on every grid"));
  } else {
    rep.add(at_least("observed order", order, 0.5, "least-squares slope of log error vs log dx"));
  }
  if (!opt.output_dir.empty()) {
    Writer out{prepare(opt.output_dir), {}};
    out.csv("convergence.csv", [&](std::ostream& os) {
      os << "dx,sup_node_discrepancy\n" << std::setprecision(17);
      for (std::size_t i = 0; i < dxs.size(); ++i) os << dxs[i] << ',' << errors[i] << '\n';
    });
    out.files.push_back("report.json");
    rep.metrics()["outputs"] = out.files;
    out.files.pop_back();
    out.json_file("report.json", rep.to_json(false));
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

}  // namespace obstacle
