#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <thread>

#include "sphereqed/sphereqed.h"

namespace sqcli {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Raised inside a sweep point when the library reports an error.
struct PointFailure {
  std::string message;
};

void check(sqed_status st) {
  if (st != SQED_OK)
    throw PointFailure{std::string(sqed_status_string(st)) + ": " + sqed_last_error()};
}

struct SphereDeleter {
  void operator()(sqed_sphere *s) const { sqed_sphere_destroy(s); }
};
using SpherePtr = std::unique_ptr<sqed_sphere, SphereDeleter>;

struct Material {
  std::string model;
  double omega_p, omega_t, gamma;
};

SpherePtr make_sphere(const Material &m, double radius) {
  sqed_sphere *s = nullptr;
  check(sqed_sphere_create(m.omega_p, m.omega_t, m.gamma, radius, &s));
  return SpherePtr(s);
}

std::vector<double> linspace(const Config &cfg, const std::string &lo, const std::string &hi,
                             const std::string &count) {
  const double a = cfg.number(lo), b = cfg.number(hi);
  const int n = cfg.integer(count);
  if (n < 1)
    throw ConfigError("'" + count + "' must be >= 1");
  if (!(a <= b))
    throw ConfigError("empty range: '" + lo + "' > '" + hi + "'");
  if (n == 1)
    return {a};
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k)
    out[k] = k == n - 1 ? b : a + (b - a) * k / (n - 1);
  return out;
}

std::vector<Material> materials(const Config &cfg) {
  const std::string model = cfg.word("material.model");
  double wp = cfg.number("material.omega_p");
  double wt = cfg.number("material.omega_t");
  if (model == "metal") {
    wp = 1.0; // frequencies in omega_P units
    wt = 0.0;
  } else if (model != "dielectric") {
    throw ConfigError("material.model must be 'dielectric' or 'metal'");
  }
  if (!(wp > 0.0) || !(wt >= 0.0))
    throw ConfigError("material.omega_p must be > 0 and material.omega_t >= 0");
  std::vector<Material> out;
  for (double g : cfg.numbers("material.gamma")) {
    if (!(g > 0.0))
      throw ConfigError("material.gamma must be > 0");
    out.push_back({model, wp, wt, g});
  }
  return out;
}

std::vector<double> radii(const Config &cfg) {
  auto r = cfg.numbers("sphere.radius");
  for (double x : r)
    if (!(x > 0.0))
      throw ConfigError("sphere.radius must be > 0");
  return r;
}

int polarization(const std::string &p) {
  if (p == "te")
    return SQED_TE;
  if (p == "tm")
    return SQED_TM;
  throw ConfigError("sweep.pol entries must be 'te' or 'tm'");
}

int orientation(const std::string &o) {
  if (o == "radial")
    return SQED_RADIAL;
  if (o == "tangential")
    return SQED_TANGENTIAL;
  throw ConfigError("atom.orientation entries must be 'radial' or 'tangential'");
}

std::vector<double> positive_list(const Config &cfg, const std::string &key) {
  auto v = cfg.numbers(key);
  for (double x : v)
    if (!(x > 0.0))
      throw ConfigError("'" + key + "' entries must be > 0");
  return v;
}

Row material_cells(const Material &m) { return {m.model, m.omega_p, m.omega_t, m.gamma}; }
const std::vector<std::string> material_columns = {"model", "omega_p", "omega_t", "gamma"};

struct Plan {
  std::vector<std::string> columns;
  std::vector<std::function<std::vector<Row>()>> points;
};

// Appends the outputs of one point, or NaN cells with the error text.
template <class Fn>
std::vector<Row> guarded_rows(std::size_t rows, const Row &inputs, std::size_t outputs, Fn fn) {
  try {
    std::vector<Row> out = fn();
    for (Row &r : out)
      r.emplace_back(std::string());
    return out;
  } catch (const PointFailure &f) {
    std::vector<Row> out;
    for (std::size_t k = 0; k < rows; ++k) {
      Row r = inputs;
      r.resize(r.size() + outputs, nan);
      r.emplace_back(f.message);
      out.push_back(std::move(r));
    }
    return out;
  }
}

Row concat(Row a, const Row &b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<std::string> columns(std::vector<std::string> head,
                                 std::initializer_list<const char *> tail) {
  for (const char *c : tail)
    head.emplace_back(c);
  head.emplace_back("error");
  return head;
}

Plan plan_permittivity(const Config &cfg) {
  Plan p;
  p.columns = columns(material_columns, {"omega", "eps_re", "eps_im", "n_re", "n_im", "regime"});
  const auto omegas = linspace(cfg, "sweep.omega_min", "sweep.omega_max", "sweep.steps");
  for (const Material &m : materials(cfg)) {
    for (double w : omegas) {
      p.points.push_back([m, w] {
        const Row in = concat(material_cells(m), {w});
        return guarded_rows(1, in, 5, [&] {
          auto s = make_sphere(m, 1.0);
          double er, ei, nr, ni;
          int regime;
          check(sqed_permittivity(s.get(), w, &er, &ei));
          check(sqed_refractive_index(s.get(), w, &nr, &ni));
          check(sqed_classify_regime(s.get(), w, &regime));
          static const char *names[] = {"below-gap", "in-gap", "above-gap"};
          return std::vector<Row>{concat(in, {er, ei, nr, ni, std::string(names[regime])})};
        });
      });
    }
  }
  return p;
}

// Radius entries pair with l_min/l_max entries when the lists have equal
// length; a single l range applies to every radius.
std::vector<std::pair<int, int>> l_ranges(const Config &cfg, std::size_t n_radii) {
  const auto lo = cfg.integers("sweep.l_min");
  const auto hi = cfg.integers("sweep.l_max");
  if (lo.size() != hi.size())
    throw ConfigError("sweep.l_min and sweep.l_max must have the same number of entries");
  if (lo.size() != 1 && lo.size() != n_radii)
    throw ConfigError("sweep.l_min needs one entry or one per sphere.radius entry");
  std::vector<std::pair<int, int>> out;
  for (std::size_t k = 0; k < n_radii; ++k) {
    const int a = lo[lo.size() == 1 ? 0 : k], b = hi[hi.size() == 1 ? 0 : k];
    if (a < 1)
      throw ConfigError("sweep.l_min must be >= 1");
    if (a > b)
      throw ConfigError("empty range: sweep.l_min > sweep.l_max");
    out.push_back({a, b});
  }
  return out;
}

Plan plan_resonances(const Config &cfg, bool quality) {
  Plan p;
  std::vector<std::string> head = material_columns;
  for (const char *c : {"radius", "kind", "pol", "l", "radial_order"})
    head.emplace_back(c);
  if (quality)
    p.columns = columns(head, {"omega_re", "delta_tot", "delta_rad", "delta_abs", "q_tot", "q_rad",
                               "q_abs", "q_abs_closed_form", "n_re", "n_im", "residual"});
  else
    p.columns = columns(head, {"omega_re", "omega_im", "residual"});
  const std::size_t outputs = quality ? 11 : 3;

  const std::string kind = cfg.word("sweep.kind");
  if (kind != "wg" && kind != "sg")
    throw ConfigError("sweep.kind must be 'wg' or 'sg'");
  std::vector<int> pols;
  for (const auto &w : cfg.words("sweep.pol"))
    pols.push_back(polarization(w));
  if (kind == "sg" && std::any_of(pols.begin(), pols.end(), [](int x) { return x == SQED_TE; }))
    throw ConfigError("surface-guided resonances are TM only; set sweep.pol = tm");
  std::vector<int> orders = kind == "sg" ? std::vector<int>{0} : cfg.integers("sweep.radial_order");
  for (int i : orders)
    if (kind == "wg" && i < 1)
      throw ConfigError("sweep.radial_order must be >= 1");
  const auto rs = radii(cfg);
  const auto ranges = l_ranges(cfg, rs.size());

  for (const Material &m : materials(cfg)) {
    for (std::size_t ri = 0; ri < rs.size(); ++ri) {
      const double radius = rs[ri];
      for (int pol : pols) {
        for (int order : orders) {
          for (int l = ranges[ri].first; l <= ranges[ri].second; ++l) {
            p.points.push_back([=] {
              const Row in = concat(material_cells(m),
                                    {radius, kind, std::string(pol == SQED_TE ? "TE" : "TM"),
                                     std::int64_t(l), std::int64_t(order)});
              return guarded_rows(1, in, outputs, [&] {
                auto s = make_sphere(m, radius);
                sqed_resonance r;
                if (kind == "wg")
                  check(sqed_find_wg(s.get(), l, order, pol, &r));
                else
                  check(sqed_find_sg(s.get(), l, &r));
                if (!quality)
                  return std::vector<Row>{concat(in, {r.omega_re, r.omega_im, r.residual})};
                double nr, ni, closed;
                check(sqed_refractive_index(s.get(), r.omega_re, &nr, &ni));
                check(sqed_q_abs_closed_form(nr, ni, l + 0.5, pol, kind == "wg" ? SQED_WG : SQED_SG,
                                             &closed));
                return std::vector<Row>{concat(in, {r.omega_re, -r.omega_im, r.delta_rad,
                                                    r.delta_abs, r.q_tot, r.q_rad, r.q_abs, closed,
                                                    nr, ni, r.residual})};
              });
            });
          }
        }
      }
    }
  }
  return p;
}

Plan plan_decay(const Config &cfg) {
  Plan p;
  std::vector<std::string> head = material_columns;
  for (const char *c : {"radius", "orientation", "delta_r", "omega_a"})
    head.emplace_back(c);
  p.columns = columns(head, {"rate_ratio", "shift_ratio", "l_max_used", "tail_estimate", "converged"});
  const auto omegas = linspace(cfg, "sweep.omega_min", "sweep.omega_max", "sweep.steps");
  const auto drs = positive_list(cfg, "atom.delta_r");
  const auto orients = cfg.words("atom.orientation");
  for (const auto &o : orients)
    orientation(o);
  for (const Material &m : materials(cfg))
    for (double radius : radii(cfg))
      for (const auto &o : orients)
        for (double dr : drs)
          for (double w : omegas)
            p.points.push_back([=] {
              const Row in = concat(material_cells(m), {radius, o, dr, w});
              return guarded_rows(1, in, 5, [&] {
                auto s = make_sphere(m, radius);
                const sqed_atom a{dr, w, orientation(o), 0.0};
                sqed_decay d;
                check(sqed_decay_rate(s.get(), &a, &d));
                return std::vector<Row>{concat(in, {d.rate_ratio, d.shift_ratio,
                                                    std::int64_t(d.l_max_used), d.tail_estimate,
                                                    std::int64_t(d.converged)})};
              });
            });
  return p;
}

Plan plan_pattern(const Config &cfg) {
  Plan p;
  std::vector<std::string> head = material_columns;
  for (const char *c : {"radius", "orientation", "delta_r", "omega_a", "r", "theta", "phi"})
    head.emplace_back(c);
  p.columns = columns(head, {"value", "l_max_used"});
  const int samples = cfg.integer("field.theta_samples");
  if (samples < 2)
    throw ConfigError("field.theta_samples must be >= 2");
  const double r = cfg.number("field.r");
  const std::string phi_spec = cfg.word("field.pattern_phi") == "auto" ? "" : cfg.text("field.pattern_phi");
  std::vector<double> phis_user;
  if (!phi_spec.empty())
    phis_user = cfg.numbers("field.pattern_phi");
  const auto drs = positive_list(cfg, "atom.delta_r");
  const auto omegas = positive_list(cfg, "atom.omega_a");
  const auto orients = cfg.words("atom.orientation");
  for (const auto &o : orients)
    orientation(o);
  for (const Material &m : materials(cfg))
    for (double radius : radii(cfg))
      for (const auto &o : orients)
        for (double dr : drs)
          for (double w : omegas) {
            std::vector<double> phis = phis_user;
            if (phis.empty())
              phis = o == "radial" ? std::vector<double>{0.0}
                                   : std::vector<double>{0.0, 0.5 * std::numbers::pi};
            std::vector<double> th, ph;
            for (double f : phis)
              for (int k = 0; k < samples; ++k) {
                th.push_back(std::numbers::pi * k / (samples - 1));
                ph.push_back(f);
              }
            p.points.push_back([=] {
              const Row base = concat(material_cells(m), {radius, o, dr, w, r});
              std::vector<double> values(th.size());
              int lmax = 0;
              sqed_status st;
              {
                SpherePtr s;
                sqed_sphere *raw = nullptr;
                st = sqed_sphere_create(m.omega_p, m.omega_t, m.gamma, radius, &raw);
                s.reset(raw);
                if (st == SQED_OK) {
                  const sqed_atom a{dr, w, orientation(o), 0.0};
                  st = sqed_pattern(s.get(), &a, r, th.size(), th.data(), ph.data(), values.data(),
                                    &lmax);
                }
              }
              const std::string err =
                  st == SQED_OK ? "" : std::string(sqed_status_string(st)) + ": " + sqed_last_error();
              std::vector<Row> rows;
              for (std::size_t k = 0; k < th.size(); ++k) {
                Row row = concat(base, {th[k], ph[k]});
                if (st == SQED_OK)
                  row = concat(row, {values[k], std::int64_t(lmax)});
                else
                  row = concat(row, {nan, nan});
                row.emplace_back(err);
                rows.push_back(std::move(row));
              }
              return rows;
            });
          }
  return p;
}

Plan plan_fraction(const Config &cfg) {
  Plan p;
  std::vector<std::string> head = material_columns;
  for (const char *c : {"radius", "delta_r", "omega_a"})
    head.emplace_back(c);
  p.columns = columns(head, {"value", "series_terms"});
  const auto omegas = linspace(cfg, "sweep.omega_min", "sweep.omega_max", "sweep.steps");
  const auto drs = positive_list(cfg, "atom.delta_r");
  for (const Material &m : materials(cfg))
    for (double radius : radii(cfg))
      for (double dr : drs)
        for (double w : omegas)
          p.points.push_back([=] {
            const Row in = concat(material_cells(m), {radius, dr, w});
            return guarded_rows(1, in, 2, [&] {
              auto s = make_sphere(m, radius);
              const sqed_atom a{dr, w, SQED_RADIAL, 0.0};
              double v;
              int terms;
              check(sqed_radiated_fraction(s.get(), &a, &v, &terms));
              return std::vector<Row>{concat(in, {v, std::int64_t(terms)})};
            });
          });
  return p;
}

Plan plan_fluctuation(const Config &cfg) {
  Plan p;
  std::vector<std::string> head = material_columns;
  for (const char *c : {"radius", "omega", "r"})
    head.emplace_back(c);
  p.columns = columns(head, {"p_rr"});
  const auto rs = linspace(cfg, "fluct.r_min", "fluct.r_max", "fluct.steps");
  if (rs.front() <= 0.0)
    throw ConfigError("fluct.r_min must be > 0");
  const auto omegas = positive_list(cfg, "fluct.omega");
  for (const Material &m : materials(cfg))
    for (double radius : radii(cfg))
      for (double w : omegas)
        for (double r : rs)
          p.points.push_back([=] {
            const Row in = concat(material_cells(m), {radius, w, r});
            return guarded_rows(1, in, 1, [&] {
              auto s = make_sphere(m, radius);
              double v;
              check(sqed_fluctuation_prr(s.get(), w, r, &v));
              return std::vector<Row>{concat(in, {v})};
            });
          });
  return p;
}

Plan plan_timeevolve(const Config &cfg) {
  Plan p;
  std::vector<std::string> head = material_columns;
  for (const char *c : {"radius", "orientation", "delta_r", "omega_a", "a0_over_omega", "r", "theta",
                        "phi", "delta", "t"})
    head.emplace_back(c);
  p.columns = columns(head, {"i_exact", "i_markov"});
  const double a0 = cfg.number("atom.a0_over_omega");
  if (!(a0 > 0.0))
    throw ConfigError("atom.a0_over_omega must be > 0");
  const double r = cfg.number("field.r");
  const double theta = cfg.number("field.theta");
  const double phi = cfg.number("field.phi");
  const double delta_cfg = cfg.number("time.delta");
  if (delta_cfg < 0.0)
    throw ConfigError("time.delta must be >= 0 (0 estimates it)");
  const double t_max = cfg.number("time.t_max");
  if (!(t_max > 0.0))
    throw ConfigError("time.t_max must be > 0");
  const int steps = cfg.integer("time.steps");
  if (steps < 1)
    throw ConfigError("time.steps must be >= 1");
  std::vector<double> times(steps);
  for (int k = 0; k < steps; ++k)
    times[k] = steps == 1 ? t_max : t_max * k / (steps - 1);
  const auto drs = positive_list(cfg, "atom.delta_r");
  const auto omegas = positive_list(cfg, "atom.omega_a");
  const auto orients = cfg.words("atom.orientation");
  for (const auto &o : orients)
    orientation(o);
  for (const Material &m : materials(cfg))
    for (double radius : radii(cfg))
      for (const auto &o : orients)
        for (double dr : drs)
          for (double w : omegas)
            p.points.push_back([=] {
              const Row base = concat(material_cells(m), {radius, o, dr, w, a0, r, theta, phi});
              std::vector<double> exact(times.size()), markov(times.size());
              double delta = delta_cfg;
              std::string err;
              try {
                auto s = make_sphere(m, radius);
                const sqed_atom a{dr, w, orientation(o), a0};
                if (delta == 0.0)
                  check(sqed_estimate_linewidth(s.get(), &a, &delta));
                check(sqed_intensity_exact(s.get(), &a, r, theta, phi, times.size(), times.data(),
                                           delta, 1, exact.data()));
                check(sqed_intensity_markov(s.get(), &a, r, theta, phi, times.size(), times.data(),
                                            markov.data()));
              } catch (const PointFailure &f) {
                err = f.message;
                std::fill(exact.begin(), exact.end(), nan);
                std::fill(markov.begin(), markov.end(), nan);
              }
              std::vector<Row> rows;
              for (std::size_t k = 0; k < times.size(); ++k) {
                Row row = concat(base, {delta, times[k], exact[k], markov[k]});
                row.emplace_back(err);
                rows.push_back(std::move(row));
              }
              return rows;
            });
  return p;
}

} // namespace

const std::vector<std::string> &command_names() {
  static const std::vector<std::string> names = {"permittivity", "resonances", "qfactors",
                                                 "decay",        "lambshift",  "pattern",
                                                 "fraction",     "fluctuation", "timeevolve"};
  return names;
}

Table run_command(const std::string &command, const Config &cfg, int parallel) {
  if (parallel < 1)
    throw ConfigError("--parallel must be >= 1");
  Plan plan;
  if (command == "permittivity")
    plan = plan_permittivity(cfg);
  else if (command == "resonances")
    plan = plan_resonances(cfg, false);
  else if (command == "qfactors")
    plan = plan_resonances(cfg, true);
  else if (command == "decay" || command == "lambshift")
    plan = plan_decay(cfg);
  else if (command == "pattern")
    plan = plan_pattern(cfg);
  else if (command == "fraction")
    plan = plan_fraction(cfg);
  else if (command == "fluctuation")
    plan = plan_fluctuation(cfg);
  else if (command == "timeevolve")
    plan = plan_timeevolve(cfg);
  else
    throw ConfigError("unknown command '" + command + "'");

  // Work queue over points; each result lands in its own slot, so the
  // collected order never depends on scheduling.
  std::vector<std::vector<Row>> slots(plan.points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < plan.points.size();)
      slots[k] = plan.points[k]();
  };
  const std::size_t workers = std::min<std::size_t>(parallel, plan.points.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t)
      pool.emplace_back(worker);
    for (auto &th : pool)
      th.join();
  }

  Table t;
  t.command = command;
  t.columns = plan.columns;
  t.columns.insert(t.columns.begin(), "command");
  for (auto &rows : slots) {
    for (Row &r : rows) {
      if (!std::get<std::string>(r.back()).empty())
        t.failures = true;
      r.insert(r.begin(), command);
      t.rows.push_back(std::move(r));
    }
  }
  return t;
}

} // namespace sqcli
