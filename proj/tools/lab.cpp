// Command-line laboratory: reproducible experiments over the verification
// battery, the exact master flow, the reduced-flow quadrature, scaling
// sweeps, the closed trigonometric family, and rank evidence.
//
//   lab verify|flow|reduce-flow|scaling|rs|rank [options]
//
// Every command honours --seed (bit-reproducible sampling), writes
// report.json plus per-table CSVs under --output, and exits 0 on success,
// 1 on a failed check, 2 on usage or configuration errors.

#include "hdlab/battery.hpp"
#include "hdlab/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>

namespace fs = std::filesystem;
using namespace hdlab;

namespace {

struct Flags {
  RunConfig cfg;
  std::string eps_csv;
  bool canned = false;
  bool gauge_correction = false;
};

std::vector<double> parse_eps(const std::string& csv) {
  std::vector<double> out;
  std::string cur;
  for (char c : csv + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

json config_json(const RunConfig& c, const std::string& command) {
  json eps = json::array();
  for (double e : c.eps_list) eps.push_back(e);
  return json{{"command", command},   {"n", c.n},
              {"seed", c.seed},       {"tol_scale", c.tol_scale},
              {"samples", c.samples}, {"t_max", c.t_max},
              {"steps", c.steps},     {"eps", eps},
              {"coupling", c.coupling}, {"format", c.format}};
}

json check_json(const CheckResult& c) {
  json j{{"name", c.name},       {"residual", c.residual}, {"threshold", c.tol},
         {"pass", c.pass},       {"samples", c.samples}};
  if (!c.note.empty()) {
    json parsed = json::parse(c.note, nullptr, false);
    j["sample"] = parsed.is_discarded() ? json(c.note) : parsed;
  }
  return j;
}

struct Emitter {
  const RunConfig& cfg;
  std::string command;
  json report;
  std::vector<std::pair<std::string, CsvTable>> tables;
  std::vector<CheckResult> checks;

  explicit Emitter(const RunConfig& c, std::string cmd) : cfg(c), command(std::move(cmd)) {
    report["command"] = command;
    report["version"] = kVersion;
    report["config"] = config_json(cfg, command);
  }

  void add_table(const std::string& name, CsvTable t) { tables.emplace_back(name, std::move(t)); }
  void add_check(CheckResult c) { checks.push_back(std::move(c)); }

  int finish(double elapsed) {
    bool ok = true;
    json jc = json::array();
    for (const auto& c : checks) {
      ok = ok && c.pass;
      jc.push_back(check_json(c));
      std::printf("%-42s %s  residual %.3g  tol %.3g  (%d samples)\n", c.name.c_str(),
                  c.pass ? "PASS" : "FAIL", c.residual, c.tol, c.samples);
    }
    report["checks"] = jc;
    report["elapsed_seconds"] = elapsed;
    report["all_pass"] = ok;
    if (!cfg.output_dir.empty()) {
      fs::create_directories(cfg.output_dir);
      if (cfg.format == "json") {
        json jt;
        for (const auto& [name, table] : tables) {
          json rows = json::array();
          for (const auto& row : table.rows) {
            json r = json::object();
            for (size_t i = 0; i < table.header.size(); ++i) r[table.header[i]] = row[i];
            rows.push_back(r);
          }
          jt[name] = rows;
        }
        report["tables"] = jt;
      } else {
        for (const auto& [name, table] : tables)
          table.write((fs::path(cfg.output_dir) / (name + ".csv")).string());
      }
      write_json(report, (fs::path(cfg.output_dir) / "report.json").string());
    }
    std::printf("%s: %s (%.2f s)\n", command.c_str(), ok ? "all checks passed" : "CHECK FAILURES",
                elapsed);
    return ok ? 0 : 1;
  }
};

// --- verify ---------------------------------------------------------------

int cmd_verify(const Flags& fl) {
  const auto t0 = std::chrono::steady_clock::now();
  Emitter em(fl.cfg, "verify");
  const RunReport rep = battery::full_battery(fl.cfg);
  for (const auto& c : rep.checks) em.add_check(c);
  CsvTable t;
  t.header = {"name", "residual", "threshold", "pass", "samples"};
  for (const auto& c : rep.checks)
    t.rows.push_back({c.name, csv_cell(c.residual), csv_cell(c.tol), c.pass ? "1" : "0",
                      std::to_string(c.samples)});
  em.add_table("checks", std::move(t));
  return em.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

// --- flow -----------------------------------------------------------------

int cmd_flow(const Flags& fl) {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg = fl.cfg;
  Emitter em(cfg, "flow");

  const int n = cfg.n;
  PairGL x0;
  SpectralFn phi = power_invariant(1);
  if (fl.canned) {
    require(n == 2, "flow --canned: two sites only");
    x0.g = cmat::Identity(2, 2);
    x0.L = cmat::Zero(2, 2);
    x0.L(0, 0) = 2.0;
    x0.L(1, 1) = 0.5;
  } else {
    Rng rng(cfg.seed, 0);
    x0 = {random_unitary(rng, n), random_pos_hermitian(rng, n)};
    if (!regularity(x0.L).regular) x0.L = random_pos_hermitian(rng, n, 1.3);
  }
  const auto p0 = psi(x0);

  CsvTable t;
  t.header = {"t"};
  append_matrix_headers(t.header, "g", n);
  append_matrix_headers(t.header, "L", n);
  for (int k = 1; k <= n - 1; ++k) t.header.push_back("trL" + std::to_string(k));
  t.header.push_back("psi_residual");

  CheckResult cons{"flow.psi-conservation", 0.0, 1e-9 * cfg.tol_scale, false, 0, ""};
  for (int i = 0; i <= cfg.steps; ++i) {
    const double tt = cfg.steps == 0 ? 0.0 : cfg.t_max * i / cfg.steps;
    const auto xt = free_flow(phi, x0, tt);
    const auto pt = psi(xt);
    const double res = (pt.L1 - p0.L1).norm() + (pt.L2 - p0.L2).norm();
    std::vector<std::string> row{csv_cell(tt)};
    append_matrix_cells(row, xt.g);
    append_matrix_cells(row, xt.L);
    for (int k = 1; k <= n - 1; ++k)
      row.push_back(csv_cell(SpectralFn::power_trace(xt.L, k).real()));
    row.push_back(csv_cell(res));
    t.rows.push_back(std::move(row));
    cons.residual = std::max(cons.residual, res);
    cons.samples += 1;
  }
  cons.pass = cons.residual <= cons.tol;
  em.add_check(cons);
  em.add_table("trajectory", std::move(t));
  return em.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

// --- reduce-flow ------------------------------------------------------------

int cmd_reduce_flow(const Flags& fl) {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg = fl.cfg;
  Emitter em(cfg, "reduce-flow");
  const int n = cfg.n;

  Rng rng(cfg.seed, 0);
  const SlicePoint x0{random_regular_torus(rng, n, 0.4), random_pos_hermitian(rng, n, 0.5)};
  const SpectralFn phi = power_invariant(1);
  std::vector<double> grid;
  for (int i = 0; i <= cfg.steps; ++i)
    grid.push_back(cfg.steps == 0 ? 0.0 : cfg.t_max * i / cfg.steps);
  QuadratureOptions opt;
  opt.gauge_correction = fl.gauge_correction;
  const auto traj = quadrature_integrate(phi, x0, grid, opt);

  CsvTable t;
  t.header = {"t"};
  append_matrix_headers(t.header, "Q", n);
  append_matrix_headers(t.header, "L", n);
  for (int k = 1; k <= n - 1; ++k) t.header.push_back("trL" + std::to_string(k));
  CheckResult inv{"reduce-flow.invariants", 0.0, 1e-8 * cfg.tol_scale, false, 0, ""};
  for (size_t i = 0; i < traj.pts.size(); ++i) {
    std::vector<std::string> row{csv_cell(traj.t[i])};
    append_matrix_cells(row, traj.pts[i].Q);
    append_matrix_cells(row, traj.pts[i].L);
    for (int k = 1; k <= n - 1; ++k) {
      const double v = SpectralFn::power_trace(traj.pts[i].L, k).real();
      row.push_back(csv_cell(v));
      inv.residual =
          std::max(inv.residual, std::abs(v - SpectralFn::power_trace(x0.L, k).real()));
    }
    inv.samples += 1;
    t.rows.push_back(std::move(row));
  }
  inv.pass = inv.residual <= inv.tol;
  em.add_check(inv);
  em.report["breakpoint"] =
      traj.breakpoint ? json(static_cast<int>(*traj.breakpoint)) : json(nullptr);
  em.add_table("trajectory", std::move(t));
  return em.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

// --- scaling ----------------------------------------------------------------

int cmd_scaling(const Flags& fl) {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg = fl.cfg;
  if (cfg.eps_list.empty())
    for (int i = 0; i < 8; ++i) cfg.eps_list.push_back(0.1 / std::pow(2.0, i));
  Emitter em(cfg, "scaling");
  const int n = cfg.n;

  Rng rng(cfg.seed, 0);
  SutherlandPoint pt;
  pt.q = random_positions(rng, n, 0.6, 1.3);
  const cmat p0 = random_b0(rng, n, 0.15);
  pt.p = rvec(n);
  for (int i = 0; i < n; ++i) pt.p[i] = p0(i, i).real();
  pt.X = random_strict_upper(rng, n, 0.15);

  const auto rows = scaling_energy_table(pt, cfg.eps_list);
  CsvTable t;
  t.header = {"eps", "energy_err", "ratio"};
  for (const auto& r : rows)
    t.rows.push_back({csv_cell(r.eps), csv_cell(r.err), csv_cell(r.ratio)});
  em.add_table("energy_convergence", std::move(t));

  CheckResult ratio{"scaling.energy-ratios", 0.0, 0.0, false, static_cast<int>(rows.size()), ""};
  ratio.pass = scaling_converges(rows, 1.6, 2.4);
  ratio.residual = ratio.pass ? 0.0 : 1.0;
  em.add_check(ratio);
  CheckResult lim{"scaling.energy-limit", scaling_energy_table(pt, {1e-3})[0].err,
                  1e-4 * cfg.tol_scale, false, 1, ""};
  lim.pass = lim.residual <= lim.tol;
  em.add_check(lim);

  const LinearSpinPoint lpt{torus_from_angles(pt.q), diag_from_real(pt.p), pt.X};
  ObsLin fa{[](const LinearSpinPoint& y) { return std::norm(y.X(0, 1)); }, nullptr, {}};
  ObsLin fb{[n](const LinearSpinPoint& y) {
              if (n == 2) {
                double v = 0;
                for (int i = 0; i < y.p.rows(); ++i) v += (i + 1) * y.p(i, i).real();
                return v;
              }
              return (y.X * y.X.adjoint() * y.X).trace().imag();
            },
            nullptr,
            {}};
  const auto brows = scaling_bracket_table(fa, fb, lpt, cfg.eps_list);
  CsvTable bt;
  bt.header = {"eps", "bracket_err", "ratio"};
  for (const auto& r : brows)
    bt.rows.push_back({csv_cell(r.eps), csv_cell(r.err), csv_cell(r.ratio)});
  em.add_table("bracket_convergence", std::move(bt));
  CheckResult blim{"scaling.bracket-limit", scaling_bracket_table(fa, fb, lpt, {1e-3})[0].err,
                   1e-4 * cfg.tol_scale, false, 1, ""};
  blim.pass = blim.residual <= blim.tol;
  em.add_check(blim);

  return em.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

// --- rs ---------------------------------------------------------------------

int cmd_rs(const Flags& fl) {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg = fl.cfg;
  Emitter em(cfg, "rs");
  const int n = cfg.n;
  const RsContext ctx{n, cfg.coupling};
  const int samples = cfg.samples > 0 ? cfg.samples : 100;

  CsvTable t;
  t.header = {"sample", "res_plus", "res_minus", "res_constraint"};
  CheckResult cross{"rs.crosscheck", 0.0, 1e-10 * cfg.tol_scale, false, 0, ""};
  CheckResult constr{"rs.orbit-constraint", 0.0, 1e-10 * cfg.tol_scale, false, 0, ""};
  int skipped = 0;
  for (int s = 0; s < samples; ++s) {
    Rng rng(cfg.seed, s);
    rvec q, th(n);
    try {
      q = random_positions(rng, n, 0.25, 1.3);
    } catch (const std::exception&) {
      ++skipped;
      continue;
    }
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      th[i] = rng.uniform(-1.0, 1.0);
      sum += th[i];
    }
    for (int i = 0; i < n; ++i) th[i] -= sum / n;
    const auto res = rs_crosscheck(q, th, ctx);
    t.rows.push_back({std::to_string(s), csv_cell(res.res_plus), csv_cell(res.res_minus),
                      csv_cell(res.res_constraint)});
    cross.residual = std::max({cross.residual, res.res_plus, res.res_minus});
    constr.residual = std::max(constr.residual, res.res_constraint);
    cross.samples += 1;
    constr.samples += 1;
  }
  cross.pass = cross.residual <= cross.tol;
  constr.pass = constr.residual <= constr.tol;
  em.add_check(cross);
  em.add_check(constr);
  em.report["skipped_singular_samples"] = skipped;
  em.add_table("crosscheck", std::move(t));

  CheckResult invx{"rs.nu-inversion",
                   (rs_nu_matrix(RsContext{n, -cfg.coupling}) * rs_nu_matrix(ctx) -
                    cmat::Identity(n, n))
                       .norm(),
                   1e-12 * cfg.tol_scale, false, 1, ""};
  invx.pass = invx.residual <= invx.tol;
  em.add_check(invx);
  return em.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

// --- rank -------------------------------------------------------------------

int cmd_rank(const Flags& fl) {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg = fl.cfg;
  Emitter em(cfg, "rank");
  const int n = cfg.n;
  const int samples = cfg.samples > 0 ? cfg.samples : 100;

  CsvTable t;
  t.header = {"sample", "conclusive", "rank_flows", "rank_constants", "expected_flows",
              "expected_constants", "margin", "pass"};
  CheckResult c{"rank.sweep", 0.0, 0.0, false, 0, ""};
  int bad = 0;
  for (int s = 0; s < samples; ++s) {
    Rng rng(cfg.seed, s);
    const PairGL x{random_unitary(rng, n), random_pos_hermitian(rng, n)};
    const auto rep = rank_evidence(x);
    t.rows.push_back({std::to_string(s), rep.conclusive ? "1" : "0",
                      std::to_string(rep.rank_flows), std::to_string(rep.rank_constants),
                      std::to_string(rep.expected_flows), std::to_string(rep.expected_constants),
                      csv_cell(rep.regularity_margin), rep.pass ? "1" : "0"});
    if (!rep.conclusive || !rep.pass) ++bad;
    c.samples += 1;
  }
  c.residual = bad;
  c.pass = bad == 0;
  em.add_check(c);
  em.add_table("rank_evidence", std::move(t));
  return em.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for integrable flows on the Heisenberg double of SU(n)"};
  app.require_subcommand(1);
  app.set_config("--config")->configurable(false);

  Flags fl;
  int n_flag = 0;  // 0 keeps the per-command default
  app.add_option("--n", n_flag, "matrix size (2..8)")->check(CLI::Range(0, 8));
  app.add_option("--seed", fl.cfg.seed, "RNG seed; fixed seed gives bit-identical output");
  app.add_option("--t-max", fl.cfg.t_max, "final time of trajectory commands");
  app.add_option("--steps", fl.cfg.steps, "number of grid steps");
  app.add_option("--eps", fl.eps_csv, "comma-separated scaling parameters");
  app.add_option("--coupling", fl.cfg.coupling, "coupling of the trigonometric family");
  app.add_option("--samples", fl.cfg.samples, "sample count override (0 = per-check default)");
  app.add_option("--tol-scale", fl.cfg.tol_scale, "multiplies every threshold");
  app.add_option("--output", fl.cfg.output_dir, "directory for report.json and tables");
  app.add_option("--format", fl.cfg.format, "csv or json tables")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* verify = app.add_subcommand("verify", "run the full property battery");
  auto* flow = app.add_subcommand("flow", "exact free flow on the master phase space");
  flow->add_flag("--canned", fl.canned, "two-site worked example instead of seeded data");
  auto* reduce = app.add_subcommand("reduce-flow", "quadrature along the reduced flow");
  reduce->add_flag("--gauge-correction", fl.gauge_correction,
                   "enable the diagonal gauge correction");
  auto* scaling = app.add_subcommand("scaling", "convergence to the spin Sutherland model");
  auto* rs = app.add_subcommand("rs", "closed trigonometric identities");
  auto* rank = app.add_subcommand("rank", "degenerate-integrability rank sweep");
  for (auto* sub : {verify, flow, reduce, scaling, rs, rank}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints usage/help
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    fl.cfg.eps_list = fl.eps_csv.empty() ? std::vector<double>{} : parse_eps(fl.eps_csv);
    auto pick_n = [&](int dflt) { fl.cfg.n = n_flag >= 2 ? n_flag : dflt; };
    if (verify->parsed()) {
      pick_n(2);
      return cmd_verify(fl);
    }
    if (flow->parsed()) {
      pick_n(2);
      return cmd_flow(fl);
    }
    if (reduce->parsed()) {
      pick_n(3);
      return cmd_reduce_flow(fl);
    }
    if (scaling->parsed()) {
      pick_n(3);
      return cmd_scaling(fl);
    }
    if (rs->parsed()) {
      pick_n(3);
      return cmd_rs(fl);
    }
    if (rank->parsed()) {
      pick_n(3);
      return cmd_rank(fl);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
