// Acceptance suite: runs every numbered verification block at its pinned
// tolerance and sample count, printing one line per criterion. Exits
// nonzero when any block fails.

#include "hdlab/battery.hpp"

#include <chrono>
#include <cstdio>

using namespace hdlab;

namespace {

struct Criterion {
  const char* title;
  std::function<std::vector<CheckResult>(const RunConfig&)> run;
  double time_budget_s;  // 0 = only the global budget applies
};

}  // namespace

int main() {
  RunConfig cfg;  // defaults: seed 42, pinned sample counts
  const std::vector<Criterion> criteria = {
      {"Manin-triple isotropy and pairing ad-invariance", battery::manin_triple, 5.0},
      {"Iwasawa/nu/split roundtrips with the cross relation and dressing equivariance",
       battery::factorization_roundtrips, 0.0},
      {"bracket axioms: antisymmetry, Jacobi, Leibniz", battery::bracket_axioms, 60.0},
      {"Poisson-map battery: Borel pair, constants map, nu, model transport",
       battery::poisson_maps, 0.0},
      {"moment-map battery: dressing and quasi-adjoint actions, equivariance",
       battery::moment_maps, 0.0},
      {"master-system conservation and commutation", battery::master_conservation, 0.0},
      {"degenerate-integrability rank evidence", battery::rank_sweep, 0.0},
      {"reduced-bracket consistency on the gauge slice", battery::reduced_consistency, 0.0},
      {"quadrature fidelity along the reduced flow", battery::quadrature_fidelity, 0.0},
      {"exactness of the decoupling map", battery::zeta_exactness, 0.0},
      {"scaling limits to the spin Sutherland model", battery::scaling_limits, 0.0},
      {"closed trigonometric identities on the minimal orbit", battery::rs_identities, 0.0},
  };

  const auto t0 = std::chrono::steady_clock::now();
  bool all_ok = true;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto c0 = std::chrono::steady_clock::now();
    const auto checks = criteria[i].run(cfg);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - c0).count();
    bool ok = true;
    double worst = 0.0;
    std::string worst_name;
    for (const auto& c : checks) {
      ok = ok && c.pass;
      const double rel = c.tol > 0 ? c.residual / c.tol : c.residual;
      if (rel >= worst) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s residual %.3g (tol %.3g, %d samples)", c.name.c_str(),
                      c.residual, c.tol, c.samples);
        worst = rel;
        worst_name = buf;
      }
    }
    if (criteria[i].time_budget_s > 0 && dt > criteria[i].time_budget_s) {
      ok = false;
      worst_name = "runtime " + std::to_string(dt) + " s exceeds budget";
    }
    all_ok = all_ok && ok;
    std::printf("criterion %02zu [%s] %s (%.1f s; worst: %s)\n", i + 1, ok ? "PASS" : "FAIL",
                criteria[i].title, dt, worst_name.c_str());
    if (!ok)
      for (const auto& c : checks)
        if (!c.pass)
          std::printf("    FAIL %s: residual %.3g vs tol %.3g%s%s\n", c.name.c_str(), c.residual,
                      c.tol, c.note.empty() ? "" : " sample ", c.note.c_str());
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("total %.1f s (budget 600 s)\n", total);
  if (total > 600.0) {
    std::printf("FAIL total runtime budget exceeded\n");
    all_ok = false;
  }
  return all_ok ? 0 : 1;
}
