#include "canard/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "canard/canard_maps.hpp"
#include "canard/conserved.hpp"
#include "canard/melnikov.hpp"
#include "canard/run_config.hpp"

namespace canard {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

struct FigureData {
  RunConfig cfg;  // provenance line embedded in the CSV
  ResultTable table;
  std::vector<std::string> sidecar;
};

RunConfig base_cfg(const std::string& id) {
  RunConfig c;
  c.command = Command::reproduce;
  c.figure = id;
  return c;
}

// Shared central-chart run at lambda = r = 0.
Trajectory chart_orbit(MapId id, double h, double y0, long steps) {
  CanardParams p;
  p.h = h;
  return iterate(id, p, {0.0, y0}, 0, steps);
}

// --- individual recipes ----------------------------------------------------

FigureData fig_euler_on_curve(const std::string& id) {
  FigureData f;
  f.cfg = base_cfg(id);
  f.cfg.map = "k2-euler";
  f.cfg.h_text = "0.1";
  f.cfg.h = 0.1;
  f.cfg.y0 = -0.5;
  f.cfg.steps = 300;

  Trajectory traj = chart_orbit(MapId::k2_euler, 0.1, -0.5, 300);
  f.table.columns = {"n", "x", "y"};
  for (size_t i = 0; i < traj.states.size(); ++i)
    f.table.rows.push_back({static_cast<double>(i), traj.states[i].x,
                            traj.states[i].y});

  const auto& s1 = traj.states.at(1);
  const double measured = s1.y - (s1.x * s1.x - 0.5);
  const double expected = -0.1 * 0.1 / 4.0;
  const double diff = std::fabs(measured - expected);
  f.sidecar = {
      "figure: " + id,
      "explicit Euler step in the central chart, h = 0.1, start (0, -0.5) on "
      "the slow parabola y = x^2 - 1/2",
      "claim: one Euler step from the parabola lands below it by exactly h^2/4",
      "measured offset y_1 - (x_1^2 - 1/2) = " + fmt17(measured),
      "expected -h^2/4 = " + fmt17(expected),
      "|difference| = " + fmt17(diff) + " (tolerance 1e-14) -> " +
          verdict(diff < 1e-14),
  };
  return f;
}

FigureData fig_euler_spiral(const std::string& id) {
  FigureData f;
  f.cfg = base_cfg(id);
  f.cfg.map = "k2-euler";
  f.cfg.h_text = "0.01";
  f.cfg.h = 0.01;
  f.cfg.y0 = -0.2;
  f.cfg.steps = 20000;

  Trajectory traj = chart_orbit(MapId::k2_euler, 0.01, -0.2, 20000);
  f.table.columns = {"n", "x", "y", "H"};
  std::vector<double> Hs;
  Hs.reserve(traj.states.size());
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const auto& s = traj.states[i];
    const double H = conserved_H(s.x, s.y);
    Hs.push_back(H);
    f.table.rows.push_back({static_cast<double>(i), s.x, s.y, H});
  }

  // Window averages over 500 steps: per-step H oscillates within each turn of
  // the spiral, but the averages must decrease monotonically outward.
  const size_t win = 500;
  std::vector<double> means;
  for (size_t b = 0; b + win <= Hs.size(); b += win) {
    double m = 0.0;
    for (size_t i = b; i < b + win; ++i) m += Hs[i];
    means.push_back(m / static_cast<double>(win));
  }
  bool monotone = true;
  for (size_t k = 1; k < means.size(); ++k)
    if (!(means[k] < means[k - 1])) monotone = false;
  const double drop = Hs.front() - Hs.back();

  f.sidecar = {
      "figure: " + id,
      "explicit Euler in the central chart, h = 0.01, start (0, -0.2), 20000 "
      "steps",
      "claim: the orbit spirals outward, so H decreases monotonically between "
      "500-step window averages and drops by more than 1e-2 overall",
      "window averages monotone decreasing -> " + verdict(monotone),
      "H(start) - H(end) = " + fmt17(drop) + " (> 1e-2) -> " +
          verdict(drop > 1e-2),
  };
  return f;
}

FigureData fig_kahan_orbit(const std::string& id, double y0, long steps,
                           double ptp_bound) {
  FigureData f;
  f.cfg = base_cfg(id);
  f.cfg.map = "k2-kahan";
  f.cfg.h_text = "0.01";
  f.cfg.h = 0.01;
  f.cfg.y0 = y0;
  f.cfg.steps = steps;

  Trajectory traj = chart_orbit(MapId::k2_kahan, 0.01, y0, steps);
  FormalConservedQuantity fcq = derive_formal_invariant(2);
  f.table.columns = {"n", "x", "y", "H", "Hbar"};
  double max_abs_x = 0.0, hb_min = 0.0, hb_max = 0.0;
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const auto& s = traj.states[i];
    const double H = conserved_H(s.x, s.y);
    const double Hb = hbar_eval(s.x, s.y, 0.01, fcq);
    max_abs_x = std::max(max_abs_x, std::fabs(s.x));
    if (i == 0) {
      hb_min = hb_max = Hb;
    } else {
      hb_min = std::min(hb_min, Hb);
      hb_max = std::max(hb_max, Hb);
    }
    f.table.rows.push_back({static_cast<double>(i), s.x, s.y, H, Hb});
  }
  const double ptp = hb_max - hb_min;

  f.sidecar = {
      "figure: " + id,
      "Kahan map in the central chart, h = 0.01, start (0, " + fmt17(y0) +
          "), " + std::to_string(steps) + " steps",
      "claim: the orbit stays bounded (periodic region) and the order-2 "
      "corrected invariant Hbar is conserved to high precision",
      "max |x| = " + fmt17(max_abs_x) + " (< 3) -> " + verdict(max_abs_x < 3.0),
      "peak-to-peak Hbar = " + fmt17(ptp) + " (< " + fmt17(ptp_bound) +
          ") -> " + verdict(ptp < ptp_bound),
  };
  return f;
}

FigureData fig_gamma_h(const std::string& id) {
  FigureData f;
  f.cfg = base_cfg(id);
  f.cfg.map = "k2-kahan";
  f.cfg.h_text = "0.01";
  f.cfg.h = 0.01;
  f.cfg.N = 600;

  FormalConservedQuantity fcq = derive_formal_invariant(2);
  f.table.columns = {"n", "x", "y", "H", "Hbar"};
  double max_abs_hbar = 0.0, ptp_H_min = 0.0, ptp_H_max = 0.0;
  for (long n = -600; n <= 600; ++n) {
    PlanarState g = gamma_h(n, 0.01);
    const double H = conserved_H(g.x, g.y);
    const double Hb = hbar_eval(g.x, g.y, 0.01, fcq);
    max_abs_hbar = std::max(max_abs_hbar, std::fabs(Hb));
    if (n == -600) {
      ptp_H_min = ptp_H_max = H;
    } else {
      ptp_H_min = std::min(ptp_H_min, H);
      ptp_H_max = std::max(ptp_H_max, H);
    }
    f.table.rows.push_back({static_cast<double>(n), g.x, g.y, H, Hb});
  }

  f.sidecar = {
      "figure: " + id,
      "exact invariant-parabola orbit gamma_h(n) = (hn/2, h^2 n^2/4 - 1/2 - "
      "h^2/8), h = 0.01, n in [-600, 600]",
      "claim: the order-2 corrected invariant nearly vanishes along the "
      "parabola (order 1e-10), while H itself varies at order h^2",
      "max |Hbar| = " + fmt17(max_abs_hbar) + " (<= 1e-9) -> " +
          verdict(max_abs_hbar <= 1e-9),
      "peak-to-peak H = " + fmt17(ptp_H_max - ptp_H_min) + " (for contrast)",
  };
  return f;
}

FigureData fig_unbounded(const std::string& id) {
  FigureData f;
  f.cfg = base_cfg(id);
  f.cfg.map = "k2-kahan";
  f.cfg.h_text = "0.01";
  f.cfg.h = 0.01;
  f.cfg.y0 = -1.0;
  f.cfg.steps = 200000;

  Trajectory traj = chart_orbit(MapId::k2_kahan, 0.01, -1.0, 200000);
  f.table.columns = {"n", "x", "y"};
  for (size_t i = 0; i < traj.states.size(); ++i)
    f.table.rows.push_back({static_cast<double>(i), traj.states[i].x,
                            traj.states[i].y});

  const bool terminated = !traj.singular_events.empty();
  const long n_stop = terminated ? traj.singular_events.front() : -1;
  if (terminated)
    f.table.comments.push_back("singular at n=" + std::to_string(n_stop));
  f.sidecar = {
      "figure: " + id,
      "Kahan map in the central chart, h = 0.01, start (0, -1) outside the "
      "separatrix",
      "claim: the orbit is unbounded and iteration terminates in finite time "
      "when the step denominator 1 - h x + h^2/4 changes sign",
      terminated ? ("terminated at n = " + std::to_string(n_stop) + " -> PASS")
                 : "no termination within 200000 steps -> FAIL",
  };
  return f;
}

FigureData fig_melnikov_convergence(const std::string& id) {
  FigureData f;
  f.cfg = base_cfg(id);
  f.cfg.a1 = 1.0;
  f.cfg.sweep = true;

  const double sqrt2pi = std::sqrt(2.0 * M_PI);
  PerturbationCoeffs a{1.0, 0.0, 0.0, 0.0};
  f.table.columns = {"h", "N", "d_lambda", "d_r", "err_lambda", "err_r"};
  std::vector<double> errs;
  for (double h : {0.04, 0.02, 0.01, 0.005}) {
    const long N = std::lround(std::ceil(6.0 / h));
    MelnikovResult m = melnikov_sums(h, N, a, false);
    const double err_l = std::fabs(m.d_lambda + sqrt2pi);
    const double err_r = std::fabs(m.d_r + sqrt2pi / 2.0);
    errs.push_back(err_l);
    f.table.rows.push_back({h, static_cast<double>(N), m.d_lambda, m.d_r,
                            err_l, err_r});
  }
  bool monotone = true;
  for (size_t k = 1; k < errs.size(); ++k)
    if (!(errs[k] < errs[k - 1])) monotone = false;

  f.sidecar = {
      "figure: " + id,
      "Melnikov sums d_lambda, d_r (a1 = 1) over h in {0.04, 0.02, 0.01, "
      "0.005}, N = ceil(6/h)",
      "claim: the errors against the continuous values -sqrt(2 pi) and "
      "-sqrt(2 pi)/2 decrease monotonically as h shrinks",
      "errors monotone decreasing -> " + verdict(monotone),
      "final err_lambda = " + fmt17(errs.back()) + " (< 5e-5) -> " +
          verdict(errs.back() < 5e-5),
  };
  return f;
}

FigureData build_figure(const std::string& id) {
  if (id == "fig1-euler-on-curve") return fig_euler_on_curve(id);
  if (id == "fig2-euler-spiral") return fig_euler_spiral(id);
  if (id == "fig5-kahan-periodic") return fig_kahan_orbit(id, -0.4, 10000, 1e-6);
  if (id == "fig6-kahan-near-separatrix")
    return fig_kahan_orbit(id, -0.49, 20000, 1e-7);
  if (id == "fig7-gamma-h") return fig_gamma_h(id);
  if (id == "fig8-unbounded") return fig_unbounded(id);
  if (id == "fig12-melnikov-convergence") return fig_melnikov_convergence(id);
  throw std::invalid_argument("unknown figure id: " + id +
                              " (see `canard-lab reproduce --help`)");
}

}  // namespace

std::vector<std::string> figure_ids() {
  return {"fig1-euler-on-curve",       "fig2-euler-spiral",
          "fig5-kahan-periodic",       "fig6-kahan-near-separatrix",
          "fig7-gamma-h",              "fig8-unbounded",
          "fig12-melnikov-convergence"};
}

FigureArtifacts reproduce_figure(const std::string& figure_id,
                                 const std::string& output_dir) {
  FigureData f = build_figure(figure_id);

  namespace fs = std::filesystem;
  fs::path dir(output_dir.empty() ? "." : output_dir);
  fs::create_directories(dir);
  FigureArtifacts art;
  art.csv_path = (dir / (figure_id + ".csv")).string();
  art.sidecar_path = (dir / (figure_id + ".txt")).string();

  {
    std::ofstream csv(art.csv_path);
    if (!csv) throw std::runtime_error("cannot write " + art.csv_path);
    emit_result(f.cfg, f.table, csv);
  }
  {
    std::ofstream txt(art.sidecar_path);
    if (!txt) throw std::runtime_error("cannot write " + art.sidecar_path);
    for (const auto& line : f.sidecar) txt << line << "\n";
    txt << "config: " << f.cfg.canonical() << "\n";
  }
  return art;
}

}  // namespace canard
