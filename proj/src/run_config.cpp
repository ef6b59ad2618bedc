#include "canard/run_config.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "canard/blowup.hpp"
#include "canard/canard_maps.hpp"
#include "canard/conserved.hpp"
#include "canard/figures.hpp"
#include "canard/hamiltonian.hpp"
#include "canard/integrators.hpp"
#include "canard/melnikov.hpp"
#include "canard/rational.hpp"

namespace canard {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Decimal (or scientific) literal -> exact rational, e.g. "0.01" -> 1/100.
// Keeps the invariant-curve iteration exact: the double nearest 0.01 is not
// 1/100, and the on-curve identities hold only for the literal value.
Rational decimal_to_rational(const std::string& text) {
  const std::string s = trim(text);
  size_t i = 0;
  bool neg = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = (s[i++] == '-');
  std::string digits;
  long frac_digits = 0;
  bool saw_digit = false, saw_dot = false;
  for (; i < s.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      digits += s[i];
      saw_digit = true;
      if (saw_dot) ++frac_digits;
    } else if (s[i] == '.' && !saw_dot) {
      saw_dot = true;
    } else {
      break;
    }
  }
  long exp10 = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = (s[i++] == '-');
    if (i >= s.size()) throw std::invalid_argument("malformed number: " + text);
    long ev = 0;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i)
      ev = ev * 10 + (s[i] - '0');
    exp10 = eneg ? -ev : ev;
  }
  if (!saw_digit || i != s.size())
    throw std::invalid_argument("malformed number: " + text);
  mpz_class mant(digits.empty() ? "0" : digits);
  if (neg) mant = -mant;
  Rational r(mant);
  long shift = exp10 - frac_digits;
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
  if (shift >= 0)
    r *= Rational(p10);
  else
    r /= Rational(p10);
  r.canonicalize();
  return r;
}

double parse_double_strict(const std::string& s, const std::string& key) {
  try {
    size_t pos = 0;
    double v = std::stod(trim(s), &pos);
    if (pos != trim(s).size() || !std::isfinite(v))
      throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid numeric value for " + key + ": " + s);
  }
}

CanardParams params_from(const RunConfig& cfg) {
  double eps = cfg.epsilon;
  if (cfg.r > 0.0 && eps == 0.0) eps = cfg.r * cfg.r;
  CanardParams p;
  p.epsilon = eps;
  p.lambda = cfg.lambda;
  p.h = cfg.h;
  p.a1 = cfg.a1;
  p.a2 = cfg.a2;
  p.a4 = cfg.a4;
  p.a5 = cfg.a5;
  return p;
}

long env_thread_cap() {
  const char* s = std::getenv("CANARD_LAB_THREADS");
  if (s == nullptr) {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<long>(hc);
  }
  char* end = nullptr;
  long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0' || v < 1)
    throw std::invalid_argument("CANARD_LAB_THREADS must be a positive integer");
  return v;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int run_simulate(const RunConfig& cfg, ResultTable& t) {
  t.columns = {"n", "x", "y"};
  long singular_at = -1;

  if (cfg.map == "symplectic-euler") {
    double v = cfg.x0, w = cfg.y0;
    t.rows.push_back({0.0, v, w});
    for (long n = 0; n < cfg.steps; ++n) {
      HamiltonianState s{};
      try {
        s = symplectic_euler_step(v, w, cfg.h);
      } catch (const SingularStepError&) {
        singular_at = n + 1;
        break;
      }
      if (!std::isfinite(s.v) || !std::isfinite(s.w)) {
        singular_at = n + 1;
        break;
      }
      v = s.v;
      w = s.w;
      t.rows.push_back({static_cast<double>(n + 1), v, w});
    }
  } else {
    CanardParams p = params_from(cfg);
    MapId id = map_id_from_string(cfg.map);
    Trajectory traj = iterate(id, p, {cfg.x0, cfg.y0}, 0, cfg.steps);
    for (size_t i = 0; i < traj.states.size(); ++i)
      t.rows.push_back({static_cast<double>(traj.start_index + static_cast<long>(i)),
                        traj.states[i].x, traj.states[i].y});
    if (!traj.singular_events.empty()) singular_at = traj.singular_events.front();
  }

  if (singular_at >= 0) {
    t.comments.push_back("singular at n=" + std::to_string(singular_at));
    return 3;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// invariant-check: exact-rational iteration on the invariant parabola
// ---------------------------------------------------------------------------

int run_invariant_check(const RunConfig& cfg, ResultTable& t) {
  const Rational hq = decimal_to_rational(cfg.h_text);
  if (!(hq > 0)) throw std::invalid_argument("h must be > 0");
  const Rational half_h = hq / rat(2);

  RationalPlanarState s{rat(0), -rat(1, 2) - hq * hq / rat(8)};
  Rational max_phi = rat(0);
  Rational max_residual = rat(0);
  long singular_at = -1;

  t.columns = {"n", "x", "y", "phi_h"};
  for (long n = 0; n <= cfg.steps; ++n) {
    Rational phi = phi_h_exact(s, hq);
    if (abs(phi) > max_phi) max_phi = abs(phi);
    t.rows.push_back({static_cast<double>(n), to_double(s.x), to_double(s.y),
                      to_double(phi)});
    if (n == cfg.steps) break;
    RationalPlanarState next{};
    try {
      next = p0_step_exact(s, hq);
    } catch (const std::domain_error&) {
      singular_at = n + 1;
      break;
    }
    Rational residual = next.x - s.x - half_h;
    if (abs(residual) > max_residual) max_residual = abs(residual);
    s = next;
  }

  t.comments.push_back("arithmetic = exact rational, h = " +
                       rational_str(hq) + " parsed from \"" + cfg.h_text + "\"");
  t.comments.push_back("start = (0, -1/2 - h^2/8) on the invariant parabola");
  t.comments.push_back("max_abs_phi_h = " + rational_str(max_phi));
  t.comments.push_back("max_abs_x_advance_residual = " + rational_str(max_residual) +
                       " (x_{n+1} - x_n - h/2)");
  if (singular_at >= 0) {
    t.comments.push_back("singular at n=" + std::to_string(singular_at));
    return 3;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// melnikov
// ---------------------------------------------------------------------------

void melnikov_row(const MelnikovResult& m, const PerturbationCoeffs& a,
                  ResultTable& t) {
  const double sqrt2pi = std::sqrt(2.0 * M_PI);
  const double C = (4.0 * a.a1 - a.a2 - 2.0 * a.a4 + 2.0 * a.a5) / 8.0;
  const double target_l = -sqrt2pi;
  const double target_r = -C * sqrt2pi;
  t.rows.push_back({m.h, static_cast<double>(m.N), m.d_lambda, m.d_r,
                    std::fabs(m.d_lambda - target_l),
                    std::fabs(m.d_r - target_r)});
}

int run_melnikov(const RunConfig& cfg, ResultTable& t) {
  t.columns = {"h", "N", "d_lambda", "d_r", "err_lambda", "err_r"};
  PerturbationCoeffs a{cfg.a1, cfg.a2, cfg.a4, cfg.a5};
  const double C = (4.0 * cfg.a1 - cfg.a2 - 2.0 * cfg.a4 + 2.0 * cfg.a5) / 8.0;

  std::vector<MelnikovResult> results;
  if (cfg.sweep) {
    const std::vector<double> hs = {0.04, 0.02, 0.01, 0.005};
    std::vector<long> Ns;
    for (double h : hs) Ns.push_back(std::lround(std::ceil(6.0 / h)));
    results.resize(hs.size());

    const long cap = env_thread_cap();
    const size_t workers =
        static_cast<size_t>(std::min<long>(cap, static_cast<long>(hs.size())));
    std::atomic<size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&]() {
      for (;;) {
        size_t i = cursor.fetch_add(1);
        if (i >= hs.size()) return;
        try {
          results[i] = melnikov_sums(hs[i], Ns[i], a, cfg.boundary_corrected);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  } else {
    results.push_back(melnikov_sums(cfg.h, cfg.N, a, cfg.boundary_corrected));
  }

  for (const auto& m : results) melnikov_row(m, a, t);

  // Both unit conventions, explicitly labeled: the raw sums already carry the
  // step factor (the summand fields are O(h)), so they approximate the
  // continuous integrals directly; the per-h ratios are listed alongside.
  for (const auto& m : results) {
    const std::string tag = "h=" + fmt17(m.h) + " ";
    t.comments.push_back(tag + "d_lambda_raw = " + fmt17(m.d_lambda));
    t.comments.push_back(tag + "d_lambda_per_h = " + fmt17(m.d_lambda / m.h));
    t.comments.push_back(tag + "d_r_raw = " + fmt17(m.d_r));
    t.comments.push_back(tag + "d_r_per_h = " + fmt17(m.d_r / m.h));
  }
  t.comments.push_back("reference d_lambda -> -sqrt(2 pi) = " +
                       fmt17(-std::sqrt(2.0 * M_PI)));
  t.comments.push_back("reference d_r -> -C sqrt(2 pi) with C = (4 a1 - a2 - 2 a4 + 2 a5)/8 = " +
                       fmt17(C));
  t.comments.push_back(std::string("boundary_corrected = ") +
                       (cfg.boundary_corrected ? "1" : "0"));
  return 0;
}

// ---------------------------------------------------------------------------
// conserved derive | monitor
// ---------------------------------------------------------------------------

int run_conserved_derive(const RunConfig& cfg, ResultTable& t) {
  FormalConservedQuantity fcq = derive_formal_invariant(cfg.order);
  t.text_lines.push_back("Hbar(x, y, h) = H(x, y) + sum_j h^{2j} exp(-2y) p_j(x, y)");
  for (size_t j = 0; j < fcq.corrections.size(); ++j) {
    t.text_lines.push_back("h^" + std::to_string(2 * (j + 1)) + ": " +
                           fcq.corrections[j].poly.str());
  }
  return 0;
}

int run_conserved_monitor(const RunConfig& cfg, ResultTable& t) {
  if (cfg.map != "k2-kahan" && cfg.map != "k2-euler")
    throw std::invalid_argument(
        "conserved monitor expects --map k2-kahan or k2-euler");
  CanardParams p = params_from(cfg);
  MapId id = map_id_from_string(cfg.map);
  Trajectory traj = iterate(id, p, {cfg.x0, cfg.y0}, 0, cfg.steps);
  FormalConservedQuantity fcq = derive_formal_invariant(cfg.order);
  MonitorResult mon = conservation_monitor(traj, fcq);

  t.columns = {"n", "H", "Hbar"};
  for (const auto& row : mon.rows)
    t.rows.push_back({static_cast<double>(row.n), row.H, row.Hbar});
  t.comments.push_back("correction order = " + std::to_string(cfg.order));
  t.comments.push_back("ptp_H = " + fmt17(mon.ptp_H));
  t.comments.push_back("ptp_Hbar = " + fmt17(mon.ptp_Hbar));
  if (!traj.singular_events.empty()) {
    t.comments.push_back("singular at n=" +
                         std::to_string(traj.singular_events.front()));
    return 3;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// blowup
// ---------------------------------------------------------------------------

int run_blowup(const RunConfig& cfg, ResultTable& t) {
  std::set<double> grid;
  for (int k = 1; k <= 9; ++k) grid.insert(0.05 * k);
  grid.insert(cfg.h);

  t.columns = {"h1", "alpha", "dev_a", "dev_r"};
  for (double h1 : grid) {
    K1FixedPoints fp = k1_fixed_points(h1);
    K1EigenReport er = k1_jacobian_eigen_check(h1);
    t.rows.push_back({h1, fp.alpha, er.max_deviation_attracting,
                      er.max_deviation_repelling});
  }

  K1FixedPoints fp = k1_fixed_points(cfg.h);
  K1EigenReport er = k1_jacobian_eigen_check(cfg.h);
  t.comments.push_back("entry-chart fixed points at h1 = " + fmt17(cfg.h) +
                       " on {r1 = lambda1 = 0, eps1 = 0}");
  t.comments.push_back("attracting: x1 = " + fmt17(fp.attracting.x1) +
                       ", x1-derivative alpha = " + fmt17(fp.alpha));
  t.comments.push_back("repelling:  x1 = " + fmt17(fp.repelling.x1) +
                       ", x1-derivative 1/alpha = " + fmt17(fp.alpha_inverse));
  t.comments.push_back(
      "eigen check: tangent (-1, 4, 1) at the attracting point maps to itself "
      "plus an h1-shift of -2 h1^2; (1, 4, 1) at the repelling point shifts by "
      "+2 h1^2");
  t.comments.push_back("max_deviation_attracting = " +
                       fmt17(er.max_deviation_attracting));
  t.comments.push_back("max_deviation_repelling = " +
                       fmt17(er.max_deviation_repelling));
  return 0;
}

// ---------------------------------------------------------------------------
// hamiltonian check | simulate
// ---------------------------------------------------------------------------

int run_hamiltonian_check(ResultTable& t) {
  HamiltonianReport r = hamiltonian_report();
  t.text_lines.push_back("identity_residual_max = " + fmt17(r.max_identity_residual));
  t.text_lines.push_back("transport_defect_max = " + fmt17(r.max_transport_defect));
  t.text_lines.push_back("step_det_defect_max = " + fmt17(r.max_step_det_defect));
  t.text_lines.push_back("hhat_drift = " + fmt17(r.hhat_drift));
  t.text_lines.push_back("kahan_conjugate_det_defect = " +
                         fmt17(r.kahan_conjugate_det_defect));
  return 0;
}

int run_hamiltonian_simulate(const RunConfig& cfg, ResultTable& t) {
  t.columns = {"n", "v", "w", "Hhat"};
  double v = cfg.x0, w = cfg.y0;
  long singular_at = -1;
  t.rows.push_back({0.0, v, w, H_hat(v, w)});
  for (long n = 0; n < cfg.steps; ++n) {
    HamiltonianState s{};
    try {
      s = symplectic_euler_step(v, w, cfg.h);
    } catch (const SingularStepError&) {
      singular_at = n + 1;
      break;
    }
    if (!std::isfinite(s.v) || !std::isfinite(s.w)) {
      singular_at = n + 1;
      break;
    }
    v = s.v;
    w = s.w;
    t.rows.push_back({static_cast<double>(n + 1), v, w, H_hat(v, w)});
  }
  if (singular_at >= 0) {
    t.comments.push_back("singular at n=" + std::to_string(singular_at));
    return 3;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// reproduce
// ---------------------------------------------------------------------------

int run_reproduce(const RunConfig& cfg, ResultTable& t) {
  FigureArtifacts art = reproduce_figure(cfg.figure, cfg.output_dir);
  t.text_lines.push_back("wrote " + art.csv_path);
  t.text_lines.push_back("wrote " + art.sidecar_path);
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public surface
// ---------------------------------------------------------------------------

std::string to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::invariant_check: return "invariant-check";
    case Command::melnikov: return "melnikov";
    case Command::conserved: return "conserved";
    case Command::blowup: return "blowup";
    case Command::hamiltonian: return "hamiltonian";
    case Command::reproduce: return "reproduce";
  }
  return "?";
}

std::string to_string(OutputFormat f) {
  return f == OutputFormat::csv ? "csv" : "json";
}

void RunConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("h must be a positive finite number");
  if (steps < 0 || steps > 5'000'000)
    throw std::invalid_argument("steps must be in [0, 5000000]");
  if (N < 1 || N > 10'000'000)
    throw std::invalid_argument("N must be in [1, 10000000]");
  if (order < 2 || order > 6 || order % 2 != 0)
    throw std::invalid_argument("order must be 2, 4, or 6");
  if (a3 != 0.0)
    throw std::invalid_argument(
        "a3 must be 0: the cubic slot of the perturbation is identically zero "
        "in this model");
  static const std::set<std::string> known_maps = {
      "kahan", "euler", "k2-kahan", "k2-euler", "symplectic-euler"};
  if (known_maps.find(map) == known_maps.end())
    throw std::invalid_argument("unknown map: " + map);
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  if (r < 0.0) throw std::invalid_argument("r must be >= 0");
  if (r > 0.0 && epsilon > 0.0 &&
      std::fabs(r * r - epsilon) > 1e-12 * std::max(1.0, epsilon))
    throw std::invalid_argument("r and epsilon disagree: epsilon must equal r^2");
  for (double v : {epsilon, lambda, r, a1, a2, a4, a5, x0, y0})
    if (!std::isfinite(v))
      throw std::invalid_argument("parameters must be finite");
  if (command == Command::reproduce && figure.empty())
    throw std::invalid_argument("reproduce requires --figure <id>");
  if (command == Command::conserved && subaction != "derive" &&
      subaction != "monitor")
    throw std::invalid_argument("conserved requires an action: derive | monitor");
  if (command == Command::hamiltonian && subaction != "check" &&
      subaction != "simulate")
    throw std::invalid_argument("hamiltonian requires an action: check | simulate");
}

std::string RunConfig::canonical() const {
  std::ostringstream o;
  o << "command=" << to_string(command);
  if (!subaction.empty()) o << " action=" << subaction;
  o << " map=" << map << " h=" << h_text << " epsilon=" << fmt17(epsilon)
    << " lambda=" << fmt17(lambda) << " r=" << fmt17(r) << " a=[" << fmt17(a1)
    << "," << fmt17(a2) << "," << fmt17(a3) << "," << fmt17(a4) << ","
    << fmt17(a5) << "]"
    << " N=" << N << " steps=" << steps << " x0=" << fmt17(x0)
    << " y0=" << fmt17(y0) << " order=" << order
    << " boundary-corrected=" << (boundary_corrected ? 1 : 0)
    << " sweep=" << (sweep ? 1 : 0);
  if (command == Command::reproduce) o << " figure=" << figure;
  o << " format=" << to_string(format);
  return o.str();
}

void emit_result(const RunConfig& cfg, const ResultTable& t, std::ostream& os) {
  if (cfg.format == OutputFormat::csv) {
    if (!t.columns.empty()) {
      for (size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << t.columns[i];
      os << "\n";
    }
    os << "# config: " << cfg.canonical() << "\n";
    for (const auto& row : t.rows) {
      for (size_t i = 0; i < row.size(); ++i)
        os << (i ? "," : "") << fmt17(row[i]);
      os << "\n";
    }
    for (const auto& line : t.text_lines) os << line << "\n";
    for (const auto& c : t.comments) os << "# " << c << "\n";
  } else {
    nlohmann::json j;
    j["config"] = cfg.canonical();
    j["columns"] = t.columns;
    j["rows"] = t.rows;
    j["text"] = t.text_lines;
    j["comments"] = t.comments;
    os << j.dump(2) << "\n";
  }
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string s = trim(line);
    if (s.empty()) continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config file " + path + " line " +
                                  std::to_string(lineno) +
                                  ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty() || val.empty())
      throw std::invalid_argument("config file " + path + " line " +
                                  std::to_string(lineno) +
                                  ": empty key or value");
    if (kv.count(key))
      throw std::invalid_argument("config file " + path + ": duplicate key " +
                                  key);
    kv[key] = val;
  }
  return kv;
}

int run_command(const RunConfig& cfg, std::ostream& os) {
  cfg.validate();
  ResultTable t;
  int rc = 0;
  switch (cfg.command) {
    case Command::simulate: rc = run_simulate(cfg, t); break;
    case Command::invariant_check: rc = run_invariant_check(cfg, t); break;
    case Command::melnikov: rc = run_melnikov(cfg, t); break;
    case Command::conserved:
      rc = (cfg.subaction == "derive") ? run_conserved_derive(cfg, t)
                                       : run_conserved_monitor(cfg, t);
      break;
    case Command::blowup: rc = run_blowup(cfg, t); break;
    case Command::hamiltonian:
      rc = (cfg.subaction == "check") ? run_hamiltonian_check(t)
                                      : run_hamiltonian_simulate(cfg, t);
      break;
    case Command::reproduce: rc = run_reproduce(cfg, t); break;
  }
  emit_result(cfg, t, os);
  return rc;
}

}  // namespace canard
