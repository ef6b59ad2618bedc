// canard-lab: command-line front end for the canard_core library.
//
// Exit codes: 0 success; 2 usage or configuration error; 3 a simulation
// terminated at a step singularity (the emitted data is still valid and ends
// with a trailing `# singular at n=...` comment).

#include <CLI11.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "canard/figures.hpp"
#include "canard/run_config.hpp"

namespace {

double parse_double_opt(const std::string& s, const std::string& key) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid value for " + key + ": " + s);
  }
}

long parse_long_opt(const std::string& s, const std::string& key) {
  try {
    size_t pos = 0;
    long v = std::stol(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid value for " + key + ": " + s);
  }
}

bool parse_bool_opt(const std::string& s, const std::string& key) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw std::invalid_argument("invalid boolean for " + key + ": " + s);
}

// Per-option hook so config-file entries can fill anything a flag did not set.
struct Binding {
  CLI::Option* opt = nullptr;
  std::function<void(const std::string&)> apply;
};

struct LeafContext {
  CLI::App* sc = nullptr;
  std::map<std::string, Binding> reg;
  std::string config_path;
};

}  // namespace

int main(int argc, char** argv) {
  canard::RunConfig cfg;
  std::string format_text = "csv";

  CLI::App app{
      "canard-lab: Kahan and explicit-Euler discretizations of the planar "
      "fold/canard normal form.\nSimulation, blow-up chart diagnostics, the "
      "formal conserved quantity of the rescaled Kahan map, Melnikov-type "
      "splitting sums, and canonical Hamiltonian coordinates.",
      "canard-lab"};
  // --h is a real option (the step size), so help is --help only.
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 2 usage/configuration error, 3 singular "
      "termination.\nPrecedence: command-line flags > --config file entries > "
      "defaults.");

  std::vector<std::unique_ptr<LeafContext>> leaves;
  LeafContext* active = nullptr;

  auto make_leaf = [&](CLI::App* parent, const std::string& name,
                       const std::string& desc, canard::Command cmd,
                       const std::string& subaction) -> LeafContext* {
    leaves.push_back(std::make_unique<LeafContext>());
    LeafContext* ctx = leaves.back().get();
    ctx->sc = parent->add_subcommand(name, desc);
    ctx->sc->set_help_flag("--help", "print help and exit");
    ctx->sc->callback([&active, ctx, &cfg, cmd, subaction]() {
      active = ctx;
      cfg.command = cmd;
      cfg.subaction = subaction;
    });
    return ctx;
  };

  auto add_double = [&](LeafContext* ctx, const std::string& key, double& field,
                        const std::string& desc) {
    Binding b;
    b.opt = ctx->sc->add_option("--" + key, field, desc);
    b.apply = [&field, key](const std::string& v) {
      field = parse_double_opt(v, key);
    };
    ctx->reg[key] = b;
  };
  auto add_long = [&](LeafContext* ctx, const std::string& key, long& field,
                      const std::string& desc) {
    Binding b;
    b.opt = ctx->sc->add_option("--" + key, field, desc);
    b.apply = [&field, key](const std::string& v) {
      field = parse_long_opt(v, key);
    };
    ctx->reg[key] = b;
  };
  auto add_int = [&](LeafContext* ctx, const std::string& key, int& field,
                     const std::string& desc) {
    Binding b;
    b.opt = ctx->sc->add_option("--" + key, field, desc);
    b.apply = [&field, key](const std::string& v) {
      field = static_cast<int>(parse_long_opt(v, key));
    };
    ctx->reg[key] = b;
  };
  auto add_string = [&](LeafContext* ctx, const std::string& key,
                        std::string& field, const std::string& desc) {
    Binding b;
    b.opt = ctx->sc->add_option("--" + key, field, desc);
    b.apply = [&field](const std::string& v) { field = v; };
    ctx->reg[key] = b;
  };
  auto add_flag = [&](LeafContext* ctx, const std::string& key, bool& field,
                      const std::string& desc) {
    Binding b;
    b.opt = ctx->sc->add_flag("--" + key, field, desc);
    b.apply = [&field, key](const std::string& v) {
      field = parse_bool_opt(v, key);
    };
    ctx->reg[key] = b;
  };
  auto add_common = [&](LeafContext* ctx) {
    ctx->sc->add_option("--config", ctx->config_path,
                        "plain `key = value` file; flags take precedence");
    add_string(ctx, "output", cfg.output_path,
               "write the artifact to this file instead of stdout");
    Binding b;
    b.opt = ctx->sc->add_option("--format", format_text, "csv | json")
                ->check(CLI::IsMember({"csv", "json"}));
    b.apply = [&format_text](const std::string& v) {
      if (v != "csv" && v != "json")
        throw std::invalid_argument("invalid format: " + v);
      format_text = v;
    };
    ctx->reg["format"] = b;
  };
  auto add_h = [&](LeafContext* ctx, const std::string& desc) {
    Binding b;
    b.opt = ctx->sc->add_option("--h", cfg.h_text, desc);
    b.apply = [&cfg](const std::string& v) { cfg.h_text = v; };
    ctx->reg["h"] = b;
  };
  auto add_perturbation = [&](LeafContext* ctx) {
    add_double(ctx, "a1", cfg.a1, "coefficient of r x^2 in the rescaled field");
    add_double(ctx, "a2", cfg.a2, "coefficient of r x y");
    add_double(ctx, "a3", cfg.a3, "cubic slot; must be 0 in this model");
    add_double(ctx, "a4", cfg.a4, "coefficient of r x in the slow component");
    add_double(ctx, "a5", cfg.a5, "coefficient of r y in the slow component");
  };
  auto add_start = [&](LeafContext* ctx) {
    add_double(ctx, "x0", cfg.x0, "initial x (v for symplectic-euler)");
    add_double(ctx, "y0", cfg.y0, "initial y (w for symplectic-euler)");
  };

  // --- simulate --------------------------------------------------------
  {
    LeafContext* ctx = make_leaf(
        &app, "simulate",
        "Iterate one of the maps; CSV columns n,x,y. A pole crossing "
        "truncates the run, appends `# singular at n=...`, and exits 3.",
        canard::Command::simulate, "");
    add_string(ctx, "map", cfg.map,
               "kahan | euler | k2-kahan | k2-euler | symplectic-euler "
               "(k2-* run in rescaled chart units)");
    add_h(ctx, "step size");
    add_double(ctx, "epsilon", cfg.epsilon, "singular perturbation parameter");
    add_double(ctx, "lambda", cfg.lambda,
               "canard parameter (chart units for k2-* maps)");
    add_double(ctx, "r", cfg.r, "chart radius; epsilon = r^2");
    add_perturbation(ctx);
    add_long(ctx, "steps", cfg.steps, "number of steps");
    add_start(ctx);
    add_common(ctx);
  }

  // --- invariant-check -------------------------------------------------
  {
    LeafContext* ctx = make_leaf(
        &app, "invariant-check",
        "Iterate the lambda = 0 central-chart Kahan map on its invariant "
        "parabola y = x^2 - 1/2 - h^2/8 in exact rational arithmetic (h is "
        "taken from its decimal spelling); CSV n,x,y,phi_h plus exactness "
        "comments. phi_h and the half-step advance residual must be exactly "
        "zero.",
        canard::Command::invariant_check, "");
    add_h(ctx, "step size (decimal literal, kept exact)");
    add_long(ctx, "steps", cfg.steps, "number of steps");
    add_common(ctx);
  }

  // --- melnikov ---------------------------------------------------------
  {
    LeafContext* ctx = make_leaf(
        &app, "melnikov",
        "First-order splitting sums along the invariant parabola; CSV "
        "h,N,d_lambda,d_r,err_lambda,err_r (errors vs the continuous values "
        "-sqrt(2 pi) and -C sqrt(2 pi)). Comments list raw and per-h "
        "conventions.",
        canard::Command::melnikov, "");
    add_h(ctx, "chart step size");
    add_long(ctx, "N", cfg.N, "window half-width: sums run n in [-N, N-1]");
    add_perturbation(ctx);
    add_flag(ctx, "boundary-corrected", cfg.boundary_corrected,
             "evaluate via zero-seeded boundary recursions instead of the raw "
             "sum (agrees up to rounding)");
    add_flag(ctx, "sweep", cfg.sweep,
             "rows for h in {0.04, 0.02, 0.01, 0.005} with N = ceil(6/h); "
             "worker count from CANARD_LAB_THREADS");
    add_common(ctx);
  }

  // --- conserved ---------------------------------------------------------
  {
    CLI::App* conserved = app.add_subcommand(
        "conserved",
        "Formal conserved quantity of the central-chart Kahan map");
    conserved->set_help_flag("--help", "print help and exit");
    conserved->require_subcommand(1);
    {
      LeafContext* ctx = make_leaf(
          conserved, "derive",
          "Derive the correction polynomials p_j (exact rational arithmetic) "
          "and print one `h^{2j}: <polynomial>` line per order.",
          canard::Command::conserved, "derive");
      add_int(ctx, "order", cfg.order, "truncation order: 2, 4, or 6");
      add_common(ctx);
    }
    {
      LeafContext* ctx = make_leaf(
          conserved, "monitor",
          "Track H and the corrected invariant Hbar along an orbit; CSV "
          "n,H,Hbar with peak-to-peak summaries.",
          canard::Command::conserved, "monitor");
      add_string(ctx, "map", cfg.map, "k2-kahan | k2-euler");
      add_h(ctx, "step size");
      add_long(ctx, "steps", cfg.steps, "number of steps");
      add_start(ctx);
      add_int(ctx, "order", cfg.order, "correction order: 2, 4, or 6");
      add_common(ctx);
    }
  }

  // --- blowup -------------------------------------------------------------
  {
    LeafContext* ctx = make_leaf(
        &app, "blowup",
        "Entry-chart fixed points of the blown-up Kahan dynamics: CSV "
        "h1,alpha,dev_a,dev_r over an h1 grid plus the requested --h, with a "
        "plain-text report in trailing comments.",
        canard::Command::blowup, "");
    add_h(ctx, "entry-chart step h1 for the detailed report");
    add_common(ctx);
  }

  // --- hamiltonian ----------------------------------------------------------
  {
    CLI::App* ham = app.add_subcommand(
        "hamiltonian",
        "Canonical coordinates for the rescaled flow and its symplectic-Euler "
        "discretization");
    ham->set_help_flag("--help", "print help and exit");
    ham->require_subcommand(1);
    {
      LeafContext* ctx = make_leaf(
          ham, "check",
          "Residual report: coordinate-change identity, measure transport, "
          "step determinant, long-run Hhat drift, and the non-unimodularity "
          "of the conjugated Kahan map.",
          canard::Command::hamiltonian, "check");
      add_common(ctx);
    }
    {
      LeafContext* ctx = make_leaf(
          ham, "simulate",
          "Symplectic-Euler orbit in canonical coordinates; CSV n,v,w,Hhat.",
          canard::Command::hamiltonian, "simulate");
      add_h(ctx, "step size");
      add_long(ctx, "steps", cfg.steps, "number of steps");
      add_start(ctx);
      add_common(ctx);
    }
  }

  // --- reproduce -----------------------------------------------------------
  {
    std::string ids;
    for (const auto& id : canard::figure_ids())
      ids += (ids.empty() ? "" : ", ") + id;
    LeafContext* ctx = make_leaf(
        &app, "reproduce",
        "Regenerate a figure dataset: writes <output-dir>/<id>.csv and a "
        "<id>.txt sidecar stating the qualitative claim with measured "
        "numbers. Ids: " + ids + ".",
        canard::Command::reproduce, "");
    add_string(ctx, "figure", cfg.figure, "figure id");
    add_string(ctx, "output-dir", cfg.output_dir, "artifact directory");
    add_common(ctx);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse error
    return code == 0 ? 0 : 2;
  }

  try {
    if (active == nullptr)
      throw std::invalid_argument("a subcommand is required");
    if (!active->config_path.empty()) {
      const auto kv = canard::parse_config_file(active->config_path);
      for (const auto& [key, value] : kv) {
        auto it = active->reg.find(key);
        if (it == active->reg.end())
          throw std::invalid_argument("unknown config key for this command: " +
                                      key);
        if (it->second.opt->count() == 0) it->second.apply(value);
      }
    }
    cfg.h = parse_double_opt(cfg.h_text, "h");
    cfg.format = (format_text == "json") ? canard::OutputFormat::json
                                         : canard::OutputFormat::csv;
    cfg.validate();

    std::ostringstream buf;
    const int rc = canard::run_command(cfg, buf);
    if (cfg.output_path.empty()) {
      std::cout << buf.str();
    } else {
      std::ofstream out(cfg.output_path);
      if (!out)
        throw std::invalid_argument("cannot write output file: " +
                                    cfg.output_path);
      out << buf.str();
    }
    return rc;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
