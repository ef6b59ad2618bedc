#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace canard {

enum class Command {
  simulate,
  invariant_check,
  melnikov,
  conserved,
  blowup,
  hamiltonian,
  reproduce,
};

enum class OutputFormat { csv, json };

std::string to_string(Command c);
std::string to_string(OutputFormat f);

// One fully resolved invocation.  The front end fills it with precedence
// flags > config-file entries > defaults; run_command only reads it.
struct RunConfig {
  Command command = Command::simulate;
  std::string subaction;  // conserved: derive|monitor; hamiltonian: check|simulate

  std::string map = "k2-kahan";  // kahan|euler|k2-kahan|k2-euler|symplectic-euler
  std::string h_text = "0.01";   // step size as typed (decimal kept for exact paths)
  double h = 0.01;               // parsed value of h_text
  double epsilon = 0.0;
  double lambda = 0.0;
  double r = 0.0;  // chart radius; alias for sqrt(epsilon) in chart maps
  double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0, a5 = 0.0;
  long N = 600;
  long steps = 1000;
  double x0 = 0.0;
  double y0 = 0.0;
  bool boundary_corrected = false;
  bool sweep = false;
  int order = 2;
  std::string figure;
  std::string output_path;      // empty = stdout
  std::string output_dir = "."; // reproduce artifacts
  OutputFormat format = OutputFormat::csv;

  // Throws std::invalid_argument with a usage message on bad combinations
  // (h <= 0, negative steps, unknown map, odd order, nonzero a3 --- the cubic
  // slot of the model is identically zero --- and r/epsilon mismatch).
  void validate() const;

  // Deterministic one-line serialization used for the provenance comment;
  // output locations are excluded so identical data written to different
  // paths stays bit-identical.
  std::string canonical() const;
};

// Tabular payload with provenance.  CSV layout: header row (when columns are
// present), one `# config: <canonical>` comment, data rows at 17 significant
// digits, then free-form text lines and trailing `# `-prefixed comments.
// JSON mirrors the same fields as one object.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> text_lines;
  std::vector<std::string> comments;
};

void emit_result(const RunConfig& cfg, const ResultTable& t, std::ostream& os);

// Plain-text `key = value` lines; blank lines and '#' comments are skipped.
// Returns the raw pairs; key validation happens against the active command's
// option set in the front end.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Executes the configured command, writing the artifact to os.  Returns the
// process exit code: 0 on success, 3 when a simulation terminated at a step
// singularity (the artifact then carries a trailing `# singular at n=...`
// line).  Configuration errors throw std::invalid_argument (exit 2 in main).
int run_command(const RunConfig& cfg, std::ostream& os);

}  // namespace canard
