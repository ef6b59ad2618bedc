#pragma once

#include <string>
#include <vector>

namespace canard {

struct FigureArtifacts {
  std::string csv_path;
  std::string sidecar_path;
};

// Identifiers accepted by `canard-lab reproduce --figure <id>`.
std::vector<std::string> figure_ids();

// Regenerates one figure dataset: writes <dir>/<id>.csv (data plus provenance
// comments) and <dir>/<id>.txt (the qualitative claim the figure illustrates
// together with the measured numbers backing it).  Unknown ids throw
// std::invalid_argument.  Datasets that end at a map singularity are still
// written in full; the sidecar records the termination step.
FigureArtifacts reproduce_figure(const std::string& figure_id, const std::string& output_dir);

}  // namespace canard
