#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "fvgraph/meshio/raw_mesh.hpp"
#include "fvgraph/solvers/flow.hpp"

namespace fvg::cli {

using json = nlohmann::json;

enum class Verbosity { Quiet, Info, Debug };

/// Human-readable logs go to stderr, one JSON object per line to stdout.
class Output {
 public:
  Output();
  void info(const std::string& msg) const;
  void debug(const std::string& msg) const;
  void emit(const json& record) const;
  Verbosity verbosity() const { return level_; }

 private:
  Verbosity level_;
};

/// OpenFOAM time directory with U and p (scaled by rho) of a flow state.
void write_flow_fields(const std::string& case_dir, const meshio::RawMesh& mesh, const solvers::FlowState& s,
                       double rho);
void write_scalar_field(const std::string& case_dir, const meshio::RawMesh& mesh, const std::string& name, double t,
                        const std::vector<double>& phi);

/// Writes rows of equal length under a header line.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace fvg::cli
