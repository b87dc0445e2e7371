#include "output.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "fvgraph/common/error.hpp"
#include "fvgraph/meshio/field_io.hpp"

namespace fvg::cli {

Output::Output() : level_(Verbosity::Info) {
  if (const char* v = std::getenv("FVGRAPH_LOG")) {
    const std::string s(v);
    if (s == "quiet") level_ = Verbosity::Quiet;
    else if (s == "debug") level_ = Verbosity::Debug;
  }
}

void Output::info(const std::string& msg) const {
  if (level_ != Verbosity::Quiet) std::cerr << msg << '\n';
}

void Output::debug(const std::string& msg) const {
  if (level_ == Verbosity::Debug) std::cerr << msg << '\n';
}

void Output::emit(const json& record) const { std::cout << record.dump() << std::endl; }

void write_flow_fields(const std::string& case_dir, const meshio::RawMesh& mesh, const solvers::FlowState& s,
                       double rho) {
  meshio::FieldOutput U{"U", true, {}}, p{"p", false, {}};
  U.values.reserve(s.ux.size());
  p.values.reserve(s.p.size());
  for (std::size_t c = 0; c < s.ux.size(); ++c) {
    U.values.push_back({s.ux[c], s.uy[c], s.uz[c]});
    p.values.push_back({rho * s.p[c], 0, 0});
  }
  meshio::write_time_directory(case_dir, s.t, mesh, {U, p});
}

void write_scalar_field(const std::string& case_dir, const meshio::RawMesh& mesh, const std::string& name, double t,
                        const std::vector<double>& phi) {
  meshio::FieldOutput f{name, false, {}};
  f.values.reserve(phi.size());
  for (double v : phi) f.values.push_back({v, 0, 0});
  meshio::write_time_directory(case_dir, t, mesh, {f});
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
  f << '\n' << std::setprecision(12);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << r[i];
    f << '\n';
  }
}

}  // namespace fvg::cli
