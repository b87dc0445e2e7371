#pragma once

#include <optional>
#include <string>
#include <vector>

#include "output.hpp"

namespace fvg::cli {

struct RunArgs {
  std::string case_dir;
  std::optional<double> dt, end_time, steady_tol;
  std::optional<int> write_every;
  std::optional<std::string> convection;
  std::string residuals;  // defaults to <case>/residuals.csv
  bool vtk = false;
  bool no_foam = false;
};
int cmd_run(const RunArgs& a, const Output& out);

struct BenchmarkArgs {
  std::string id;
  std::vector<int> resolutions;
  std::string out_dir = "fvgraph-out";
  std::optional<double> dt;
  std::optional<int> steps;
  std::optional<std::string> scheme;
  int cycles = 2;
};
int cmd_benchmark(const BenchmarkArgs& a, const Output& out);

struct InverseArgs {
  std::string id;
  std::string out_dir = "fvgraph-out";
  std::optional<int> iterations, resolution, steps, cycles;
  std::optional<double> lr;
  std::optional<unsigned long long> seed;
  bool resistances_only = false;
};
int cmd_inverse(const InverseArgs& a, const Output& out);

struct ConvertArgs {
  std::string input, output;
};
int cmd_convert(const ConvertArgs& a, const Output& out);

struct MeshInfoArgs {
  std::string source;  // case dir, .vtk file, or generator:<kind>:<n>
};
int cmd_mesh_info(const MeshInfoArgs& a, const Output& out);

struct PerfArgs {
  std::vector<int> resolutions;
  std::string kind = "cavity";
  int steps = 20;
  std::string csv;
};
int cmd_perf(const PerfArgs& a, const Output& out);

}  // namespace fvg::cli
