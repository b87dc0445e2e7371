#include <iostream>

#include "CLI11.hpp"

#include "commands.hpp"
#include "fvgraph/common/error.hpp"
#include "fvgraph/graph/parallel.hpp"

using namespace fvg;
using namespace fvg::cli;

int main(int argc, char** argv) {
  CLI::App app{"Differentiable finite-volume solver on cell graphs"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Cap on library worker threads (0 keeps the default)")->check(CLI::NonNegativeNumber);

  RunArgs run;
  auto* c_run = app.add_subcommand("run", "Run an OpenFOAM-format case directory");
  c_run->add_option("case", run.case_dir, "Case directory")->required();
  c_run->add_option("--dt", run.dt, "Override deltaT");
  c_run->add_option("--end-time", run.end_time, "Override endTime");
  c_run->add_option("--write-every", run.write_every, "Steps between field writes");
  c_run->add_option("--steady-tol", run.steady_tol, "Stop once max |dU|/dt falls below this");
  c_run->add_option("--convection", run.convection, "Override the convection scheme");
  c_run->add_option("--residuals", run.residuals, "Residual CSV path");
  c_run->add_flag("--vtk", run.vtk, "Also write a VTK file of the final fields");
  c_run->add_flag("--no-foam", run.no_foam, "Skip OpenFOAM time directories");

  BenchmarkArgs bench;
  auto* c_bench = app.add_subcommand("benchmark", "Run a built-in benchmark case");
  c_bench->add_option("id", bench.id, "poisson3d, step-advection, cavity, elbow, bifurcation-rcr")
      ->required()
      ->check(CLI::IsMember({"poisson3d", "step-advection", "cavity", "elbow", "bifurcation-rcr"}));
  c_bench->add_option("-n,--resolution", bench.resolutions, "Mesh resolution(s)");
  c_bench->add_option("-o,--out", bench.out_dir, "Output directory");
  c_bench->add_option("--dt", bench.dt, "Time step");
  c_bench->add_option("--steps", bench.steps, "Maximum number of steps");
  c_bench->add_option("--scheme", bench.scheme, "Convection scheme");
  c_bench->add_option("--cycles", bench.cycles, "Cardiac cycles (bifurcation-rcr)")->check(CLI::PositiveNumber);

  InverseArgs inv;
  auto* c_inv = app.add_subcommand("inverse", "Run a built-in parameter recovery");
  c_inv->add_option("id", inv.id, "cavity-lid or windkessel")->required()->check(CLI::IsMember({"cavity-lid", "windkessel"}));
  c_inv->add_option("-o,--out", inv.out_dir, "Output directory");
  c_inv->add_option("--iterations", inv.iterations, "Maximum Adam iterations")->check(CLI::PositiveNumber);
  c_inv->add_option("-n,--resolution", inv.resolution, "Mesh resolution")->check(CLI::PositiveNumber);
  c_inv->add_option("--steps", inv.steps, "Time steps of the cavity horizon")->check(CLI::PositiveNumber);
  c_inv->add_option("--cycles", inv.cycles, "Cardiac cycles of the Windkessel horizon")->check(CLI::PositiveNumber);
  c_inv->add_option("--lr", inv.lr, "Adam learning rate");
  c_inv->add_option("--seed", inv.seed, "Probe seed (cavity-lid)");
  c_inv->add_flag("--resistances-only", inv.resistances_only, "Freeze compliances at their true values");

  ConvertArgs conv;
  auto* c_conv = app.add_subcommand("convert", "Convert between polyMesh case directories and legacy VTK");
  c_conv->add_option("input", conv.input, "Case directory or .vtk file")->required();
  c_conv->add_option("output", conv.output, "Case directory or .vtk file")->required();

  MeshInfoArgs info;
  auto* c_info = app.add_subcommand("mesh-info", "Summarise a mesh");
  c_info->add_option("source", info.source, "Case directory, .vtk file, or generator:<kind>:<n>")->required();

  PerfArgs perf;
  auto* c_perf = app.add_subcommand("perf", "Steps per second against cell count");
  c_perf->add_option("-n,--resolution", perf.resolutions, "Resolutions to time")->required();
  c_perf->add_option("--case", perf.kind, "cavity or bifurcation")->check(CLI::IsMember({"cavity", "bifurcation"}));
  c_perf->add_option("--steps", perf.steps, "Timed steps per resolution")->check(CLI::PositiveNumber);
  c_perf->add_option("--csv", perf.csv, "Timing CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code(ErrorCode::Usage);
  }

  const Output out;
  try {
    if (threads > 0) graph::set_thread_count(threads);
    if (*c_run) return cmd_run(run, out);
    if (*c_bench) return cmd_benchmark(bench, out);
    if (*c_inv) return cmd_inverse(inv, out);
    if (*c_conv) return cmd_convert(conv, out);
    if (*c_info) return cmd_mesh_info(info, out);
    if (*c_perf) return cmd_perf(perf, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    out.emit({{"status", "error"}, {"error", std::string(error_name(e.code()))}, {"message", e.what()}});
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    out.emit({{"status", "error"}, {"error", "Internal"}, {"message", e.what()}});
    return 1;
  }
  return exit_code(ErrorCode::Usage);
}
