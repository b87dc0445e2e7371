#include <cmath>
#include <filesystem>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "fvgraph/common/error.hpp"
#include "fvgraph/inverse/drivers.hpp"

namespace fvg::cli {

namespace fs = std::filesystem;

int cmd_inverse(const InverseArgs& a, const Output& out) {
  fs::create_directories(a.out_dir);
  auto on_iteration = [&](const inverse::IterationRecord& r) {
    std::ostringstream os;
    os << "iteration " << r.iteration << " loss " << r.loss << " params";
    for (double p : r.params) os << ' ' << p;
    out.info(os.str());
    json rec{{"iteration", r.iteration}, {"loss", r.loss}, {"params", r.params}, {"gradient", r.gradient},
             {"seconds", r.seconds}};
    out.emit({{"inverse", a.id}, {"record", rec}});
  };

  inverse::InverseResult r;
  if (a.id == "cavity-lid") {
    inverse::CavityInverseConfig cfg;
    if (a.iterations) cfg.max_iterations = *a.iterations;
    if (a.resolution) cfg.n = *a.resolution;
    if (a.steps) cfg.n_steps = static_cast<std::size_t>(*a.steps);
    if (a.lr) cfg.lr = *a.lr;
    if (a.seed) cfg.seed = *a.seed;
    r = inverse::run_inverse_cavity(cfg, on_iteration);
  } else if (a.id == "windkessel") {
    inverse::WindkesselInverseConfig cfg;
    if (a.iterations) cfg.max_iterations = *a.iterations;
    if (a.resolution) cfg.n = *a.resolution;
    if (a.cycles) cfg.cycles = *a.cycles;
    if (a.lr) cfg.lr = *a.lr;
    cfg.resistances_only = a.resistances_only;
    r = inverse::run_inverse_windkessel(cfg, on_iteration);
  } else {
    fail(ErrorCode::Usage, "unknown inverse problem '" + a.id + "'");
  }

  const std::string stem = a.id == "cavity-lid" ? "inverse_cavity" : "inverse_windkessel";
  inverse::write_history_csv(r, (fs::path(a.out_dir) / (stem + "_history.csv")).string());

  // Parameter table: truth, initial, recovered, relative error.
  std::vector<std::vector<double>> rows;
  json table = json::array();
  out.info("parameter            truth      initial    recovered  rel.error");
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    const double err = std::abs(r.recovered[i] - r.truth[i]) / std::abs(r.truth[i]);
    rows.push_back({r.truth[i], r.initial[i], r.recovered[i], err});
    table.push_back({{"name", r.names[i]}, {"truth", r.truth[i]}, {"initial", r.initial[i]},
                     {"recovered", r.recovered[i]}, {"rel_error", err}});
    char line[160];
    std::snprintf(line, sizeof line, "%-18s %10.5g %10.5g %10.5g %9.3f%%", r.names[i].c_str(), r.truth[i], r.initial[i],
                  r.recovered[i], 100.0 * err);
    out.info(line);
  }
  {
    std::ofstream f(fs::path(a.out_dir) / (stem + "_parameters.csv"));
    if (!f) fail(ErrorCode::Io, "cannot write the parameter table");
    f << "parameter,truth,initial,recovered,rel_error\n";
    f.precision(12);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      f << r.names[i];
      for (double v : rows[i]) f << ',' << v;
      f << '\n';
    }
  }
  out.emit({{"inverse", a.id}, {"status", "ok"}, {"converged", r.converged}, {"iterations", r.iterations},
            {"max_rel_error", r.max_rel_error}, {"parameters", table}});
  return 0;
}

}  // namespace fvg::cli
