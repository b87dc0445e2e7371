#include "fvgraph/meshio/case_config.hpp"

#include <filesystem>
#include <regex>

#include "fvgraph/common/error.hpp"
#include "fvgraph/meshio/polymesh.hpp"

namespace fvg::meshio {

namespace fs = std::filesystem;
using foam::Dict;
using foam::Token;
using foam::TokenCursor;

namespace {

Vec3 parse_value_tokens(const std::vector<Token>& tokens, bool is_vector, const std::string& where) {
  TokenCursor cur(tokens, where);
  if (!cur.done() && cur.peek().is_word("uniform")) cur.next();
  if (is_vector) {
    if (!cur.done() && cur.peek().is_punct('(')) return cur.vec3();
    cur.error("expected vector value");
  }
  return Vec3{cur.number(), 0, 0};
}

std::vector<Vec3> parse_field_values(const std::vector<Token>& tokens, bool is_vector, const std::string& where) {
  TokenCursor cur(tokens, where);
  if (cur.peek().is_word("uniform")) {
    cur.next();
    return {is_vector ? cur.vec3() : Vec3{cur.number(), 0, 0}};
  }
  if (cur.peek().is_word("nonuniform")) {
    cur.next();
    if (cur.peek().kind == Token::Kind::Word) cur.next();  // List<scalar> / List<vector>
    const long long n = cur.integer();
    cur.expect('(');
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) out.push_back(is_vector ? cur.vec3() : Vec3{cur.number(), 0, 0});
    cur.expect(')');
    return out;
  }
  return {parse_value_tokens(tokens, is_vector, where)};
}

bc::TimeTable parse_table(const std::vector<Token>& tokens, bool is_vector, const std::string& where) {
  TokenCursor cur(tokens, where);
  if (cur.peek().is_word("table")) cur.next();
  bc::TimeTable table;
  cur.expect('(');
  while (!cur.peek().is_punct(')')) {
    cur.expect('(');
    table.t.push_back(cur.number());
    table.v.push_back(is_vector ? cur.vec3() : Vec3{cur.number(), 0, 0});
    cur.expect(')');
  }
  cur.expect(')');
  for (std::size_t i = 1; i < table.t.size(); ++i) {
    if (!(table.t[i] > table.t[i - 1])) fail(ErrorCode::InvalidConfig, where + ": table times must increase");
  }
  if (table.t.empty()) fail(ErrorCode::InvalidConfig, where + ": empty table");
  return table;
}

Vec3 dict_vec3(const Dict& d, const char* key, const std::string& where) {
  return parse_value_tokens(d.at(key).tokens(), true, where + "." + key);
}

bc::WindkesselScheme parse_wk_scheme(const std::string& s, const std::string& where) {
  if (s == "exact") return bc::WindkesselScheme::Exact;
  if (s == "forwardEuler" || s == "fe") return bc::WindkesselScheme::ForwardEuler;
  if (s == "backwardEuler" || s == "be") return bc::WindkesselScheme::BackwardEuler;
  fail(ErrorCode::UnsupportedScheme, where + ": Windkessel scheme '" + s + "' (exact, forwardEuler, backwardEuler)");
}

std::string join_tokens(const std::vector<Token>& tokens) {
  std::string s;
  for (const auto& t : tokens) s += (s.empty() ? "" : " ") + t.text;
  return s;
}

const foam::Entry* lookup_scheme(const Dict& d, const std::string& key) {
  if (const auto* e = d.find(key)) return e;
  return d.find("default");
}

fvops::ConvectionScheme parse_div_scheme(const Dict& div, const std::string& key, const std::string& where) {
  const auto* e = lookup_scheme(div, key);
  if (!e) return fvops::ConvectionScheme::Upwind;
  std::vector<std::string> words;
  for (const auto& t : e->tokens()) words.push_back(t.text);
  std::size_t i = 0;
  if (i < words.size() && words[i] == "bounded") ++i;
  if (i < words.size() && words[i] == "none") return fvops::ConvectionScheme::Upwind;
  if (i >= words.size() || words[i] != "Gauss") {
    fail(ErrorCode::UnsupportedScheme, where + ": divergence scheme '" + join_tokens(e->tokens()) + "' is not supported");
  }
  ++i;
  if (i >= words.size()) fail(ErrorCode::UnsupportedScheme, where + ": missing interpolation scheme");
  return fvops::parse_convection(words[i]);
}

linalg::SolverSettings parse_solver(const Dict& d, linalg::SolverSettings s, const std::string& where) {
  const std::string solver = d.word_or("solver", "");
  if (solver == "PCG" || solver == "CG") s.method = linalg::KrylovMethod::CG;
  else if (solver == "PBiCGStab" || solver == "PBiCG" || solver == "BiCGStab") s.method = linalg::KrylovMethod::BiCGStab;
  else if (solver == "GMRES" || solver == "PGMRES") s.method = linalg::KrylovMethod::GMRES;
  else if (!solver.empty()) fail(ErrorCode::UnsupportedScheme, where + ": linear solver '" + solver + "' (PCG, PBiCGStab, GMRES)");
  if (d.contains("preconditioner")) {
    const std::string pc = d.word("preconditioner");
    if (pc == "DIC" || pc == "DILU" || pc == "FDIC" || pc == "ILU" || pc == "ILU0") s.preconditioner = linalg::Preconditioner::ILU0;
    else if (pc == "none" || pc == "diagonal") s.preconditioner = linalg::Preconditioner::None;
    else fail(ErrorCode::UnsupportedScheme, where + ": preconditioner '" + pc + "' (DIC, DILU, none)");
  }
  s.tol = d.scalar_or("tolerance", s.tol);
  s.abs_tol = d.scalar_or("absTol", s.abs_tol);
  s.max_iter = static_cast<int>(d.scalar_or("maxIter", s.max_iter));
  s.restart = static_cast<int>(d.scalar_or("nKrylov", s.restart));
  return s;
}

const Dict* find_solver(const Dict& solvers, const std::string& field) {
  if (const Dict* d = solvers.find_sub(field)) return d;
  for (auto it = solvers.entries().rbegin(); it != solvers.entries().rend(); ++it) {
    if (!it->second.is_dict()) continue;
    try {
      if (std::regex_match(field, std::regex(it->first))) return &it->second.dict();
    } catch (const std::regex_error&) {
    }
  }
  return nullptr;
}

}  // namespace

bc::BoundarySpec parse_boundary_entry(const Dict& e, bool is_vector, const std::string& where) {
  const std::string type = e.word("type");
  bc::BoundarySpec s;
  if (type == "fixedValue" || type == "movingWallVelocity") {
    s.kind = bc::BcKind::FixedValue;
    s.value = parse_value_tokens(e.at("value").tokens(), is_vector, where);
  } else if (type == "noSlip") {
    s.kind = bc::BcKind::FixedValue;
  } else if (type == "zeroGradient" || type == "slip" || type == "calculated") {
    s.kind = bc::BcKind::ZeroGradient;
  } else if (type == "fixedGradient") {
    s.kind = bc::BcKind::FixedGradient;
    s.gradient = parse_value_tokens(e.at("gradient").tokens(), is_vector, where);
  } else if (type == "empty") {
    s.kind = bc::BcKind::Empty;
  } else if (type == "uniformFixedValue" || type == "timeVaryingInflow") {
    s.kind = bc::BcKind::TimeVarying;
    const char* key = e.contains("uniformValue") ? "uniformValue" : "table";
    s.table = parse_table(e.at(key).tokens(), is_vector, where);
    s.table.periodic = e.boolean_or("periodic", false);
    s.table.period = e.scalar_or("period", 0.0);
  } else if (type == "parabolicInflow") {
    if (!is_vector) fail(ErrorCode::InvalidConfig, where + ": parabolicInflow applies to vector fields");
    s.kind = bc::BcKind::Parabolic;
    auto& p = s.parabolic;
    p.u_max = e.scalar("Umax");
    p.center = dict_vec3(e, "center", where);
    p.radius = e.scalar("radius");
    p.direction = dict_vec3(e, "direction", where);
    if (e.contains("axis")) p.axis = dict_vec3(e, "axis", where);
    const std::string wave = e.word_or("waveform", "constant");
    if (wave == "halfSine") {
      p.waveform = bc::HalfSineWaveform{e.scalar_or("period", 1.0), e.scalar_or("systolicFraction", 0.4)};
    } else if (wave == "table") {
      p.amplitude = parse_table(e.at("amplitude").tokens(), false, where);
      p.amplitude->periodic = e.boolean_or("periodic", true);
    } else if (wave != "constant") {
      fail(ErrorCode::InvalidConfig, where + ": waveform '" + wave + "' (constant, halfSine, table)");
    }
  } else if (type == "windkesselRCR") {
    if (is_vector) fail(ErrorCode::InvalidConfig, where + ": windkesselRCR applies to the pressure field");
    s.kind = bc::BcKind::Windkessel;
    s.windkessel = {e.scalar("Rp"), e.scalar("C"), e.scalar("Rd")};
    s.windkessel_scheme = parse_wk_scheme(e.word_or("scheme", "exact"), where);
    s.windkessel_pc0 = e.scalar_or("pc0", 0.0);
  } else {
    fail(ErrorCode::InvalidConfig, where + ": boundary type '" + type + "' is not supported");
  }
  return s;
}

FieldSpec parse_field_text(const std::string& text, const std::string& source, const std::string& name,
                           const RawMesh& mesh) {
  const auto file = foam::parse_foam_text(text, source);
  const std::string cls = file.header.word_or("class", "");
  FieldSpec f;
  f.name = name;
  if (cls == "volVectorField") f.is_vector = true;
  else if (cls == "volScalarField") f.is_vector = false;
  else fail(ErrorCode::InvalidConfig, source + ": unsupported field class '" + cls + "'");
  const Dict body = foam::body_dict(file);
  f.internal = parse_field_values(body.at("internalField").tokens(), f.is_vector, source);
  if (f.internal.size() != 1 && f.internal.size() != mesh.n_cells) {
    fail(ErrorCode::ShapeError, source + ": internalField has " + std::to_string(f.internal.size()) +
                                    " values for " + std::to_string(mesh.n_cells) + " cells");
  }
  const Dict* bf = body.find_sub("boundaryField");
  if (!bf) fail(ErrorCode::MissingBoundarySpec, source + ": no boundaryField");
  for (const auto& patch : mesh.patches) {
    const Dict* entry = bf->find_sub(patch.name);
    if (!entry) {
      for (auto it = bf->entries().rbegin(); it != bf->entries().rend() && !entry; ++it) {
        if (!it->second.is_dict()) continue;
        try {
          if (std::regex_match(patch.name, std::regex(it->first))) entry = &it->second.dict();
        } catch (const std::regex_error&) {
        }
      }
    }
    if (!entry) {
      fail(ErrorCode::MissingBoundarySpec, "field '" + name + "' has no boundary condition for patch '" + patch.name + "'");
    }
    auto spec = parse_boundary_entry(*entry, f.is_vector, source + ":" + patch.name);
    if (patch.type == "empty") spec.kind = bc::BcKind::Empty;
    f.boundary[patch.name] = std::move(spec);
  }
  return f;
}

FieldSpec parse_field(const std::string& path, const std::string& name, const RawMesh& mesh) {
  if (!fs::is_regular_file(path)) {
    fail(ErrorCode::MissingBoundarySpec, "field '" + name + "' has no initial/boundary file " + path);
  }
  return parse_field_text(foam::read_text_file(path), path, name, mesh);
}

const FieldSpec& CaseConfig::field(const std::string& name) const {
  auto it = fields.find(name);
  if (it == fields.end()) fail(ErrorCode::MissingBoundarySpec, "field '" + name + "' is not defined");
  return it->second;
}

CaseConfig parse_case(const std::string& case_dir) {
  CaseConfig cfg;
  cfg.case_dir = case_dir;
  const fs::path root(case_dir);
  cfg.mesh = read_polymesh(case_dir);

  auto read_dict = [&](const fs::path& p) {
    if (!fs::is_regular_file(p)) fail(ErrorCode::InvalidConfig, "missing " + p.string());
    return foam::body_dict(foam::read_foam_file(p.string()));
  };

  const Dict control = read_dict(root / "system" / "controlDict");
  cfg.application = control.word_or("application", "icoFoam");
  cfg.start_time = control.scalar_or("startTime", 0.0);
  cfg.end_time = control.scalar("endTime");
  cfg.dt = control.scalar("deltaT");
  if (!(cfg.dt > 0.0)) fail(ErrorCode::InvalidConfig, "deltaT must be positive");
  const std::string write_control = control.word_or("writeControl", "timeStep");
  const double write_interval = control.scalar_or("writeInterval", 0.0);
  if (write_control == "timeStep") cfg.write_every = static_cast<int>(write_interval);
  else cfg.write_every = static_cast<int>(std::llround(write_interval / cfg.dt));

  const Dict schemes = read_dict(root / "system" / "fvSchemes");
  if (const Dict* ddt = schemes.find_sub("ddtSchemes")) {
    if (const auto* e = ddt->find("default")) cfg.time_scheme = fvops::parse_time_scheme(e->tokens().front().text);
  }
  if (const Dict* grad = schemes.find_sub("gradSchemes")) {
    for (const auto& [key, e] : grad->entries()) {
      if (e.is_dict()) continue;
      const std::string s = join_tokens(e.tokens());
      if (s != "Gauss linear") fail(ErrorCode::UnsupportedScheme, "gradient scheme '" + s + "' (Gauss linear only)");
    }
  }
  if (const Dict* div = schemes.find_sub("divSchemes")) {
    cfg.convection_U = parse_div_scheme(*div, "div(phi,U)", "divSchemes");
    cfg.convection_T = parse_div_scheme(*div, "div(phi,T)", "divSchemes");
  }
  std::string correction;
  if (const Dict* lap = schemes.find_sub("laplacianSchemes")) {
    if (const auto* e = lap->find("default"); e && !e->tokens().empty()) {
      const auto& t = e->tokens();
      if (t.size() >= 3 && t[0].text == "Gauss" && t[1].text == "linear") correction = t[2].text;
      else if (t.size() == 1 && t[0].text != "none") correction = t[0].text;
      else if (t[0].text != "none") fail(ErrorCode::UnsupportedScheme, "laplacian scheme '" + join_tokens(t) + "'");
    }
  }
  if (correction.empty()) {
    if (const Dict* sn = schemes.find_sub("snGradSchemes")) correction = sn->word_or("default", "");
  }
  if (!correction.empty()) cfg.diffusion = fvops::parse_diffusion(correction);

  const Dict solution = read_dict(root / "system" / "fvSolution");
  if (const Dict* solvers = solution.find_sub("solvers")) {
    if (const Dict* d = find_solver(*solvers, "p")) cfg.solver_p = parse_solver(*d, cfg.solver_p, "solvers.p");
    if (const Dict* d = find_solver(*solvers, "U")) cfg.solver_U = parse_solver(*d, cfg.solver_U, "solvers.U");
    if (const Dict* d = find_solver(*solvers, "T")) cfg.solver_T = parse_solver(*d, cfg.solver_T, "solvers.T");
  }
  const Dict* piso = solution.find_sub("PISO");
  if (!piso) piso = solution.find_sub("SIMPLE");
  if (piso) {
    cfg.n_correctors = static_cast<int>(piso->scalar_or("nCorrectors", cfg.n_correctors));
    cfg.n_nonorth_correctors = static_cast<int>(piso->scalar_or("nNonOrthogonalCorrectors", cfg.n_nonorth_correctors));
    cfg.p_ref_cell = static_cast<std::size_t>(piso->scalar_or("pRefCell", 0.0));
    cfg.p_ref_value = piso->scalar_or("pRefValue", 0.0);
    cfg.explicit_predictor = piso->boolean_or("explicitPredictor", false);
  }
  if (cfg.n_correctors < 1) fail(ErrorCode::InvalidConfig, "nCorrectors must be at least 1");

  const fs::path transport = root / "constant" / "transportProperties";
  if (fs::is_regular_file(transport)) {
    const Dict tp = read_dict(transport);
    cfg.nu = tp.scalar_or("nu", cfg.nu);
    cfg.rho = tp.scalar_or("rho", cfg.rho);
    cfg.diffusivity = tp.scalar_or("DT", cfg.diffusivity);
  }

  std::vector<std::string> required;
  if (cfg.application == "icoFoam" || cfg.application == "pisoFoam") required = {"U", "p"};
  else if (cfg.application == "scalarTransportFoam") required = {"T", "U"};
  else if (cfg.application == "laplacianFoam") required = {"T"};
  else fail(ErrorCode::InvalidConfig, "application '" + cfg.application + "' (icoFoam, scalarTransportFoam, laplacianFoam)");

  std::string time_dir = "0";
  {
    const fs::path start = root / format_number(cfg.start_time);
    if (fs::is_directory(start)) time_dir = start.filename().string();
  }
  for (const auto& name : required) {
    cfg.fields[name] = parse_field((root / time_dir / name).string(), name, cfg.mesh);
  }
  return cfg;
}

}  // namespace fvg::meshio
