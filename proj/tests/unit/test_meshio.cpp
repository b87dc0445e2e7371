#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fvgraph/meshio/case_config.hpp"
#include "fvgraph/meshio/field_io.hpp"
#include "fvgraph/meshio/foam_dict.hpp"
#include "fvgraph/meshio/generators.hpp"
#include "fvgraph/meshio/geometry.hpp"
#include "fvgraph/meshio/polymesh.hpp"
#include "fvgraph/meshio/vtk.hpp"
#include "test_support.hpp"

namespace fvg::meshio {
namespace {

using fvg::testing::fixture;
using fvg::testing::TempDir;

void expect_same_mesh(const RawMesh& a, const RawMesh& b) {
  EXPECT_EQ(a.n_cells, b.n_cells);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.faces, b.faces);
  EXPECT_EQ(a.owner, b.owner);
  EXPECT_EQ(a.neighbour, b.neighbour);
  ASSERT_EQ(a.patches.size(), b.patches.size());
  for (std::size_t p = 0; p < a.patches.size(); ++p) {
    EXPECT_EQ(a.patches[p].name, b.patches[p].name);
    EXPECT_EQ(a.patches[p].type, b.patches[p].type);
    EXPECT_EQ(a.patches[p].start, b.patches[p].start);
    EXPECT_EQ(a.patches[p].size, b.patches[p].size);
  }
}

double analytic_volume(const std::string& kind) {
  if (kind == "cube-tet" || kind == "cube-hex") return 1.0;
  if (kind == "square-tri" || kind == "cavity") return kSlabThickness;
  if (kind == "bifurcation") return 4.0 * kBifurcation.thickness;
  if (kind == "elbow") return 12.0 * 0.2;
  return std::numeric_limits<double>::quiet_NaN();
}

TEST(Polymesh, SingleHexFixture) {
  const auto m = read_polymesh(fixture("single_hex"));
  EXPECT_EQ(m.n_cells, 1u);
  EXPECT_EQ(m.points.size(), 8u);
  EXPECT_EQ(m.n_faces(), 6u);
  EXPECT_EQ(m.n_internal_faces(), 0u);
  ASSERT_EQ(m.patches.size(), 1u);
  EXPECT_EQ(m.patches[0].size, 6u);
}

TEST(Polymesh, TwoHexFixture) {
  const auto m = read_polymesh(fixture("two_hex"));
  EXPECT_EQ(m.n_cells, 2u);
  EXPECT_EQ(m.points.size(), 12u);
  EXPECT_EQ(m.n_faces(), 11u);
  ASSERT_EQ(m.n_internal_faces(), 1u);
  EXPECT_EQ(m.owner[0], 0u);
  EXPECT_EQ(m.neighbour[0], 1u);
  ASSERT_NE(m.find_patch("inlet"), nullptr);
  EXPECT_EQ(m.find_patch("walls")->size, 8u);
}

TEST(Polymesh, AcceptsPolyMeshDirectoryItself) {
  const auto a = read_polymesh(fixture("two_hex"));
  const auto b = read_polymesh(fixture("two_hex/constant/polyMesh"));
  expect_same_mesh(a, b);
}

TEST(Polymesh, PointIndexOutOfRange) {
  try {
    read_polymesh(fixture("bad_point_index"));
    FAIL() << "expected MeshConsistency";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MeshConsistency);
    EXPECT_NE(std::string(e.what()).find("face 2"), std::string::npos) << e.what();
  }
}

TEST(Polymesh, MissingFile) {
  TempDir tmp;
  const auto dir = fvg::testing::copy_fixture("single_hex", tmp);
  std::filesystem::remove(dir + "/constant/polyMesh/neighbour");
  EXPECT_FVG_ERROR(read_polymesh(dir), ErrorCode::MissingMeshFile);
  EXPECT_FVG_ERROR(read_polymesh(tmp / "nowhere"), ErrorCode::MissingMeshFile);
}

TEST(Polymesh, BinaryFormatRejected) {
  TempDir tmp;
  const auto dir = fvg::testing::copy_fixture("single_hex", tmp);
  fvg::testing::replace_in_file(dir + "/constant/polyMesh/points", "ascii", "binary");
  EXPECT_FVG_ERROR(read_polymesh(dir), ErrorCode::UnsupportedFormat);
}

TEST(Polymesh, RoundTripFixtureCorpus) {
  for (const char* name : {"single_hex", "two_hex", "cavity"}) {
    SCOPED_TRACE(name);
    const auto m = read_polymesh(fixture(name));
    TempDir tmp;
    write_polymesh(tmp.str(), m);
    expect_same_mesh(m, read_polymesh(tmp.str()));
  }
}

TEST(Polymesh, RoundTripGenerators) {
  for (const auto& kind : generator_names()) {
    SCOPED_TRACE(kind);
    const auto m = generate_mesh(kind, 3);
    TempDir tmp;
    write_polymesh(tmp.str(), m);
    const auto back = read_polymesh(tmp.str());
    expect_same_mesh(m, back);
    // writing the re-read mesh gives byte-identical files
    TempDir tmp2;
    write_polymesh(tmp2.str(), back);
    for (const char* f : {"points", "faces", "owner", "neighbour", "boundary"}) {
      EXPECT_EQ(fvg::testing::read_file(tmp / (std::string("constant/polyMesh/") + f)),
                fvg::testing::read_file(tmp2 / (std::string("constant/polyMesh/") + f)));
    }
  }
}

TEST(Polymesh, FormatNumberRoundTrips) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-30, 30);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(mant(rng), ex(rng));
    EXPECT_EQ(std::strtod(format_number(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(format_number(0.1), "0.1");
}

TEST(RawMesh, ValidateRejectsBrokenTiling) {
  auto m = generate_cavity(2);
  validate(m);
  m.patches.back().size -= 1;
  EXPECT_FVG_ERROR(validate(m), ErrorCode::MeshConsistency);
}

TEST(RawMesh, ValidateRejectsOwnerOrder) {
  auto m = generate_cavity(2);
  std::swap(m.owner[0], m.neighbour[0]);
  EXPECT_FVG_ERROR(validate(m), ErrorCode::MeshConsistency);
}

TEST(Geometry, UnitCube) {
  const auto m = read_polymesh(fixture("single_hex"));
  const auto g = compute_geometry(m);
  EXPECT_NEAR(g.cell_volume[0], 1.0, 1e-14);
  for (double a : g.face_area) EXPECT_NEAR(a, 1.0, 1e-14);
  EXPECT_NEAR(g.cell_centroid[0].x, 0.5, 1e-14);
  EXPECT_NEAR(g.cell_centroid[0].y, 0.5, 1e-14);
  EXPECT_NEAR(g.cell_centroid[0].z, 0.5, 1e-14);
  Vec3 s;
  for (const auto& sf : g.face_area_vector) s += sf;
  EXPECT_LT(norm(s), 1e-12);
}

TEST(Geometry, TetVolume) {
  const auto m = to_raw_mesh(read_vtk(fixture("single_tet.vtk")));
  const auto g = compute_geometry(m);
  EXPECT_NEAR(g.cell_volume[0], 1.0 / 6.0, 1e-14);
  EXPECT_NEAR(g.cell_centroid[0].x, 0.25, 1e-14);
}

TEST(Geometry, OutwardOrientation) {
  const auto m = read_polymesh(fixture("two_hex"));
  const auto g = compute_geometry(m);
  // internal face points from cell 0 to cell 1
  EXPECT_GT(g.face_area_vector[0].x, 0.0);
  for (std::size_t f = m.n_internal_faces(); f < m.n_faces(); ++f) {
    const Vec3 out = g.face_centroid[f] - g.cell_centroid[m.owner[f]];
    EXPECT_GT(dot(out, g.face_area_vector[f]), 0.0) << "face " << f;
  }
}

TEST(Geometry, DegenerateFace) {
  auto m = read_polymesh(fixture("single_hex"));
  for (auto& p : m.points) p.x = 0.0;
  EXPECT_THROW(compute_geometry(m), Error);
}

TEST(Geometry, InvertedCell) {
  auto m = read_polymesh(fixture("single_hex"));
  for (auto& f : m.faces) std::reverse(f.begin(), f.end());
  EXPECT_FVG_ERROR(compute_geometry(m), ErrorCode::InvertedCell);
}

TEST(Geometry, ClosednessOnEveryMesh) {
  std::vector<std::pair<std::string, RawMesh>> meshes;
  meshes.emplace_back("single_hex", read_polymesh(fixture("single_hex")));
  meshes.emplace_back("two_hex", read_polymesh(fixture("two_hex")));
  meshes.emplace_back("cavity", read_polymesh(fixture("cavity")));
  meshes.emplace_back("single_tet", to_raw_mesh(read_vtk(fixture("single_tet.vtk"))));
  for (const auto& kind : generator_names()) meshes.emplace_back(kind, generate_mesh(kind, 4));
  for (const auto& [name, m] : meshes) {
    SCOPED_TRACE(name);
    const auto g = compute_geometry(m);
    EXPECT_LT(closedness(m, g).max_ratio, 1e-10);
    for (double v : g.cell_volume) EXPECT_GT(v, 0.0);
  }
}

TEST(Generators, AnalyticVolume) {
  for (const auto& kind : generator_names()) {
    SCOPED_TRACE(kind);
    const auto g = compute_geometry(generate_mesh(kind, 3));
    double v = 0.0;
    for (double c : g.cell_volume) v += c;
    EXPECT_NEAR(v, analytic_volume(kind), 1e-10 * analytic_volume(kind));
  }
}

TEST(Generators, Counts) {
  EXPECT_EQ(generate_cube_tet(2).n_cells, 48u);
  const auto tri = generate_square_tri(4);
  EXPECT_EQ(tri.n_cells, 32u);
  const auto* fb = tri.find_patch("frontAndBack");
  ASSERT_NE(fb, nullptr);
  EXPECT_EQ(fb->type, "empty");
  EXPECT_EQ(fb->size, 64u);
  const auto g = compute_geometry(tri);
  int front = 0;
  for (std::size_t f = fb->start; f < fb->start + fb->size; ++f) front += g.face_area_vector[f].z > 0 ? 1 : 0;
  EXPECT_EQ(front, 32);
  EXPECT_EQ(generate_bifurcation(2).n_cells, 64u);
  EXPECT_EQ(generate_elbow(2).n_cells, 48u);
}

TEST(Generators, PatchNames) {
  auto names = [](const RawMesh& m) {
    std::vector<std::string> v;
    for (const auto& p : m.patches) v.push_back(p.name);
    return v;
  };
  EXPECT_EQ(names(generate_cube_tet(2)), std::vector<std::string>{"boundary"});
  EXPECT_EQ(names(generate_cavity(2)), (std::vector<std::string>{"movingWall", "fixedWalls", "frontAndBack"}));
  EXPECT_EQ(names(generate_bifurcation(2)),
            (std::vector<std::string>{"inlet", "outlet1", "outlet2", "walls", "frontAndBack"}));
  EXPECT_EQ(names(generate_square_tri(2)),
            (std::vector<std::string>{"inletLower", "inletUpper", "bottom", "outlet", "frontAndBack"}));
}

TEST(Generators, RefinementMultipliesCells) {
  for (const auto& kind : generator_names()) {
    SCOPED_TRACE(kind);
    const bool volume = kind == "cube-tet" || kind == "cube-hex";
    EXPECT_EQ(generate_mesh(kind, 4).n_cells, generate_mesh(kind, 2).n_cells * (volume ? 8u : 4u));
  }
}

TEST(Generators, InvalidResolution) {
  for (const auto& kind : generator_names()) {
    SCOPED_TRACE(kind);
    EXPECT_FVG_ERROR(generate_mesh(kind, 1), ErrorCode::InvalidResolution);
  }
  EXPECT_FVG_ERROR(generate_cavity(1), ErrorCode::InvalidResolution);
}

TEST(Vtk, SingleTetFixture) {
  const auto grid = read_vtk(fixture("single_tet.vtk"));
  ASSERT_EQ(grid.cells.size(), 1u);
  EXPECT_EQ(grid.cells[0].type, CellType::Tet);
  ASSERT_EQ(grid.cell_scalars.size(), 1u);
  EXPECT_EQ(grid.cell_scalars[0].first, "T");
  EXPECT_EQ(grid.cell_scalars[0].second[0], 0.25);
  ASSERT_EQ(grid.cell_vectors.size(), 1u);
  EXPECT_EQ(grid.cell_vectors[0].second[0], (Vec3{1, 2, 3}));
  const auto m = to_raw_mesh(grid);
  EXPECT_EQ(m.n_cells, 1u);
  EXPECT_EQ(m.n_boundary_faces(), 4u);
  EXPECT_EQ(m.n_internal_faces(), 0u);
}

TEST(Vtk, TextRoundTrip) {
  const auto grid = read_vtk(fixture("single_tet.vtk"));
  const auto text = format_vtk(grid);
  const auto back = parse_vtk(text, "roundtrip");
  EXPECT_EQ(back.points, grid.points);
  EXPECT_EQ(back.cell_scalars, grid.cell_scalars);
  EXPECT_EQ(back.cell_vectors, grid.cell_vectors);
  EXPECT_EQ(format_vtk(back), text);
}

TEST(Vtk, TwoHexConnectivityRoundTrip) {
  const auto m = read_polymesh(fixture("two_hex"));
  const auto grid = from_raw_mesh(m);
  ASSERT_EQ(grid.cells.size(), 2u);
  TempDir tmp;
  write_vtk(tmp / "two.vtk", grid);
  const auto back = read_vtk(tmp / "two.vtk");
  ASSERT_EQ(back.cells.size(), grid.cells.size());
  for (std::size_t c = 0; c < grid.cells.size(); ++c) {
    EXPECT_EQ(back.cells[c].type, CellType::Hex);
    EXPECT_EQ(back.cells[c].vertices, grid.cells[c].vertices);
  }
  EXPECT_EQ(back.points, grid.points);
  const auto m2 = to_raw_mesh(back);
  EXPECT_EQ(m2.n_cells, 2u);
  EXPECT_EQ(m2.n_internal_faces(), 1u);
}

TEST(Vtk, MixedShapesRoundTrip) {
  for (const char* kind : {"cube-tet", "square-tri", "bifurcation"}) {
    SCOPED_TRACE(kind);
    const auto m = generate_mesh(kind, 2);
    const auto grid = from_raw_mesh(m);
    const auto back = parse_vtk(format_vtk(grid), kind);
    const auto m2 = to_raw_mesh(back);
    EXPECT_EQ(m2.n_cells, m.n_cells);
    EXPECT_EQ(m2.n_internal_faces(), m.n_internal_faces());
    const auto g1 = compute_geometry(m), g2 = compute_geometry(m2);
    for (std::size_t c = 0; c < m.n_cells; ++c) EXPECT_NEAR(g1.cell_volume[c], g2.cell_volume[c], 1e-14);
  }
}

TEST(Vtk, UnknownCellType) {
  auto text = fvg::testing::read_file(fixture("single_tet.vtk"));
  text.replace(text.find("CELL_TYPES 1\n10"), 15, "CELL_TYPES 1\n42");
  EXPECT_FVG_ERROR(parse_vtk(text, "bad"), ErrorCode::UnsupportedCellType);
}

TEST(Vtk, BinaryRejected) {
  auto text = fvg::testing::read_file(fixture("single_tet.vtk"));
  text.replace(text.find("ASCII"), 5, "BINARY");
  EXPECT_FVG_ERROR(parse_vtk(text, "bad"), ErrorCode::UnsupportedFormat);
}

TEST(FoamDict, NestedAndDimensioned) {
  const auto d = foam::parse_dict_text(
      "// comment\nnu [0 2 -1 0 0 0 0] 0.01;\n/* block\ncomment */\nouter { inner { k 3; } w word; }\nflag yes;",
      "inline");
  EXPECT_DOUBLE_EQ(d.scalar("nu"), 0.01);
  EXPECT_EQ(d.sub("outer").sub("inner").label("k"), 3);
  EXPECT_EQ(d.sub("outer").word("w"), "word");
  EXPECT_TRUE(d.boolean_or("flag", false));
  EXPECT_FALSE(d.contains("missing"));
  EXPECT_DOUBLE_EQ(d.scalar_or("missing", 4.5), 4.5);
}

TEST(FoamDict, LastEntryWins) {
  const auto d = foam::parse_dict_text("a 1; a 2;", "inline");
  EXPECT_DOUBLE_EQ(d.scalar("a"), 2.0);
}

TEST(FoamDict, UnterminatedIsParseError) {
  EXPECT_FVG_ERROR(foam::parse_dict_text("a { b 1;", "inline"), ErrorCode::Parse);
}

class CaseFixture : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = fvg::testing::copy_fixture("cavity", tmp_); }
  std::string file(const std::string& rel) const { return dir_ + "/" + rel; }

  TempDir tmp_;
  std::string dir_;
};

TEST_F(CaseFixture, ParsesCavity) {
  const auto cfg = parse_case(dir_);
  EXPECT_EQ(cfg.application, "icoFoam");
  EXPECT_DOUBLE_EQ(cfg.dt, 0.01);
  EXPECT_DOUBLE_EQ(cfg.end_time, 0.5);
  EXPECT_EQ(cfg.write_every, 25);
  EXPECT_DOUBLE_EQ(cfg.nu, 0.01);
  EXPECT_EQ(cfg.mesh.n_cells, 64u);
  const auto& U = cfg.field("U");
  EXPECT_TRUE(U.is_vector);
  const auto& lid = U.boundary.at("movingWall");
  EXPECT_EQ(lid.kind, bc::BcKind::FixedValue);
  EXPECT_EQ(lid.value, (Vec3{2, 0, 0}));
  EXPECT_EQ(U.boundary.at("fixedWalls").kind, bc::BcKind::FixedValue);
  EXPECT_EQ(U.boundary.at("fixedWalls").value, (Vec3{0, 0, 0}));
  EXPECT_EQ(U.boundary.at("frontAndBack").kind, bc::BcKind::Empty);
  EXPECT_EQ(cfg.field("p").boundary.at("movingWall").kind, bc::BcKind::ZeroGradient);
  EXPECT_EQ(cfg.solver_p.method, linalg::KrylovMethod::CG);
  EXPECT_EQ(cfg.solver_U.method, linalg::KrylovMethod::BiCGStab);
  EXPECT_EQ(cfg.n_correctors, 2);
}

TEST_F(CaseFixture, TimeControls) {
  fvg::testing::replace_in_file(file("system/controlDict"), "endTime         0.5;", "endTime 0.5;");
  fvg::testing::replace_in_file(file("system/controlDict"), "deltaT          0.01;", "deltaT 0.001;");
  const auto cfg = parse_case(dir_);
  EXPECT_DOUBLE_EQ(cfg.dt, 0.001);
  EXPECT_DOUBLE_EQ(cfg.end_time, 0.5);
}

TEST_F(CaseFixture, UnsupportedConvectionScheme) {
  fvg::testing::replace_in_file(file("system/fvSchemes"), "Gauss upwind", "Gauss cubic");
  try {
    parse_case(dir_);
    FAIL() << "expected UnsupportedScheme";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedScheme);
    EXPECT_NE(std::string(e.what()).find("upwind"), std::string::npos) << "lists the supported set: " << e.what();
  }
}

TEST_F(CaseFixture, SecondOrderSchemesAccepted) {
  fvg::testing::replace_in_file(file("system/fvSchemes"), "Gauss upwind", "Gauss linearUpwind grad(U)");
  EXPECT_EQ(parse_case(dir_).convection_U, fvops::ConvectionScheme::SOU);
}

TEST_F(CaseFixture, MissingPressureFile) {
  std::filesystem::remove(file("0/p"));
  EXPECT_FVG_ERROR(parse_case(dir_), ErrorCode::MissingBoundarySpec);
}

TEST_F(CaseFixture, PatchMissingFromField) {
  auto text = fvg::testing::read_file(file("0/p"));
  const auto start = text.find("    movingWall");
  const auto end = text.find("    fixedWalls");
  text.erase(start, end - start);
  fvg::testing::write_file(file("0/p"), text);
  try {
    parse_case(dir_);
    FAIL() << "expected MissingBoundarySpec";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingBoundarySpec);
    EXPECT_NE(std::string(e.what()).find("movingWall"), std::string::npos);
  }
}

TEST_F(CaseFixture, NonuniformInternalField) {
  std::string list = "nonuniform List<scalar> 64\n(\n";
  for (int c = 0; c < 64; ++c) list += std::to_string(c) + "\n";
  list += ")";
  fvg::testing::replace_in_file(file("0/p"), "uniform 0", list);
  const auto cfg = parse_case(dir_);
  const auto& p = cfg.field("p");
  ASSERT_EQ(p.internal.size(), 64u);
  EXPECT_EQ(p.internal_value(17).x, 17.0);
}

TEST_F(CaseFixture, WrongInternalFieldLength) {
  fvg::testing::replace_in_file(file("0/p"), "uniform 0", "nonuniform List<scalar> 2 (1 2)");
  EXPECT_THROW(parse_case(dir_), Error);
}

TEST_F(CaseFixture, NonPositiveDeltaT) {
  fvg::testing::replace_in_file(file("system/controlDict"), "deltaT          0.01;", "deltaT 0;");
  EXPECT_FVG_ERROR(parse_case(dir_), ErrorCode::InvalidConfig);
}

TEST_F(CaseFixture, WindkesselEntry) {
  const auto mesh = read_polymesh(dir_);
  const std::string text = foam_header("volScalarField", "p", "0") +
                           "internalField uniform 0;\nboundaryField\n{\n"
                           "  movingWall { type windkesselRCR; Rp 100; C 1.1111e-3; Rd 900; scheme backwardEuler; }\n"
                           "  fixedWalls { type zeroGradient; }\n  frontAndBack { type empty; }\n}\n";
  const auto f = parse_field_text(text, "p", "p", mesh);
  const auto& s = f.boundary.at("movingWall");
  EXPECT_EQ(s.kind, bc::BcKind::Windkessel);
  EXPECT_DOUBLE_EQ(s.windkessel.Rp, 100.0);
  EXPECT_DOUBLE_EQ(s.windkessel.C, 1.1111e-3);
  EXPECT_DOUBLE_EQ(s.windkessel.Rd, 900.0);
  EXPECT_EQ(s.windkessel_scheme, bc::WindkesselScheme::BackwardEuler);
}

TEST(FieldIo, WrittenFieldsParseBack) {
  const auto mesh = read_polymesh(fixture("cavity"));
  std::vector<Vec3> u(mesh.n_cells), p(mesh.n_cells);
  for (std::size_t c = 0; c < mesh.n_cells; ++c) {
    u[c] = {0.1 * c, -1.0 / (c + 1.0), 1e-17 * c};
    p[c] = {std::sqrt(2.0) * c, 0, 0};
  }
  TempDir tmp;
  write_time_directory(tmp.str(), 0.25, mesh, {{"U", true, u}, {"p", false, p}});
  EXPECT_EQ(format_time(0.25), "0.25");
  const auto U = parse_field(tmp / "0.25/U", "U", mesh);
  const auto P = parse_field(tmp / "0.25/p", "p", mesh);
  ASSERT_EQ(U.internal.size(), mesh.n_cells);
  for (std::size_t c = 0; c < mesh.n_cells; ++c) {
    EXPECT_EQ(U.internal[c], u[c]);
    EXPECT_EQ(P.internal[c].x, p[c].x);
  }
}

}  // namespace
}  // namespace fvg::meshio
