#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "polarfft/config.hpp"
#include "polarfft/errors.hpp"
#include "polarfft/experiments.hpp"

using namespace polarfft;

namespace {

std::filesystem::path scratch_dir() {
  auto d = std::filesystem::temp_directory_path() / "polarfft_config_test";
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST(Config, ParsesSectionsAndComments) {
  const auto c = ConfigMap::parse(
      "# comment\n"
      "name = demo   # trailing\n"
      "[solver]\n"
      "epsilon = 1e-7\n"
      "error = average\n"
      "\n"
      "[geometry]\n"
      "dims = 4, 4 2\n");
  EXPECT_EQ(c.get_string("name"), "demo");
  EXPECT_DOUBLE_EQ(c.get_double("solver.epsilon"), 1e-7);
  EXPECT_EQ(c.get_ints("geometry.dims"), (std::vector<long>{4, 4, 2}));
  const SolverConfig s = build_solver_config(c);
  EXPECT_EQ(s.error_kind, ErrorKind::Average);
  EXPECT_DOUBLE_EQ(s.epsilon, 1e-7);
}

TEST(Config, ErrorsCarryLineNumbers) {
  try {
    ConfigMap::parse("a = 1\nb = 2\na = 3\n", "cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg:3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ConfigMap::parse("just words\n"), ConfigError);
  EXPECT_THROW(ConfigMap::parse("[open\n"), ConfigError);
  EXPECT_THROW(ConfigMap::parse("bad key = 1\n"), ConfigError);
  EXPECT_THROW(ConfigMap::parse(" = 1\n"), ConfigError);
}

TEST(Config, TypedGettersReject) {
  const auto c = ConfigMap::parse("x = abc\ny = 1.5\n");
  EXPECT_THROW(c.get_double("x"), ConfigError);
  EXPECT_THROW(c.get_int("y"), ConfigError);
  EXPECT_THROW(c.get_double("missing"), ConfigError);
  EXPECT_EQ(c.get_double("missing", 2.0), 2.0);
}

TEST(Config, UnknownKindsAndBadValues) {
  EXPECT_THROW(build_geometry(ConfigMap::parse("geometry.kind = blob\n")), ConfigError);
  EXPECT_THROW(build_loading(ConfigMap::parse("loading.kind = spiral\n")), ConfigError);
  EXPECT_THROW(build_solver_config(ConfigMap::parse("solver.error = mixed\n")), ConfigError);
  EXPECT_THROW(build_solver_config(ConfigMap::parse("solver.epsilon = -1\n")), ConfigError);
  EXPECT_THROW(build_geometry(ConfigMap::parse("geometry.kind = laminate\ngeometry.axis = 4\n")),
               ConfigError);
  EXPECT_THROW(build_materials(ConfigMap::parse("material.preset = table1\n"
                                                "material.phase0.mu = -1\n")),
               ConfigError);
  EXPECT_THROW(build_materials(ConfigMap::parse("material.preset = table1\n"
                                                "material.phase7.mu = 1\n")),
               ConfigError);
  EXPECT_THROW(build_materials(ConfigMap::parse("material.preset = table1\n"
                                                "material.phase0.zeta = 1\n")),
               ConfigError);
  EXPECT_THROW(parse_component("14"), ConfigError);
  EXPECT_EQ(parse_component("32"), (std::pair<int, int>{2, 1}));
}

TEST(Config, InlineMaterialsAndOverrides) {
  const auto m = build_materials(ConfigMap::parse(
      "material.phases = 1\n"
      "material.phase0.lambda = 1\nmaterial.phase0.mu = 1\nmaterial.phase0.kappa = 1\n"
      "material.phase0.beta = 0.5\nmaterial.phase0.gamma = 1\n"
      "material.phase0.t_yield = 0.5\nmaterial.phase0.t_hardening = 0.1\n"
      "material.phase0.m_yield = 0.5\nmaterial.phase0.m_hardening = 0.1\n"
      "material.phase0.a1 = 1.5\nmaterial.phase0.b1 = 1.5\n"));
  ASSERT_EQ(m.size(), 1u);
  EXPECT_DOUBLE_EQ(m[0].beta, 0.5);
  const auto o = build_materials(ConfigMap::parse("material.preset = table4\n"
                                                  "material.phase1.t_yield = 9\n"));
  EXPECT_DOUBLE_EQ(o[1].t_yield, 9.0);
  EXPECT_DOUBLE_EQ(o[0].t_yield, presets::table4()[0].t_yield);
}

TEST(Config, GeometryKinds) {
  const auto lam = build_geometry(ConfigMap::parse(
      "geometry.kind = laminate\ngeometry.dims = 4 4 4\ngeometry.axis = 1\n"));
  EXPECT_EQ(lam, gen_laminate({4, 4, 4}, 0.5, 0).grid);
  const auto cube = build_geometry(ConfigMap::parse(
      "geometry.kind = cube\ngeometry.dims = 4 4 4\ngeometry.inner = 2 2 2\n"));
  EXPECT_EQ(cube, gen_centered_cube({4, 4, 4}, {2, 2, 2}));
  const auto sph = build_geometry(ConfigMap::parse(
      "geometry.kind = spheres\ngeometry.dims = 8 8 1\ngeometry.spheres = 0.5 0.5 0.5 0.2; 0.1 0.1 0.5 0.1\n"));
  EXPECT_EQ(sph, gen_spheres({8, 8, 1}, {{{0.5, 0.5, 0.5}, 0.2}, {{0.1, 0.1, 0.5}, 0.1}}));
  const auto r1 = build_geometry(ConfigMap::parse("geometry.kind = random_spheres\n"
                                                  "geometry.dims = 16 16 1\n"),
                                 7);
  const auto r2 = build_geometry(ConfigMap::parse("geometry.kind = random_spheres\n"
                                                  "geometry.dims = 16 16 1\ngeometry.seed = 7\n"));
  EXPECT_EQ(r1, r2);
  const auto u = build_geometry(ConfigMap::parse("geometry.kind = uniform\ngeometry.phase = 1\n"));
  EXPECT_EQ(u.max_phase(), 1);
  EXPECT_EQ(u.volume_fraction(1), 1.0);
}

TEST(Config, GeometryFileIsRelativeToConfig) {
  const auto dir = scratch_dir();
  save_voxels(gen_laminate({2, 2, 1}, 0.5, 0).grid, dir / "g.mpvx");
  {
    std::ofstream f(dir / "run.cfg");
    f << "geometry.kind = file\ngeometry.path = g.mpvx\nmaterial.preset = table1\n";
  }
  const auto cfg = ConfigMap::load(dir / "run.cfg");
  EXPECT_EQ(build_geometry(cfg), gen_laminate({2, 2, 1}, 0.5, 0).grid);
  EXPECT_THROW(ConfigMap::load(dir / "nope.cfg"), IoError);
}

TEST(Config, LoadingKinds) {
  const auto c = build_loading(ConfigMap::parse(
      "loading.kind = constant\nloading.dt = 0.1\nloading.steps = 3\nloading.E_rate.12 = 2\n"));
  EXPECT_EQ(c.steps(), 3);
  EXPECT_NEAR(c.E[3](0, 1), 0.6, 1e-14);
  const auto y = build_loading(ConfigMap::parse(
      "loading.kind = cyclic\nloading.dt = 0.25\nloading.period = 1\nloading.cycles = 2\n"
      "loading.Gamma_rate.33 = 1\n"));
  EXPECT_EQ(y.steps(), 8);
  EXPECT_NEAR(y.Gamma[2](2, 2), 0.5, 1e-14);

  const auto dir = scratch_dir();
  {
    std::ofstream f(dir / "path.csv");
    f << "t,E11,E12,E13,E21,E22,E23,E31,E32,E33,G11,G12,G13,G21,G22,G23,G31,G32,G33\n";
    f << "0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0\n";
    f << "0.5,0,1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,2\n";
  }
  const auto t = load_loading_table(dir / "path.csv");
  EXPECT_EQ(t.steps(), 1);
  EXPECT_EQ(t.E[1](0, 1), 1.0);
  EXPECT_EQ(t.Gamma[1](2, 2), 2.0);
  {
    std::ofstream f(dir / "short.csv");
    f << "0 0 0\n";
  }
  EXPECT_THROW(load_loading_table(dir / "short.csv"), Error);
}

TEST(Config, EmptyLoadingIsAllowed) {
  const auto l = build_loading(ConfigMap::parse("loading.steps = 0\n"));
  EXPECT_EQ(l.steps(), 0);
}

TEST(Config, RunConfigCrossChecks) {
  EXPECT_THROW(build_run_config(ConfigMap::parse("geometry.kind = uniform\ngeometry.phase = 3\n"
                                                 "material.preset = table1\n")),
               ConfigError);
  EXPECT_THROW(build_run_config(ConfigMap::parse("material.preset = table1\nloading.steps = 5\n"
                                                 "output.snapshot_steps = 9\n")),
               ConfigError);
  const auto rc = build_run_config(ConfigMap::parse("material.preset = table1\nloading.steps = 5\n"
                                                    "output.snapshot_steps = 0 5\nmystery = 1\n"));
  EXPECT_EQ(rc.output.snapshot_steps, (std::vector<int>{0, 5}));
  EXPECT_EQ(rc.unused_keys, (std::vector<std::string>{"mystery"}));
  EXPECT_EQ(rc.name, "custom");
}

TEST(Config, EveryRunnablePresetResolves) {
  for (const auto& p : list_presets()) {
    if (p.name == "fig1.spinodal" || p.name == "fig1.spinodal.cauchy") {
      ConfigMap c;
      c.set("preset", p.name);
      EXPECT_THROW(build_run_config(c), Error) << p.name;
      continue;
    }
    if (p.name == "lengths") {
      // Scan preset: the material is built per (l_e, l_p) row.
      const ConfigMap c = resolve_preset(ConfigMap::parse("preset = lengths\n"));
      EXPECT_EQ(build_geometry(c).dims, (std::array<int, 3>{16, 16, 16}));
      EXPECT_EQ(build_loading(c).steps(), 100);
      continue;
    }
    ConfigMap c;
    c.set("preset", p.name);
    RunConfig rc;
    ASSERT_NO_THROW(rc = build_run_config(c)) << p.name;
    EXPECT_EQ(rc.name, p.name);
    EXPECT_FALSE(rc.provenance.empty()) << p.name;
    EXPECT_TRUE(rc.unused_keys.empty()) << p.name;
  }
  EXPECT_THROW(preset_config("fig9"), ConfigError);
}

TEST(Config, PresetKeysCanBeOverridden) {
  ConfigMap c;
  c.set("preset", "fig3.ratchet");
  c.set("loading.cycles", "3");
  c.set("material.phase0.m_yield", "0.01");
  const auto rc = build_run_config(c);
  EXPECT_EQ(rc.loading.steps(), 300);
  EXPECT_DOUBLE_EQ(rc.materials[0].m_yield, 0.01);
  EXPECT_EQ(rc.grid.dims, (std::array<int, 3>{4, 4, 4}));
  EXPECT_EQ(rc.grid, gen_laminate({4, 4, 4}, 0.5, kStudyLaminateNormal).grid);
}
