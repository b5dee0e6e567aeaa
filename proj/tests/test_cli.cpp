// End-to-end tests of the command-line tool: exit-code taxonomy, output
// determinism, manifest completeness, and artifact readability.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "conelab/io.hpp"

namespace {

namespace fs = std::filesystem;
namespace io = conelab::io;
using nlohmann::json;

fs::path fresh_dir(const std::string& leaf) {
  const fs::path dir = fs::path(::testing::TempDir()) / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Runs the binary, returns its exit code; stdout+stderr land in *output.
int run_cli(const std::string& args, const fs::path& scratch,
            std::string* output = nullptr) {
  const fs::path log = scratch / "cli_log.txt";
  const std::string cmd = std::string(CONELAB_CLI_PATH) + " " + args + " > \"" +
                          log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  if (output != nullptr)
    *output = fs::exists(log) ? io::read_text_file(log.string()) : "";
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

constexpr const char* kEigenvalueConfig =
    "[model]\n"
    "n = 4\n"
    "kappa = 1.0\n"
    "m = 64\n"
    "\n"
    "[cone]\n"
    "n = 4\n"
    "k = 2\n"
    "\n"
    "[eigenvalue]\n"
    "tau = 0.5\n";

TEST(Cli, EigenvalueRunIsDeterministicWithCompleteManifest) {
  const fs::path dir = fresh_dir("cli_eig");
  const fs::path cfg = dir / "run.ini";
  io::write_text_file(cfg, kEigenvalueConfig);

  std::string log1, log2;
  const std::string base =
      "eigenvalue --config \"" + cfg.string() + "\" --out \"";
  ASSERT_EQ(run_cli(base + (dir / "a").string() + "\"", dir, &log1), 0) << log1;
  ASSERT_EQ(run_cli(base + (dir / "b").string() + "\"", dir, &log2), 0) << log2;

  // Closed-form check on the summary line and byte-identical reruns.
  EXPECT_NE(log1.find("mu=1.5"), std::string::npos) << log1;
  EXPECT_EQ(log1, log2);

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir / "a"))
    names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  EXPECT_EQ(names, (std::vector<std::string>{"curve.csv", "eigenfunction.csv",
                                             "eigenpair.json", "ladder.csv",
                                             "manifest.json"}));
  for (const auto& name : names)
    EXPECT_EQ(io::read_text_file((dir / "a" / name).string()),
              io::read_text_file((dir / "b" / name).string()))
        << name;

  // Manifest: config verbatim, every output listed with a matching hash.
  const json man =
      json::parse(io::read_text_file((dir / "a" / "manifest.json").string()));
  EXPECT_EQ(man.at("command"), "eigenvalue");
  EXPECT_EQ(man.at("config").get<std::string>(), kEigenvalueConfig);
  const auto& outputs = man.at("outputs");
  ASSERT_EQ(outputs.size(), 4u);
  for (const auto& entry : outputs) {
    const std::string rel = entry.at("path").get<std::string>();
    const std::string bytes = io::read_text_file((dir / "a" / rel).string());
    EXPECT_EQ(entry.at("bytes").get<size_t>(), bytes.size()) << rel;
    EXPECT_EQ(entry.at("hash").get<std::string>(), io::content_hash(bytes))
        << rel;
  }

  // The eigenpair report carries the stabilized rate ladder, and the curve
  // row matches the constant-solution prediction at this tau.
  const json eig =
      json::parse(io::read_text_file((dir / "a" / "eigenpair.json").string()));
  ASSERT_EQ(eig.at("runs").size(), 1u);
  EXPECT_TRUE(eig.at("runs")[0].at("stabilized").get<bool>());
  EXPECT_NEAR(eig.at("runs")[0].at("mu").get<double>(), 1.5, 1e-6);
  const io::CsvTable curve =
      io::read_csv_file((dir / "a" / "curve.csv").string());
  ASSERT_EQ(curve.rows.size(), 1u);
  const auto row = curve.rows[0];
  EXPECT_NEAR(row[curve.column_index("tau")], 0.5, 0.0);
  EXPECT_NEAR(row[curve.column_index("mu")],
              row[curve.column_index("predicted")], 1e-9);
  EXPECT_LE(row[curve.column_index("residual")], 1e-8);
  EXPECT_GT(row[curve.column_index("margin")], 0.0);
}

TEST(Cli, ExitCodesFollowFailureTaxonomy) {
  const fs::path dir = fresh_dir("cli_codes");
  std::string log;

  // 2: unreadable config, malformed config, missing subcommand.
  EXPECT_EQ(run_cli("solve --config /nonexistent.ini", dir, &log), 2);
  EXPECT_NE(log.find("config error"), std::string::npos) << log;

  const fs::path bad = dir / "bad.ini";
  io::write_text_file(bad, "[s]\nk = 1\nk = 2\n");
  EXPECT_EQ(run_cli("solve --config \"" + bad.string() + "\"", dir, &log), 2);
  EXPECT_NE(log.find("duplicate key"), std::string::npos) << log;

  EXPECT_EQ(run_cli("", dir, &log), 2);

  // 3: flat background offers no admissible homotopy start.
  const fs::path flat = dir / "flat.ini";
  io::write_text_file(flat,
                      "[model]\nn = 4\nkappa = 0.0\nm = 32\n"
                      "[cone]\nn = 4\nk = 2\n"
                      "[continuation]\ntarget_tau = 0.5\nprobe = true\n");
  EXPECT_EQ(run_cli("continuation --config \"" + flat.string() + "\" --out \"" +
                        (dir / "flat_out").string() + "\"",
                    dir, &log),
            3);
  EXPECT_NE(log.find("obstructed_flat"), std::string::npos) << log;

  // 4: the tau-march stalls when Newton is starved of iterations.
  const fs::path stall = dir / "stall.ini";
  io::write_text_file(stall,
                      "[model]\nn = 4\nkappa = 1.0\nm = 32\n"
                      "[cone]\nn = 4\nk = 2\n"
                      "[continuation]\ntarget_tau = 0.7\nmax_iter = 1\n"
                      "min_dtau = 0.01\n");
  EXPECT_EQ(run_cli("continuation --config \"" + stall.string() +
                        "\" --out \"" + (dir / "stall_out").string() + "\"",
                    dir, &log),
            4);
  EXPECT_NE(log.find("reached_target=false"), std::string::npos) << log;

  // 5: a coarse regularization ladder fails to stabilize.
  const fs::path visc = dir / "visc.ini";
  io::write_text_file(visc,
                      "[model]\nn = 4\nkappa = 1.0\nm = 64\n"
                      "[cone]\nn = 4\nk = 2\n"
                      "[viscosity]\nfield = wedge:0.8\ntau = 0.5\n"
                      "side = sub\nladder = 5.0, 2.5\n");
  EXPECT_EQ(run_cli("viscosity --config \"" + visc.string() + "\" --out \"" +
                        (dir / "visc_out").string() + "\"",
                    dir, &log),
            5);
  EXPECT_NE(log.find("stabilized=false"), std::string::npos) << log;
}

TEST(Cli, SolveAndDiagnosticsArtifactsAreReadable) {
  const fs::path dir = fresh_dir("cli_solve");
  const fs::path cfg = dir / "solve.ini";
  io::write_text_file(cfg,
                      "[model]\nn = 4\nkappa = 1.0\nm = 64\n"
                      "[cone]\nn = 4\nk = 2\n"
                      "[solve]\ntau = 0.4\n");
  std::string log;
  ASSERT_EQ(run_cli("solve --config \"" + cfg.string() + "\" --out \"" +
                        (dir / "out").string() + "\"",
                    dir, &log),
            0)
      << log;

  const io::CsvTable sol =
      io::read_csv_file((dir / "out" / "solution.csv").string());
  EXPECT_EQ(sol.metadata.at("n"), "4");
  ASSERT_EQ(sol.rows.size(), 64u);
  for (const double r : sol.column("residual")) EXPECT_LE(std::abs(r), 1e-8);

  const json state =
      json::parse(io::read_text_file((dir / "out" / "state.json").string()));
  EXPECT_EQ(state.at("state").at("status"), "solved");
  EXPECT_GT(state.at("state").at("min_margin").get<double>(), 0.0);

  // Eigenvalue CSV names the normalization used to raise the index.
  const io::CsvTable eigs =
      io::read_csv_file((dir / "out" / "eigenvalues.csv").string());
  EXPECT_EQ(eigs.metadata.at("normalization"), "metric_inverse");
  ASSERT_EQ(eigs.columns.size(), 5u);

  const fs::path dcfg = dir / "diag.ini";
  io::write_text_file(dcfg,
                      "[model]\nn = 4\nkappa = 1.0\nm = 64\n"
                      "[diagnostics]\nu = sine:0.05\ntau = 0.5\n");
  ASSERT_EQ(run_cli("diagnostics --config \"" + dcfg.string() + "\" --out \"" +
                        (dir / "diag_out").string() + "\"",
                    dir, &log),
            0)
      << log;
  const json diag = json::parse(
      io::read_text_file((dir / "diag_out" / "diagnostics.json").string()));
  EXPECT_GT(diag.at("pinching").at("slack").get<double>(), 0.0);
  EXPECT_GE(diag.at("functionals").size(), 2u);
  const io::CsvTable slack =
      io::read_csv_file((dir / "diag_out" / "slack.csv").string());
  EXPECT_EQ(slack.rows.size(), 64u);
  for (const double s : slack.column("slack")) EXPECT_GT(s, 0.0);
}

TEST(Cli, SeedAndTolFlagsOverrideConfig) {
  const fs::path dir = fresh_dir("cli_flags");
  const fs::path cfg = dir / "cones.ini";
  io::write_text_file(cfg,
                      "[suite]\ndims = 3\nsamples = 10\nseed = 1\n");
  std::string log;
  ASSERT_EQ(run_cli("check-cones --config \"" + cfg.string() + "\" --out \"" +
                        (dir / "out").string() + "\" --seed 7 --tol 1e-9",
                    dir, &log),
            0)
      << log;
  const json suite = json::parse(
      io::read_text_file((dir / "out" / "property_suite.json").string()));
  EXPECT_EQ(suite.at("options").at("seed").get<int>(), 7);
  EXPECT_DOUBLE_EQ(suite.at("options").at("tol").get<double>(), 1e-9);
  EXPECT_TRUE(suite.at("passed").get<bool>());

  const json man = json::parse(
      io::read_text_file((dir / "out" / "manifest.json").string()));
  EXPECT_EQ(man.at("parameters").at("seed").get<int>(), 7);
  EXPECT_EQ(man.at("parameters").at("tol").get<double>(), 1e-9);
}

}  // namespace
