#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace polarfft::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNonConvergence = 3, kIoError = 4 };

struct Options {
  std::optional<std::filesystem::path> config;
  std::optional<std::string> preset;
  std::filesystem::path out = ".";
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::vector<int> snapshot_steps;

  // subcommand extras
  std::vector<int> sizes;
  std::optional<int> repeats;
  std::vector<double> hardening;
  std::vector<double> elastic_lengths;
  std::vector<double> plastic_lengths;
  std::optional<std::string> geometry;
  std::string format = "ascii";
  std::filesystem::path geometry_file = "geometry.mpvx";
};

// Each command throws polarfft errors; `guarded` maps them to exit codes.
void cmd_run(const Options& o);
void cmd_scan_lengths(const Options& o);
void cmd_bench(const Options& o);
void cmd_iterations(const Options& o);
void cmd_mnms_verify(const Options& o);
void cmd_convergence(const Options& o);
void cmd_gen_geom(const Options& o);

/// Runs `command`, printing any error to stderr, and returns the exit code.
int guarded(void (*command)(const Options&), const Options& o);

/// Full command line entry point.
int main(int argc, char** argv);

}  // namespace polarfft::cli
