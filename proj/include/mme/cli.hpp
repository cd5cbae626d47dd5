#pragma once

// Command-line front end. Exit codes: 0 success, 2 configuration or
// validation error, 3 numerical/runtime domain error.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

namespace mme::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kDomainError = 3 };

struct GlobalOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> events;
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
};

int cmd_rotate(const GlobalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const GlobalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_bell(const GlobalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_power(double p1, double p2, double sigma, std::ostream& out,
              std::ostream& err);

/// Parse argv and dispatch to a subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mme::cli
