#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "minimax/vecfield.hpp"

namespace minimax {

struct CliOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<FieldConvention> convention;
  std::optional<unsigned> workers;
};

// Exit codes: 0 success (Converged / IterCap), 1 usage or I/O error, 2 Diverged.
int cmd_run(const CliOptions& opts);
int cmd_analyze(const CliOptions& opts);
int cmd_sweep(const CliOptions& opts);
int cmd_gan(const CliOptions& opts);

// --workers, then MINIMAX_GN_WORKERS, then the hardware thread count.
unsigned resolve_workers(std::optional<unsigned> flag);

int cli_main(int argc, char** argv);

}  // namespace minimax
