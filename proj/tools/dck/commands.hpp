#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "config.hpp"

namespace dck::cli {

/// Process exit codes.
enum ExitCode : int { kSuccess = 0, kCheckFailure = 1, kInputFailure = 2 };

struct CommandContext {
    RunConfig config;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> data;  ///< estimate only
    bool verbose = false;
    std::ostream* log = nullptr;                ///< diagnostics and warnings
};

// Each command writes its artifacts into ctx.out_dir (created if missing) and
// returns an exit code. Input problems are reported by throwing dck::Error.

int cmd_estimate(const CommandContext& ctx);
int cmd_verify(const CommandContext& ctx);
int cmd_sample(const CommandContext& ctx);
int cmd_expand(const CommandContext& ctx);
int cmd_norm(const CommandContext& ctx);
int cmd_tridiag(const CommandContext& ctx);

/// Parses arguments, runs one command and maps failures to exit codes.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace dck::cli
