#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace dck::cli {

/// One measured quantity compared against its threshold.
struct CheckRow {
    std::string section;
    std::string name;
    double measured = 0.0;
    std::string relation;  ///< "<=", ">=" or ">"
    double threshold = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<CheckRow> rows;

    [[nodiscard]] bool all_pass() const;
    [[nodiscard]] std::size_t failures() const;
    [[nodiscard]] std::vector<std::string> sections() const;
};

/// Runs every invariant check. A check that throws is recorded as a failure
/// with a NaN measurement; the remaining checks still run. Per-section
/// timings go to `log` only, so the report itself is deterministic.
[[nodiscard]] VerifyReport run_verify(const RunConfig& cfg, std::ostream& log);

}  // namespace dck::cli
