#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nnls {

/// Outcome of one acceptance criterion: a pass/fail verdict plus one detail
/// line per sub-check with the measured values and pinned tolerances.
struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::vector<std::string> details;
};

/// Runs the requested criteria (1..11; empty = all) at their pinned
/// tolerances and desk-scale grids. When out_dir is nonempty, experiment
/// reports and time-series artifacts are written beneath it. Deterministic.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {},
                                            const std::string& out_dir = "");

/// One line per criterion ("[C7] soliton-instability ... PASS") followed by
/// its indented detail lines.
void print_acceptance(const std::vector<CriterionResult>& results, std::ostream& os);

int count_failures(const std::vector<CriterionResult>& results);

}  // namespace nnls
