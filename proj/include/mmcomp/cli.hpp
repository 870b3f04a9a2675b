#pragma once

#include "mmcomp/simulator.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mmcomp {

struct ResultRow {
    double threshold_db = 0.0;
    double coverage = 0.0;
    std::optional<double> ci_low;
    std::optional<double> ci_high;
    std::string method; // th1, th2, th3, cor1, th4 or mc
    std::string scenario_id;
    int n = 1;
    int nt = 1;
};

inline constexpr const char* kCsvHeader = "threshold_db,coverage,ci_low,ci_high,method,scenario_id,n,nt";

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_json(std::ostream& out, const std::vector<ResultRow>& rows);

/// Rows for a simulated curve; CI bounds are clipped to [0, 1].
std::vector<ResultRow> mc_rows(const CoverageCurve& curve, const Scenario& scenario);

struct GateLine {
    double threshold_db = 0.0;
    double analytic = 0.0;
    double empirical = 0.0;
    double allowed = 0.0; // tolerance on |analytic - empirical|, or on empirical - analytic when one-sided
    bool pass = false;
};

/// Analytic vs Monte Carlo check. Two-sided: |a - e| <= max(0.02, 3 hw).
/// One-sided (upper-bounding theorems): a >= e - 3 sigma with sigma = hw / 1.96.
std::vector<GateLine> compare_gate(const std::vector<double>& analytic, const CoverageCurve& mc,
                                   bool one_sided);

/// True when the selected theorem only bounds coverage from above
/// (Nakagami with n >= 2).
bool upper_bound_only(const Scenario& scenario);

/// Exit codes of run_command.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitInvalid = 2,
    kExitGate = 3,
    kExitConvergence = 4,
};

/// Runs one subcommand; `args` excludes the program name. Data goes to
/// `out` (or --output), diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mmcomp
