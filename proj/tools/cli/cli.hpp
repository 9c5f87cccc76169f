#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace entdyn::cli {

enum ExitCode : int {
    kOk = 0,
    kArgumentError = 2,
    kNumericalError = 3,
    kSelfcheckFailed = 4,
};

/// Runs one command line; `args` excludes the program name. Data goes to `out`
/// unless --out is given, diagnostics to `err`.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

/// k * dt for k = 0 .. floor(t_max / dt); requires dt > 0 and t_max >= dt.
std::vector<double> time_grid(double t_max, double dt);

struct SelfcheckLine {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Exact identities and closed-form oracles; fast enough for every build.
std::vector<SelfcheckLine> run_selfcheck();

}  // namespace entdyn::cli
