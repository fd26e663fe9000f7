#pragma once

#include <iosfwd>

namespace fpdwalk {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitGateFailure = 3;

/// Subcommands: simulate-chain, simulate-ctrw, density, study, selftest.
/// Data goes to `out`; diagnostics and the error JSON
/// {"error": kind, "message": text} go to `err`.
/// Exit codes: 0 success, 1 runtime error, 2 usage or config error,
/// 3 a gate failed.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace fpdwalk
