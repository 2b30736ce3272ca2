#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "riccati_geom/problem.hpp"

namespace riccati_geom {

using ReportJson = nlohmann::ordered_json;

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitNumericalError = 3;

struct CommandOptions {
  std::optional<double> tol;  // overrides the file and RICCATI_GEOM_TOL
  std::optional<std::uint64_t> seed;
  std::optional<std::string> candidate;
  std::optional<Spectrum> targets;
  std::optional<Vector> x0;
  double horizon = 10.0;
  Index steps = 11;
  bool with_L = false;
};

/// Machine-readable report. Every check carries its measured defect and the
/// threshold it was compared with.
struct Report {
  ReportJson json;
  bool passed() const;
  int exit_code() const { return passed() ? kExitPass : kExitCheckFailed; }
};

/// Tolerance actually used: flag, then problem file, then RICCATI_GEOM_TOL,
/// then the library default.
double resolve_tol(const ProblemFile& problem, const CommandOptions& options);
std::uint64_t resolve_seed(const ProblemFile& problem, const CommandOptions& options);

Report cmd_check(const ProblemFile& problem, const CommandOptions& options);
Report cmd_verify(const ProblemFile& problem, const CommandOptions& options);
Report cmd_zeros(const ProblemFile& problem, const CommandOptions& options);
Report cmd_stabilize(const ProblemFile& problem, const CommandOptions& options);
Report cmd_simulate(const ProblemFile& problem, const CommandOptions& options);
/// Reduction solver; the candidate it finds is reported as "reduced".
Report cmd_solve(const ProblemFile& problem, const CommandOptions& options);

std::string render_json(const Report& report);
std::string render_text(const Report& report);

}  // namespace riccati_geom
