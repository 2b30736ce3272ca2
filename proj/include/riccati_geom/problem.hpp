#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riccati_geom/linalg.hpp"
#include "riccati_geom/popov.hpp"

namespace riccati_geom {

struct Candidate {
  std::string label;
  Matrix X;
};

/// Problem file: JSON with matrices as arrays of rows. Entries are numbers or
/// strings holding a decimal or an exact rational "p/q".
///
///   {"name": "...", "n": 2, "m": 2, "A": [[...]], "B": ..., "Q": ..., "S": ..., "R": ...,
///    "candidates": [{"label": "X", "X": [[...]]}], "x0": [[...]],
///    "targets": ["-2", "1+2i", ...], "tol": 1e-8, "seed": 33228}
struct ProblemFile {
  std::string name;
  PopovTriple sigma;
  std::vector<Candidate> candidates;
  std::vector<Vector> x0;
  std::optional<Spectrum> targets;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
};

/// Throws InputError on malformed JSON (with its byte offset), on schema
/// violations (naming the offending path) and on dimension mismatches.
ProblemFile parse_problem(std::string_view text, const std::string& source = "<input>");
ProblemFile load_problem(const std::string& path);

/// "17/4", "-0.25", "3": a rational is formed from integer numerator and
/// denominator before a single conversion to double.
double parse_scalar(std::string_view s);

/// "a+bi", "a-bi", "bi", "a" (also "j" for the imaginary unit).
Complex parse_complex(std::string_view s);

/// Comma-separated lists used by the command-line flags.
Spectrum parse_spectrum_list(std::string_view csv);
Vector parse_vector_list(std::string_view csv);

/// Candidate by label; the first candidate when no label is given. Throws
/// InputError naming the available labels.
const Candidate& find_candidate(const ProblemFile& problem, const std::optional<std::string>& label);

}  // namespace riccati_geom
