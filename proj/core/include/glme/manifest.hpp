#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "glme/dense_matrix.hpp"
#include "glme/equation.hpp"
#include "glme/gltr.hpp"

namespace glme {

/// A JSON run description: which equation to build (family name plus matrix
/// files), how to configure the solver, and where results should go.
///
/// Manifest layout:
/// {
///   "command": "solve",                       // optional label
///   "family": "classical_sylvester",
///   "matrices": {"a": "a.csv", "d": "d.mtx", "e": "e.csv"},
///   "cfg": {"delta": 2.5, "eps": 1e-14, "max_iter": 0, "variant": "simplified41"},
///   "seed": 7,                                // optional
///   "report": "out/report.jsonl",             // optional
///   "trace": "out/trace.csv"                  // optional
/// }
struct RunManifest {
    std::string command;
    Family family = Family::Custom;
    std::map<std::string, std::string> matrix_paths;  // slot ("a".."e") -> file path
    SolverConfig cfg;
    std::uint64_t seed = 0;
    std::string report_path;
    std::string trace_path;
};

/// Parse a manifest JSON file.  Every error message names the file; JSON
/// syntax errors keep the parser's byte/line context.
RunManifest load_manifest(const std::string& path);

/// Serialize a manifest (round-trip partner of load_manifest).
void save_manifest(const std::string& path, const RunManifest& manifest);

/// Load one matrix, dispatching on the file extension: ".csv" reads dense
/// CSV, ".mtx" reads Matrix Market and densifies.  Missing or unreadable
/// files raise IoError naming the path.
DenseMatrix load_matrix_file(const std::string& path);

/// Matrix slots (besides the right-hand side "e") a family requires, in
/// builder-argument order.
std::vector<std::string> family_slots(Family family);

/// The equation and right-hand side a manifest describes.
struct ManifestProblem {
    EquationSpec spec;
    DenseMatrix e;
};

/// Build the problem from a manifest.  Relative matrix paths are resolved
/// against @p base_dir when it is non-empty (callers normally pass the
/// directory containing the manifest file).
ManifestProblem build_problem(const RunManifest& manifest, const std::string& base_dir = "");

/// Solver variant <-> its manifest/CLI spelling ("basic31", "simplified41").
std::string variant_name(Variant variant);
Variant variant_from_name(const std::string& name);

}  // namespace glme
