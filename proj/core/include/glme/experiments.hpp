#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glme/equation.hpp"
#include "glme/gltr.hpp"
#include "glme/manifest.hpp"

namespace glme {

/// Branch <-> report spelling ("interior", "boundary").
std::string branch_name(Branch branch);

/// One solve reduced to its reportable facts plus the per-record verdict.
struct RunRecord {
    std::string label;
    double delta = 0.0;
    std::size_t iterations = 0;
    Branch branch = Branch::Interior;
    double residual = 0.0;      ///< ||f(X*) - E||
    double kkt_residual = 0.0;  ///< ||f*(f(X*)) - f*(E) + lambda* X*||
    double comp_slack = 0.0;    ///< lambda* * (||X*|| - delta)
    double gamma0 = 0.0;        ///< ||f*(E)||
    double norm_x = 0.0;
    double lambda = 0.0;
    std::optional<double> recovery_error;  ///< set when a reference X is known
    bool bounds_ok = true;                 ///< every asserted bound held
    std::string note;                      ///< populated when something failed
};

/// A command's full result: per-run records plus aggregate summaries.
struct ExperimentReport {
    std::string command;
    std::uint64_t seed = 0;
    std::vector<RunRecord> records;
    std::map<std::string, double> aggregates;
    bool all_ok = true;  ///< AND of record verdicts and experiment-level checks
};

/// Run one solve and fold the outcome into a record.  The stationarity and
/// complementarity bounds every experiment asserts (kkt_residual within
/// 1e-6 * ||f*(E)|| and |comp_slack| within 1e-6 * delta) are checked here;
/// callers AND protocol-specific bounds into bounds_ok afterwards.  Hitting
/// the iteration cap is reported as a failed record, not an exception.  When
/// x_true is given the relative recovery error is recorded; when trace_out is
/// given the per-iteration trace is copied there.
RunRecord solve_record(const EquationSpec& spec, const DenseMatrix& e,
                       const SolverConfig& cfg, const std::string& label,
                       const DenseMatrix* x_true = nullptr,
                       std::vector<TraceRecord>* trace_out = nullptr);

/// Construct-and-recover protocol: builds the two-term size x size equation
/// with known integer solution, then solves once per entry of `multiples`
/// (each a multiple of ||X_true||).  Asserts relative recovery error <= 1e-8
/// for multiples >= 1 and an active constraint (||X*|| = delta to 1e-8
/// relative) for multiples < 1.
ExperimentReport run_recover(std::uint64_t seed, std::size_t size,
                             const std::vector<double>& multiples);

/// Perturbed right-hand-side protocol on the size-5 recovery instance:
/// E_pp = f(X_true) + E_p with ||E_p|| = perturb_scale * ||X_true||.  For
/// radius multiples >= 1, X_true stays feasible, so the converged residual
/// must not exceed ||E_p|| (up to 1e-8 slack); every interior phase must grow
/// ||X_i|| strictly.  perturb_scale = 0 degenerates to the recover protocol.
ExperimentReport run_perturb(std::uint64_t seed, double perturb_scale,
                             const std::vector<double>& multiples = {0.5, 1.0, 1.5, 2.0});

/// Radius sweep on a singular, inconsistent two-sided instance: solves on a
/// linear grid of grid_points radii spanning [lo, hi] times the norm of the
/// unconstrained minimum-norm least-squares solution (computed by the dense
/// reference path).  Asserts the sweep crosses from boundary to interior
/// exactly once.
ExperimentReport run_boundary_sweep(std::size_t size, std::uint64_t seed,
                                    std::size_t grid_points = 20, double lo = 0.1,
                                    double hi = 2.0);

/// Independent-route comparison: for each family and trial, generates a small
/// random instance (alternating consistent / inconsistent right-hand sides,
/// dimensions drawn from {2..5}), and compares the solver's objective
/// 0.5*||f(X*)-E||^2 against the dense reference solution at radii
/// {0.5, 1, 2} times the unconstrained-solution norm.  Objectives must agree
/// to 1e-8 relative.  An empty family list means all ten families.
ExperimentReport run_oracle_check(const std::vector<Family>& families, std::size_t trials,
                                  std::uint64_t seed);

/// Runs the solve a manifest describes.  command "solve" builds the equation
/// from the referenced matrix files (relative paths resolve against
/// base_dir); command "recover" generates the 5x5 construct-and-recover
/// instance from the manifest seed, records the relative recovery error, and
/// asserts it within 1e-10 whenever the radius admits the true solution.
/// Other commands raise ValueError.  The manifest's report/trace paths are
/// left to the caller.
ExperimentReport run_manifest(const RunManifest& manifest, const std::string& base_dir = "",
                              std::vector<TraceRecord>* trace_out = nullptr);

/// Multiband fusion pipeline: obtain a scene (synthetic from the seed, or
/// read from input_stack), degrade it, build the reduced two-sided equation,
/// solve, lift, and score against the scene.  Stage failures are rethrown
/// with the stage name ("degrade", "build", "fuse", "metrics", ...) prefixed.
/// When out_dir is non-empty the fused stack, a metrics JSON, and one PNG per
/// band are written there.  The report carries the reduced-equation solve
/// record; metrics land in the aggregates.  The exact-reconstruction bound
/// (relative equation residual within 1e-8) is asserted only in the regime
/// where it holds: no observation noise and a full-rank subspace.
struct FusePipelineConfig {
    std::size_t bands = 8;
    std::size_t height = 32;
    std::size_t width = 32;
    std::size_t spectral_rows = 3;   ///< rows of the spectral response
    std::size_t stride = 2;          ///< grid decimation stride
    std::size_t rank = 0;            ///< subspace rank; 0 means all bands
    double noise_m_variance = 0.0;
    double noise_h_variance = 0.0;
    std::uint64_t seed = 0;
    bool identity_model = false;     ///< pass-through observation model
    bool dense_c2 = false;           ///< densify the structured right factor
    std::string input_stack;         ///< optional scene file (overrides synthesis)
    std::string out_dir;             ///< optional artifact directory
    SolverConfig solver;
};
ExperimentReport run_fuse(const FusePipelineConfig& cfg);

/// JSON-lines serialization: a header line (the only line carrying the
/// timestamp), one line per record, and a closing summary line with the
/// aggregates.  Everything except the timestamp is deterministic for a given
/// report.
void write_report_jsonl(std::ostream& out, const ExperimentReport& report,
                        const std::string& timestamp);
void write_report_jsonl(const std::string& path, const ExperimentReport& report);

/// CSV serialization of the same report: one header row, one row per record,
/// then aggregate rows ("aggregate,<name>,<value>") and a final
/// "summary,all_ok,<0|1>" row.  Fully deterministic.
void write_report_csv(std::ostream& out, const ExperimentReport& report);
void write_report_csv(const std::string& path, const ExperimentReport& report);

/// "YYYY-MM-DDTHH:MM:SSZ" for the report header.
std::string current_timestamp_utc();

/// Per-iteration trace as CSV: k, branch, norm_r, norm_x, delta_k, gamma_k.
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);
void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace);

}  // namespace glme
