// Command-line front end for the norm-constrained matrix-equation solver:
// file-driven and generated solves, the experiment protocols, reference
// cross-checks, and the multiband fusion pipeline.
//
// Exit codes: 0 when every asserted bound held, 1 when a report finished with
// failed bounds, 2 on errors (I/O, parsing, solver failures).

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glme/equation.hpp"
#include "glme/errors.hpp"
#include "glme/experiments.hpp"
#include "glme/gltr.hpp"
#include "glme/image_io.hpp"
#include "glme/manifest.hpp"
#include "glme/matrix_io.hpp"
#include "glme/metrics.hpp"
#include "glme/random_problems.hpp"

namespace {

/// Options shared by every report-producing subcommand.
struct CommonOpts {
    double delta = 200.0;
    double eps = 1e-14;
    std::size_t max_iter = 0;
    std::string variant = "simplified41";
    std::uint64_t seed = 0;
    std::string report_path;
    std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--delta", opts.delta, "Trust-region radius")->capture_default_str();
    cmd->add_option("--eps", opts.eps, "Convergence tolerance")->capture_default_str();
    cmd->add_option("--max-iter", opts.max_iter,
                    "Iteration cap (0 = 4*m*n, the dimension-based default)")
        ->capture_default_str();
    cmd->add_option("--variant", opts.variant, "Recurrence variant")
        ->check(CLI::IsMember({"basic31", "simplified41"}))
        ->capture_default_str();
    cmd->add_option("--seed", opts.seed, "Random seed")->capture_default_str();
    cmd->add_option("--report", opts.report_path,
                    "Write the report here instead of standard output");
    cmd->add_option("--format", opts.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
}

glme::SolverConfig solver_config(const CommonOpts& opts) {
    glme::SolverConfig cfg;
    cfg.delta = opts.delta;
    cfg.eps = opts.eps;
    cfg.max_iter = opts.max_iter;
    cfg.variant = glme::variant_from_name(opts.variant);
    return cfg;
}

/// Writes the report to the requested destination in the requested format.
void emit_report(const glme::ExperimentReport& report, const CommonOpts& opts) {
    if (opts.format == "csv") {
        if (opts.report_path.empty()) {
            glme::write_report_csv(std::cout, report);
        } else {
            glme::write_report_csv(opts.report_path, report);
        }
        return;
    }
    if (opts.report_path.empty()) {
        glme::write_report_jsonl(std::cout, report, glme::current_timestamp_utc());
    } else {
        glme::write_report_jsonl(opts.report_path, report);
    }
}

/// Prints failed records to stderr and maps the report onto the exit code.
int finish(const glme::ExperimentReport& report, const CommonOpts& opts) {
    emit_report(report, opts);
    if (report.all_ok) return 0;
    for (const glme::RunRecord& rec : report.records) {
        if (!rec.bounds_ok) {
            std::cerr << "bound failed [" << rec.label << "]: " << rec.note << '\n';
        }
    }
    return 1;
}

std::vector<glme::Family> parse_families(const std::string& csv) {
    std::vector<glme::Family> families;
    if (csv.empty() || csv == "all") return families;  // empty selects all
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t comma = csv.find(',', start);
        const std::string token =
            csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!token.empty()) families.push_back(glme::family_from_name(token));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return families;
}

/// Which solver flags the user spelled out (those override a manifest's cfg).
struct ExplicitFlags {
    bool delta = false;
    bool eps = false;
    bool max_iter = false;
    bool variant = false;
};

int cmd_solve(const CommonOpts& opts, const ExplicitFlags& given,
              const std::string& manifest_path, const std::string& family_name,
              std::size_t rows, std::size_t cols, bool inconsistent,
              const std::string& trace_path, bool auto_retry) {
    glme::ExperimentReport report;
    std::vector<glme::TraceRecord> trace;
    std::string trace_dest = trace_path;

    if (!manifest_path.empty()) {
        glme::RunManifest manifest = glme::load_manifest(manifest_path);
        if (given.delta) manifest.cfg.delta = opts.delta;
        if (given.eps) manifest.cfg.eps = opts.eps;
        if (given.max_iter) manifest.cfg.max_iter = opts.max_iter;
        if (given.variant) manifest.cfg.variant = glme::variant_from_name(opts.variant);
        const std::string base_dir =
            std::filesystem::path(manifest_path).parent_path().string();
        report = glme::run_manifest(manifest, base_dir, &trace);
        if (trace_dest.empty()) trace_dest = manifest.trace_path;
        if (!report.records.empty() && auto_retry &&
            report.records.back().branch == glme::Branch::Boundary) {
            for (double factor : {2.0, 3.0}) {
                glme::RunManifest retry = manifest;
                retry.cfg.delta = manifest.cfg.delta * factor;
                glme::ExperimentReport again = glme::run_manifest(retry, base_dir, &trace);
                glme::RunRecord rec = again.records.at(0);
                rec.label += " (radius x" + std::to_string(static_cast<int>(factor)) + ")";
                report.all_ok = report.all_ok && rec.bounds_ok;
                const bool interior = rec.branch == glme::Branch::Interior;
                report.records.push_back(std::move(rec));
                if (interior) break;
            }
        }
        if (!trace_dest.empty()) glme::write_trace_csv(trace_dest, trace);
        CommonOpts out = opts;
        if (out.report_path.empty()) out.report_path = manifest.report_path;
        return finish(report, out);
    }

    if (family_name.empty()) {
        throw glme::ValueError("solve needs either --manifest or --family");
    }
    const glme::Family family = glme::family_from_name(family_name);
    const std::size_t n = cols == 0 ? rows : cols;
    const glme::GeneratedProblem gen =
        glme::random_instance(family, rows, n, opts.seed, !inconsistent);
    report.command = "solve";
    report.seed = opts.seed;
    glme::SolverConfig cfg = solver_config(opts);
    const glme::DenseMatrix* x_true = inconsistent ? nullptr : &gen.x_true;
    glme::RunRecord rec =
        glme::solve_record(gen.spec, gen.e, cfg, family_name, x_true, &trace);
    report.all_ok = rec.bounds_ok;
    const bool on_boundary = rec.branch == glme::Branch::Boundary;
    report.records.push_back(std::move(rec));
    if (auto_retry && on_boundary) {
        for (double factor : {2.0, 3.0}) {
            glme::SolverConfig retry = cfg;
            retry.delta = cfg.delta * factor;
            glme::RunRecord again = glme::solve_record(
                gen.spec, gen.e, retry,
                family_name + " (radius x" + std::to_string(static_cast<int>(factor)) + ")",
                x_true, &trace);
            report.all_ok = report.all_ok && again.bounds_ok;
            const bool interior = again.branch == glme::Branch::Interior;
            report.records.push_back(std::move(again));
            if (interior) break;
        }
    }
    report.aggregates["delta"] = cfg.delta;
    if (!trace_dest.empty()) glme::write_trace_csv(trace_dest, trace);
    return finish(report, opts);
}

int cmd_metrics(const std::string& reference_path, const std::string& estimate_path,
                double ratio, const std::string& report_path) {
    const glme::ImageStack reference = glme::read_image_stack(reference_path);
    const glme::ImageStack estimate = glme::read_image_stack(estimate_path);
    const glme::FusionMetrics metrics = glme::compute_metrics(reference, estimate, ratio);

    nlohmann::json out;
    out["sam"] = metrics.sam;
    out["sam_skipped_pixels"] = metrics.sam_skipped_pixels;
    out["ergas"] = metrics.ergas;
    out["q_index"] = metrics.q_index;
    out["psnr_per_band"] = nlohmann::json::array();
    for (double p : metrics.psnr_per_band) {
        if (std::isfinite(p)) {
            out["psnr_per_band"].push_back(p);
        } else {
            out["psnr_per_band"].push_back("infinity");
        }
    }
    if (report_path.empty()) {
        std::cout << out.dump(2) << '\n';
    } else {
        std::ofstream file(report_path, std::ios::binary);
        if (!file) throw glme::IoError("cannot open for writing: " + report_path);
        file << out.dump(2) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Norm-constrained least-squares solver for generalized linear matrix equations"};
    app.require_subcommand(1);

    // --- solve ---------------------------------------------------------
    CommonOpts solve_opts;
    std::string solve_manifest;
    std::string solve_family;
    std::size_t solve_rows = 5;
    std::size_t solve_cols = 0;
    bool solve_inconsistent = false;
    std::string solve_trace;
    bool solve_auto_retry = false;
    CLI::App* solve = app.add_subcommand(
        "solve", "Solve one equation, from a manifest file or a seeded generator");
    add_common(solve, solve_opts);
    solve->add_option("--manifest", solve_manifest,
                      "Manifest JSON describing the problem (see README)");
    solve->add_option("--family", solve_family,
                      "Generate a seeded instance of this equation family");
    solve->add_option("--size", solve_rows, "Generated rows (and columns unless --cols)")
        ->capture_default_str();
    solve->add_option("--cols", solve_cols, "Generated columns (default: same as --size)");
    solve->add_flag("--inconsistent", solve_inconsistent,
                    "Generate a right-hand side outside the operator range");
    solve->add_option("--trace", solve_trace, "Write the per-iteration trace CSV here");
    solve->add_flag("--auto-retry-delta", solve_auto_retry,
                    "On a boundary solution, retry once at 2x and once at 3x the radius");

    // --- recover -------------------------------------------------------
    CommonOpts recover_opts;
    std::size_t recover_size = 5;
    std::vector<double> recover_multiples{0.5, 0.75, 1.0, 1.5, 2.0};
    CLI::App* recover = app.add_subcommand(
        "recover", "Construct-and-recover protocol: known integer solution, radius sweep");
    add_common(recover, recover_opts);
    recover->add_option("--size", recover_size, "Square size of the generated problem")
        ->capture_default_str();
    recover
        ->add_option("--multiples", recover_multiples,
                     "Radii as multiples of the true-solution norm")
        ->delimiter(',')
        ->capture_default_str();

    // --- perturb -------------------------------------------------------
    CommonOpts perturb_opts;
    double perturb_scale = 0.1;
    std::vector<double> perturb_multiples{0.5, 1.0, 1.5, 2.0};
    CLI::App* perturb = app.add_subcommand(
        "perturb", "Perturbed right-hand-side protocol on the recovery instance");
    add_common(perturb, perturb_opts);
    perturb
        ->add_option("--perturb-scale", perturb_scale,
                     "Perturbation norm as a multiple of the true-solution norm")
        ->capture_default_str();
    perturb
        ->add_option("--multiples", perturb_multiples,
                     "Radii as multiples of the true-solution norm")
        ->delimiter(',')
        ->capture_default_str();

    // --- boundary-sweep --------------------------------------------------
    CommonOpts sweep_opts;
    std::size_t sweep_size = 12;
    std::size_t sweep_points = 20;
    double sweep_lo = 0.1;
    double sweep_hi = 2.0;
    CLI::App* sweep = app.add_subcommand(
        "boundary-sweep",
        "Radius sweep on an inconsistent instance, expecting one boundary-to-interior switch");
    add_common(sweep, sweep_opts);
    sweep->add_option("--size", sweep_size, "Square size of the generated instance")
        ->capture_default_str();
    sweep->add_option("--grid-points", sweep_points, "Number of radii in the sweep")
        ->capture_default_str();
    sweep->add_option("--lo", sweep_lo, "Smallest radius multiple")->capture_default_str();
    sweep->add_option("--hi", sweep_hi, "Largest radius multiple")->capture_default_str();

    // --- oracle-check ----------------------------------------------------
    CommonOpts oracle_opts;
    std::string oracle_families = "all";
    std::size_t oracle_trials = 20;
    CLI::App* oracle = app.add_subcommand(
        "oracle-check",
        "Compare solver objectives against the dense reference across equation families");
    add_common(oracle, oracle_opts);
    oracle
        ->add_option("--families", oracle_families,
                     "Comma-separated family names, or 'all'")
        ->capture_default_str();
    oracle->add_option("--trials", oracle_trials, "Instances per family")
        ->capture_default_str();

    // --- fuse ------------------------------------------------------------
    CommonOpts fuse_opts;
    glme::FusePipelineConfig fuse_cfg;
    std::string fuse_out_dir = "glme_fuse_out";
    CLI::App* fuse = app.add_subcommand(
        "fuse", "Degrade a multiband scene, rebuild it through the reduced equation, score it");
    add_common(fuse, fuse_opts);
    fuse->add_option("--bands", fuse_cfg.bands, "Bands of the synthetic scene")
        ->capture_default_str();
    fuse->add_option("--height", fuse_cfg.height, "Scene height")->capture_default_str();
    fuse->add_option("--width", fuse_cfg.width, "Scene width")->capture_default_str();
    fuse->add_option("--spectral-rows", fuse_cfg.spectral_rows,
                     "Rows of the spectral response")
        ->capture_default_str();
    fuse->add_option("--stride", fuse_cfg.stride, "Grid decimation stride")
        ->capture_default_str();
    fuse->add_option("--rank", fuse_cfg.rank, "Subspace rank (0 = all bands)")
        ->capture_default_str();
    fuse->add_option("--noise-m", fuse_cfg.noise_m_variance,
                     "Gaussian noise variance on the mixed view")
        ->capture_default_str();
    fuse->add_option("--noise-h", fuse_cfg.noise_h_variance,
                     "Gaussian noise variance on the blurred view")
        ->capture_default_str();
    fuse->add_flag("--identity-model", fuse_cfg.identity_model,
                   "Pass-through observation model instead of the desk-scale default");
    fuse->add_flag("--dense-c2", fuse_cfg.dense_c2,
                   "Densify the structured right factor before solving");
    fuse->add_option("--input", fuse_cfg.input_stack,
                     "Read the scene from this stack file instead of synthesizing");
    fuse->add_option("--out-dir", fuse_out_dir,
                     "Directory for the fused stack, metrics JSON, and per-band PNGs")
        ->capture_default_str();

    // --- metrics -----------------------------------------------------------
    std::string metrics_reference;
    std::string metrics_estimate;
    double metrics_ratio = 1.0;
    std::string metrics_report;
    CLI::App* metrics =
        app.add_subcommand("metrics", "Score one image stack against a reference stack");
    metrics->add_option("--reference", metrics_reference, "Reference stack file")
        ->required();
    metrics->add_option("--estimate", metrics_estimate, "Estimate stack file")->required();
    metrics
        ->add_option("--ratio", metrics_ratio,
                     "Resolution ratio between degraded and fused grids")
        ->capture_default_str();
    metrics->add_option("--report", metrics_report,
                        "Write the metrics JSON here instead of standard output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            ExplicitFlags given;
            given.delta = solve->count("--delta") > 0;
            given.eps = solve->count("--eps") > 0;
            given.max_iter = solve->count("--max-iter") > 0;
            given.variant = solve->count("--variant") > 0;
            return cmd_solve(solve_opts, given, solve_manifest, solve_family, solve_rows,
                             solve_cols, solve_inconsistent, solve_trace, solve_auto_retry);
        }
        if (recover->parsed()) {
            return finish(glme::run_recover(recover_opts.seed, recover_size, recover_multiples),
                          recover_opts);
        }
        if (perturb->parsed()) {
            return finish(glme::run_perturb(perturb_opts.seed, perturb_scale, perturb_multiples),
                          perturb_opts);
        }
        if (sweep->parsed()) {
            return finish(glme::run_boundary_sweep(sweep_size, sweep_opts.seed, sweep_points,
                                                   sweep_lo, sweep_hi),
                          sweep_opts);
        }
        if (oracle->parsed()) {
            return finish(glme::run_oracle_check(parse_families(oracle_families), oracle_trials,
                                                 oracle_opts.seed),
                          oracle_opts);
        }
        if (fuse->parsed()) {
            fuse_cfg.seed = fuse_opts.seed;
            fuse_cfg.solver = solver_config(fuse_opts);
            fuse_cfg.out_dir = fuse_out_dir;
            return finish(glme::run_fuse(fuse_cfg), fuse_opts);
        }
        if (metrics->parsed()) {
            return cmd_metrics(metrics_reference, metrics_estimate, metrics_ratio,
                               metrics_report);
        }
    } catch (const glme::Error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    }
    return 0;
}
