#include <doctest.h>

#include <fstream>
#include <string>
#include <vector>

#include "glme/dense_matrix.hpp"
#include "glme/errors.hpp"
#include "glme/experiments.hpp"
#include "glme/manifest.hpp"
#include "glme/matrix_io.hpp"
#include "glme/random_problems.hpp"
#include "glme/sparse_matrix.hpp"
#include "glme/structured_factor.hpp"

#include "support/temp_dir.hpp"

using glme::DenseMatrix;
using glme::Family;
using glme::RunManifest;

namespace {

struct TempDir : glme_test::TempDir {
    TempDir() : glme_test::TempDir("glme_manifest_test") {}
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("variant names round trip") {
    CHECK(glme::variant_name(glme::Variant::Basic31) == "basic31");
    CHECK(glme::variant_name(glme::Variant::Simplified41) == "simplified41");
    CHECK(glme::variant_from_name("basic31") == glme::Variant::Basic31);
    CHECK(glme::variant_from_name("simplified41") == glme::Variant::Simplified41);
    CHECK_THROWS_AS(glme::variant_from_name("fancy"), glme::ValueError);
}

TEST_CASE("family slot lists match the builder signatures") {
    using SV = std::vector<std::string>;
    CHECK(glme::family_slots(Family::AXB) == SV{"a", "b"});
    CHECK(glme::family_slots(Family::ClassicalSylvester) == SV{"a", "d"});
    CHECK(glme::family_slots(Family::GeneralizedSylvester) == SV{"a", "b", "c", "d"});
    CHECK(glme::family_slots(Family::Stein) == SV{"a", "b"});
    CHECK(glme::family_slots(Family::TClassical) == SV{"a", "d"});
    CHECK(glme::family_slots(Family::TGeneralized) == SV{"a", "b", "c", "d"});
    CHECK(glme::family_slots(Family::TStein) == SV{"a", "b"});
    CHECK(glme::family_slots(Family::LyapunovDiscrete) == SV{"a"});
    CHECK(glme::family_slots(Family::LyapunovContinuous) == SV{"a"});
    CHECK(glme::family_slots(Family::StructuredSylvester) == SV{"a", "d"});
    CHECK_THROWS_AS(glme::family_slots(Family::Custom), glme::ValueError);
}

TEST_CASE("matrix files load by extension") {
    TempDir dir;
    glme::RandomStream rng(2);
    const DenseMatrix a = glme::random_dense(rng, 3, 4);

    const std::string csv = dir.file("a.csv");
    glme::write_csv(csv, a);
    CHECK(glme::max_abs_diff(glme::load_matrix_file(csv), a) == 0.0);

    const std::string mtx = dir.file("a.mtx");
    glme::write_matrix_market(mtx, glme::SparseMatrix::from_dense(a));
    CHECK(glme::max_abs_diff(glme::load_matrix_file(mtx), a) == 0.0);

    const std::string odd = dir.file("a.dat");
    write_text(odd, "1,2\n");
    CHECK_THROWS_WITH_AS(glme::load_matrix_file(odd),
                         doctest::Contains("a.dat"), glme::IoError);

    CHECK_THROWS_WITH_AS(glme::load_matrix_file(dir.file("missing.csv")),
                         doctest::Contains("missing.csv"), glme::IoError);
}

TEST_CASE("manifests round trip through JSON") {
    TempDir dir;
    RunManifest m;
    m.command = "solve";
    m.family = Family::GeneralizedSylvester;
    m.matrix_paths = {{"a", "a.csv"}, {"b", "b.mtx"}, {"c", "c.csv"},
                      {"d", "d.csv"}, {"e", "e.csv"}};
    m.cfg.delta = 3.25;
    m.cfg.eps = 1e-12;
    m.cfg.max_iter = 77;
    m.cfg.variant = glme::Variant::Basic31;
    m.seed = 42;
    m.report_path = "out/report.jsonl";
    m.trace_path = "out/trace.csv";

    const std::string path = dir.file("run.json");
    glme::save_manifest(path, m);
    const RunManifest r = glme::load_manifest(path);

    CHECK(r.command == m.command);
    CHECK(r.family == m.family);
    CHECK(r.matrix_paths == m.matrix_paths);
    CHECK(r.cfg.delta == m.cfg.delta);
    CHECK(r.cfg.eps == m.cfg.eps);
    CHECK(r.cfg.max_iter == m.cfg.max_iter);
    CHECK(r.cfg.variant == m.cfg.variant);
    CHECK(r.seed == m.seed);
    CHECK(r.report_path == m.report_path);
    CHECK(r.trace_path == m.trace_path);
}

TEST_CASE("manifest defaults apply when optional keys are absent") {
    TempDir dir;
    const std::string path = dir.file("bare.json");
    write_text(path, R"({"family": "axb", "matrices": {"a": "a.csv", "b": "b.csv",
                         "e": "e.csv"}})");
    const RunManifest m = glme::load_manifest(path);
    CHECK(m.family == Family::AXB);
    CHECK(m.cfg.delta == 200.0);
    CHECK(m.cfg.eps == 1e-14);
    CHECK(m.cfg.max_iter == 0);
    CHECK(m.cfg.variant == glme::Variant::Simplified41);
    CHECK(m.seed == 0);
    CHECK(m.report_path.empty());
    CHECK(m.trace_path.empty());
}

TEST_CASE("manifest errors name the file") {
    TempDir dir;

    CHECK_THROWS_WITH_AS(glme::load_manifest(dir.file("nope.json")),
                         doctest::Contains("nope.json"), glme::IoError);

    const std::string bad = dir.file("bad.json");
    write_text(bad, "{family: broken");
    CHECK_THROWS_WITH_AS(glme::load_manifest(bad), doctest::Contains("bad.json"),
                         glme::IoError);

    const std::string nofam = dir.file("nofam.json");
    write_text(nofam, R"({"matrices": {}})");
    CHECK_THROWS_WITH_AS(glme::load_manifest(nofam), doctest::Contains("family"),
                         glme::IoError);

    const std::string nomat = dir.file("nomat.json");
    write_text(nomat, R"({"family": "axb"})");
    CHECK_THROWS_WITH_AS(glme::load_manifest(nomat), doctest::Contains("matrices"),
                         glme::IoError);

    const std::string badvar = dir.file("badvar.json");
    write_text(badvar, R"({"family": "axb", "matrices": {},
                           "cfg": {"variant": "mystery"}})");
    CHECK_THROWS_AS(glme::load_manifest(badvar), glme::ValueError);
}

TEST_CASE("problems build from manifest matrix files") {
    TempDir dir;
    glme::RandomStream rng(11);
    const DenseMatrix a = glme::random_dense(rng, 2, 2);
    const DenseMatrix d = glme::random_dense(rng, 3, 3);
    const DenseMatrix e = glme::random_dense(rng, 2, 3);
    glme::write_csv(dir.file("a.csv"), a);
    glme::write_matrix_market(dir.file("d.mtx"), glme::SparseMatrix::from_dense(d));
    glme::write_csv(dir.file("e.csv"), e);

    RunManifest m;
    m.family = Family::ClassicalSylvester;
    m.matrix_paths = {{"a", "a.csv"}, {"d", "d.mtx"}, {"e", "e.csv"}};

    // Relative paths resolve against the provided base directory.
    const glme::ManifestProblem problem = glme::build_problem(m, dir.path.string());
    CHECK(glme::max_abs_diff(problem.e, e) == 0.0);

    const glme::EquationSpec direct = glme::EquationSpec::classical_sylvester(
        glme::StructuredFactor::dense(a), glme::StructuredFactor::dense(d));
    const DenseMatrix x = glme::random_dense(rng, 2, 3);
    CHECK(glme::max_abs_diff(problem.spec.apply_f(x), direct.apply_f(x)) == 0.0);

    // A missing slot is reported by name.
    m.matrix_paths.erase("d");
    CHECK_THROWS_WITH_AS(glme::build_problem(m, dir.path.string()),
                         doctest::Contains("'d'"), glme::IoError);

    // A slot pointing at an absent file is reported by path.
    m.matrix_paths["d"] = "gone.csv";
    CHECK_THROWS_WITH_AS(glme::build_problem(m, dir.path.string()),
                         doctest::Contains("gone.csv"), glme::IoError);
}

TEST_CASE("an identity equation manifest solves in one interior step") {
    TempDir dir;
    const DenseMatrix eye = DenseMatrix::identity(2);
    glme::RandomStream rng(4);
    const DenseMatrix e = glme::random_dense(rng, 2, 2);
    glme::write_csv(dir.file("a.csv"), eye);
    glme::write_csv(dir.file("b.csv"), eye);
    glme::write_csv(dir.file("e.csv"), e);

    RunManifest m;
    m.family = Family::AXB;
    m.matrix_paths = {{"a", "a.csv"}, {"b", "b.csv"}, {"e", "e.csv"}};
    m.cfg.delta = 2.0 * glme::frob_norm(e);

    const glme::ManifestProblem problem = glme::build_problem(m, dir.path.string());
    const glme::RunRecord rec =
        glme::solve_record(problem.spec, problem.e, m.cfg, "identity");
    CHECK(rec.branch == glme::Branch::Interior);
    CHECK(rec.iterations == 1);
    CHECK(rec.bounds_ok);
    CHECK(rec.residual <= 1e-12 * glme::frob_norm(e));
}

TEST_CASE("run_manifest executes solve manifests end to end") {
    TempDir dir;
    const DenseMatrix eye = DenseMatrix::identity(2);
    glme::RandomStream rng(4);
    const DenseMatrix e = glme::random_dense(rng, 2, 2);
    glme::write_csv(dir.file("a.csv"), eye);
    glme::write_csv(dir.file("b.csv"), eye);
    glme::write_csv(dir.file("e.csv"), e);

    RunManifest m;
    m.command = "solve";
    m.family = Family::AXB;
    m.matrix_paths = {{"a", "a.csv"}, {"b", "b.csv"}, {"e", "e.csv"}};
    m.cfg.delta = 2.0 * glme::frob_norm(e);
    m.seed = 9;

    std::vector<glme::TraceRecord> trace;
    const glme::ExperimentReport report = glme::run_manifest(m, dir.path.string(), &trace);
    CHECK(report.command == "solve");
    CHECK(report.seed == 9);
    CHECK(report.all_ok);
    REQUIRE(report.records.size() == 1);
    CHECK(report.records[0].label == "axb");
    CHECK(report.records[0].branch == glme::Branch::Interior);
    CHECK(report.records[0].iterations == 1);
    CHECK(trace.size() == 1);
    CHECK(report.aggregates.at("delta") == m.cfg.delta);

    // An empty command means "solve".
    m.command.clear();
    CHECK(glme::run_manifest(m, dir.path.string()).command == "solve");
}

TEST_CASE("run_manifest executes generate-and-recover manifests") {
    const glme::GeneratedProblem gen = glme::recovery_instance(5, 31);
    const double x_norm = glme::frob_norm(gen.x_true);

    RunManifest m;
    m.command = "recover";
    m.seed = 31;
    m.cfg.delta = 2.0 * x_norm;

    const glme::ExperimentReport report = glme::run_manifest(m);
    CHECK(report.command == "recover");
    CHECK(report.all_ok);
    REQUIRE(report.records.size() == 1);
    REQUIRE(report.records[0].recovery_error.has_value());
    CHECK(*report.records[0].recovery_error <= 1e-10);
    CHECK(report.aggregates.at("x_true_norm") == doctest::Approx(x_norm).epsilon(1e-14));

    // A clipping radius keeps the run valid (the 1e-10 bound only applies
    // when the true solution is feasible).
    m.cfg.delta = 0.5 * x_norm;
    const glme::ExperimentReport clipped = glme::run_manifest(m);
    CHECK(clipped.all_ok);
    REQUIRE(clipped.records.size() == 1);
    CHECK(clipped.records[0].branch == glme::Branch::Boundary);

    m.command = "fuse";
    CHECK_THROWS_AS(static_cast<void>(glme::run_manifest(m)), glme::ValueError);
}
