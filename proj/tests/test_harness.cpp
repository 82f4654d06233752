#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bsscov/covariation.hpp"
#include "bsscov/csv.hpp"
#include "bsscov/errors.hpp"
#include "bsscov/experiments.hpp"
#include "bsscov/report.hpp"
#include "bsscov/scaling.hpp"

using namespace bsscov;
namespace fs = std::filesystem;

namespace {
struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("bsscov_test_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};
} // namespace

TEST_CASE("path export/ingest round trip") {
    TempDir tmp;
    const auto spec = KernelSpec::identical_diagonal(2, 0.25, 1.0);
    const auto paths = simulate_bss(spec, BssModel::unit_sigma(BssVariant::ElementwiseX, 2),
                                    GridSpec(1.0, 64), 1, 5);
    const fs::path file = tmp.path / "paths.csv";
    export_paths(paths[0], file);
    const PathBundle back = ingest_paths(file);
    CHECK(back.grid.n == 64);
    CHECK(back.components() == 2);
    CHECK((back.levels() - paths[0].levels()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(back.labels == paths[0].labels);
}

TEST_CASE("ingest rejects malformed files with located errors") {
    TempDir tmp;
    const fs::path empty = tmp.path / "empty.csv";
    std::ofstream(empty.string()) << "";
    CHECK_THROWS_AS(ingest_paths(empty), SchemaError);

    const fs::path nan_file = tmp.path / "nan.csv";
    std::ofstream(nan_file.string()) << "time,C1\n0,0\n0.5,nan\n1.0,0.2\n";
    try {
        ingest_paths(nan_file);
        CHECK(false);
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
        CHECK(std::string(e.what()).find("column 2") != std::string::npos);
    }

    const fs::path ragged = tmp.path / "ragged.csv";
    std::ofstream(ragged.string()) << "time,C1\n0,0\n0.5\n";
    CHECK_THROWS_AS(ingest_paths(ragged), SchemaError);

    const fs::path nonuni = tmp.path / "nonuni.csv";
    std::ofstream(nonuni.string()) << "time,C1\n0,0\n0.5,0.1\n1.2,0.2\n";
    CHECK_THROWS_AS(ingest_paths(nonuni), NonUniformGrid);

    const fs::path backwards = tmp.path / "backwards.csv";
    std::ofstream(backwards.string()) << "time,C1\n0,0\n-0.5,0.1\n";
    CHECK_THROWS_AS(ingest_paths(backwards), NonUniformGrid);
}

TEST_CASE("experiment config JSON round trip") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentConfig::Kind::CLT;
    cfg.spec = KernelSpec(2, {GammaKernel(0.25, 1.0), std::nullopt, std::nullopt,
                              GammaKernel(0.1, 2.0)});
    cfg.sigma = Eigen::MatrixXd::Identity(2, 2);
    cfg.n = 123;
    cfg.M = 7;
    cfg.seed = 42;
    const auto j = cfg.to_json();
    const auto back = ExperimentConfig::from_json(j);
    CHECK(back.kind == cfg.kind);
    CHECK(back.n == 123);
    CHECK(back.M == 7);
    CHECK(back.seed == 42);
    CHECK(back.spec.p == 2);
    CHECK(!back.spec.at(1, 2).has_value());
    CHECK(back.spec.at(2, 2)->lambda == 2.0);
    CHECK(back.to_json() == j);
}

TEST_CASE("reports are deterministic and carry provenance") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentConfig::Kind::FeasibleRatio;
    cfg.spec = KernelSpec::single(0.1, 1.0);
    cfg.variant = BssVariant::ElementwiseX;
    cfg.n = 64;
    cfg.M = 40;
    cfg.seed = 7;
    const auto rep1 = run_experiment(cfg);
    const auto rep2 = run_experiment(cfg);
    CHECK(rep1.to_json(true).dump() == rep2.to_json(true).dump());
    CHECK(!rep1.records.empty());
    for (const auto& r : rep1.records) {
        CHECK(!r.provenance.empty());
        CHECK(r.provenance.find('#') != std::string::npos);
    }
    // volatile timing field only appears in the non-canonical form
    CHECK(!rep1.to_json(true).contains("wall_ms"));
    CHECK(rep1.to_json(false).contains("wall_ms"));
}

TEST_CASE("emit_report writes the four artifacts") {
    TempDir tmp;
    ExperimentReport rep;
    rep.kind = "demo";
    rep.config_echo = {{"x", 1}};
    rep.records.push_back(make_z_check("a", 1.0, 1.0, 0.1, 3.0, "demo", "f"));
    rep.environment = environment_fingerprint();
    rep.wall_ms = 12.5;
    emit_report(rep, tmp.path, "demo");
    CHECK(fs::exists(tmp.path / "demo.report.json"));
    CHECK(fs::exists(tmp.path / "demo.table.txt"));
    CHECK(fs::exists(tmp.path / "demo.plotdata.csv"));
    CHECK(fs::exists(tmp.path / "demo.timing.json"));
}

TEST_CASE("lln experiment: small run passes and ladder shrinks") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentConfig::Kind::LLN;
    cfg.spec = KernelSpec(2, {GammaKernel(-0.25, 1.0), GammaKernel(-0.25, 2.0),
                              GammaKernel(-0.25, 0.5), GammaKernel(-0.25, 1.5)});
    cfg.regime = "CaseII-bar";
    cfg.M = 60;
    cfg.checkpoints = {0.5, 1.0};
    cfg.n_ladder = {64, 128};
    cfg.seed = 11;
    const auto rep = run_lln_experiment(cfg);
    CHECK(rep.all_pass());
}

TEST_CASE("lln experiment rejects unsupported regimes") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentConfig::Kind::LLN;
    cfg.regime = "CaseI";
    CHECK_THROWS_AS(run_lln_experiment(cfg), RegimeMismatch);
}

TEST_CASE("assumption audit accepts the validity range and rejects outside") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentConfig::Kind::AssumptionAudit;
    cfg.delta_grid = {-0.25, 0.25, -0.6, 0.6};
    const auto rep = run_assumption_audit(cfg);
    CHECK(rep.all_pass());
    bool saw_accept = false, saw_reject = false;
    for (const auto& r : rep.records) {
        if (r.name.find("accepted") != std::string::npos) saw_accept = true;
        if (r.name.find("rejected") != std::string::npos) saw_reject = true;
    }
    CHECK(saw_accept);
    CHECK(saw_reject);
}

TEST_CASE("drift robustness: statistic shifts only mildly under a smooth drift") {
    // the drift-product terms vanish at the CLT scale for delta below the
    // boundary; with shared seeds the paired difference stays small
    const auto spec = KernelSpec::single(0.1, 1.0);
    const long n = 500;
    const GridSpec grid(1.0, n);
    BssModel plain = BssModel::unit_sigma(BssVariant::ElementwiseX, 1);
    BssModel drifted = plain;
    drifted.drift[0] = DriftModel::smooth_integrated(0.5, 0.7);
    const auto scaling = tau_tilde_theoretical(spec, Eigen::MatrixXd::Ones(1, 1), n);
    const auto bias = bias_term(spec, Eigen::MatrixXd::Ones(1, 1), scaling, {1.0},
                                BiasScenario::CaseIITilde);
    const auto a = simulate_bss(spec, plain, grid, 20, 3);
    const auto b = simulate_bss(spec, drifted, grid, 20, 3);
    double max_shift = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) {
        const auto ca = realised_covariation(a[m], scaling);
        const auto cb = realised_covariation(b[m], scaling);
        const double sa = clt_statistic(ca, bias)(0, 0);
        const double sb = clt_statistic(cb, bias)(0, 0);
        max_shift = std::max(max_shift, std::abs(sa - sb));
    }
    CHECK(max_shift < 0.5); // well inside one standard deviation of the limit law
}

TEST_CASE("formula hash is stable and distinguishes formulas") {
    CHECK(formula_hash("a") == formula_hash("a"));
    CHECK(formula_hash("a") != formula_hash("b"));
    CHECK(formula_hash("a").size() == 16);
}
