// Command-line front end: simulate paths, run covariation / feasible
// statistics on simulated or ingested data, build asymptotic covariance
// matrices, audit kernel assumptions, and run full experiments from a
// JSON config.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "bsscov/asymptotics.hpp"
#include "bsscov/covariation.hpp"
#include "bsscov/csv.hpp"
#include "bsscov/errors.hpp"
#include "bsscov/experiments.hpp"
#include "bsscov/indexing.hpp"
#include "bsscov/kernel.hpp"
#include "bsscov/report.hpp"
#include "bsscov/scaling.hpp"
#include "bsscov/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bsscov::KernelSpec load_spec(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw bsscov::SchemaError("cannot open kernel spec " + file);
    json j;
    in >> j;
    return bsscov::kernel_spec_from_json(j);
}

bsscov::ScalingFactors scaling_for(const std::string& regime,
                                   const bsscov::KernelSpec& spec, long n,
                                   const bsscov::PathBundle* data) {
    if (regime == "CaseI") return bsscov::tau_case1(spec, n);
    if (regime == "CaseII-bar")
        return bsscov::tau_bar(spec, n, bsscov::TauBarMode::SumDiagonal);
    if (regime == "CaseII-tilde-theoretical")
        return bsscov::tau_tilde_theoretical(
            spec, Eigen::MatrixXd::Ones(spec.p, spec.p), n);
    if (regime == "CaseII-tilde-empirical") {
        if (!data)
            throw bsscov::RegimeMismatch("empirical scaling needs ingested data");
        return bsscov::tau_tilde_empirical(*data);
    }
    throw bsscov::RegimeMismatch("unknown scaling regime: " + regime);
}

void write_process(const bsscov::CovariationProcess& proc, const fs::path& file,
                   const json& header) {
    std::ofstream out(file);
    out.precision(17);
    out << "time";
    for (int k = 1; k <= proc.p; ++k)
        for (int l = 1; l <= k; ++l) out << ",v" << k << "_" << l;
    out << "\n";
    for (std::size_t i = 0; i < proc.times.size(); ++i) {
        out << proc.times[i];
        for (long v = 0; v < proc.vech.cols(); ++v)
            out << "," << proc.vech(static_cast<long>(i), v);
        out << "\n";
    }
    std::ofstream hs(file.string() + ".meta.json");
    hs << header.dump(2) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multivariate BSS realised-covariation toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 20260801;
    int threads = 1;
    std::string out_dir = ".";
    app.add_option("--seed", seed, "global RNG seed");
    app.add_option("--threads", threads, "worker threads for Monte Carlo paths");
    app.add_option("--out-dir", out_dir, "output directory");

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate Gaussian-core or BSS paths");
    std::string sim_spec, sim_variant = "X", sim_out = "paths.csv";
    double sim_T = 1.0, sim_warmup = 0.0;
    long sim_n = 500, sim_M = 1;
    bool sim_core = false, sim_riemann = false;
    sim->add_option("--spec", sim_spec, "kernel spec JSON file")->required();
    sim->add_option("--variant", sim_variant, "Y (matrix) or X (elementwise)");
    sim->add_option("-T", sim_T, "horizon");
    sim->add_option("-n", sim_n, "steps per unit time");
    sim->add_option("-M", sim_M, "number of paths");
    sim->add_option("--warmup", sim_warmup, "past window (Riemann scheme)");
    sim->add_flag("--gaussian-core", sim_core, "simulate the Gaussian core itself");
    sim->add_flag("--riemann", sim_riemann, "force the Riemann scheme");
    sim->add_option("--out", sim_out, "output CSV (path index appended)");

    // covariation
    auto* cov = app.add_subcommand("covariation", "realised covariation of a path file");
    std::string cov_spec, cov_in, cov_regime = "CaseII-tilde-empirical",
                          cov_out = "covariation.csv";
    cov->add_option("--spec", cov_spec, "kernel spec JSON (for theoretical scalings)");
    cov->add_option("--in", cov_in, "ingested path CSV")->required();
    cov->add_option("--scaling", cov_regime, "scaling regime");
    cov->add_option("--out", cov_out, "output table");

    // feasible
    auto* fea = app.add_subcommand("feasible", "tau-free ratio statistics of a path file");
    std::string fea_in, fea_out = "feasible";
    double fea_eps = -1.0;
    fea->add_option("--in", fea_in, "ingested path CSV")->required();
    fea->add_option("--eps", fea_eps, "left cutoff for the correlation ratio");
    fea->add_option("--out", fea_out, "output stem");

    // asymptotics
    auto* asy = app.add_subcommand("asymptotics", "build and persist a D matrix");
    std::string asy_spec, asy_scheme = "pair-square", asy_out = "dmatrix";
    bool asy_override = false;
    asy->add_option("--spec", asy_spec, "kernel spec JSON")->required();
    asy->add_option("--scheme", asy_scheme,
                    "pair-square | case1-full | case1-vech | scenario2-full | scenario2-vech");
    asy->add_flag("--override-assumptions", asy_override,
                  "skip the square-summability gate");
    asy->add_option("--out", asy_out, "output stem");

    // audit
    auto* aud = app.add_subcommand("audit", "assumption diagnostics over a delta grid");
    std::vector<double> aud_grid = {-0.25, -0.1, 0.1, 0.25, 0.4, -0.6, 0.6};
    double aud_lambda = 1.0;
    aud->add_option("--delta", aud_grid, "delta grid");
    aud->add_option("--lambda", aud_lambda, "decay rate");

    // experiment run <config>
    auto* exp = app.add_subcommand("experiment", "run an experiment config");
    std::string exp_config;
    exp->add_subcommand("run", "run a JSON experiment config")
        ->add_option("config", exp_config, "config file")
        ->required();

    CLI11_PARSE(app, argc, argv);
    fs::create_directories(out_dir);

    try {
        if (*sim) {
            const auto spec = load_spec(sim_spec);
            std::vector<bsscov::PathBundle> paths;
            if (sim_core) {
                bsscov::GridSpec grid(sim_T, sim_n);
                paths = bsscov::simulate_gaussian_core(bsscov::component_family(spec),
                                                       grid, sim_M, seed);
            } else {
                bsscov::GridSpec grid(sim_T, sim_n, sim_warmup);
                bsscov::BssModel model = bsscov::BssModel::unit_sigma(
                    sim_variant == "Y" ? bsscov::BssVariant::MatrixY
                                       : bsscov::BssVariant::ElementwiseX,
                    spec.p);
                if (sim_riemann) model.scheme = bsscov::BssScheme::Riemann;
                paths = bsscov::simulate_bss(spec, model, grid, sim_M, seed);
            }
            for (std::size_t m = 0; m < paths.size(); ++m) {
                fs::path file = fs::path(out_dir) /
                                (fs::path(sim_out).stem().string() + "_" +
                                 std::to_string(m) + fs::path(sim_out).extension().string());
                bsscov::export_paths(paths[m], file);
            }
            std::cout << "wrote " << paths.size() << " path file(s) under " << out_dir
                      << "\n";
        } else if (*cov) {
            const auto data = bsscov::ingest_paths(cov_in);
            bsscov::KernelSpec spec =
                cov_spec.empty()
                    ? bsscov::KernelSpec::identical_diagonal(data.components(), 0.25, 1.0)
                    : load_spec(cov_spec);
            const auto scaling = scaling_for(cov_regime, spec, data.grid.n, &data);
            const auto proc = bsscov::realised_covariation(data, scaling);
            write_process(proc, fs::path(out_dir) / cov_out,
                          json{{"regime", cov_regime}, {"n", proc.n}, {"p", proc.p}});
            std::cout << "wrote " << cov_out << "\n";
        } else if (*fea) {
            const auto data = bsscov::ingest_paths(fea_in);
            const auto ratio = bsscov::correlation_ratio(data, fea_eps);
            const auto rel = bsscov::relative_covolatility(data);
            const double eps_used = fea_eps < 0.0 ? 0.05 * data.grid.T : fea_eps;
            write_process(ratio, fs::path(out_dir) / (fea_out + "_correlation_ratio.csv"),
                          json{{"statistic", "correlation-ratio"}, {"eps", eps_used}});
            write_process(rel, fs::path(out_dir) / (fea_out + "_relative_covolatility.csv"),
                          json{{"statistic", "relative-covolatility"}});
            std::cout << "wrote feasible statistics under " << out_dir << "\n";
        } else if (*asy) {
            const auto spec = load_spec(asy_spec);
            bsscov::DMatrix D;
            if (asy_scheme == "pair-square")
                D = bsscov::D_gaussian(spec, bsscov::kDefaultNSequence,
                                       bsscov::kDefaultLagTruncation,
                                       asy_override ? bsscov::A2Policy::Override
                                                    : bsscov::A2Policy::Require);
            else if (asy_scheme == "case1-full")
                D = bsscov::D_case1_bss(spec, false);
            else if (asy_scheme == "case1-vech")
                D = bsscov::D_case1_bss(spec, true);
            else if (asy_scheme == "scenario2-full")
                D = bsscov::D_scenario2(spec, Eigen::MatrixXd::Ones(spec.p, spec.p), false);
            else if (asy_scheme == "scenario2-vech")
                D = bsscov::D_scenario2(spec, Eigen::MatrixXd::Ones(spec.p, spec.p), true);
            else
                throw bsscov::SchemaError("unknown scheme " + asy_scheme);
            std::ofstream mtx(fs::path(out_dir) / (asy_out + ".matrix.txt"));
            mtx.precision(17);
            mtx << D.values << "\n";
            json hdr{{"p", D.descriptor.p},
                     {"scheme", bsscov::indexing::to_string(D.descriptor.scheme)},
                     {"flat_size", D.descriptor.flat_size()},
                     {"rows_meaning", D.descriptor.row_meaning()},
                     {"columns_meaning", D.descriptor.column_meaning()},
                     {"n_sequence", D.diag.n_sequence},
                     {"lag_truncation", D.diag.lag_truncation},
                     {"last_delta", D.diag.last_delta},
                     {"converged", D.diag.converged}};
            std::ofstream hs(fs::path(out_dir) / (asy_out + ".header.json"));
            hs << hdr.dump(2) << "\n";
            std::cout << "wrote " << asy_out << ".matrix.txt (+header)\n";
        } else if (*aud) {
            bsscov::ExperimentConfig cfg;
            cfg.kind = bsscov::ExperimentConfig::Kind::AssumptionAudit;
            cfg.delta_grid = aud_grid;
            cfg.lambda = aud_lambda;
            cfg.seed = seed;
            auto rep = bsscov::run_experiment(cfg);
            bsscov::emit_report(rep, out_dir, "audit");
            std::cout << rep.to_json(false).dump(2) << "\n";
        } else if (*exp) {
            std::ifstream in(exp_config);
            if (!in) throw bsscov::SchemaError("cannot open config " + exp_config);
            json j;
            in >> j;
            auto cfg = bsscov::ExperimentConfig::from_json(j);
            cfg.seed = j.contains("seed") ? cfg.seed : seed;
            cfg.threads = threads;
            const auto rep = bsscov::run_experiment(cfg);
            bsscov::emit_report(rep, out_dir,
                                bsscov::ExperimentConfig::kind_to_string(cfg.kind));
            std::cout << (rep.all_pass() ? "PASS" : "FAIL") << " ("
                      << rep.records.size() << " checks, " << rep.wall_ms << " ms)\n";
            return rep.all_pass() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
