#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "sllg/config.hpp"
#include "sllg/io.hpp"
#include "sllg/studies.hpp"
#include "sllg/verify.hpp"

namespace sllg {

namespace rundetail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::vector<Scheme> parse_schemes(const std::vector<std::string>& names) {
    std::vector<Scheme> v;
    for (const std::string& s : names) v.push_back(scheme_from_name(s));
    if (v.empty()) throw ConfigError("study: no schemes given");
    return v;
}

} // namespace rundetail

/// One trajectory (replica 0 unless the seed override names another base):
/// trajectory.csv, snapshots.bin, optional residuals.csv, manifest.json.
inline int run_simulate(const RunConfig& cfg, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    const BasisPtr basis = cfg.make_basis();
    const ModelParams params = cfg.model.realize(basis);
    const FieldCoeffs u0 = cfg.model.init.realize(basis);
    const WienerPath path = WienerPath::generate({cfg.base_seed, 0}, cfg.stepper.dt,
                                                 cfg.stepper.steps(), params.n_channels());
    ObserverConfig obs;
    obs.diag_stride = cfg.diag_stride;
    obs.snapshot_stride = cfg.snapshot_stride;
    obs.beta = cfg.beta;
    const TrajectoryRecord rec = integrate(u0, params, cfg.stepper, path, obs);

    std::filesystem::create_directories(cfg.out_dir);
    std::vector<std::string> files;
    write_trajectory_csv(cfg.out_dir + "/trajectory.csv", rec);
    files.push_back("trajectory.csv");
    write_snapshots(cfg.out_dir + "/snapshots.bin", rec);
    files.push_back("snapshots.bin");

    if (!cfg.test_functions.empty() && cfg.snapshot_stride == 1) {
        std::string body = "psi_mode,residual_midpoint,residual_leftpoint,ito_gap_reference\n";
        for (const TestFunctionSpec& tf : cfg.test_functions) {
            const TestFunction psi = TestFunction::make(basis, tf.mode, tf.amplitude);
            const double rm = weak_residual_signed(rec, path, psi, params,
                                                   StochasticRule::stratonovich_midpoint);
            const double rl =
                weak_residual_signed(rec, path, psi, params, StochasticRule::ito_left);
            const double gap = ito_gap_reference(rec, path, psi, params);
            body += std::to_string(tf.mode) + "," + fmt17(std::abs(rm)) + "," +
                    fmt17(std::abs(rl)) + "," + fmt17(gap) + "\n";
        }
        write_text(cfg.out_dir + "/residuals.csv", body);
        files.push_back("residuals.csv");
    }

    write_manifest(cfg.out_dir, cfg, files, rundetail::seconds_since(t0));
    log << "simulate: " << rec.rows.size() << " rows, " << rec.snapshots.size()
        << " snapshots -> " << cfg.out_dir << "\n";
    return 0;
}

inline int run_ensemble_cmd(const RunConfig& cfg, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    const BasisPtr basis = cfg.make_basis();
    const EnsembleResult res = run_ensemble(cfg.make_ensemble_spec(basis));

    std::filesystem::create_directories(cfg.out_dir);
    std::vector<std::string> files;
    write_ensemble_summary_csv(cfg.out_dir + "/summary.csv", res.summary);
    files.push_back("summary.csv");
    write_replicas_csv(cfg.out_dir + "/replicas.csv", res);
    files.push_back("replicas.csv");
    write_manifest(cfg.out_dir, cfg, files, rundetail::seconds_since(t0));

    log << "ensemble: " << res.summary.completed << "/" << cfg.replicas << " replicas ok";
    if (!res.failures.empty()) {
        log << "; failures:";
        for (const ReplicaFailure& f : res.failures)
            log << " [replica " << f.replica << " step " << f.step << ": " << f.message << "]";
    }
    log << " -> " << cfg.out_dir << "\n";
    return res.failures.empty() ? 0 : 1;
}

inline int run_study_cmd(const RunConfig& cfg, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    const BasisPtr basis = cfg.make_basis();
    const EnsembleSpec spec = cfg.make_ensemble_spec(basis);
    std::filesystem::create_directories(cfg.out_dir);
    std::vector<std::string> files;

    switch (cfg.study) {
        case StudyKind::plain:
            throw ConfigError("study: ensemble.study is 'plain'; use the ensemble subcommand");
        case StudyKind::order: {
            const OrderStudyResult res =
                order_study(spec, cfg.dt_list, rundetail::parse_schemes(cfg.study_schemes));
            std::string body = "scheme,dt,rms_error\n";
            for (size_t s = 0; s < res.schemes.size(); ++s)
                for (size_t l = 0; l < res.dts.size(); ++l)
                    body += std::string(scheme_name(res.schemes[s])) + "," + fmt17(res.dts[l]) +
                            "," + fmt17(res.rms_error[s][l]) + "\n";
            write_text(cfg.out_dir + "/order.csv", body);
            files.push_back("order.csv");
            std::string slopes = "scheme,slope,reference\n";
            for (size_t s = 0; s < res.schemes.size(); ++s)
                slopes += std::string(scheme_name(res.schemes[s])) + "," + fmt17(res.slopes[s]) +
                          "," + (res.rotation_reference ? "rotation" : "self") + "\n";
            write_text(cfg.out_dir + "/order_slopes.csv", slopes);
            files.push_back("order_slopes.csv");
            for (size_t s = 0; s < res.schemes.size(); ++s)
                log << "order: " << scheme_name(res.schemes[s]) << " slope "
                    << res.slopes[s] << "\n";
            break;
        }
        case StudyKind::ito_strat: {
            const std::vector<ItoStratRow> rows = ito_strat_agreement(spec, cfg.dt_list);
            std::string body = "dt,completed,mean_gap,se_gap,mean_phi_euler,mean_phi_heun\n";
            for (const ItoStratRow& r : rows)
                body += fmt17(r.dt) + "," + std::to_string(r.completed) + "," +
                        fmt17(r.mean_gap) + "," + fmt17(r.se_gap) + "," +
                        fmt17(r.mean_phi_euler) + "," + fmt17(r.mean_phi_heun) + "\n";
            write_text(cfg.out_dir + "/ito_strat.csv", body);
            files.push_back("ito_strat.csv");
            log << "ito_strat: finest gap " << rows.back().mean_gap << " (se "
                << rows.back().se_gap << ")\n";
            break;
        }
        case StudyKind::n_uniformity: {
            const NUniformityResult res = n_uniformity_study(spec, cfg.n_list);
            std::string body =
                "n,completed,sup_phi_mean,sup_phi_se,diss_int_mean,diss_int_se,l32_int_mean,"
                "xneg_int_mean,holder_mean\n";
            for (size_t i = 0; i < res.n_list.size(); ++i) {
                const EnsembleSummary& s = res.per_n[i].summary;
                body += std::to_string(res.n_list[i]) + "," + std::to_string(s.completed) + "," +
                        fmt17(s.sup_phi.mean) + "," + fmt17(s.sup_phi.se) + "," +
                        fmt17(s.diss_int.mean) + "," + fmt17(s.diss_int.se) + "," +
                        fmt17(s.l32_int.mean) + "," + fmt17(s.xneg_int.mean) + "," +
                        fmt17(s.holder.mean) + "\n";
            }
            write_text(cfg.out_dir + "/uniformity.csv", body);
            files.push_back("uniformity.csv");
            std::string diffs = "n_low,n_high,dsup_mean,dsup_se,ddiss_mean,ddiss_se\n";
            for (size_t i = 0; i + 1 < res.n_list.size(); ++i)
                diffs += std::to_string(res.n_list[i]) + "," + std::to_string(res.n_list[i + 1]) +
                         "," + fmt17(res.diff_sup_phi[i].mean) + "," +
                         fmt17(res.diff_sup_phi[i].se) + "," + fmt17(res.diff_diss_int[i].mean) +
                         "," + fmt17(res.diff_diss_int[i].se) + "\n";
            write_text(cfg.out_dir + "/uniformity_diffs.csv", diffs);
            files.push_back("uniformity_diffs.csv");
            log << "n_uniformity: dt_used " << res.dt_used << ", reruns " << res.reruns << "\n";
            break;
        }
        case StudyKind::sphere: {
            const std::vector<SphereDeviationRow> rows = sphere_deviation_study(spec, cfg.n_list);
            std::string body = "n,max_sphere_dev\n";
            for (const SphereDeviationRow& r : rows)
                body += std::to_string(r.n) + "," + fmt17(r.max_dev) + "\n";
            write_text(cfg.out_dir + "/sphere.csv", body);
            files.push_back("sphere.csv");
            break;
        }
    }

    write_manifest(cfg.out_dir, cfg, files, rundetail::seconds_since(t0));
    log << "study: " << study_name(cfg.study) << " -> " << cfg.out_dir << "\n";
    return 0;
}

inline int run_verify_cmd(const RunConfig& cfg, std::ostream& log) {
    const BasisPtr basis = cfg.make_basis();
    ModelSpec model = cfg.model;
    if (model.channels.empty()) {
        // verify needs noise maps to exercise; default to two mild channels
        ChannelSpec c1;
        c1.type = ChannelSpec::Type::constant;
        c1.value = {0.0, 0.0, 0.5};
        ChannelSpec c2;
        c2.type = ChannelSpec::Type::cosine;
        c2.value = {0.3, 0.0, 0.0};
        c2.mode = 1;
        model.channels = {c1, c2};
    }
    const ModelParams params = model.realize(basis);
    const VerifyReport report = run_verify(basis, params);
    for (const CheckResult& c : report.checks)
        log << (c.pass ? "[pass] " : "[FAIL] ") << c.name << "  max_err " << fmt17(c.max_err)
            << "  tol " << fmt17(c.tol) << "\n";
    log << (report.all_pass() ? "verify: all checks passed\n" : "verify: FAILURES present\n");
    return report.all_pass() ? 0 : 1;
}

} // namespace sllg
