#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sllg/ensemble.hpp"

namespace sllg {

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("fit_slope: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw Error("fit_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

namespace detail {

inline void require_dyadic(const std::vector<double>& dts) {
    if (dts.size() < 3) throw ConfigError("order study: need at least 3 dt levels");
    for (size_t i = 1; i < dts.size(); ++i) {
        if (!(dts[i] > 0.0) || std::abs(dts[i - 1] / dts[i] - 2.0) > 1e-9)
            throw ConfigError("order study: dt list must be dyadic (each level halves)");
    }
}

/// Detects the exactly solvable configuration: no drift, all channels constant
/// and mutually parallel. Returns the common unit axis and the signed
/// amplitudes a_j with h_j = a_j * axis.
inline bool rotation_eligible(const ModelSpec& model, Vec3& axis, std::vector<double>& amps) {
    if (model.lambda1 != 0.0 || model.lambda2 != 0.0) return false;
    if (model.anisotropy.active()) return false;
    if (model.channels.empty()) return false;
    axis = Vec3{};
    amps.clear();
    for (const ChannelSpec& c : model.channels) {
        if (c.type != ChannelSpec::Type::constant) return false;
        if (norm(c.value) == 0.0) { amps.push_back(0.0); continue; }
        if (norm(axis) == 0.0) axis = normalized(c.value);
        if (norm(cross(c.value, axis)) > 1e-14 * norm(c.value)) return false;
        amps.push_back(dot(c.value, axis));
    }
    return norm(axis) > 0.0;
}

/// Closed-form endpoint for the rotation problem: every coefficient rotates
/// rigidly about the axis by -Theta, Theta = sum_j a_j W_j(T).
inline FieldCoeffs rotation_endpoint(const FieldCoeffs& u0, const Vec3& axis,
                                     const std::vector<double>& amps, const WienerPath& path) {
    double theta = 0.0;
    for (int j = 0; j < path.channels(); ++j)
        theta += amps[static_cast<size_t>(j)] * path.channel_total(j);
    FieldCoeffs r(u0.basis);
    for (int k = 0; k < u0.basis->n_modes(); ++k)
        r.set_mode(k, rotate_about(u0.mode(k), axis, -theta));
    return r;
}

inline FieldCoeffs endpoint(const FieldCoeffs& u0, const ModelParams& params,
                            StepperConfig cfg, Scheme scheme, const WienerPath& path) {
    cfg.scheme = scheme;
    ObserverConfig obs;
    obs.diag_stride = 0;
    const TrajectoryRecord rec = integrate(u0, params, cfg, path, obs);
    return rec.snapshots.back().state;
}

} // namespace detail

struct OrderStudyResult {
    std::vector<double> dts;
    std::vector<Scheme> schemes;
    std::vector<std::vector<double>> rms_error; // [scheme][level]
    std::vector<double> slopes;                 // [scheme]
    bool rotation_reference = false;
};

/// Strong-convergence study on Brownian-bridge-coupled paths. The reference is
/// the closed-form rotation when the model admits one, otherwise a midpoint
/// run at a quarter of the finest step on the same refined path.
inline OrderStudyResult order_study(const EnsembleSpec& spec, const std::vector<double>& dts,
                                    const std::vector<Scheme>& schemes) {
    detail::require_dyadic(dts);
    if (schemes.empty()) throw ConfigError("order study: no schemes requested");
    spec.validate();
    const ModelParams params = spec.model.realize(spec.basis);
    const FieldCoeffs u0 = spec.model.init.realize(spec.basis);

    Vec3 axis;
    std::vector<double> amps;
    const bool rotation = detail::rotation_eligible(spec.model, axis, amps);

    const size_t L = dts.size();
    std::vector<std::vector<double>> sq_err(schemes.size(), std::vector<double>(L, 0.0));

    for (int r = 0; r < spec.replicas; ++r) {
        std::vector<WienerPath> paths;
        paths.reserve(L);
        {
            const long steps0 = std::lround(spec.stepper.t_final / dts[0]);
            paths.push_back(WienerPath::generate({spec.base_seed, static_cast<uint64_t>(r)},
                                                 dts[0], steps0, params.n_channels()));
        }
        for (size_t l = 1; l < L; ++l) paths.push_back(paths.back().refine());

        FieldCoeffs ref(spec.basis);
        if (rotation) {
            ref = detail::rotation_endpoint(u0, axis, amps, paths.front());
        } else {
            WienerPath fine = paths.back().refine().refine();
            StepperConfig rcfg = spec.stepper;
            rcfg.dt = fine.dt();
            ref = detail::endpoint(u0, params, rcfg, Scheme::implicit_midpoint, fine);
        }

        for (size_t l = 0; l < L; ++l) {
            StepperConfig cfg = spec.stepper;
            cfg.dt = dts[l];
            for (size_t s = 0; s < schemes.size(); ++s) {
                const FieldCoeffs uT = detail::endpoint(u0, params, cfg, schemes[s], paths[l]);
                const double e = l2_norm(lin_comb(uT, 1.0, ref, -1.0));
                sq_err[s][l] += e * e;
            }
        }
    }

    OrderStudyResult res;
    res.dts = dts;
    res.schemes = schemes;
    res.rotation_reference = rotation;
    res.rms_error.assign(schemes.size(), std::vector<double>(L, 0.0));
    std::vector<double> logdt(L);
    for (size_t l = 0; l < L; ++l) logdt[l] = std::log(dts[l]);
    for (size_t s = 0; s < schemes.size(); ++s) {
        std::vector<double> logerr(L);
        for (size_t l = 0; l < L; ++l) {
            res.rms_error[s][l] = std::sqrt(sq_err[s][l] / spec.replicas);
            logerr[l] = std::log(std::max(res.rms_error[s][l], 1e-300));
        }
        res.slopes.push_back(fit_slope(logdt, logerr));
    }
    return res;
}

struct ItoStratRow {
    double dt = 0.0;
    long completed = 0;
    double mean_gap = 0.0; // E[Phi_euler(u_T) - Phi_heun(u_T)] on coupled paths
    double se_gap = 0.0;
    double mean_phi_euler = 0.0;
    double mean_phi_heun = 0.0;
};

/// Corrected-Euler vs Heun agreement across a dyadic dt ladder, coupled per
/// replica through one refined path.
inline std::vector<ItoStratRow> ito_strat_agreement(const EnsembleSpec& spec,
                                                    const std::vector<double>& dts) {
    detail::require_dyadic(dts);
    spec.validate();
    const ModelParams params = spec.model.realize(spec.basis);
    const FieldCoeffs u0 = spec.model.init.realize(spec.basis);

    const size_t L = dts.size();
    std::vector<std::vector<double>> gaps(L), phis_e(L), phis_h(L);

    for (int r = 0; r < spec.replicas; ++r) {
        std::vector<WienerPath> paths;
        paths.reserve(L);
        const long steps0 = std::lround(spec.stepper.t_final / dts[0]);
        paths.push_back(WienerPath::generate({spec.base_seed, static_cast<uint64_t>(r)}, dts[0],
                                             steps0, params.n_channels()));
        for (size_t l = 1; l < L; ++l) paths.push_back(paths.back().refine());

        for (size_t l = 0; l < L; ++l) {
            StepperConfig cfg = spec.stepper;
            cfg.dt = dts[l];
            try {
                const FieldCoeffs ue =
                    detail::endpoint(u0, params, cfg, Scheme::euler_maruyama_ito, paths[l]);
                const FieldCoeffs uh =
                    detail::endpoint(u0, params, cfg, Scheme::heun_stratonovich, paths[l]);
                const double pe = energy(ue, params);
                const double ph = energy(uh, params);
                gaps[l].push_back(pe - ph);
                phis_e[l].push_back(pe);
                phis_h[l].push_back(ph);
            } catch (const Error&) {
                // replica excluded at this level; reported via completed count
            }
        }
    }

    std::vector<ItoStratRow> rows;
    for (size_t l = 0; l < L; ++l) {
        ItoStratRow row;
        row.dt = dts[l];
        const Stat g = detail::stat_of(gaps[l]);
        row.completed = static_cast<long>(gaps[l].size());
        row.mean_gap = g.mean;
        row.se_gap = g.se;
        row.mean_phi_euler = detail::stat_of(phis_e[l]).mean;
        row.mean_phi_heun = detail::stat_of(phis_h[l]).mean;
        rows.push_back(row);
    }
    return rows;
}

struct NUniformityResult {
    std::vector<int> n_list;
    std::vector<EnsembleResult> per_n;
    // coupled per-replica differences between consecutive n levels
    std::vector<Stat> diff_sup_phi;
    std::vector<Stat> diff_diss_int;
    double dt_used = 0.0;
    int reruns = 0;
};

/// Runs coupled ensembles at each n (identical Wiener increments replica by
/// replica). If any replica fails, the whole study reruns at half the step,
/// at most twice.
inline NUniformityResult n_uniformity_study(EnsembleSpec spec, const std::vector<int>& n_list) {
    if (n_list.empty()) throw ConfigError("n-uniformity study: empty n list");
    for (size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw ConfigError("n-uniformity study: n list must be strictly increasing");

    NUniformityResult res;
    for (int attempt = 0; attempt <= 2; ++attempt) {
        res.per_n.clear();
        bool clean = true;
        for (int n : n_list) {
            EnsembleSpec s = spec;
            s.basis = SpectralBasis::build(spec.basis->length(), n, spec.basis->oversample());
            res.per_n.push_back(run_ensemble(s));
            if (!res.per_n.back().failures.empty()) clean = false;
        }
        if (clean) break;
        if (attempt < 2) {
            spec.stepper.dt *= 0.5;
            res.reruns += 1;
        }
    }
    res.n_list = n_list;
    res.dt_used = spec.stepper.dt;

    for (size_t i = 0; i + 1 < n_list.size(); ++i) {
        std::vector<double> dsup, ddiss;
        const auto& a = res.per_n[i].per_replica;
        const auto& b = res.per_n[i + 1].per_replica;
        for (size_t r = 0; r < a.size(); ++r) {
            if (a[r] && b[r]) {
                dsup.push_back(b[r]->sup_phi - a[r]->sup_phi);
                ddiss.push_back(b[r]->diss_int - a[r]->diss_int);
            }
        }
        res.diff_sup_phi.push_back(detail::stat_of(dsup));
        res.diff_diss_int.push_back(detail::stat_of(ddiss));
    }
    return res;
}

struct SphereDeviationRow {
    int n = 0;
    double max_dev = 0.0;
};

/// Max-over-time sphere deviation per n on one shared driving path
/// (replica 0 of the base seed).
inline std::vector<SphereDeviationRow> sphere_deviation_study(const EnsembleSpec& spec,
                                                              const std::vector<int>& n_list) {
    if (n_list.empty()) throw ConfigError("sphere study: empty n list");
    std::vector<SphereDeviationRow> rows;
    for (int n : n_list) {
        const BasisPtr basis =
            SpectralBasis::build(spec.basis->length(), n, spec.basis->oversample());
        const ModelParams params = spec.model.realize(basis);
        const FieldCoeffs u0 = spec.model.init.realize(basis);
        const WienerPath path = WienerPath::generate({spec.base_seed, 0}, spec.stepper.dt,
                                                     spec.stepper.steps(), params.n_channels());
        ObserverConfig obs;
        obs.diag_stride = spec.diag_stride > 0 ? spec.diag_stride : 1;
        obs.beta = spec.beta;
        const TrajectoryRecord rec = integrate(u0, params, spec.stepper, path, obs);
        double dev = 0.0;
        for (const DiagRow& row : rec.rows) dev = std::max(dev, row.sphere_dev);
        rows.push_back({n, dev});
    }
    return rows;
}

} // namespace sllg
