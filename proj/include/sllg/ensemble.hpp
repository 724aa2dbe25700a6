#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sllg/stepper.hpp"

namespace sllg {

struct EnsembleSpec {
    BasisPtr basis;
    ModelSpec model;
    StepperConfig stepper;
    int replicas = 1;
    uint64_t base_seed = 1;
    long diag_stride = 1;
    long snapshot_stride = 0;
    double beta = 0.3;
    double alpha = 0.25;
    int parallelism = 0; // 0: use SLLG_THREADS env var, else 1

    void validate() const {
        if (!basis) throw ConfigError("ensemble: missing basis");
        if (replicas < 1) throw ConfigError("ensemble: replicas must be >= 1");
        if (!(alpha > 0.0 && alpha < 0.5)) throw ConfigError("ensemble: alpha must lie in (0, 1/2)");
        if (!(beta > 0.25)) throw ConfigError("ensemble: beta must be > 1/4");
        stepper.validate();
    }
};

/// Per-replica pathwise functionals (the expectation integrands).
struct ReplicaFunctionals {
    double sup_phi = 0.0;
    double sup_phi_sq = 0.0;
    double diss_int = 0.0;
    double diss_int_sq = 0.0;
    double l32_int = 0.0;
    double xneg_int = 0.0;
    double holder = 0.0;
    double final_phi = 0.0;
    double final_l2 = 0.0;
};

struct Stat {
    double mean = 0.0;
    double se = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct EnsembleSummary {
    long completed = 0;
    Stat sup_phi, sup_phi_sq, diss_int, diss_int_sq, l32_int, xneg_int, holder, final_phi;
};

struct ReplicaFailure {
    uint64_t replica = 0;
    uint64_t base_seed = 0;
    long step = -1;
    std::string message;
};

struct EnsembleResult {
    EnsembleSummary summary;
    std::vector<std::optional<ReplicaFunctionals>> per_replica; // index = replica id
    std::vector<ReplicaFailure> failures;
};

inline int resolve_parallelism(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SLLG_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

inline ReplicaFunctionals extract_functionals(const TrajectoryRecord& rec, double alpha) {
    ReplicaFunctionals f;
    for (const DiagRow& r : rec.rows) f.sup_phi = std::max(f.sup_phi, r.energy);
    f.sup_phi_sq = f.sup_phi * f.sup_phi;
    f.diss_int = rec.rows.back().cum_dissipation;
    f.diss_int_sq = f.diss_int * f.diss_int;
    f.l32_int = rec.rows.back().cum_l32;
    f.xneg_int = rec.rows.back().cum_xneg_sq;
    f.holder = rec.snapshots.size() >= 2 ? holder_quotient(rec, alpha) : 0.0;
    f.final_phi = rec.rows.back().energy;
    f.final_l2 = rec.rows.back().l2;
    return f;
}

namespace detail {

inline Stat stat_of(const std::vector<double>& xs) {
    Stat s;
    if (xs.empty()) return s;
    s.min = xs[0];
    s.max = xs[0];
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        const double var = ss / static_cast<double>(xs.size() - 1);
        s.se = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return s;
}

} // namespace detail

/// Aggregates completed replicas in replica-id order; the result is a
/// symmetric function of the per-replica values, so thread scheduling cannot
/// change any output bit.
inline EnsembleSummary summarize(const std::vector<std::optional<ReplicaFunctionals>>& per_replica) {
    std::vector<double> sup, supsq, di, disq, l32, xneg, hold, fphi;
    for (const auto& fr : per_replica) {
        if (!fr) continue;
        sup.push_back(fr->sup_phi);
        supsq.push_back(fr->sup_phi_sq);
        di.push_back(fr->diss_int);
        disq.push_back(fr->diss_int_sq);
        l32.push_back(fr->l32_int);
        xneg.push_back(fr->xneg_int);
        hold.push_back(fr->holder);
        fphi.push_back(fr->final_phi);
    }
    EnsembleSummary s;
    s.completed = static_cast<long>(sup.size());
    s.sup_phi = detail::stat_of(sup);
    s.sup_phi_sq = detail::stat_of(supsq);
    s.diss_int = detail::stat_of(di);
    s.diss_int_sq = detail::stat_of(disq);
    s.l32_int = detail::stat_of(l32);
    s.xneg_int = detail::stat_of(xneg);
    s.holder = detail::stat_of(hold);
    s.final_phi = detail::stat_of(fphi);
    return s;
}

/// Runs R independent replicas (replica r is seeded as (base_seed, r)) and
/// aggregates the functionals. Failed replicas are reported with seed and
/// step; the summary covers the completed ones. Throws only if every replica
/// failed.
inline EnsembleResult run_ensemble(const EnsembleSpec& spec) {
    spec.validate();
    const ModelParams params = spec.model.realize(spec.basis);
    const FieldCoeffs u0 = spec.model.init.realize(spec.basis);
    const long steps = spec.stepper.steps();
    const int nch = params.n_channels();
    const int workers =
        std::min(resolve_parallelism(spec.parallelism), std::max(1, spec.replicas));

    EnsembleResult result;
    result.per_replica.resize(static_cast<size_t>(spec.replicas));
    std::vector<std::optional<ReplicaFailure>> fail(static_cast<size_t>(spec.replicas));

    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= spec.replicas) return;
            try {
                const WienerPath path = WienerPath::generate(
                    {spec.base_seed, static_cast<uint64_t>(r)}, spec.stepper.dt, steps, nch);
                ObserverConfig obs;
                obs.diag_stride = spec.diag_stride;
                obs.snapshot_stride = spec.snapshot_stride;
                obs.beta = spec.beta;
                const TrajectoryRecord rec = integrate(u0, params, spec.stepper, path, obs);
                result.per_replica[static_cast<size_t>(r)] =
                    extract_functionals(rec, spec.alpha);
            } catch (const StepError& e) {
                fail[static_cast<size_t>(r)] =
                    ReplicaFailure{static_cast<uint64_t>(r), spec.base_seed, e.step, e.what()};
            } catch (const std::exception& e) {
                fail[static_cast<size_t>(r)] =
                    ReplicaFailure{static_cast<uint64_t>(r), spec.base_seed, -1, e.what()};
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    for (const auto& f : fail)
        if (f) result.failures.push_back(*f);
    result.summary = summarize(result.per_replica);
    if (result.summary.completed == 0)
        throw Error("ensemble: all " + std::to_string(spec.replicas) + " replicas failed (first: " +
                    (result.failures.empty() ? std::string("?") : result.failures.front().message) +
                    ")");
    return result;
}

} // namespace sllg
