#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sllg/config.hpp"
#include "sllg/diagnostics.hpp"
#include "sllg/ensemble.hpp"
#include "sllg/version.hpp"
#include "sllg/wiener.hpp"

namespace sllg {

/// Shortest-exact decimal for a 64-bit float (17 significant digits).
inline std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline uint64_t fnv1a64(const void* data, size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    uint64_t h = 14695981039346656037ULL;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open for checksum: " + path);
    uint64_t h = 14695981039346656037ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    return h;
}

inline constexpr const char* kCsvHeader =
    "time,l2,v_norm,energy,exchange,anisotropy,cum_dissipation,sphere_dev,xneg_beta";

inline void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << kCsvHeader << "\n";
    for (const DiagRow& r : rec.rows) {
        out << fmt17(r.time) << ',' << fmt17(r.l2) << ',' << fmt17(r.v_norm) << ','
            << fmt17(r.energy) << ',' << fmt17(r.exchange) << ',' << fmt17(r.anisotropy) << ','
            << fmt17(r.cum_dissipation) << ',' << fmt17(r.sphere_dev) << ','
            << fmt17(r.xneg_beta) << "\n";
    }
}

inline constexpr char kSnapshotMagic[8] = {'S', 'L', 'L', 'G', 'S', 'N', 'A', 'P'};

namespace iodetail {

inline void require_little_endian() {
    const uint16_t probe = 1;
    unsigned char b;
    std::memcpy(&b, &probe, 1);
    if (b != 1) throw Error("snapshot format requires a little-endian host");
}

inline void put_u32(std::ofstream& out, uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}
inline void put_u64(std::ofstream& out, uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), 8);
}
inline void put_f64(std::ofstream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), 8);
}

} // namespace iodetail

/// Binary snapshot layout: 8-byte magic, u32 version, u32 n_modes,
/// u32 components, u32 reserved, u64 frame count; then per frame one f64 time
/// followed by n_modes * components f64 coefficients. Little-endian.
inline void write_snapshots(const std::string& path, const TrajectoryRecord& rec) {
    iodetail::require_little_endian();
    if (rec.snapshots.empty()) throw Error("write_snapshots: no snapshots recorded");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    const int n = rec.snapshots.front().state.basis->n_modes();
    out.write(kSnapshotMagic, 8);
    iodetail::put_u32(out, 1u);
    iodetail::put_u32(out, static_cast<uint32_t>(n));
    iodetail::put_u32(out, 3u);
    iodetail::put_u32(out, 0u);
    iodetail::put_u64(out, rec.snapshots.size());
    for (const Snapshot& s : rec.snapshots) {
        iodetail::put_f64(out, s.time);
        for (double c : s.state.c) iodetail::put_f64(out, c);
    }
}

struct SnapshotFile {
    uint32_t version = 0;
    uint32_t n_modes = 0;
    uint32_t components = 0;
    std::vector<double> times;
    std::vector<std::vector<double>> frames;
};

inline SnapshotFile read_snapshots(const std::string& path) {
    iodetail::require_little_endian();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kSnapshotMagic, 8) != 0)
        throw Error("bad snapshot magic in " + path);
    SnapshotFile f;
    uint32_t reserved = 0;
    uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&f.version), 4);
    in.read(reinterpret_cast<char*>(&f.n_modes), 4);
    in.read(reinterpret_cast<char*>(&f.components), 4);
    in.read(reinterpret_cast<char*>(&reserved), 4);
    in.read(reinterpret_cast<char*>(&count), 8);
    if (!in) throw Error("truncated snapshot header in " + path);
    const size_t per = static_cast<size_t>(f.n_modes) * f.components;
    for (uint64_t i = 0; i < count; ++i) {
        double t = 0.0;
        in.read(reinterpret_cast<char*>(&t), 8);
        std::vector<double> frame(per);
        in.read(reinterpret_cast<char*>(frame.data()),
                static_cast<std::streamsize>(per * 8));
        if (!in) throw Error("truncated snapshot frame in " + path);
        f.times.push_back(t);
        f.frames.push_back(std::move(frame));
    }
    return f;
}

inline void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << body;
}

inline std::string stat_csv_row(const std::string& name, const Stat& s) {
    return name + "," + fmt17(s.mean) + "," + fmt17(s.se) + "," + fmt17(s.min) + "," +
           fmt17(s.max);
}

inline void write_ensemble_summary_csv(const std::string& path, const EnsembleSummary& s) {
    std::string body = "functional,mean,se,min,max\n";
    body += stat_csv_row("sup_phi", s.sup_phi) + "\n";
    body += stat_csv_row("sup_phi_sq", s.sup_phi_sq) + "\n";
    body += stat_csv_row("diss_int", s.diss_int) + "\n";
    body += stat_csv_row("diss_int_sq", s.diss_int_sq) + "\n";
    body += stat_csv_row("l32_int", s.l32_int) + "\n";
    body += stat_csv_row("xneg_int", s.xneg_int) + "\n";
    body += stat_csv_row("holder", s.holder) + "\n";
    body += stat_csv_row("final_phi", s.final_phi) + "\n";
    write_text(path, body);
}

inline void write_replicas_csv(const std::string& path, const EnsembleResult& res) {
    std::string body =
        "replica,status,sup_phi,diss_int,l32_int,xneg_int,holder,final_phi,final_l2\n";
    for (size_t r = 0; r < res.per_replica.size(); ++r) {
        const auto& fr = res.per_replica[r];
        if (fr) {
            body += std::to_string(r) + ",ok," + fmt17(fr->sup_phi) + "," +
                    fmt17(fr->diss_int) + "," + fmt17(fr->l32_int) + "," +
                    fmt17(fr->xneg_int) + "," + fmt17(fr->holder) + "," +
                    fmt17(fr->final_phi) + "," + fmt17(fr->final_l2) + "\n";
        } else {
            body += std::to_string(r) + ",failed,,,,,,,\n";
        }
    }
    write_text(path, body);
}

/// Writes manifest.json next to the emitted files: config echo, generator and
/// code identity, replica seeds, wall clock, and a checksummed file inventory.
inline void write_manifest(const std::string& dir, const RunConfig& cfg,
                           const std::vector<std::string>& files, double wall_seconds) {
    nlohmann::json m;
    m["code_version"] = kVersion;
    m["generator"] = kGeneratorId;
    m["config"] = config_to_json(cfg);
    m["seeds"]["base"] = cfg.base_seed;
    {
        std::vector<uint64_t> reps;
        for (int r = 0; r < cfg.replicas; ++r) reps.push_back(static_cast<uint64_t>(r));
        m["seeds"]["replicas"] = reps;
    }
    m["wall_clock_seconds"] = wall_seconds;
    m["files"] = nlohmann::json::array();
    for (const std::string& f : files) {
        const std::string full = dir + "/" + f;
        const uint64_t bytes = std::filesystem::file_size(full);
        m["files"].push_back({{"path", f},
                              {"bytes", bytes},
                              {"fnv1a64", fnv1a64_file(full)}});
    }
    std::ofstream out(dir + "/manifest.json", std::ios::binary);
    if (!out) throw Error("cannot write manifest in " + dir);
    out << m.dump(2) << "\n";
}

} // namespace sllg
