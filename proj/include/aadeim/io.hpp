#pragma once

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "aadeim/driver.hpp"
#include "aadeim/errors.hpp"
#include "aadeim/rom.hpp"
#include "aadeim/trajectory.hpp"

namespace aadeim {

// Shortest representation that round-trips the exact double; locale-free.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // binary: no newline translation
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

inline std::string hash_comment(std::uint64_t config_hash) {
    std::ostringstream os;
    os << "# config_hash=" << std::hex << config_hash << "\n";
    return os.str();
}

// Trajectory CSV: hash comment, then a header row "t=<seconds>" per stored
// column, then N value rows.
inline void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                                 std::uint64_t config_hash) {
    std::ofstream out = open_output(path);
    out << hash_comment(config_hash);
    for (std::size_t j = 0; j < traj.steps.size(); ++j)
        out << (j ? "," : "") << "t=" << format_double(traj.steps[j] * traj.dt);
    out << "\n";
    for (Eigen::Index i = 0; i < traj.states.rows(); ++i) {
        for (Eigen::Index j = 0; j < traj.states.cols(); ++j)
            out << (j ? "," : "") << format_double(traj.states(i, j));
        out << "\n";
    }
}

// Binary trajectory: magic "ROMTRAJ1", then N (u64 LE), K (u64 LE), then the
// column-major f64 LE payload. Host is assumed little-endian.
inline void write_trajectory_bin(const std::string& path, const Trajectory& traj) {
    std::ofstream out = open_output(path);
    out.write("ROMTRAJ1", 8);
    const std::uint64_t n = static_cast<std::uint64_t>(traj.states.rows());
    const std::uint64_t k = static_cast<std::uint64_t>(traj.states.cols());
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&k), 8);
    out.write(reinterpret_cast<const char*>(traj.states.data()),
              static_cast<std::streamsize>(sizeof(double) * n * k));
}

struct LoadedTrajectory {
    Matrix states;
    std::vector<double> times; // empty for binary files
};

inline LoadedTrajectory read_trajectory_bin(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open trajectory file: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "ROMTRAJ1", 8) != 0)
        throw std::runtime_error(path + ": not a ROMTRAJ1 file");
    std::uint64_t n = 0, k = 0;
    in.read(reinterpret_cast<char*>(&n), 8);
    in.read(reinterpret_cast<char*>(&k), 8);
    LoadedTrajectory t;
    t.states.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    in.read(reinterpret_cast<char*>(t.states.data()),
            static_cast<std::streamsize>(sizeof(double) * n * k));
    if (!in) throw std::runtime_error(path + ": truncated ROMTRAJ1 payload");
    return t;
}

inline LoadedTrajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open trajectory file: " + path);
    std::string line;
    LoadedTrajectory t;
    std::vector<std::vector<double>> rows;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (!header_seen) {
            header_seen = true;
            while (std::getline(ss, cell, ',')) {
                if (cell.rfind("t=", 0) != 0)
                    throw std::runtime_error(path + ": malformed trajectory header cell '" +
                                             cell + "'");
                t.times.push_back(std::stod(cell.substr(2)));
            }
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != t.times.size())
            throw std::runtime_error(path + ": row width does not match header");
        rows.push_back(std::move(row));
    }
    t.states.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(t.times.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            t.states(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return t;
}

// Sniffs the 8-byte magic to pick the reader.
inline LoadedTrajectory read_trajectory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open trajectory file: " + path);
    char magic[8] = {};
    in.read(magic, 8);
    in.close();
    if (std::memcmp(magic, "ROMTRAJ1", 8) == 0) return read_trajectory_bin(path);
    return read_trajectory_csv(path);
}

// Basis CSV: N x n values plus a trailing sidecar line with the 1-based
// interpolation points.
inline void write_basis_csv(const std::string& path, const ReducedBasis& basis,
                            std::uint64_t config_hash) {
    std::ofstream out = open_output(path);
    out << hash_comment(config_hash);
    for (Eigen::Index i = 0; i < basis.u.rows(); ++i) {
        for (Eigen::Index j = 0; j < basis.u.cols(); ++j)
            out << (j ? "," : "") << format_double(basis.u(i, j));
        out << "\n";
    }
    out << "# points=";
    for (std::size_t i = 0; i < basis.points.size(); ++i)
        out << (i ? "," : "") << basis.points[i] + 1;
    out << "\n";
}

// Per-step metrics. The timing columns report measured wall time and are the
// one part of the outputs excluded from the byte-reproducibility guarantee.
inline void write_metrics_csv(const std::string& path, const RunRecord& record,
                              std::uint64_t config_hash) {
    std::ofstream out = open_output(path);
    out << hash_comment(config_hash);
    out << "step,phase_rhs_s,phase_jac_s,phase_solve_s,phase_sample_s,phase_adaptU_s,"
           "phase_adaptP_s,err_running\n";
    const Matrix& ps = record.per_step_phases;
    std::size_t stored = 0;
    double err = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index k = 1; k < ps.rows(); ++k) {
        while (stored < record.trajectory.steps.size() && record.trajectory.steps[stored] <= k) {
            if (!record.err_running.empty()) err = record.err_running[stored];
            ++stored;
        }
        out << k;
        for (int p = 0; p < PhaseClock::kNumPhases; ++p) out << "," << format_double(ps(k, p));
        out << "," << format_double(err) << "\n";
    }
}

// Study curves: "index,value" pairs, one file per curve.
inline void write_curve_csv(const std::string& path, const Vector& values,
                            std::uint64_t config_hash) {
    std::ofstream out = open_output(path);
    out << hash_comment(config_hash);
    out << "index,value\n";
    for (Eigen::Index i = 0; i < values.size(); ++i)
        out << i + 1 << "," << format_double(values(i)) << "\n";
}

} // namespace aadeim
