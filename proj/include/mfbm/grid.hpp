#pragma once
#include "mfbm/spectral.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mfbm {

// A time grid with one coefficient vector per node. This is the common
// container for every sampled or solved path (noise, state, control).
// Storage is flat, node-major.
struct GridPath {
    std::vector<double> times;
    int dims = 0;
    std::vector<double> data; // size times.size() * dims

    GridPath() = default;
    GridPath(std::vector<double> t, int dim);

    int nodes() const { return static_cast<int>(times.size()); }
    int dim() const { return dims; }
    double& at(int node, int mode) { return data[static_cast<size_t>(node) * dims + mode]; }
    double at(int node, int mode) const { return data[static_cast<size_t>(node) * dims + mode]; }
    CoeffVector value(int node) const;
    void set_value(int node, const CoeffVector& v);
    void set_value(int node, int mode, double v) { at(node, mode) = v; }

    // single-mode view as plain vector
    std::vector<double> mode(int i) const;
    double t_begin() const { return times.front(); }
    double t_end() const { return times.back(); }
};

std::vector<double> uniform_grid(double t0, double t1, int steps);

// index of a grid node equal to t (within tol); throws if t is off-grid
int node_index(const GridPath& p, double t, double tol = 1e-9);

GridPath zero_path(const std::vector<double>& times, int dim);

// linear interpolation between nodes; clamps outside the grid range
CoeffVector interp(const GridPath& p, double t);

GridPath extract_mode(const GridPath& p, int mode);

// CSV with header t,mode_0,...,mode_{n-1}; round-trips through read_csv_path.
void write_csv_path(const GridPath& p, const std::string& file);
GridPath read_csv_path(const std::string& file);

// binary cache of a sampled path, keyed by (seed, H, grid hash)
std::uint64_t grid_hash(const std::vector<double>& times);
std::string cache_key(std::uint64_t seed, double H, const std::vector<double>& times);
bool cache_load(const std::string& dir, const std::string& key, GridPath& out);
void cache_store(const std::string& dir, const std::string& key, const GridPath& p);

} // namespace mfbm
