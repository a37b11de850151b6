#include "mfbm/grid.hpp"
#include "mfbm/rng.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mfbm {

GridPath::GridPath(std::vector<double> t, int dim)
    : times(std::move(t)), dims(dim), data(times.size() * static_cast<size_t>(dim), 0.0) {
    if (dim < 1) throw std::invalid_argument("GridPath: dim >= 1 required");
    for (size_t j = 1; j < times.size(); ++j)
        if (!(times[j] > times[j - 1]))
            throw std::invalid_argument("GridPath: times must be strictly increasing");
}

CoeffVector GridPath::value(int node) const {
    CoeffVector v(dims);
    for (int i = 0; i < dims; ++i) v[i] = at(node, i);
    return v;
}

void GridPath::set_value(int node, const CoeffVector& v) {
    if (v.dim() != dims) throw std::invalid_argument("GridPath::set_value: dimension mismatch");
    for (int i = 0; i < dims; ++i) at(node, i) = v[i];
}

std::vector<double> GridPath::mode(int i) const {
    std::vector<double> m(nodes());
    for (int j = 0; j < nodes(); ++j) m[j] = at(j, i);
    return m;
}

std::vector<double> uniform_grid(double t0, double t1, int steps) {
    if (steps < 1 || !(t1 > t0)) throw std::invalid_argument("uniform_grid: bad range");
    std::vector<double> t(steps + 1);
    for (int j = 0; j <= steps; ++j)
        t[j] = t0 + (t1 - t0) * double(j) / double(steps);
    t[steps] = t1;
    return t;
}

int node_index(const GridPath& p, double t, double tol) {
    for (int j = 0; j < p.nodes(); ++j)
        if (std::abs(p.times[j] - t) <= tol) return j;
    throw std::invalid_argument("node_index: time is not a grid node");
}

GridPath zero_path(const std::vector<double>& times, int dim) {
    return GridPath(times, dim);
}

CoeffVector interp(const GridPath& p, double t) {
    if (t <= p.times.front()) return p.value(0);
    if (t >= p.times.back()) return p.value(p.nodes() - 1);
    int lo = 0, hi = p.nodes() - 1;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        (p.times[mid] <= t ? lo : hi) = mid;
    }
    double w = (t - p.times[lo]) / (p.times[hi] - p.times[lo]);
    CoeffVector v(p.dim());
    for (int i = 0; i < p.dim(); ++i)
        v[i] = (1.0 - w) * p.at(lo, i) + w * p.at(hi, i);
    return v;
}

GridPath extract_mode(const GridPath& p, int mode) {
    GridPath q(p.times, 1);
    for (int j = 0; j < p.nodes(); ++j) q.at(j, 0) = p.at(j, mode);
    return q;
}

void write_csv_path(const GridPath& p, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("write_csv_path: cannot open " + file);
    out << "t";
    for (int i = 0; i < p.dim(); ++i) out << ",mode_" << i;
    out << "\n";
    char buf[32];
    for (int j = 0; j < p.nodes(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", p.times[j]);
        out << buf;
        for (int i = 0; i < p.dim(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", p.at(j, i));
            out << ',' << buf;
        }
        out << "\n";
    }
}

GridPath read_csv_path(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("read_csv_path: cannot open " + file);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_csv_path: empty file " + file);
    int dim = -1; // header: t,mode_0,...
    for (char c : line) if (c == ',') ++dim;
    ++dim;
    if (dim < 1) throw std::runtime_error("read_csv_path: header has no mode columns in " + file);
    std::vector<double> times;
    std::vector<double> data;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        times.push_back(std::stod(cell));
        for (int i = 0; i < dim; ++i) {
            if (!std::getline(ss, cell, ','))
                throw std::runtime_error("read_csv_path: short row in " + file);
            data.push_back(std::stod(cell));
        }
    }
    GridPath p(times, dim);
    p.data = std::move(data);
    return p;
}

std::uint64_t grid_hash(const std::vector<double>& times) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ULL;
    };
    mix(times.size());
    for (double t : times) {
        std::uint64_t bits;
        static_assert(sizeof bits == sizeof t);
        std::memcpy(&bits, &t, sizeof bits);
        mix(bits);
    }
    return h;
}

std::string cache_key(std::uint64_t seed, double H, const std::vector<double>& times) {
    std::uint64_t hbits;
    std::memcpy(&hbits, &H, sizeof hbits);
    char buf[80];
    std::snprintf(buf, sizeof buf, "fbm_%016llx_%016llx_%016llx.bin",
                  static_cast<unsigned long long>(seed),
                  static_cast<unsigned long long>(hbits),
                  static_cast<unsigned long long>(grid_hash(times)));
    return buf;
}

bool cache_load(const std::string& dir, const std::string& key, GridPath& out) {
    std::ifstream in(std::filesystem::path(dir) / key, std::ios::binary);
    if (!in) return false;
    std::uint64_t n = 0, d = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&d), sizeof d);
    if (!in || n == 0 || d == 0) return false;
    std::vector<double> times(n);
    in.read(reinterpret_cast<char*>(times.data()), std::streamsize(n * sizeof(double)));
    GridPath p(times, static_cast<int>(d));
    in.read(reinterpret_cast<char*>(p.data.data()), std::streamsize(n * d * sizeof(double)));
    if (!in) return false;
    out = std::move(p);
    return true;
}

void cache_store(const std::string& dir, const std::string& key, const GridPath& p) {
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / key, std::ios::binary);
    if (!out) throw std::runtime_error("cache_store: cannot open cache file");
    std::uint64_t n = p.nodes(), d = p.dim();
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&d), sizeof d);
    out.write(reinterpret_cast<const char*>(p.times.data()), std::streamsize(n * sizeof(double)));
    out.write(reinterpret_cast<const char*>(p.data.data()), std::streamsize(n * d * sizeof(double)));
}

} // namespace mfbm
