#include "biwave/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "biwave/errors.hpp"

namespace biwave {

namespace {

// Explicit little-endian packing keeps the on-disk format fixed even on a
// big-endian host.
void put_u32(std::string& out, std::uint32_t x) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t x) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof(bits));
    put_u64(out, bits);
}

class Reader {
  public:
    Reader(const std::string& data, const std::string& path) : data_(data), path_(path) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t x = 0;
        for (int i = 0; i < 4; ++i)
            x |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return x;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t x = 0;
        for (int i = 0; i < 8; ++i)
            x |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return x;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double x;
        std::memcpy(&x, &bits, sizeof(x));
        return x;
    }
    std::size_t remaining() const { return data_.size() - pos_; }
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n)
            throw ConfigError("snapshot file '" + path_ + "' is truncated");
    }

  private:
    const std::string& data_;
    std::string path_;
    std::size_t pos_ = 0;
};

}  // namespace

void write_snapshot(const std::string& path, const State& s, int sphere_dim, double epsilon) {
    require_same_shape(s.u, s.v, "write_snapshot");
    std::string out;
    out.reserve(64 + 2 * s.u.values.size() * 8);
    out += "BIWV";
    put_u32(out, 1u);
    put_u32(out, static_cast<std::uint32_t>(s.u.grid.dim));
    put_u32(out, static_cast<std::uint32_t>(sphere_dim));
    for (int a = 0; a < s.u.grid.dim; ++a)
        put_u64(out, static_cast<std::uint64_t>(s.u.grid.points[a]));
    for (int a = 0; a < s.u.grid.dim; ++a) put_f64(out, s.u.grid.lengths[a]);
    put_f64(out, s.t);
    put_f64(out, epsilon);
    for (double x : s.u.values) put_f64(out, x);
    for (double x : s.v.values) put_f64(out, x);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot open snapshot file '" + path + "' for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw ConfigError("short write to snapshot file '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open snapshot file '" + path + "'");
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    if (data.size() < 4 || data.compare(0, 4, "BIWV") != 0)
        throw ConfigError("snapshot file '" + path + "' has wrong magic");

    Reader rd(data, path);
    rd.u32();  // magic bytes, already checked
    const std::uint32_t version = rd.u32();
    if (version != 1u) throw ConfigError("snapshot file '" + path + "' has unsupported version");
    const int dim = static_cast<int>(rd.u32());
    const int sphere_dim = static_cast<int>(rd.u32());
    if (dim < 1 || dim > 2 || sphere_dim < 1)
        throw ConfigError("snapshot file '" + path + "' has invalid dimensions");

    std::vector<int> points(dim);
    for (int a = 0; a < dim; ++a) points[a] = static_cast<int>(rd.u64());
    std::vector<double> lengths(dim);
    for (int a = 0; a < dim; ++a) lengths[a] = rd.f64();

    Snapshot snap;
    snap.sphere_dim = sphere_dim;
    snap.state.t = rd.f64();
    snap.epsilon = rd.f64();

    GridSpec grid = make_grid(dim, points, lengths);
    const int ambient = sphere_dim + 1;
    const std::size_t count = grid.num_points() * static_cast<std::size_t>(ambient);
    if (rd.remaining() != 2 * count * 8)
        throw ConfigError("snapshot file '" + path + "' has wrong payload length");

    snap.state.u = Field(grid, ambient);
    snap.state.v = Field(grid, ambient);
    for (std::size_t i = 0; i < count; ++i) snap.state.u.values[i] = rd.f64();
    for (std::size_t i = 0; i < count; ++i) snap.state.v.values[i] = rd.f64();
    return snap;
}

}  // namespace biwave
