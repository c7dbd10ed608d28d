#ifndef BIWAVE_SNAPSHOT_HPP
#define BIWAVE_SNAPSHOT_HPP

#include <string>

#include "biwave/dynamics.hpp"

namespace biwave {

/*
 * Binary state snapshot, all little-endian:
 *   bytes 0..3   magic "BIWV"
 *   u32          format version (1)
 *   u32          spatial dimension n
 *   u32          sphere dimension l (ambient dimension l+1)
 *   n x u64      grid points per axis
 *   n x f64      period per axis
 *   f64          time t
 *   f64          penalty epsilon
 * followed by the u values then the v values as f64 arrays in field layout
 * (grid-major, components contiguous per node, last spatial axis fastest).
 * Payload length is 2 * (prod N_i) * (l+1) * 8 bytes.
 */
struct Snapshot {
    State state;
    int sphere_dim = 1;
    double epsilon = 0.0;
};

void write_snapshot(const std::string& path, const State& s, int sphere_dim, double epsilon);
Snapshot read_snapshot(const std::string& path);

}  // namespace biwave

#endif
