#pragma once

#include <array>
#include <optional>
#include <unordered_map>
#include <vector>

#include "slicesim/vec2.hpp"

namespace slicesim {

inline constexpr int kNumCells = 57;
inline constexpr int kNumClusters = 19;
inline constexpr int kCochannelDegree = 6;

struct CellGeom {
    int id = 0;          // 1..57, the layout's printed numbering
    int cluster_id = 0;  // 1..19
    int freq = 0;        // 1..3, reuse plan
    Vec2 center;
    Vec2 bs_pos;
    double boresight_rad = 0.0;  // sector bearing from the base station toward the cell center, in [0, 2pi)
    std::array<int, kCochannelDegree> cochannel{};  // same-frequency interferer cell ids, ascending
    int ix = 0, iy = 0;  // integer center coordinates in units of (s, t)
};

struct Cluster {
    int id = 0;
    Vec2 bs_pos;
    std::array<int, 3> members{};  // cell ids ordered by frequency 1, 2, 3
};

// The 57-cell wrap-around layout: pointy-top hexagons of circumradius
// R = isd/3 with centers on the lattice (ix*s, iy*t), s = sqrt(3)/2*R,
// t = R/2. The torus is spanned by U1 = (15s, 3t), U2 = (6s, 24t).
class Grid {
public:
    explicit Grid(double isd_m);

    double isd() const { return isd_; }
    double hex_circumradius() const { return 2.0 * t_; }
    double unit_s() const { return s_; }
    double unit_t() const { return t_; }
    double cell_area() const { return 6.0 * s_ * t_; }
    double domain_area() const { return 342.0 * s_ * t_; }
    Vec2 lattice_u1() const { return u1_; }
    Vec2 lattice_u2() const { return u2_; }

    int num_cells() const { return kNumCells; }
    const CellGeom& cell(int id) const;
    const std::vector<Cluster>& clusters() const { return clusters_; }

    // Hexagon corners of a cell, counterclockwise from the east vertex pair.
    std::array<Vec2, 6> cell_vertices(int id) const;

    // Cell containing p, or nullopt when p falls outside the drawn domain.
    std::optional<int> try_locate(Vec2 p) const;

    // Cell containing p; p must lie inside the fundamental domain. Boundary
    // ties resolve to the lowest adjacent cell id.
    int locate_cell(Vec2 p) const;

    // Translates p by torus lattice vectors into the fundamental domain.
    // Identity (bitwise) for points already inside.
    Vec2 wrap(Vec2 p) const;

    // Minimum-image displacement b - a over all lattice translations.
    Vec2 wrapped_displacement(Vec2 a, Vec2 b) const;

    // Time until a ray from pos (inside the cell) with unit direction dir at
    // the given speed first crosses the cell's boundary. Returns 0 when pos
    // already sits on or outside the boundary along dir.
    double exit_time(int cell_id, Vec2 pos, Vec2 dir, double speed_mps) const;

    // Signed distance of p past the cell's boundary: negative inside,
    // positive outside, 0 on an edge.
    double boundary_excess(int cell_id, Vec2 p) const;

private:
    int cell_at_lattice(int ix, int iy) const;  // 0 when absent

    double isd_ = 0.0, s_ = 0.0, t_ = 0.0;
    Vec2 u1_, u2_;
    double det_ = 0.0;
    Vec2 anchor_;
    std::array<CellGeom, kNumCells> cells_{};
    std::vector<Cluster> clusters_;
    std::unordered_map<int, int> lattice_to_id_;
};

Grid build_grid(double isd_m);

}  // namespace slicesim
