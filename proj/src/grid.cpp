#include "slicesim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace slicesim {

namespace {

// Cell centers in integer (s, t) units, rows top to bottom as printed in the
// reference layout; ids are the printed cell numbers.
struct LatticeCell { int ix, iy, id; };

constexpr LatticeCell kCellTable[kNumCells] = {
    {-1, 0, 44},   {1, 0, 43},
    {-4, -3, 29},  {-2, -3, 28},  {0, -3, 45},   {2, -3, 26},   {4, -3, 25},
    {-7, -6, 47},  {-5, -6, 46},  {-3, -6, 30},  {-1, -6, 8},   {1, -6, 7},
    {3, -6, 27},   {5, -6, 41},   {7, -6, 40},
    {-6, -9, 48},  {-4, -9, 11},  {-2, -9, 10},  {0, -9, 9},    {2, -9, 5},
    {4, -9, 4},    {6, -9, 42},
    {-7, -12, 32}, {-5, -12, 31}, {-3, -12, 12}, {-1, -12, 2},  {1, -12, 1},
    {3, -12, 6},   {5, -12, 23},  {7, -12, 22},
    {-6, -15, 33}, {-4, -15, 14}, {-2, -15, 13}, {0, -15, 3},   {2, -15, 20},
    {4, -15, 19},  {6, -15, 24},
    {-7, -18, 50}, {-5, -18, 49}, {-3, -18, 15}, {-1, -18, 17}, {1, -18, 16},
    {3, -18, 21},  {5, -18, 56},  {7, -18, 55},
    {-6, -21, 51}, {-4, -21, 35}, {-2, -21, 34}, {0, -21, 18},  {2, -21, 38},
    {4, -21, 37},  {6, -21, 57},
    {-3, -24, 36}, {-1, -24, 53}, {1, -24, 52},  {3, -24, 39},
    {0, -27, 54},
};

// Base stations sit on shared hexagon corners; each serves the three
// surrounding cells with sectors at 30, 150 and 270 degrees.
struct LatticeBs { int ix, iy; };

constexpr LatticeBs kBsTable[kNumClusters] = {
    {0, -1},  {0, -7},  {0, -13},  {0, -19},  {0, -25},
    {3, -4},  {3, -10}, {3, -16},  {3, -22},
    {-3, -4}, {-3, -10}, {-3, -16}, {-3, -22},
    {6, -7},  {6, -13}, {6, -19},
    {-6, -7}, {-6, -13}, {-6, -19},
};

constexpr int lattice_key(int ix, int iy) { return (ix + 64) * 256 + (iy + 64); }

// Co-channel offsets in (s, t) units: the six nearest same-sector cells,
// each at lattice distance one inter-station spacing.
constexpr int kCochannelOffsets[kCochannelDegree][2] = {
    {3, 3}, {-3, -3}, {3, -3}, {-3, 3}, {0, 6}, {0, -6},
};

// Torus translations in (s, t) units.
constexpr int kU1x = 15, kU1y = 3, kU2x = 6, kU2y = 24;

constexpr double kTieToleranceM2 = 1e-9;  // squared-distance slack for boundary ties

}  // namespace

Grid::Grid(double isd_m) {
    if (!(isd_m > 0.0)) throw std::invalid_argument("Grid: inter-station distance must be positive");
    isd_ = isd_m;
    double r = isd_m / 3.0;  // hexagon circumradius
    t_ = 0.5 * r;
    s_ = 0.5 * std::sqrt(3.0) * r;
    u1_ = {kU1x * s_, kU1y * t_};
    u2_ = {kU2x * s_, kU2y * t_};
    det_ = u1_.x * u2_.y - u1_.y * u2_.x;

    for (int i = 0; i < kNumCells; ++i) {
        const LatticeCell& lc = kCellTable[i];
        CellGeom& c = cells_[lc.id - 1];
        c.id = lc.id;
        c.ix = lc.ix;
        c.iy = lc.iy;
        c.center = {lc.ix * s_, lc.iy * t_};
        lattice_to_id_[lattice_key(lc.ix, lc.iy)] = lc.id;
    }

    anchor_ = {0.0, 0.0};
    for (const CellGeom& c : cells_) anchor_ += (1.0 / kNumCells) * c.center;

    // Assign each cell to the unique base station adjacent in one of the
    // three sector roles, and derive boresight and frequency from the role.
    std::unordered_map<int, int> bs_index;
    for (int b = 0; b < kNumClusters; ++b) {
        bs_index[lattice_key(kBsTable[b].ix, kBsTable[b].iy)] = b;
    }
    const double pi = std::numbers::pi;
    struct Role { int dx, dy, freq; double bearing; };
    const Role roles[3] = {
        {-1, -1, 1, pi / 6.0},        // station sits southwest of the center
        {1, -1, 2, 5.0 * pi / 6.0},   // station sits southeast
        {0, 2, 3, 3.0 * pi / 2.0},    // station sits north
    };
    std::vector<std::vector<int>> members(kNumClusters);
    for (CellGeom& c : cells_) {
        int matches = 0;
        for (const Role& role : roles) {
            auto it = bs_index.find(lattice_key(c.ix + role.dx, c.iy + role.dy));
            if (it == bs_index.end()) continue;
            ++matches;
            c.freq = role.freq;
            c.boresight_rad = role.bearing;
            c.bs_pos = {kBsTable[it->second].ix * s_, kBsTable[it->second].iy * t_};
            members[it->second].push_back(c.id);
        }
        if (matches != 1) throw std::logic_error("Grid: cell has no unique serving station");
    }

    // Cluster numbering: stations sorted top row first, then left to right.
    std::array<int, kNumClusters> order{};
    for (int b = 0; b < kNumClusters; ++b) order[b] = b;
    std::sort(order.begin(), order.end(), [](int a, int b) {
        if (kBsTable[a].iy != kBsTable[b].iy) return kBsTable[a].iy > kBsTable[b].iy;
        return kBsTable[a].ix < kBsTable[b].ix;
    });
    clusters_.resize(kNumClusters);
    for (int rank = 0; rank < kNumClusters; ++rank) {
        int b = order[rank];
        Cluster& cl = clusters_[rank];
        cl.id = rank + 1;
        cl.bs_pos = {kBsTable[b].ix * s_, kBsTable[b].iy * t_};
        if (members[b].size() != 3) throw std::logic_error("Grid: cluster does not have 3 cells");
        for (int cid : members[b]) {
            cells_[cid - 1].cluster_id = cl.id;
            cl.members[cells_[cid - 1].freq - 1] = cid;
        }
    }

    // Co-channel neighbors: translate each offset back into the drawn domain
    // with integer torus arithmetic.
    for (CellGeom& c : cells_) {
        int found = 0;
        for (const auto& off : kCochannelOffsets) {
            int nx = c.ix + off[0], ny = c.iy + off[1];
            int hit = 0;
            for (int m = -2; m <= 2 && hit == 0; ++m) {
                for (int n = -2; n <= 2 && hit == 0; ++n) {
                    hit = cell_at_lattice(nx + m * kU1x + n * kU2x, ny + m * kU1y + n * kU2y);
                }
            }
            if (hit == 0) throw std::logic_error("Grid: co-channel neighbor not found");
            c.cochannel[found++] = hit;
        }
        std::sort(c.cochannel.begin(), c.cochannel.end());
    }
}

int Grid::cell_at_lattice(int ix, int iy) const {
    if (ix < -64 || ix > 63 || iy < -64 || iy > 63) return 0;
    auto it = lattice_to_id_.find(lattice_key(ix, iy));
    return it == lattice_to_id_.end() ? 0 : it->second;
}

const CellGeom& Grid::cell(int id) const {
    if (id < 1 || id > kNumCells) throw std::out_of_range("Grid::cell: id out of range");
    return cells_[id - 1];
}

std::array<Vec2, 6> Grid::cell_vertices(int id) const {
    const CellGeom& c = cell(id);
    std::array<Vec2, 6> v{};
    v[0] = c.center + Vec2{s_, -t_};
    v[1] = c.center + Vec2{s_, t_};
    v[2] = c.center + Vec2{0.0, 2.0 * t_};
    v[3] = c.center + Vec2{-s_, t_};
    v[4] = c.center + Vec2{-s_, -t_};
    v[5] = c.center + Vec2{0.0, -2.0 * t_};
    return v;
}

std::optional<int> Grid::try_locate(Vec2 p) const {
    // Round to the nearest hexagon in axial coordinates, then resolve against
    // the exact squared distances of that hexagon and its six neighbors. The
    // layout's centers sit at ix = 2q + r + 1, iy = -3r.
    double rf = -p.y / (3.0 * t_);
    double qf = 0.5 * (p.x / s_ - 1.0 - rf);
    double sf = -qf - rf;
    double q = std::round(qf), r = std::round(rf), s3 = std::round(sf);
    double dq = std::fabs(q - qf), dr = std::fabs(r - rf), ds = std::fabs(s3 - sf);
    if (dq > dr && dq > ds) {
        q = -r - s3;
    } else if (dr > ds) {
        r = -q - s3;
    }
    int qi = static_cast<int>(q), ri = static_cast<int>(r);

    static constexpr int dirs[7][2] = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}};
    int cand_ids[7];
    double cand_d2[7];
    int n_cand = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const auto& d : dirs) {
        int cq = qi + d[0], cr = ri + d[1];
        int id = cell_at_lattice(2 * cq + cr + 1, -3 * cr);
        if (id == 0) continue;
        double d2 = norm2(p - cells_[id - 1].center);
        cand_ids[n_cand] = id;
        cand_d2[n_cand] = d2;
        ++n_cand;
        if (d2 < best_d2) best_d2 = d2;
    }
    int best_id = 0;
    for (int i = 0; i < n_cand; ++i) {
        if (cand_d2[i] <= best_d2 + kTieToleranceM2 && (best_id == 0 || cand_ids[i] < best_id)) {
            best_id = cand_ids[i];
        }
    }
    if (best_id == 0) return std::nullopt;
    // The nearest drawn center only contains p if p's true hexagon is drawn;
    // otherwise p lies outside the domain.
    Vec2 rel = p - cells_[best_id - 1].center;
    double reach = std::max({std::fabs(rel.x),
                             std::fabs(0.5 * rel.x + 0.8660254037844386 * rel.y),
                             std::fabs(0.5 * rel.x - 0.8660254037844386 * rel.y)});
    if (reach > s_ + 1e-9) return std::nullopt;
    return best_id;
}

int Grid::locate_cell(Vec2 p) const {
    auto id = try_locate(p);
    if (!id) throw std::domain_error("locate_cell: position outside the fundamental domain");
    return *id;
}

Vec2 Grid::wrap(Vec2 p) const {
    if (try_locate(p)) return p;
    double a1 = (p.x - anchor_.x) * u2_.y - (p.y - anchor_.y) * u2_.x;
    double a2 = u1_.x * (p.y - anchor_.y) - u1_.y * (p.x - anchor_.x);
    double m0 = std::round(a1 / det_);
    double n0 = std::round(a2 / det_);
    Vec2 base = p - m0 * u1_ - n0 * u2_;
    // The reduced point is within one translate of the drawn domain; scan a
    // small neighborhood nearest-first.
    static constexpr int ring[25][2] = {
        {0, 0},  {-1, 0}, {0, -1}, {0, 1},  {1, 0},  {-1, -1}, {-1, 1}, {1, -1}, {1, 1},
        {-2, 0}, {0, -2}, {0, 2},  {2, 0},  {-2, -1}, {-2, 1}, {-1, -2}, {-1, 2}, {1, -2},
        {1, 2},  {2, -1}, {2, 1},  {-2, -2}, {-2, 2}, {2, -2}, {2, 2},
    };
    for (const auto& mn : ring) {
        Vec2 cand = base + static_cast<double>(mn[0]) * u1_ + static_cast<double>(mn[1]) * u2_;
        if (try_locate(cand)) return cand;
    }
    throw std::logic_error("wrap: could not reduce point into the domain");
}

Vec2 Grid::wrapped_displacement(Vec2 a, Vec2 b) const {
    Vec2 d = b - a;
    double m0 = std::round((d.x * u2_.y - d.y * u2_.x) / det_);
    double n0 = std::round((u1_.x * d.y - u1_.y * d.x) / det_);
    Vec2 best{};
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int m = -1; m <= 1; ++m) {
        for (int n = -1; n <= 1; ++n) {
            Vec2 cand = d - (m0 + m) * u1_ - (n0 + n) * u2_;
            double d2 = norm2(cand);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = cand;
            }
        }
    }
    return best;
}

double Grid::exit_time(int cell_id, Vec2 pos, Vec2 dir, double speed_mps) const {
    if (!(speed_mps > 0.0)) throw std::invalid_argument("exit_time: speed must be positive");
    const CellGeom& c = cell(cell_id);
    Vec2 rel = pos - c.center;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 6; ++k) {
        double ang = k * std::numbers::pi / 3.0;
        Vec2 n{std::cos(ang), std::sin(ang)};
        double v = dot(n, dir);
        if (v <= 1e-15) continue;
        double tau = (s_ - dot(n, rel)) / (v * speed_mps);
        if (tau < best) best = tau;
    }
    if (!std::isfinite(best)) throw std::logic_error("exit_time: direction leaves no boundary");
    return std::max(best, 0.0);
}

double Grid::boundary_excess(int cell_id, Vec2 p) const {
    const CellGeom& c = cell(cell_id);
    Vec2 rel = p - c.center;
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 6; ++k) {
        double ang = k * std::numbers::pi / 3.0;
        Vec2 n{std::cos(ang), std::sin(ang)};
        worst = std::max(worst, dot(n, rel) - s_);
    }
    return worst;
}

Grid build_grid(double isd_m) { return Grid(isd_m); }

}  // namespace slicesim
