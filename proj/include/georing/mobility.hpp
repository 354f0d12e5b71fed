#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "georing/geometry.hpp"
#include "georing/params.hpp"

namespace georing {

using NodeId = std::uint32_t;

struct MobilityConfig {
    double sigma = 1.0;
    double dt = 1.0;
};

/// Uniform bucket grid over the box. Rebuilt wholesale; queries return ids
/// sorted by (distance, id).
class SpatialGrid {
public:
    SpatialGrid() = default;
    SpatialGrid(const BoxRegion& box, double cell);

    void rebuild(std::span<const Point2> positions);

    std::vector<NodeId> within(std::span<const Point2> positions, Point2 p, double radius) const;

    /// Ids in the closed annulus, ascending id order.
    std::vector<NodeId> in_ring(std::span<const Point2> positions, const Annulus& ring) const;

    double cell() const { return cell_; }

private:
    int clamp_cell(double v) const;

    double cell_ = 1.0;
    int cols_ = 1;
    std::vector<std::uint32_t> start_;  // cols_*cols_ + 1 offsets
    std::vector<NodeId> ids_;
};

class World {
public:
    World(std::vector<Point2> positions, BoxRegion box, double cell, std::uint64_t seed);

    std::span<const Point2> positions() const { return positions_; }
    Point2 position(NodeId id) const { return positions_.at(id); }
    void set_position(NodeId id, Point2 p);
    std::size_t size() const { return positions_.size(); }

    const BoxRegion& box() const { return box_; }
    double clock() const { return clock_; }
    void set_clock(double t) { clock_ = t; }

    std::mt19937_64& rng() { return rng_; }

    /// Rebuilds the grid if positions changed since the last query.
    const SpatialGrid& grid() const;

    /// Ids with distance <= radius, sorted by distance then id.
    std::vector<NodeId> neighbors_within(Point2 p, double radius) const;

    /// Moves every node by one Brownian increment of length dt (exact for
    /// reflected diffusion at any dt, since folding is exact).
    void advance(double dt, const MobilityConfig& cfg);
    /// As advance(), leaving one node untouched (its path is driven elsewhere).
    void advance_except(double dt, const MobilityConfig& cfg, NodeId keep);

    void write_csv(std::ostream& os) const;

private:
    std::vector<Point2> positions_;
    BoxRegion box_;
    double clock_ = 0.0;
    std::mt19937_64 rng_;
    mutable SpatialGrid grid_;
    mutable bool grid_dirty_ = true;
};

/// n i.i.d. uniform nodes in the sqrt(n) box, grid cell = communication radius.
World init_world(const ProtocolParams& params, std::uint64_t seed);

/// One Gaussian step N(0, sigma^2 dt) per coordinate, then folded into the box.
Point2 brownian_step(Point2 p, const MobilityConfig& cfg, const BoxRegion& box, std::mt19937_64& rng);

/// Advances the whole world by dt; clock += dt.
void advance_world(World& world, double dt, const MobilityConfig& cfg);

std::vector<NodeId> neighbors_within(const World& world, Point2 p, double radius);

}  // namespace georing
