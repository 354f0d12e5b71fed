#include "georing/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace georing {

SpatialGrid::SpatialGrid(const BoxRegion& box, double cell) : cell_(cell)
{
    if (!(cell > 0.0))
        throw std::invalid_argument("grid cell must be positive");
    double c = std::ceil(box.side / cell);
    cols_ = static_cast<int>(std::clamp(c, 1.0, 4096.0));
    cell_ = box.side / cols_ < cell ? cell : box.side / cols_;
    start_.assign(static_cast<std::size_t>(cols_) * cols_ + 1, 0);
}

int SpatialGrid::clamp_cell(double v) const
{
    int c = static_cast<int>(std::floor(v / cell_));
    return std::clamp(c, 0, cols_ - 1);
}

void SpatialGrid::rebuild(std::span<const Point2> positions)
{
    std::size_t cells = static_cast<std::size_t>(cols_) * cols_;
    std::vector<std::uint32_t> cell_of(positions.size());
    std::fill(start_.begin(), start_.end(), 0u);
    for (std::size_t i = 0; i < positions.size(); ++i) {
        auto c = static_cast<std::uint32_t>(clamp_cell(positions[i].y) * cols_ + clamp_cell(positions[i].x));
        cell_of[i] = c;
        ++start_[c + 1];
    }
    for (std::size_t c = 0; c < cells; ++c)
        start_[c + 1] += start_[c];
    ids_.resize(positions.size());
    std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < positions.size(); ++i)
        ids_[fill[cell_of[i]]++] = static_cast<NodeId>(i);
}

std::vector<NodeId> SpatialGrid::within(std::span<const Point2> positions, Point2 p, double radius) const
{
    std::vector<std::pair<double, NodeId>> hits;
    int x0 = clamp_cell(p.x - radius), x1 = clamp_cell(p.x + radius);
    int y0 = clamp_cell(p.y - radius), y1 = clamp_cell(p.y + radius);
    for (int cy = y0; cy <= y1; ++cy) {
        for (int cx = x0; cx <= x1; ++cx) {
            std::size_t c = static_cast<std::size_t>(cy) * cols_ + cx;
            for (std::uint32_t k = start_[c]; k < start_[c + 1]; ++k) {
                NodeId id = ids_[k];
                double d = distance(positions[id], p);
                if (d <= radius)
                    hits.emplace_back(d, id);
            }
        }
    }
    std::sort(hits.begin(), hits.end());
    std::vector<NodeId> out;
    out.reserve(hits.size());
    for (const auto& h : hits)
        out.push_back(h.second);
    return out;
}

std::vector<NodeId> SpatialGrid::in_ring(std::span<const Point2> positions, const Annulus& ring) const
{
    std::vector<NodeId> out;
    double outer = ring.outer_radius();
    int x0 = clamp_cell(ring.center.x - outer), x1 = clamp_cell(ring.center.x + outer);
    int y0 = clamp_cell(ring.center.y - outer), y1 = clamp_cell(ring.center.y + outer);
    for (int cy = y0; cy <= y1; ++cy) {
        for (int cx = x0; cx <= x1; ++cx) {
            // skip cells entirely inside the hole or entirely beyond the outer edge
            double lx = cx * cell_, ly = cy * cell_;
            double nx = std::clamp(ring.center.x, lx, lx + cell_) - ring.center.x;
            double ny = std::clamp(ring.center.y, ly, ly + cell_) - ring.center.y;
            if (std::hypot(nx, ny) > outer)
                continue;
            double fx = std::max(std::abs(lx - ring.center.x), std::abs(lx + cell_ - ring.center.x));
            double fy = std::max(std::abs(ly - ring.center.y), std::abs(ly + cell_ - ring.center.y));
            if (std::hypot(fx, fy) < ring.inner_radius)
                continue;
            std::size_t c = static_cast<std::size_t>(cy) * cols_ + cx;
            for (std::uint32_t k = start_[c]; k < start_[c + 1]; ++k)
                if (in_annulus(positions[ids_[k]], ring))
                    out.push_back(ids_[k]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

World::World(std::vector<Point2> positions, BoxRegion box, double cell, std::uint64_t seed)
    : positions_(std::move(positions)), box_(box), rng_(seed), grid_(box, cell)
{
}

void World::set_position(NodeId id, Point2 p)
{
    positions_.at(id) = p;
    grid_dirty_ = true;
}

const SpatialGrid& World::grid() const
{
    if (grid_dirty_) {
        grid_.rebuild(positions_);
        grid_dirty_ = false;
    }
    return grid_;
}

std::vector<NodeId> World::neighbors_within(Point2 p, double radius) const
{
    return grid().within(positions_, p, radius);
}

void World::advance(double dt, const MobilityConfig& cfg)
{
    advance_except(dt, cfg, static_cast<NodeId>(positions_.size()));
}

void World::advance_except(double dt, const MobilityConfig& cfg, NodeId keep)
{
    if (dt < 0.0)
        throw std::invalid_argument("advance: negative dt");
    clock_ += dt;
    if (dt == 0.0 || cfg.sigma == 0.0)
        return;
    MobilityConfig step{cfg.sigma, dt};
    for (std::size_t i = 0; i < positions_.size(); ++i)
        if (i != keep)
            positions_[i] = brownian_step(positions_[i], step, box_, rng_);
    grid_dirty_ = true;
}

void World::write_csv(std::ostream& os) const
{
    char buf[96];
    os << "id,x,y\r\n";
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g\r\n", i, positions_[i].x, positions_[i].y);
        os << buf;
    }
}

World init_world(const ProtocolParams& params, std::uint64_t seed)
{
    params.check();
    BoxRegion box(params.box_side());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0.0, box.side);
    auto count = static_cast<std::size_t>(params.n);
    std::vector<Point2> pos(count);
    for (auto& p : pos)
        p = {coord(rng), coord(rng)};
    // the world's own stream continues from the placement stream
    return World(std::move(pos), box, params.comm_radius(), rng());
}

Point2 brownian_step(Point2 p, const MobilityConfig& cfg, const BoxRegion& box, std::mt19937_64& rng)
{
    if (cfg.sigma == 0.0 || cfg.dt == 0.0)
        return p;
    std::normal_distribution<double> g(0.0, cfg.sigma * std::sqrt(cfg.dt));
    Point2 q{p.x + g(rng), p.y + g(rng)};
    return reflect_into_box(q, box);
}

void advance_world(World& world, double dt, const MobilityConfig& cfg)
{
    world.advance(dt, cfg);
}

std::vector<NodeId> neighbors_within(const World& world, Point2 p, double radius)
{
    return world.neighbors_within(p, radius);
}

}  // namespace georing
