#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "gen.hpp"
#include "georing/mobility.hpp"

using namespace georing;

namespace {

std::vector<NodeId> brute_within(std::span<const Point2> pos, Point2 p, double radius)
{
    std::vector<NodeId> out;
    for (NodeId i = 0; i < pos.size(); ++i)
        if (distance(pos[i], p) <= radius)
            out.push_back(i);
    std::sort(out.begin(), out.end(), [&](NodeId a, NodeId b) {
        double da = distance(pos[a], p), db = distance(pos[b], p);
        return da != db ? da < db : a < b;
    });
    return out;
}

// One-sample Kolmogorov-Smirnov statistic against U(0, side).
double ks_uniform(std::vector<double> v, double side)
{
    std::sort(v.begin(), v.end());
    double d = 0.0, n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double f = v[i] / side;
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

}  // namespace

TEST_CASE("init_world places n nodes inside the box")
{
    ProtocolParams p = make_profile(Profile::reference_eps2, 4);
    World w = init_world(p, 5);
    CHECK(w.size() == 4);
    CHECK(w.box().side == doctest::Approx(2.0));
    for (Point2 q : w.positions())
        CHECK(w.box().contains(q));
}

TEST_CASE("init_world is deterministic per seed")
{
    ProtocolParams p = make_profile(Profile::reference_eps2, 1000);
    World a = init_world(p, 9), b = init_world(p, 9), c = init_world(p, 10);
    CHECK(std::equal(a.positions().begin(), a.positions().end(), b.positions().begin()));
    CHECK_FALSE(std::equal(a.positions().begin(), a.positions().end(), c.positions().begin()));
}

TEST_CASE("init_world cell counts follow the Poisson spread")
{
    ProtocolParams p = make_profile(Profile::reference_eps0, 1e5);
    World w = init_world(p, 6);
    double r = p.comm_radius(), side = w.box().side;
    int cols = static_cast<int>(side / r);
    std::vector<int> counts(static_cast<std::size_t>(cols * cols), 0);
    for (Point2 q : w.positions()) {
        int cx = static_cast<int>(q.x / r), cy = static_cast<int>(q.y / r);
        if (cx < cols && cy < cols)
            ++counts[static_cast<std::size_t>(cy * cols + cx)];
    }
    int good = 0;
    for (int c : counts)
        good += std::abs(c - r * r) <= 3 * r;
    CHECK(good >= 0.99 * counts.size());
}

TEST_CASE("brownian step")
{
    BoxRegion box(10.0);
    std::mt19937_64 rng(7);
    CHECK(brownian_step({3, 4}, {0.0, 1.0}, box, rng) == Point2{3, 4});
    for (int k = 0; k < 1000; ++k)
        CHECK(box.contains(brownian_step({0.01, 5}, {25.0, 1.0}, box, rng)));

    BoxRegion huge(1e7);
    Point2 start{5e6, 5e6};
    double msd = 0.0;
    const int steps = 100000;
    for (int k = 0; k < steps; ++k) {
        Point2 q = brownian_step(start, {1.0, 1.0}, huge, rng);
        msd += (q - start).dot(q - start);
    }
    CHECK(msd / steps == doctest::Approx(2.0).epsilon(0.025));
}

TEST_CASE("advance_world")
{
    ProtocolParams p = make_profile(Profile::reference_eps0, 5000);
    World w = init_world(p, 8);
    std::vector<Point2> before(w.positions().begin(), w.positions().end());
    advance_world(w, 0.0, {1.0, 0.0});
    CHECK(std::equal(before.begin(), before.end(), w.positions().begin()));
    advance_world(w, 2.5, {1.0, 2.5});
    CHECK(w.clock() == doctest::Approx(2.5));

    for (int k = 0; k < 20; ++k)
        advance_world(w, 50.0, {1.0, 50.0});
    std::vector<double> xs, ys;
    for (Point2 q : w.positions()) {
        xs.push_back(q.x);
        ys.push_back(q.y);
    }
    double crit = 1.63 / std::sqrt(static_cast<double>(xs.size()));  // p = 0.01
    CHECK(ks_uniform(xs, w.box().side) < crit);
    CHECK(ks_uniform(ys, w.box().side) < crit);
}

TEST_CASE("neighbor queries agree with brute force")
{
    ProtocolParams p = make_profile(Profile::reference_eps2, 5000);
    World w = init_world(p, 10);
    std::mt19937_64 rng(11);
    double side = w.box().side;
    for (int k = 0; k < 100; ++k) {
        Point2 q = testgen::point(rng, 0, side);
        double rad = testgen::uniform(rng, 0.5, 3 * p.comm_radius());
        CHECK(neighbors_within(w, q, rad) == brute_within(w.positions(), q, rad));
    }
    // frozen positions: repeated queries after a forced rebuild agree
    auto first = w.neighbors_within({side / 2, side / 2}, 6.0);
    w.set_position(0, w.position(0));
    CHECK(w.neighbors_within({side / 2, side / 2}, 6.0) == first);
}

TEST_CASE("neighbor query edge cases")
{
    std::vector<Point2> pos{{1, 1}, {1, 1}, {2, 1}, {0, 0}};
    World w(pos, BoxRegion(4.0), 1.0, 1);
    CHECK(w.neighbors_within({1, 1}, 0.0) == std::vector<NodeId>{0, 1});
    auto corner = w.neighbors_within({0, 0}, 1.0);
    CHECK(corner == std::vector<NodeId>{3});
    for (NodeId id : w.neighbors_within({4, 4}, 10.0))
        CHECK(id < pos.size());
}

TEST_CASE("spatial grid ring query matches a scan")
{
    ProtocolParams p = make_profile(Profile::reference_eps2, 20000);
    World w = init_world(p, 12);
    Annulus ring({40, 60}, 18.0, 7.0);
    std::vector<NodeId> expect;
    for (NodeId i = 0; i < w.size(); ++i)
        if (in_annulus(w.position(i), ring))
            expect.push_back(i);
    CHECK(w.grid().in_ring(w.positions(), ring) == expect);
}
