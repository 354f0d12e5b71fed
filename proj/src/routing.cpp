#include "georing/routing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "georing/analysis.hpp"

namespace georing {

void store_update(NodeStore& store, const UpdateRecord& record)
{
    for (auto& r : store.records) {
        if (r.dest_id == record.dest_id && r.ring_index == record.ring_index) {
            if (record.issue_time >= r.issue_time)
                r = record;
            return;
        }
    }
    store.records.push_back(record);
}

std::optional<UpdateRecord> best_active_update(const NodeStore& store, Point2 node_pos, double t, NodeId dest_id)
{
    const UpdateRecord* best = nullptr;
    for (const auto& r : store.records) {
        if (r.dest_id != dest_id || !(t < r.expiry_time) || !in_annulus(node_pos, r.ring()))
            continue;
        if (!best || r.ring_index < best->ring_index ||
            (r.ring_index == best->ring_index && r.issue_time > best->issue_time))
            best = &r;
    }
    if (!best)
        return std::nullopt;
    return *best;
}

const char* to_string(ForwardMode m)
{
    switch (m) {
    case ForwardMode::directional: return "directional";
    case ForwardMode::greedy: return "greedy";
    case ForwardMode::face: return "face";
    }
    return "?";
}

const char* to_string(RouteFailure f)
{
    switch (f) {
    case RouteFailure::none: return "none";
    case RouteFailure::ttl: return "ttl";
    case RouteFailure::isolation: return "isolation";
    case RouteFailure::face_loop: return "face_loop";
    }
    return "?";
}

Packet maybe_overwrite_packet(const Packet& packet, const UpdateRecord& record)
{
    bool better = record.ring_index < packet.ring_index ||
                  (record.ring_index == packet.ring_index && record.issue_time > packet.update_time);
    if (!better)
        return packet;
    Packet out = packet;
    out.estimate = record.estimate;
    out.ring_index = record.ring_index;
    out.update_time = record.issue_time;
    if (out.mode == ForwardMode::directional)
        out.mode = ForwardMode::greedy;
    return out;
}

RouteContext make_route_context(const World& world, std::span<const NodeStore> stores, const ProtocolParams& params,
                                const RingSchedule* schedule, double time)
{
    RouteContext ctx;
    ctx.world = &world;
    ctx.stores = stores;
    ctx.time = time;
    ctx.r = params.comm_radius();
    ctx.exact_radius = 2.0 * ctx.r / (1.0 - u_max(params.alpha, params.beta));
    ctx.far_distance = 10.0 * world.box().diameter();
    ctx.schedule = schedule;
    ctx.beta = params.beta;
    return ctx;
}

int default_ttl(const ProtocolParams& params)
{
    return static_cast<int>(std::ceil(20.0 * std::sqrt(2.0 * params.n) / params.comm_radius()));
}

std::vector<NodeId> gabriel_neighbors(const World& world, NodeId relay, double r)
{
    Point2 p = world.position(relay);
    auto nbrs = world.neighbors_within(p, r);
    std::erase(nbrs, relay);
    std::vector<NodeId> out;
    for (NodeId w : nbrs) {
        Point2 q = world.position(w);
        Point2 mid = (p + q) * 0.5;
        double rad = distance(p, q) * 0.5;
        bool blocked = false;
        for (NodeId u : nbrs) {
            if (u != w && distance(world.position(u), mid) < rad) {
                blocked = true;
                break;
            }
        }
        if (!blocked)
            out.push_back(w);
    }
    return out;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double bearing(Point2 from, Point2 to)
{
    return std::atan2(to.y - from.y, to.x - from.x);
}

// Rotation from `ref` to `a` in the sweep direction, mapped to (0, 2pi].
double sweep_gap(double ref, double a, FaceRule rule)
{
    double d = rule == FaceRule::right_hand ? a - ref : ref - a;
    d = std::fmod(d, kTwoPi);
    if (d <= 0.0)
        d += kTwoPi;
    return d;
}

NodeId next_in_sweep(const World& world, Point2 p, const std::vector<NodeId>& planar, double ref, FaceRule rule)
{
    NodeId best = kNoNode;
    double best_gap = INFINITY;
    for (NodeId w : planar) {
        double g = sweep_gap(ref, bearing(p, world.position(w)), rule);
        if (g < best_gap || (g == best_gap && w < best)) {
            best_gap = g;
            best = w;
        }
    }
    return best;
}

// Reflects the stored direction if one more radio hop along it would leave the box.
bool reflect_at_walls(Packet& packet, Point2 p, const BoxRegion& box, double r)
{
    bool hit = false;
    Point2 ahead = p + packet.direction * r;
    if ((ahead.x < 0.0 && packet.direction.x < 0.0) || (ahead.x > box.side && packet.direction.x > 0.0)) {
        packet.direction = reflect_direction(packet.direction, Axis::x);
        hit = true;
    }
    if ((ahead.y < 0.0 && packet.direction.y < 0.0) || (ahead.y > box.side && packet.direction.y > 0.0)) {
        packet.direction = reflect_direction(packet.direction, Axis::y);
        hit = true;
    }
    return hit;
}

}  // namespace

StepResult forward_step(Packet& packet, NodeId relay, const RouteContext& ctx)
{
    if (!ctx.world)
        throw std::invalid_argument("forward_step: no world");
    const World& world = *ctx.world;
    Point2 p = world.position(relay);
    Point2 d = world.position(packet.dest_id);

    StepResult res;
    HopRecord& hop = res.hop;
    hop.relay = relay;
    hop.position = p;

    if (!ctx.stores.empty()) {
        if (auto rec = best_active_update(ctx.stores[relay], p, ctx.time, packet.dest_id)) {
            Packet next = maybe_overwrite_packet(packet, *rec);
            if (next.ring_index != packet.ring_index || next.update_time != packet.update_time) {
                packet = next;
                hop.applied = *rec;
            }
        }
    }

    if (distance(p, d) <= ctx.exact_radius)
        packet.exact_known = true;
    bool exact = packet.exact_known;
    Point2 target;
    if (exact) {
        target = d;
    } else if (packet.estimate) {
        target = *packet.estimate;
    } else {
        if (reflect_at_walls(packet, p, world.box(), ctx.r))
            packet.virtual_target = p + packet.direction * ctx.far_distance;
        target = packet.virtual_target;
    }
    ForwardMode base = exact || packet.estimate ? ForwardMode::greedy : ForwardMode::directional;

    if (packet.mode == ForwardMode::face && (!(target == packet.face.target) || distance(p, target) < packet.face.entry_distance))
        packet.mode = base;
    if (packet.mode != ForwardMode::face)
        packet.mode = base;

    hop.target = target;
    hop.exact = exact;
    hop.ring_index = packet.ring_index;
    hop.uncertainty = exact || packet.estimate ? distance(d, target) / distance(d, p) : NAN;

    auto nbrs = world.neighbors_within(p, ctx.r);
    std::erase(nbrs, relay);
    if (nbrs.empty()) {
        hop.mode = packet.mode;
        res.failure = RouteFailure::isolation;
        return res;
    }

    if (packet.mode != ForwardMode::face) {
        double here = distance(p, target);
        NodeId best = kNoNode;
        double best_d = here;
        for (NodeId w : nbrs) {
            double dw = distance(world.position(w), target);
            if (dw < best_d || (dw == best_d && best != kNoNode && w < best)) {
                best_d = dw;
                best = w;
            }
        }
        if (best != kNoNode) {
            hop.mode = packet.mode;
            res.next = best;
            packet.previous = relay;
            return res;
        }
        packet.mode = ForwardMode::face;
        packet.face = FaceState{};
        packet.face.entry_point = p;
        packet.face.entry_distance = here;
        packet.face.crossing = p;
        packet.face.target = target;
        packet.previous = kNoNode;
    }

    hop.mode = ForwardMode::face;
    auto planar = gabriel_neighbors(world, relay, ctx.r);
    if (planar.empty()) {
        res.failure = RouteFailure::isolation;
        return res;
    }
    FaceState& face = packet.face;
    bool arrived_on_edge = packet.previous != kNoNode && face.hops > 0;
    double ref = arrived_on_edge ? bearing(p, world.position(packet.previous)) : bearing(p, target);
    NodeId cand = next_in_sweep(world, p, planar, ref, ctx.face_rule);

    // Switch faces while the chosen edge crosses entry->target closer to the target.
    for (std::size_t guard = 0; guard <= planar.size(); ++guard) {
        Point2 x;
        Point2 q = world.position(cand);
        if (segment_intersection(p, q, face.entry_point, target, x) &&
            distance(x, target) < distance(face.crossing, target) - 1e-12) {
            face.crossing = x;
            face.first_from = kNoNode;
            face.first_to = kNoNode;
            cand = next_in_sweep(world, p, planar, bearing(p, q), ctx.face_rule);
        } else {
            break;
        }
    }

    if (face.first_from == relay && face.first_to == cand) {
        res.failure = RouteFailure::face_loop;
        return res;
    }
    if (face.first_from == kNoNode) {
        face.first_from = relay;
        face.first_to = cand;
    }
    ++face.hops;
    packet.previous = relay;
    res.next = cand;
    return res;
}

RouteResult route(const RouteContext& ctx, NodeId src, NodeId dest, int ttl, std::mt19937_64& rng)
{
    if (!ctx.world)
        throw std::invalid_argument("route: no world");
    const World& world = *ctx.world;
    if (src == dest)
        throw std::invalid_argument("route: source equals destination");
    if (src >= world.size() || dest >= world.size())
        throw std::out_of_range("route: node id out of range");
    if (!ctx.stores.empty() && ctx.stores.size() != world.size())
        throw std::invalid_argument("route: store count does not match node count");

    RouteResult out;
    Packet packet;
    packet.dest_id = dest;
    packet.ttl = ttl;
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    double a = angle(rng);
    packet.direction = {std::cos(a), std::sin(a)};
    packet.virtual_target = world.position(src) + packet.direction * ctx.far_distance;

    out.straight_line = distance(world.position(src), world.position(dest));
    out.path.push_back(src);

    std::vector<bool> missed;
    if (ctx.schedule)
        missed.assign(static_cast<std::size_t>(ctx.schedule->size()), false);

    NodeId relay = src;
    while (relay != dest) {
        if (packet.ttl <= 0) {
            out.failure = RouteFailure::ttl;
            break;
        }
        StepResult step = forward_step(packet, relay, ctx);
        int hop_index = static_cast<int>(out.log.size());
        if (step.hop.applied) {
            if (out.bootstrap_hop < 0)
                out.bootstrap_hop = hop_index;
            out.rings_acquired.push_back(step.hop.applied->ring_index);
        }
        if (ctx.schedule && packet.bootstrapped() && packet.ring_index != kNoRing && packet.ring_index > 0) {
            int l = packet.ring_index;
            double inner = (*ctx.schedule)[l - 1].radius;
            if (distance(step.hop.position, world.position(dest)) < (1.0 - ctx.beta) * inner &&
                !missed[static_cast<std::size_t>(l - 1)]) {
                missed[static_cast<std::size_t>(l - 1)] = true;
                ++out.misses;
            }
        }
        if (step.hop.mode == ForwardMode::face)
            ++out.face_hops;
        out.log.push_back(step.hop);
        if (step.failure != RouteFailure::none) {
            out.failure = step.failure;
            break;
        }
        out.path_length += distance(world.position(relay), world.position(step.next));
        relay = step.next;
        out.path.push_back(relay);
        --packet.ttl;
        ++packet.hop_count;
    }
    out.delivered = relay == dest;
    out.hops = packet.hop_count;
    return out;
}

void write_trajectory_csv(std::ostream& os, const RouteResult& result)
{
    os << "hop,relay,x,y,target_x,target_y,mode,ring_index,uncertainty,exact,applied_ring\r\n";
    char buf[320];
    for (std::size_t i = 0; i < result.log.size(); ++i) {
        const HopRecord& h = result.log[i];
        char ring[24] = "";
        if (h.ring_index != kNoRing)
            std::snprintf(ring, sizeof ring, "%d", h.ring_index);
        char u[32] = "";
        if (!std::isnan(h.uncertainty))
            std::snprintf(u, sizeof u, "%.9g", h.uncertainty);
        char applied[24] = "";
        if (h.applied)
            std::snprintf(applied, sizeof applied, "%d", h.applied->ring_index);
        std::snprintf(buf, sizeof buf, "%zu,%u,%.9g,%.9g,%.9g,%.9g,%s,%s,%s,%d,%s\r\n", i, h.relay, h.position.x,
                      h.position.y, h.target.x, h.target.y, to_string(h.mode), ring, u, h.exact ? 1 : 0, applied);
        os << buf;
    }
}

}  // namespace georing
