#include "georing/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "georing/analysis.hpp"
#include "parallel.hpp"

namespace georing {

using std::numbers::pi;

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index)
{
    // splitmix64 finalizer over a mixed key
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(base) ^ stream) ^ (index * 0xd1b54a32d192ed03ULL));
}

Interval wilson_interval(long long k, long long n, double z)
{
    if (n <= 0)
        return {0.0, 1.0};
    double nn = static_cast<double>(n);
    double p = static_cast<double>(k) / nn;
    double z2 = z * z;
    double denom = 1.0 + z2 / nn;
    double center = (p + z2 / (2.0 * nn)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// ---------------------------------------------------------------------------

PublishSim::PublishSim(const ProtocolParams& params, RingSchedule schedule, World* world, NodeId dest, Point2 dest_pos,
                       const PublishSimConfig& cfg, std::uint64_t seed)
    : params_(params),
      schedule_(std::move(schedule)),
      world_(world),
      dest_(dest),
      dest_pos_(dest_pos),
      cfg_(cfg),
      rng_(seed),
      state_(dest, schedule_),
      ledger_(schedule_.size()),
      r_(params.comm_radius()),
      dt_(cfg.dest_dt > 0.0 ? cfg.dest_dt : params.T0 / 32.0)
{
    state_.keep_history = false;
    if (world_)
        stores_.resize(world_->size());
}

void PublishSim::sync_world()
{
    if (!world_)
        return;
    double gap = t_ - world_->clock();
    if (gap > 0.0)
        world_->advance_except(gap, {params_.sigma, gap}, dest_);
    else
        world_->set_clock(t_);
    world_->set_position(dest_, dest_pos_);
}

void PublishSim::tick()
{
    bool charge = started_ || cfg_.charge_initial;
    started_ = true;
    auto issued = tick_destination(state_, dest_pos_, t_, schedule_, params_.beta);
    if (issued.empty())
        return;
    if (world_)
        sync_world();
    for (const auto& rec : issued) {
        if (charge)
            ledger_.charge(rec, update_cost(rec, r_));
        if (!world_)
            continue;
        auto recipients = world_->grid().in_ring(world_->positions(), rec.ring());
        if (recipients.empty() && charge)
            ++ledger_.empty_disseminations;
        recipients_total_ += static_cast<long long>(recipients.size());
        for (NodeId id : recipients)
            store_update(stores_[id], rec);
    }
}

void PublishSim::run_until(double t_end)
{
    if (!started_)
        tick();
    BoxRegion box = world_ ? world_->box() : BoxRegion(params_.box_side());
    bool moving = cfg_.dest_sigma > 0.0;
    while (t_ < t_end) {
        double next = std::min(state_.next_expiry(), t_end);
        if (moving)
            next = std::min(next, t_ + dt_);
        if (moving)
            dest_pos_ = brownian_step(dest_pos_, {cfg_.dest_sigma, next - t_}, box, rng_);
        t_ = next;
        tick();
    }
}

NodeId central_node(const World& world)
{
    Point2 c = world.box().center();
    NodeId best = 0;
    double best_d = INFINITY;
    auto pos = world.positions();
    for (std::size_t i = 0; i < pos.size(); ++i) {
        double d = distance(pos[i], c);
        if (d < best_d) {
            best_d = d;
            best = static_cast<NodeId>(i);
        }
    }
    return best;
}

// ---------------------------------------------------------------------------

namespace {

NodeId nearest_node(const World& world, Point2 q, double r)
{
    for (double rad = r; rad < 64.0 * r; rad *= 2.0) {
        auto hits = world.neighbors_within(q, rad);
        if (!hits.empty())
            return hits.front();
    }
    NodeId best = 0;
    double best_d = INFINITY;
    auto pos = world.positions();
    for (std::size_t i = 0; i < pos.size(); ++i) {
        double d = distance(pos[i], q);
        if (d < best_d) {
            best_d = d;
            best = static_cast<NodeId>(i);
        }
    }
    return best;
}

struct RealizationTally {
    long long trials = 0;
    long long misses = 0;
    long long routing_failures = 0;
    long long ring_relays = 0;
};

}  // namespace

MissResult run_worst_case_miss(const ProtocolParams& params, const MissConfig& cfg, std::uint64_t seed)
{
    params.check();
    if (cfg.margin_sigmas < 4.0)
        throw std::invalid_argument("worst-case miss: margin must be at least 4 sigma sqrt(T_i)");
    if (cfg.realizations < 1 || cfg.angles < 1)
        throw std::invalid_argument("worst-case miss: realizations and angles must be >= 1");
    if (!(cfg.thickness_scale > 0.0))
        throw std::invalid_argument("worst-case miss: thickness scale must be positive");
    int max_index = 0;
    for (int i : cfg.indices) {
        if (i < 0)
            throw std::invalid_argument("worst-case miss: negative ring index");
        max_index = std::max(max_index, i);
    }
    RingSchedule base = ring_schedule(params);
    RingSchedule schedule = ring_schedule(params, std::max(base.K, max_index));
    double r = params.comm_radius();

    MissResult out;
    for (int idx : cfg.indices) {
        const Ring& ring = schedule[idx];
        MissIndexResult row;
        row.index = idx;
        row.r_i = ring.radius;
        row.d_i = ring.thickness * cfg.thickness_scale;
        row.T_i = ring.lifetime;
        double margin = std::max(cfg.margin_sigmas * params.sigma * std::sqrt(row.T_i), 2.0 * r);
        double side = 2.0 * (row.r_i + row.d_i + margin);
        auto count = static_cast<std::size_t>(std::llround(side * side));
        row.nodes = static_cast<long long>(count);
        BoxRegion box(side);
        Point2 c = box.center();
        Annulus annulus(c, row.r_i, row.d_i);
        double stop_radius = row.r_i + row.d_i + r;
        double launch_radius = std::max(row.r_i - 2.0 * r, 0.0);

        auto tallies = detail::parallel_map<RealizationTally>(
            static_cast<std::size_t>(cfg.realizations), [&](std::size_t k) {
                std::mt19937_64 rng(derive_seed(seed, 100 + static_cast<std::uint64_t>(idx), k));
                std::uniform_real_distribution<double> coord(0.0, side);
                std::vector<Point2> pos(count);
                for (auto& p : pos)
                    p = {coord(rng), coord(rng)};
                std::vector<char> marked(count);
                for (std::size_t i = 0; i < count; ++i)
                    marked[i] = in_annulus(pos[i], annulus) ? 1 : 0;
                MobilityConfig mc{params.sigma, row.T_i};
                for (auto& p : pos)
                    p = brownian_step(p, mc, box, rng);
                World world(std::move(pos), box, r, rng());

                RouteContext ctx;
                ctx.world = &world;
                ctx.r = r;
                ctx.exact_radius = -1.0;
                ctx.far_distance = 10.0 * box.diameter();

                RealizationTally tally;
                std::uniform_real_distribution<double> jitter(0.0, 2.0 * pi / cfg.angles);
                double offset = jitter(rng);
                int max_hops = static_cast<int>(std::ceil(50.0 * side / r)) + 100;
                for (int a = 0; a < cfg.angles; ++a) {
                    double theta = offset + 2.0 * pi * a / cfg.angles;
                    Point2 u{std::cos(theta), std::sin(theta)};
                    NodeId start = nearest_node(world, c + u * launch_radius, r);
                    Packet pk;
                    pk.dest_id = start;
                    pk.direction = u;
                    pk.virtual_target = c + u * ctx.far_distance;
                    pk.ttl = max_hops;
                    NodeId relay = start;
                    bool hit = false;
                    for (int h = 0; h < max_hops; ++h) {
                        Point2 p = world.position(relay);
                        if (in_annulus(p, annulus)) {
                            ++tally.ring_relays;
                            if (marked[relay]) {
                                hit = true;
                                break;
                            }
                        }
                        if (distance(p, c) > stop_radius)
                            break;
                        StepResult s = forward_step(pk, relay, ctx);
                        if (s.failure != RouteFailure::none) {
                            ++tally.routing_failures;
                            break;
                        }
                        relay = s.next;
                    }
                    ++tally.trials;
                    if (!hit)
                        ++tally.misses;
                }
                return tally;
            });

        long long ring_relays = 0;
        for (const auto& t : tallies) {
            row.trials += t.trials;
            row.misses += t.misses;
            row.routing_failures += t.routing_failures;
            ring_relays += t.ring_relays;
        }
        row.p_miss = row.trials ? static_cast<double>(row.misses) / static_cast<double>(row.trials) : 0.0;
        row.ci = wilson_interval(row.misses, row.trials);
        row.mean_ring_relays = row.trials ? static_cast<double>(ring_relays) / static_cast<double>(row.trials) : 0.0;
        MissBoundInputs in = miss_inputs(params, schedule, idx);
        in.d_i = row.d_i;
        row.asymptotic = pmiss_asymptotic(in);
        row.product_bound = cfg.thickness_scale == 1.0 ? pmiss_product_bound(idx, params, schedule).product : NAN;
        out.rows.push_back(row);
    }
    return out;
}

// ---------------------------------------------------------------------------

DynamicResult run_dynamic(const ProtocolParams& params, const DynamicConfig& cfg, std::uint64_t seed)
{
    params.check();
    if (cfg.routes < 1 || cfg.epochs < 1)
        throw std::invalid_argument("dynamic run: routes and epochs must be >= 1");
    if (cfg.warmup_factor < 1.0)
        throw std::invalid_argument("dynamic run: warmup must cover the largest ring lifetime");
    RingSchedule schedule = ring_schedule(params);
    World world = init_world(params, derive_seed(seed, 1, 0));
    NodeId dest = central_node(world);

    PublishSimConfig pcfg;
    pcfg.dest_sigma = cfg.dest_sigma < 0.0 ? params.sigma : cfg.dest_sigma;
    pcfg.charge_initial = false;
    PublishSim sim(params, schedule, &world, dest, world.position(dest), pcfg, derive_seed(seed, 2, 0));

    DynamicResult res;
    res.warmup = cfg.warmup_factor * schedule.rings.back().lifetime;
    res.u_max = u_max(params.alpha, params.beta);
    res.stretch_bound = stretch_bound(params.alpha, params.beta);
    sim.run_until(res.warmup);

    double spacing = cfg.epoch_spacing > 0.0 ? cfg.epoch_spacing : params.T0;
    int per_epoch = (cfg.routes + cfg.epochs - 1) / cfg.epochs;
    int ttl = default_ttl(params);
    double source_radius = schedule.rings.back().radius;
    std::mt19937_64 src_rng(derive_seed(seed, 3, 0));
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(world.size() - 1));

    long long launched = 0;
    for (int e = 0; e < cfg.epochs && launched < cfg.routes; ++e) {
        double t = res.warmup + e * spacing;
        sim.run_until(t);
        sim.sync_world();
        RouteContext ctx = make_route_context(world, sim.stores(), params, &schedule, t);
        ctx.face_rule = cfg.face_rule;
        Point2 d = world.position(dest);
        for (int j = 0; j < per_epoch && launched < cfg.routes; ++j) {
            NodeId src;
            do {
                src = pick(src_rng);
            } while (src == dest || distance(world.position(src), d) > source_radius);
            std::mt19937_64 route_rng(derive_seed(seed, 4, static_cast<std::uint64_t>(launched)));
            RouteResult rr = route(ctx, src, dest, ttl, route_rng);
            ++launched;
            for (const auto& h : rr.log)
                if (!std::isnan(h.uncertainty))
                    res.uncertainty.values.push_back(h.uncertainty);
            res.face_hops += rr.face_hops;
            res.total_hops += static_cast<long long>(rr.log.size());
            if (rr.misses > 0)
                ++res.routes_with_misses;
            if (rr.delivered) {
                ++res.delivered;
                double s = rr.stretch();
                res.stretch.values.push_back(s);
                res.reciprocal_stretch.values.push_back(1.0 / s);
            } else {
                res.reciprocal_stretch.values.push_back(0.0);
                switch (rr.failure) {
                case RouteFailure::ttl: ++res.failures_ttl; break;
                case RouteFailure::isolation: ++res.failures_isolation; break;
                case RouteFailure::face_loop: ++res.failures_face_loop; break;
                case RouteFailure::none: break;
                }
            }
        }
    }
    res.routes = launched;
    res.elapsed = sim.now();
    res.ledger = sim.ledger();
    res.measured_tx_rate = static_cast<double>(res.ledger.total) / res.elapsed;
    res.predicted_rate = overhead_rate(params, schedule).total;
    res.ring_issue_rate = measured_update_rate(res.ledger, res.elapsed);
    for (const auto& ring : schedule.rings)
        res.ring_nominal_rate.push_back(1.0 / ring.lifetime);
    return res;
}

// ---------------------------------------------------------------------------

const char* color_of(NodeClass c)
{
    switch (c) {
    case NodeClass::active: return "blue";
    case NodeClass::invalid: return "green";
    case NodeClass::plain: return "red";
    case NodeClass::face: return "black";
    }
    return "gray";
}

const char* to_string(NodeClass c)
{
    switch (c) {
    case NodeClass::active: return "active_update";
    case NodeClass::invalid: return "spatially_invalid_update";
    case NodeClass::plain: return "plain_relay";
    case NodeClass::face: return "face_mode";
    }
    return "?";
}

NodeClass classify_relay(const NodeStore& store, Point2 pos, double t, NodeId dest, bool face_hop)
{
    if (face_hop)
        return NodeClass::face;
    if (best_active_update(store, pos, t, dest))
        return NodeClass::active;
    for (const auto& r : store.records)
        if (r.dest_id == dest && t < r.expiry_time)
            return NodeClass::invalid;
    return NodeClass::plain;
}

SnapshotResult run_snapshot_trajectories(const ProtocolParams& params, const SnapshotConfig& cfg, std::uint64_t seed)
{
    params.check();
    if (cfg.grid < 1)
        throw std::invalid_argument("snapshot: grid must be >= 1");
    RingSchedule schedule = ring_schedule(params);
    World world = init_world(params, derive_seed(seed, 1, 0));
    NodeId dest = central_node(world);
    PublishSimConfig pcfg;
    pcfg.dest_sigma = params.sigma;
    PublishSim sim(params, schedule, &world, dest, world.position(dest), pcfg, derive_seed(seed, 2, 0));
    double t = cfg.warmup_factor * schedule.rings.back().lifetime;
    sim.run_until(t);
    sim.sync_world();

    SnapshotResult snap;
    snap.dest = dest;
    snap.dest_position = world.position(dest);
    snap.box_side = world.box().side;
    snap.time = t;
    RouteContext ctx = make_route_context(world, sim.stores(), params, &schedule, t);
    ctx.face_rule = cfg.face_rule;
    int ttl = default_ttl(params);
    double side = world.box().side;
    double r = params.comm_radius();
    int k = 0;
    for (int a = 0; a < cfg.grid; ++a) {
        for (int b = 0; b < cfg.grid; ++b, ++k) {
            Point2 q{(a + 0.5) / cfg.grid * side, (b + 0.5) / cfg.grid * side};
            NodeId src = nearest_node(world, q, r);
            if (src == dest)
                continue;
            std::mt19937_64 route_rng(derive_seed(seed, 5, static_cast<std::uint64_t>(k)));
            RouteResult rr = route(ctx, src, dest, ttl, route_rng);
            int route_index = static_cast<int>(snap.routes.size());
            for (const auto& h : rr.log) {
                bool face = h.mode == ForwardMode::face;
                snap.hops.push_back({h.relay, h.position,
                                     classify_relay(sim.stores()[h.relay], h.position, t, dest, face), route_index});
            }
            snap.face_hops += rr.face_hops;
            if (rr.delivered)
                ++snap.delivered;
            snap.routes.push_back(std::move(rr));
        }
    }
    return snap;
}

void write_snapshot_svg(std::ostream& os, const SnapshotResult& snap)
{
    const double S = 640.0;
    double scale = snap.box_side > 0.0 ? S / snap.box_side : 1.0;
    auto px = [&](double x) { return x * scale; };
    auto py = [&](double y) { return S - y * scale; };
    char buf[200];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\" stroke=\"black\"/>\n";
    // trajectories as polylines from consecutive hops of the same route
    std::size_t i = 0;
    while (i < snap.hops.size()) {
        std::size_t j = i;
        os << "<polyline fill=\"none\" stroke=\"#999\" stroke-width=\"0.6\" points=\"";
        for (; j < snap.hops.size() && snap.hops[j].route == snap.hops[i].route; ++j) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(snap.hops[j].position.x), py(snap.hops[j].position.y));
            os << buf;
        }
        if (snap.routes.at(static_cast<std::size_t>(snap.hops[i].route)).delivered) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f", px(snap.dest_position.x), py(snap.dest_position.y));
            os << buf;
        }
        os << "\"/>\n";
        i = j;
    }
    for (const auto& h : snap.hops) {
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.6\" fill=\"%s\"/>\n", px(h.position.x),
                      py(h.position.y), color_of(h.cls));
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"5\" fill=\"none\" stroke=\"magenta\" stroke-width=\"2\"/>\n",
                  px(snap.dest_position.x), py(snap.dest_position.y));
    os << buf;
    os << "</svg>\n";
}

// ---------------------------------------------------------------------------

OverheadResult run_overhead_scaling(const ProtocolParams& params, const OverheadConfig& cfg, std::uint64_t seed)
{
    params.check();
    if (cfg.k_extra.empty())
        throw std::invalid_argument("overhead: empty K sweep");
    if (!(cfg.horizon_factor >= 1.0))
        throw std::invalid_argument("overhead: horizon factor must be >= 1");
    int base = cfg.base_k >= 0 ? cfg.base_k : ring_schedule(params).K;
    int extra_max = *std::max_element(cfg.k_extra.begin(), cfg.k_extra.end());
    if (*std::min_element(cfg.k_extra.begin(), cfg.k_extra.end()) < 0)
        throw std::invalid_argument("overhead: K offsets must be nonnegative");

    OverheadResult out;
    out.horizon = cfg.horizon_factor * params.T0 * std::pow(params.alpha, params.gamma * (base + extra_max));
    out.contraction_ratio = std::pow(params.alpha, 1.0 + params.mu - params.gamma);
    out.contracting = out.contraction_ratio < 1.0;
    for (std::size_t k = 0; k < cfg.k_extra.size(); ++k) {
        int K = base + cfg.k_extra[k];
        RingSchedule s = ring_schedule(params, K);
        PublishSimConfig pcfg;
        pcfg.dest_sigma = cfg.dest_sigma;
        pcfg.charge_initial = false;
        Point2 start = BoxRegion(params.box_side()).center();
        PublishSim sim(params, s, nullptr, 0, start, pcfg, derive_seed(seed, 6, static_cast<std::uint64_t>(K)));
        sim.run_until(out.horizon);
        OverheadPoint pt;
        pt.K = K;
        pt.transmissions = sim.ledger().total;
        pt.measured_rate = static_cast<double>(pt.transmissions) / out.horizon;
        pt.predicted_rate = overhead_rate(params, s).total;
        pt.ratio = pt.measured_rate / pt.predicted_rate;
        out.points.push_back(pt);
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<BoundsRow> bounds_table(const ProtocolParams& params)
{
    params.check();
    RingSchedule s = ring_schedule(params);
    double r = params.comm_radius();
    std::vector<BoundsRow> rows;
    for (const auto& ring : s.rings) {
        BoundsRow row;
        row.index = ring.index;
        row.r_i = ring.radius;
        row.d_i = ring.thickness;
        row.T_i = ring.lifetime;
        row.asymptotic = pmiss_asymptotic(miss_inputs(params, s, ring.index));
        ProductBound pb = pmiss_product_bound(ring.index, params, s);
        row.product = pb.product;
        row.integral = pb.integral;
        row.area_term = ring.radius * ring.thickness / (r * r * ring.lifetime);
        row.line_term = ring.radius / (r * ring.lifetime);
        rows.push_back(row);
    }
    return rows;
}

void write_bounds_csv(std::ostream& os, const std::vector<BoundsRow>& rows)
{
    os << "index,r_i,d_i,T_i,pmiss_asymptotic,pmiss_product,pmiss_integral,area_term,line_term\r\n";
    for (const auto& b : rows) {
        os << b.index << ',' << format_double(b.r_i) << ',' << format_double(b.d_i) << ',' << format_double(b.T_i) << ','
           << format_double(b.asymptotic) << ',' << format_double(b.product) << ',' << format_double(b.integral) << ','
           << format_double(b.area_term) << ',' << format_double(b.line_term) << "\r\n";
    }
}

}  // namespace georing
