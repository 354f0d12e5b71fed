#pragma once

#include <climits>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "georing/geometry.hpp"
#include "georing/mobility.hpp"
#include "georing/params.hpp"
#include "georing/publish.hpp"

namespace georing {

inline constexpr int kNoRing = INT_MAX;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

/// Updates a node has received, at most one per (destination, ring index).
struct NodeStore {
    std::vector<UpdateRecord> records;
};

/// Keeps the latest-issued record for the record's (dest, ring index) key;
/// records for other indices are untouched.
void store_update(NodeStore& store, const UpdateRecord& record);

/// Smallest-index record that is unexpired (t < expiry) and spatially valid
/// (node inside its annulus); ties go to the latest issue time.
std::optional<UpdateRecord> best_active_update(const NodeStore& store, Point2 node_pos, double t, NodeId dest_id);

enum class ForwardMode : std::uint8_t { directional, greedy, face };
const char* to_string(ForwardMode m);

/// Sweep direction used when walking faces of the planarized graph.
enum class FaceRule : std::uint8_t { left_hand, right_hand };

struct FaceState {
    Point2 entry_point;
    double entry_distance = 0.0;
    Point2 crossing;  // where the current face was entered along entry->target
    Point2 target;
    NodeId first_from = kNoNode;
    NodeId first_to = kNoNode;
    int hops = 0;
};

struct Packet {
    NodeId dest_id = 0;
    std::optional<Point2> estimate;
    Point2 direction{1.0, 0.0};  // meaningful only before bootstrap
    Point2 virtual_target;       // far point along `direction`
    int ring_index = kNoRing;
    double update_time = -std::numeric_limits<double>::infinity();
    int hop_count = 0;
    int ttl = 0;
    ForwardMode mode = ForwardMode::directional;
    /// Set once a relay within the exact-location radius has written the true
    /// destination position into the packet; it is kept from then on.
    bool exact_known = false;
    FaceState face;
    NodeId previous = kNoNode;

    bool bootstrapped() const { return estimate.has_value(); }
};

/// Returns the packet with the record's estimate if the record is better:
/// lower ring index, or same index and more recent. Directional packets always
/// take it (bootstrap).
Packet maybe_overwrite_packet(const Packet& packet, const UpdateRecord& record);

/// Everything a hop decision reads. Routing never mutates the world or stores.
struct RouteContext {
    const World* world = nullptr;
    std::span<const NodeStore> stores;
    double time = 0.0;
    double r = 1.0;
    /// Nodes this close to the destination know its exact position.
    double exact_radius = 0.0;
    /// Directional phase aims at a point this far along the stored direction.
    double far_distance = 0.0;
    FaceRule face_rule = FaceRule::left_hand;
    /// Optional, enables miss detection.
    const RingSchedule* schedule = nullptr;
    double beta = 0.0;
};

/// Builds a context with R_loc = 2r/(1 - U_max) and a virtual point at ten
/// network diameters.
RouteContext make_route_context(const World& world, std::span<const NodeStore> stores, const ProtocolParams& params,
                                const RingSchedule* schedule, double time);

/// Default hop budget ceil(20 sqrt(2n) / r).
int default_ttl(const ProtocolParams& params);

enum class RouteFailure : std::uint8_t { none, ttl, isolation, face_loop };
const char* to_string(RouteFailure f);

struct HopRecord {
    NodeId relay;
    Point2 position;
    Point2 target;
    ForwardMode mode;
    int ring_index;           // packet's index while forwarding this hop
    double uncertainty;       // |d - target| / |d - p|; NaN before bootstrap
    bool exact;               // destination position known exactly
    std::optional<UpdateRecord> applied;  // record written into the packet here
};

struct StepResult {
    RouteFailure failure = RouteFailure::none;
    NodeId next = kNoNode;
    HopRecord hop;
};

/// One forwarding decision at `relay` (already distinct from the destination).
/// Applies the relay's best active update, picks the target (exact position,
/// estimate or virtual point), and chooses the next hop greedily, falling back
/// to face traversal on the Gabriel graph.
StepResult forward_step(Packet& packet, NodeId relay, const RouteContext& ctx);

struct RouteResult {
    bool delivered = false;
    RouteFailure failure = RouteFailure::none;
    int hops = 0;
    double path_length = 0.0;
    double straight_line = 0.0;
    std::vector<HopRecord> log;
    std::vector<NodeId> path;  // relays visited, source first, last node reached last
    int bootstrap_hop = -1;    // hop index at which an estimate was first held
    std::vector<int> rings_acquired;
    int misses = 0;
    int face_hops = 0;

    double stretch() const { return delivered && straight_line > 0.0 ? path_length / straight_line : INFINITY; }
};

/// Routes one packet over a frozen snapshot.
RouteResult route(const RouteContext& ctx, NodeId src, NodeId dest, int ttl, std::mt19937_64& rng);

/// Gabriel-graph neighbors of `relay` among its radio neighbors.
std::vector<NodeId> gabriel_neighbors(const World& world, NodeId relay, double r);

void write_trajectory_csv(std::ostream& os, const RouteResult& result);

}  // namespace georing
