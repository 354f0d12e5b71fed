#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "georing/mobility.hpp"
#include "georing/params.hpp"
#include "georing/publish.hpp"
#include "georing/report.hpp"
#include "georing/routing.hpp"

namespace georing {

/// Independent stream seed for (base seed, experiment stream, index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

struct Interval {
    double lo;
    double hi;
};

/// 95% Wilson score interval for k successes out of n.
Interval wilson_interval(long long k, long long n, double z = 1.959963984540054);

// ---------------------------------------------------------------------------
// Publish simulation shared by the dynamic, snapshot and overhead drivers.

struct PublishSimConfig {
    double dest_sigma = 1.0;
    /// Destination step; 0 picks T0/32.
    double dest_dt = 0.0;
    /// Charge the updates issued at t = 0 (off gives a warm-start steady state).
    bool charge_initial = true;
};

/// Drives one destination's publish state machine. With a world attached,
/// every issued record is delivered to the nodes inside its annulus; without
/// one only the ledger is charged.
class PublishSim {
public:
    PublishSim(const ProtocolParams& params, RingSchedule schedule, World* world, NodeId dest, Point2 dest_pos,
               const PublishSimConfig& cfg, std::uint64_t seed);

    void run_until(double t_end);
    /// Brings every world node to the current time, destination included.
    void sync_world();

    double now() const { return t_; }
    Point2 dest_position() const { return dest_pos_; }
    NodeId dest() const { return dest_; }
    const RingSchedule& schedule() const { return schedule_; }
    const DestPublishState& state() const { return state_; }
    const CostLedger& ledger() const { return ledger_; }
    std::span<const NodeStore> stores() const { return stores_; }
    long long recipients_total() const { return recipients_total_; }

private:
    void tick();

    ProtocolParams params_;
    RingSchedule schedule_;
    World* world_;
    NodeId dest_;
    Point2 dest_pos_;
    PublishSimConfig cfg_;
    std::mt19937_64 rng_;
    DestPublishState state_;
    CostLedger ledger_;
    std::vector<NodeStore> stores_;
    double t_ = 0.0;
    double r_;
    double dt_;
    bool started_ = false;
    long long recipients_total_ = 0;
};

/// Node nearest the box center (lowest id on ties).
NodeId central_node(const World& world);

// ---------------------------------------------------------------------------
// Worst-case miss

struct MissConfig {
    std::vector<int> indices{0, 1, 2, 3};
    int realizations = 20;
    int angles = 500;
    double thickness_scale = 1.0;
    double margin_sigmas = 4.0;
};

struct MissIndexResult {
    int index;
    double r_i, d_i, T_i;
    long long trials = 0;
    long long misses = 0;
    long long routing_failures = 0;
    double p_miss = 0.0;
    Interval ci{0.0, 1.0};
    double asymptotic = 0.0;
    double product_bound = 0.0;
    double mean_ring_relays = 0.0;
    long long nodes = 0;
};

struct MissResult {
    std::vector<MissIndexResult> rows;
};

MissResult run_worst_case_miss(const ProtocolParams& params, const MissConfig& cfg, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Dynamic run

struct DynamicConfig {
    int routes = 500;
    int epochs = 20;
    /// Spacing between route epochs; 0 picks T0.
    double epoch_spacing = 0.0;
    double warmup_factor = 1.5;
    /// Destination diffusion; negative uses the protocol sigma.
    double dest_sigma = -1.0;
    FaceRule face_rule = FaceRule::left_hand;
};

struct DynamicResult {
    long long routes = 0;
    long long delivered = 0;
    long long failures_ttl = 0;
    long long failures_isolation = 0;
    long long failures_face_loop = 0;
    long long routes_with_misses = 0;
    long long face_hops = 0;
    long long total_hops = 0;
    MetricSeries uncertainty{"uncertainty", {}};
    MetricSeries reciprocal_stretch{"reciprocal_stretch", {}};
    MetricSeries stretch{"stretch", {}};
    double warmup = 0.0;
    double elapsed = 0.0;
    double u_max = 0.0;
    double stretch_bound = 0.0;
    double measured_tx_rate = 0.0;
    double predicted_rate = 0.0;
    std::vector<double> ring_issue_rate;
    std::vector<double> ring_nominal_rate;
    CostLedger ledger;
    double delivery_rate() const { return routes ? static_cast<double>(delivered) / routes : 0.0; }
};

DynamicResult run_dynamic(const ProtocolParams& params, const DynamicConfig& cfg, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Snapshot trajectories

enum class NodeClass : std::uint8_t { active, invalid, plain, face };
/// Legend colors: blue, green, red, black.
const char* color_of(NodeClass c);
const char* to_string(NodeClass c);

struct SnapshotConfig {
    int grid = 8;
    double warmup_factor = 1.5;
    FaceRule face_rule = FaceRule::left_hand;
};

struct ClassifiedHop {
    NodeId node;
    Point2 position;
    NodeClass cls;
    int route;
};

struct SnapshotResult {
    NodeId dest = 0;
    Point2 dest_position;
    double box_side = 0.0;
    double time = 0.0;
    std::vector<RouteResult> routes;
    std::vector<ClassifiedHop> hops;
    long long face_hops = 0;
    long long delivered = 0;
};

/// Classification of a relay for a given destination at time t.
NodeClass classify_relay(const NodeStore& store, Point2 pos, double t, NodeId dest, bool face_hop);

SnapshotResult run_snapshot_trajectories(const ProtocolParams& params, const SnapshotConfig& cfg, std::uint64_t seed);

void write_snapshot_svg(std::ostream& os, const SnapshotResult& snap);

// ---------------------------------------------------------------------------
// Overhead scaling

struct OverheadConfig {
    std::vector<int> k_extra{0, 1, 2, 3, 4};
    /// Horizon as a multiple of the largest lifetime in the sweep.
    double horizon_factor = 8.0;
    double dest_sigma = 0.0;
    /// Optional base K (defaults to the schedule's own K).
    int base_k = -1;
};

struct OverheadPoint {
    int K;
    double measured_rate;
    double predicted_rate;
    double ratio;  // measured / predicted
    long long transmissions;
};

struct OverheadResult {
    std::vector<OverheadPoint> points;
    double horizon = 0.0;
    double contraction_ratio = 0.0;
    bool contracting = false;
};

OverheadResult run_overhead_scaling(const ProtocolParams& params, const OverheadConfig& cfg, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Bounds table

struct BoundsRow {
    int index;
    double r_i, d_i, T_i;
    double asymptotic;
    double product;
    double integral;
    double area_term;
    double line_term;
};

std::vector<BoundsRow> bounds_table(const ProtocolParams& params);
void write_bounds_csv(std::ostream& os, const std::vector<BoundsRow>& rows);

}  // namespace georing
