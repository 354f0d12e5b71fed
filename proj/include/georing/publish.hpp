#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "georing/geometry.hpp"
#include "georing/mobility.hpp"
#include "georing/params.hpp"

namespace georing {

enum class UpdateKind : std::uint8_t { normal, abnormal };

const char* to_string(UpdateKind k);

/// One published location update. The ring it is valid in is the annulus of
/// index `ring_index` around `center`; `estimate` is where the destination was
/// when the update was issued.
struct UpdateRecord {
    NodeId dest_id = 0;
    int ring_index = 0;
    Point2 center;
    Point2 estimate;
    double issue_time = 0.0;
    double expiry_time = 0.0;
    double inner_radius = 0.0;
    double thickness = 0.0;
    UpdateKind kind = UpdateKind::normal;

    Annulus ring() const { return {center, inner_radius, thickness}; }
};

/// Per-ring publish bookkeeping for one destination: the live normal record
/// and any abnormal records still compensating for an older ring center.
struct RingState {
    bool has_normal = false;
    UpdateRecord normal;
    std::vector<UpdateRecord> abnormal;
};

struct DestPublishState {
    NodeId dest_id = 0;
    std::vector<RingState> rings;
    double last_tick = -std::numeric_limits<double>::infinity();
    /// Every record issued so far, in issue order (when keep_history is set).
    std::vector<UpdateRecord> published;
    bool keep_history = true;

    DestPublishState() = default;
    DestPublishState(NodeId dest, const RingSchedule& schedule);

    /// Earliest expiry among live records (infinity when nothing is live).
    double next_expiry() const;
};

/// Advances the publish state machine to time t with the destination at
/// d_now. Per ring, in order: expired abnormal records are dropped; an
/// expired normal record is replaced by a fresh normal update; a normal record
/// whose confidence disc (radius beta*r_i) no longer holds d_now yields an
/// abnormal update to its old center (same expiry) plus a fresh normal update;
/// each abnormal record violated the same way is reissued with the new
/// estimate and the same expiry.
std::vector<UpdateRecord> tick_destination(DestPublishState& state, Point2 d_now, double t,
                                           const RingSchedule& schedule, double beta);

/// Transmission accounting for update dissemination.
struct CostLedger {
    long long total = 0;
    std::vector<long long> per_ring;          // transmissions by ring index
    std::vector<long long> issues_per_ring;   // records issued by ring index
    long long normal_tx = 0;
    long long abnormal_tx = 0;
    long long normal_issues = 0;
    long long abnormal_issues = 0;
    long long empty_disseminations = 0;
    /// Neighborhood-maintenance broadcasts; kept out of the ring sums.
    long long local_tx = 0;

    explicit CostLedger(int rings = 0);

    void charge(const UpdateRecord& rec, long long tx);
    void charge_local(long long tx) { local_tx += tx; }
    long long ring_total() const;
};

/// ceil(area / s^2) with tile side s = r / sqrt(5).
long long multicast_cost(double area, double r);
/// ceil(dist / r).
long long line_cost(double dist, double r);
/// Line leg from the estimate to the ring plus the multicast over the ring.
long long update_cost(const UpdateRecord& rec, double r);

/// Delivers the record to every node currently inside its annulus and charges
/// the ledger. Recipient ids are ascending.
std::vector<NodeId> disseminate(const UpdateRecord& record, const World& world, double r, CostLedger& ledger);

/// Issue counts divided by elapsed time, per ring index.
std::vector<double> measured_update_rate(const CostLedger& ledger, double elapsed);

void write_ledger_csv(std::ostream& os, const CostLedger& ledger, const RingSchedule& schedule, double elapsed);

}  // namespace georing
