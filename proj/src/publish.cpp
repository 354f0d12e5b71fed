#include "georing/publish.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace georing {

const char* to_string(UpdateKind k)
{
    return k == UpdateKind::normal ? "normal" : "abnormal";
}

DestPublishState::DestPublishState(NodeId dest, const RingSchedule& schedule)
    : dest_id(dest), rings(static_cast<std::size_t>(schedule.size()))
{
}

double DestPublishState::next_expiry() const
{
    double next = std::numeric_limits<double>::infinity();
    for (const auto& rs : rings) {
        if (rs.has_normal)
            next = std::min(next, rs.normal.expiry_time);
        for (const auto& a : rs.abnormal)
            next = std::min(next, a.expiry_time);
    }
    return next;
}

std::vector<UpdateRecord> tick_destination(DestPublishState& state, Point2 d_now, double t,
                                           const RingSchedule& schedule, double beta)
{
    if (t < state.last_tick)
        throw std::invalid_argument("tick_destination: time went backwards");
    if (state.rings.size() != static_cast<std::size_t>(schedule.size()))
        throw std::invalid_argument("tick_destination: state does not match schedule");
    state.last_tick = t;

    std::vector<UpdateRecord> issued;
    for (int i = 0; i < schedule.size(); ++i) {
        const Ring& ring = schedule[i];
        RingState& rs = state.rings[static_cast<std::size_t>(i)];
        double confidence = beta * ring.radius;

        std::erase_if(rs.abnormal, [t](const UpdateRecord& a) { return a.expiry_time <= t; });

        for (auto& a : rs.abnormal) {
            if (distance(d_now, a.estimate) > confidence) {
                a.estimate = d_now;
                a.issue_time = t;
                issued.push_back(a);
            }
        }

        UpdateRecord fresh;
        fresh.dest_id = state.dest_id;
        fresh.ring_index = i;
        fresh.center = d_now;
        fresh.estimate = d_now;
        fresh.issue_time = t;
        fresh.expiry_time = t + ring.lifetime;
        fresh.inner_radius = ring.radius;
        fresh.thickness = ring.thickness;
        fresh.kind = UpdateKind::normal;

        if (!rs.has_normal || rs.normal.expiry_time <= t) {
            rs.normal = fresh;
            rs.has_normal = true;
            issued.push_back(fresh);
        } else if (distance(d_now, rs.normal.estimate) > confidence) {
            UpdateRecord comp = rs.normal;
            comp.estimate = d_now;
            comp.issue_time = t;
            comp.kind = UpdateKind::abnormal;
            rs.abnormal.push_back(comp);
            issued.push_back(comp);
            rs.normal = fresh;
            issued.push_back(fresh);
        }
    }
    if (state.keep_history)
        state.published.insert(state.published.end(), issued.begin(), issued.end());
    return issued;
}

CostLedger::CostLedger(int rings)
    : per_ring(static_cast<std::size_t>(rings), 0), issues_per_ring(static_cast<std::size_t>(rings), 0)
{
}

void CostLedger::charge(const UpdateRecord& rec, long long tx)
{
    auto i = static_cast<std::size_t>(rec.ring_index);
    if (i >= per_ring.size()) {
        per_ring.resize(i + 1, 0);
        issues_per_ring.resize(i + 1, 0);
    }
    per_ring[i] += tx;
    issues_per_ring[i] += 1;
    total += tx;
    if (rec.kind == UpdateKind::normal) {
        normal_tx += tx;
        ++normal_issues;
    } else {
        abnormal_tx += tx;
        ++abnormal_issues;
    }
}

long long CostLedger::ring_total() const
{
    long long s = 0;
    for (auto v : per_ring)
        s += v;
    return s;
}

long long multicast_cost(double area, double r)
{
    if (!(area >= 0.0) || !(r > 0.0))
        throw std::invalid_argument("multicast_cost: need area >= 0 and r > 0");
    double tile = r * r / 5.0;
    return static_cast<long long>(std::ceil(area / tile));
}

long long line_cost(double dist, double r)
{
    if (!(dist >= 0.0) || !(r > 0.0))
        throw std::invalid_argument("line_cost: need dist >= 0 and r > 0");
    return static_cast<long long>(std::ceil(dist / r));
}

long long update_cost(const UpdateRecord& rec, double r)
{
    Annulus ring = rec.ring();
    return line_cost(distance_to_annulus(rec.estimate, ring), r) + multicast_cost(ring.area(), r);
}

std::vector<NodeId> disseminate(const UpdateRecord& record, const World& world, double r, CostLedger& ledger)
{
    auto recipients = world.grid().in_ring(world.positions(), record.ring());
    ledger.charge(record, update_cost(record, r));
    if (recipients.empty())
        ++ledger.empty_disseminations;
    return recipients;
}

std::vector<double> measured_update_rate(const CostLedger& ledger, double elapsed)
{
    if (!(elapsed > 0.0))
        throw std::invalid_argument("measured_update_rate: elapsed must be positive");
    std::vector<double> out;
    out.reserve(ledger.issues_per_ring.size());
    for (auto c : ledger.issues_per_ring)
        out.push_back(static_cast<double>(c) / elapsed);
    return out;
}

void write_ledger_csv(std::ostream& os, const CostLedger& ledger, const RingSchedule& schedule, double elapsed)
{
    char buf[256];
    os << "ring_index,issues,transmissions,measured_rate,nominal_rate\r\n";
    auto rates = measured_update_rate(ledger, elapsed);
    for (std::size_t i = 0; i < ledger.per_ring.size(); ++i) {
        double nominal = static_cast<int>(i) < schedule.size() ? 1.0 / schedule[static_cast<int>(i)].lifetime : 0.0;
        std::snprintf(buf, sizeof buf, "%zu,%lld,%lld,%.10g,%.10g\r\n", i, ledger.issues_per_ring[i], ledger.per_ring[i],
                      rates[i], nominal);
        os << buf;
    }
}

}  // namespace georing
