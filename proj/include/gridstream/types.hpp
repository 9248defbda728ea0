// types.hpp — domain value types shared by all modules.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gridstream/geometry.hpp"

namespace gridstream {

using ObjectId = std::uint64_t;
using QueryId = std::uint64_t;
using InstanceId = std::uint32_t;
using TimestampMs = std::uint64_t;

// One moving-object report; the unit of ingestion.
struct ObjectUpdate {
    ObjectId object_id = 0;
    TimestampMs timestamp = 0; // event time, milliseconds
    double lon = 0.0;
    double lat = 0.0;

    Point point() const { return Point{lon, lat}; }
};

// A transformed update: the object's cell transition, realized downstream as
// delete(old_cell) + insert(new_cell). old_cell is absent on first sight.
struct Movement {
    ObjectId object_id = 0;
    std::optional<CellId> old_cell;
    CellId new_cell = 0;
    Point new_point;
    TimestampMs timestamp = 0;
};

struct ObjectQuery {
    ObjectId object_id = 0;
};

struct RangeCountQuery {
    Rect rect;
};

struct KnnQuery {
    Point q;
    std::uint32_t k = 1;
};

struct ContinuousRegistration {
    std::variant<RangeCountQuery, KnnQuery> inner;
    TimestampMs refresh_interval_ms = 0;
    // 0 = refresh until deregistered / run end.
    std::uint32_t max_refreshes = 0;
};

struct Query {
    QueryId query_id = 0;
    std::variant<ObjectQuery, RangeCountQuery, KnnQuery, ContinuousRegistration> body;
};

struct LocationResult {
    Point p;
    TimestampMs timestamp = 0;
};

struct CountResult {
    std::uint64_t count = 0;
};

struct Neighbor {
    ObjectId object_id = 0;
    Point p;
    double distance = 0.0;
};

// Sorted by ascending distance, ties by smaller object id; length <= k.
struct NeighborsResult {
    std::vector<Neighbor> items;
};

struct NotFoundResult {};

struct QueryResult {
    QueryId query_id = 0;
    std::variant<LocationResult, CountResult, NeighborsResult, NotFoundResult> payload;
};

// kNN / merge tie rule: nearer first, then smaller object id.
inline bool neighbor_less(const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance)
        return a.distance < b.distance;
    return a.object_id < b.object_id;
}

// Per-cell object count as replicated at Indexers; may lag the true count.
struct CellMetadata {
    std::uint64_t count = 0;
    TimestampMs last_sync_ms = 0;
};

// Metadata synchronization policy thresholds.
struct SyncConfig {
    bool enabled = true;
    TimestampMs period_ms = 1000;         // periodic sync interval T
    std::uint64_t acc_threshold = 32;     // accumulative count-change threshold
    TimestampMs broadcast_period_ms = 200; // batched dirty-cell broadcast interval
};

// Load-balancing knobs.
struct BalanceConfig {
    bool enabled = true;
    TimestampMs period_ms = 30'000;   // balancer invocation period
    TimestampMs window_ms = 10'000;   // workload window (the ΔT of W(c))
    // Trigger threshold θ for the imbalance degree. When relative_theta is
    // set, θ = relative_theta * mean(W(p))^2 (default 0.25: coefficient of
    // variation 0.5); otherwise the absolute value is used.
    std::optional<double> relative_theta = 0.25;
    double absolute_theta = 0.0;
    std::uint64_t package_size = 10'000; // objects per migration package
};

struct CellWorkload {
    CellId cell = 0;
    std::uint64_t ops = 0;     // |U(c)|: delete/insert operators received
    std::uint64_t visited = 0; // Σ N(q,c): objects visited by queries
};

// One Local Processor's workload report for a window.
struct WorkloadReport {
    InstanceId instance = 0;
    TimestampMs window_end_ms = 0;
    TimestampMs window_ms = 0;
    std::vector<CellWorkload> cells;

    double w_of(const CellWorkload& c) const {
        return static_cast<double>(c.ops + c.visited) * 1000.0 / static_cast<double>(window_ms);
    }
    double w_total() const {
        double s = 0.0;
        for (const auto& c : cells)
            s += w_of(c);
        return s;
    }
};

struct CellMove {
    CellId cell = 0;
    InstanceId from = 0;
    InstanceId to = 0;
};

// Output of the greedy imbalance remedy: moves to execute (self-moves already
// dropped) plus the degree predicted after applying them.
struct RemedyPlan {
    std::vector<CellMove> moves;
    double predicted_degree = 0.0;
};

struct BalanceEvent {
    TimestampMs ts = 0;
    double degree_before = 0.0;
    double degree_predicted = 0.0;
    std::uint64_t n_moves = 0;
    std::uint64_t bytes_migrated = 0;
    bool aborted = false;
};

enum class QueryKind : std::uint8_t { Object, RangeCount, Knn };

inline const char* query_kind_name(QueryKind k) {
    switch (k) {
    case QueryKind::Object: return "object";
    case QueryKind::RangeCount: return "range_count";
    case QueryKind::Knn: return "knn";
    }
    return "?";
}

} // namespace gridstream
