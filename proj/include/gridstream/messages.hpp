// messages.hpp — inter-module message payloads and the runtime tagged union.

#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gridstream/types.hpp"

namespace gridstream::msg {

// driver -> Transformer
struct UpdateMsg {
    ObjectUpdate update;
};

// driver -> Transformer (object) / Indexer (range, knn) / Aggregator (continuous);
// also Aggregator -> Indexer for continuous-query refreshes.
struct QueryMsg {
    Query query;
    std::uint64_t issue_ns = 0;
};

// Transformer -> Indexer
struct MovementMsg {
    Movement movement;
};

struct CellOp {
    enum class Kind : std::uint8_t { Insert, Delete } kind = Kind::Insert;
    CellId cell = 0;
    ObjectId object_id = 0;
    Point point;       // Insert only
    TimestampMs ts = 0; // event time of the originating update
};

// Indexer -> LocalProcessor: the delete/insert operators of one movement
// (combined into one message when both cells share an owner).
struct LocalOpsMsg {
    std::vector<CellOp> ops;
};

// One owner's share of a planned query.
struct RoutedSubQuery {
    QueryId query_id = 0;
    QueryKind kind = QueryKind::RangeCount;
    Rect rect;            // RangeCount
    Point q;              // Knn
    std::uint32_t k = 0;  // Knn
    ObjectId object_id = 0; // Object (broadcast baseline only)
    std::vector<CellId> candidate_cells; // sorted, owned by one instance at plan time
    std::uint32_t fanout = 0;            // total sub-queries of this query
    std::uint64_t issue_ns = 0;
    std::uint8_t hop = 0; // stale-owner forwards consumed
};

struct SubQueryMsg {
    RoutedSubQuery sub;
};

// LocalProcessor (or Indexer, for degenerate direct answers) -> Aggregator.
struct PartialMsg {
    QueryId query_id = 0;
    QueryKind kind = QueryKind::RangeCount;
    std::uint32_t fanout = 0;
    std::uint32_t k = 0;
    bool forwarded = false;            // result of a forwarded sub-query
    std::uint32_t announced_forwards = 0; // extra forwarded partials this one spawned
    std::uint32_t sender = 0;
    std::uint64_t issue_ns = 0;
    std::uint64_t count = 0;                    // RangeCount
    std::vector<Neighbor> neighbors;            // Knn (local top-k)
    std::optional<LocationResult> location;     // Object (broadcast baseline)
};

// LocalProcessor -> MetaSync
struct SyncMsg {
    CellId cell = 0;
    std::uint64_t count = 0;
    bool accumulative = false;
    std::uint32_t sender = 0;
};

// MetaSync -> every Indexer
struct MetaBroadcastMsg {
    std::vector<std::pair<CellId, std::uint64_t>> entries;
};

// LocalProcessor -> Balancer
struct WorkloadReportMsg {
    WorkloadReport report;
};

// Balancer -> target LocalProcessor: expect packages for this cell.
struct MigrateExpectMsg {
    std::uint64_t plan_id = 0;
    CellId cell = 0;
    std::uint32_t from_instance = 0;
};

// target LocalProcessor -> Balancer: ready to receive packages for the cell.
// The Balancer instructs the source only after this ack, so a package can
// never legitimately reach a non-expecting target.
struct MigrateExpectAckMsg {
    std::uint64_t plan_id = 0;
    CellId cell = 0;
};

// Balancer -> source LocalProcessor: start moving the cell out.
struct MigrateOutMsg {
    std::uint64_t plan_id = 0;
    CellId cell = 0;
    std::uint32_t target = 0;
};

struct StoredEntry {
    ObjectId object_id = 0;
    Point p;
    TimestampMs ts = 0;
};

// source -> target LocalProcessor; at most package-size live entries each.
// The final package carries the cell's tombstones so the target replays
// later dual-written ops with identical guard decisions.
struct MigratePackageMsg {
    std::uint64_t plan_id = 0;
    CellId cell = 0;
    std::uint32_t from_instance = 0;
    std::uint32_t seq = 0;
    bool final = false;
    std::vector<StoredEntry> entries;
    std::vector<std::pair<ObjectId, TimestampMs>> tombstones;
};

// source -> target LocalProcessor while a cell is migrating: one dual-written op.
struct MigrateForwardOpMsg {
    std::uint64_t plan_id = 0;
    CellOp op;
};

// target LocalProcessor -> Balancer: all packages for the cell received.
struct MigrateDoneMsg {
    std::uint64_t plan_id = 0;
    CellId cell = 0;
    std::uint32_t from_instance = 0;
    std::uint32_t to_instance = 0;
    std::uint64_t bytes = 0;
};

// any LocalProcessor -> Balancer: migration protocol violation.
struct MigrateErrorMsg {
    std::uint64_t plan_id = 0;
    CellId cell = 0;
    std::uint32_t at_instance = 0;
};

// Balancer -> source: drop the migrated cell, forward stragglers to new_owner.
struct CommitDropMsg {
    std::uint64_t plan_id = 0;
    CellId cell = 0;
    std::uint32_t new_owner = 0;
};

// Balancer -> target: the migrated cell is now owned.
struct CommitActivateMsg {
    std::uint64_t plan_id = 0;
    CellId cell = 0;
};

// Balancer -> source/target: plan failed, revert transitional state.
struct MigrateAbortMsg {
    std::uint64_t plan_id = 0;
    CellId cell = 0;
};

// Balancer -> every Indexer
struct OwnerBroadcastMsg {
    std::vector<std::pair<CellId, std::uint32_t>> moves;
};

// driver -> Aggregator
struct DeregisterMsg {
    QueryId query_id = 0;
};

enum class TimerKind : std::uint8_t {
    SyncTick,      // LocalProcessor periodic-sync check
    WorkloadTick,  // LocalProcessor workload window roll
    BroadcastTick, // MetaSync dirty-cell broadcast
    BalanceTick,   // Balancer invocation
    RefreshTick,   // Aggregator continuous-query refresh
};

struct TimerMsg {
    TimerKind kind = TimerKind::SyncTick;
    std::uint64_t arg = 0; // RefreshTick: query id
};

using Payload =
    std::variant<UpdateMsg, QueryMsg, MovementMsg, LocalOpsMsg, SubQueryMsg, PartialMsg, SyncMsg,
                 MetaBroadcastMsg, WorkloadReportMsg, MigrateExpectMsg, MigrateExpectAckMsg,
                 MigrateOutMsg, MigratePackageMsg, MigrateForwardOpMsg, MigrateDoneMsg,
                 MigrateErrorMsg, CommitDropMsg, CommitActivateMsg, MigrateAbortMsg,
                 OwnerBroadcastMsg, DeregisterMsg, TimerMsg>;

// --- event-log support -------------------------------------------------------

namespace detail {

struct Fnv {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    }
    void u64(std::uint64_t v) { bytes(&v, sizeof v); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void pt(Point p) {
        f64(p.lon);
        f64(p.lat);
    }
};

inline void hash_into(Fnv& f, const UpdateMsg& m) {
    f.u64(m.update.object_id);
    f.u64(m.update.timestamp);
    f.pt(m.update.point());
}
inline void hash_into(Fnv& f, const QueryMsg& m) {
    f.u64(m.query.query_id);
    f.u64(m.query.body.index());
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, ObjectQuery>) {
                f.u64(b.object_id);
            } else if constexpr (std::is_same_v<T, RangeCountQuery>) {
                f.f64(b.rect.min_lon);
                f.f64(b.rect.min_lat);
                f.f64(b.rect.max_lon);
                f.f64(b.rect.max_lat);
            } else if constexpr (std::is_same_v<T, KnnQuery>) {
                f.pt(b.q);
                f.u64(b.k);
            } else {
                f.u64(b.refresh_interval_ms);
                f.u64(b.inner.index());
            }
        },
        m.query.body);
    f.u64(m.issue_ns);
}
inline void hash_into(Fnv& f, const MovementMsg& m) {
    f.u64(m.movement.object_id);
    f.u64(m.movement.old_cell ? *m.movement.old_cell + 1 : 0);
    f.u64(m.movement.new_cell);
    f.pt(m.movement.new_point);
    f.u64(m.movement.timestamp);
}
inline void hash_into(Fnv& f, const LocalOpsMsg& m) {
    for (const auto& op : m.ops) {
        f.u64(static_cast<std::uint64_t>(op.kind));
        f.u64(op.cell);
        f.u64(op.object_id);
        f.pt(op.point);
        f.u64(op.ts);
    }
}
inline void hash_into(Fnv& f, const SubQueryMsg& m) {
    f.u64(m.sub.query_id);
    f.u64(static_cast<std::uint64_t>(m.sub.kind));
    f.u64(m.sub.fanout);
    f.u64(m.sub.hop);
    for (CellId c : m.sub.candidate_cells)
        f.u64(c);
}
inline void hash_into(Fnv& f, const PartialMsg& m) {
    f.u64(m.query_id);
    f.u64(static_cast<std::uint64_t>(m.kind));
    f.u64(m.fanout);
    f.u64(m.sender);
    f.u64(m.count);
    f.u64(m.forwarded ? 1 : 0);
    f.u64(m.announced_forwards);
    for (const auto& n : m.neighbors) {
        f.u64(n.object_id);
        f.f64(n.distance);
    }
    if (m.location) {
        f.pt(m.location->p);
        f.u64(m.location->timestamp);
    }
}
inline void hash_into(Fnv& f, const SyncMsg& m) {
    f.u64(m.cell);
    f.u64(m.count);
    f.u64(m.accumulative ? 1 : 0);
    f.u64(m.sender);
}
inline void hash_into(Fnv& f, const MetaBroadcastMsg& m) {
    for (const auto& [c, n] : m.entries) {
        f.u64(c);
        f.u64(n);
    }
}
inline void hash_into(Fnv& f, const WorkloadReportMsg& m) {
    f.u64(m.report.instance);
    f.u64(m.report.window_end_ms);
    for (const auto& c : m.report.cells) {
        f.u64(c.cell);
        f.u64(c.ops);
        f.u64(c.visited);
    }
}
inline void hash_into(Fnv& f, const MigrateExpectMsg& m) {
    f.u64(m.plan_id);
    f.u64(m.cell);
    f.u64(m.from_instance);
}
inline void hash_into(Fnv& f, const MigrateExpectAckMsg& m) {
    f.u64(m.plan_id);
    f.u64(m.cell);
}
inline void hash_into(Fnv& f, const MigrateOutMsg& m) {
    f.u64(m.plan_id);
    f.u64(m.cell);
    f.u64(m.target);
}
inline void hash_into(Fnv& f, const MigratePackageMsg& m) {
    f.u64(m.plan_id);
    f.u64(m.cell);
    f.u64(m.seq);
    f.u64(m.final ? 1 : 0);
    for (const auto& e : m.entries) {
        f.u64(e.object_id);
        f.pt(e.p);
        f.u64(e.ts);
    }
    for (const auto& [o, t] : m.tombstones) {
        f.u64(o);
        f.u64(t);
    }
}
inline void hash_into(Fnv& f, const MigrateForwardOpMsg& m) {
    f.u64(m.plan_id);
    f.u64(static_cast<std::uint64_t>(m.op.kind));
    f.u64(m.op.cell);
    f.u64(m.op.object_id);
    f.pt(m.op.point);
    f.u64(m.op.ts);
}
inline void hash_into(Fnv& f, const MigrateDoneMsg& m) {
    f.u64(m.plan_id);
    f.u64(m.cell);
    f.u64(m.from_instance);
    f.u64(m.to_instance);
    f.u64(m.bytes);
}
inline void hash_into(Fnv& f, const MigrateErrorMsg& m) {
    f.u64(m.plan_id);
    f.u64(m.cell);
    f.u64(m.at_instance);
}
inline void hash_into(Fnv& f, const CommitDropMsg& m) {
    f.u64(m.plan_id);
    f.u64(m.cell);
    f.u64(m.new_owner);
}
inline void hash_into(Fnv& f, const CommitActivateMsg& m) {
    f.u64(m.plan_id);
    f.u64(m.cell);
}
inline void hash_into(Fnv& f, const MigrateAbortMsg& m) {
    f.u64(m.plan_id);
    f.u64(m.cell);
}
inline void hash_into(Fnv& f, const OwnerBroadcastMsg& m) {
    for (const auto& [c, o] : m.moves) {
        f.u64(c);
        f.u64(o);
    }
}
inline void hash_into(Fnv& f, const DeregisterMsg& m) { f.u64(m.query_id); }
inline void hash_into(Fnv& f, const TimerMsg& m) {
    f.u64(static_cast<std::uint64_t>(m.kind));
    f.u64(m.arg);
}

} // namespace detail

inline const char* payload_kind_name(const Payload& p) {
    static constexpr const char* names[] = {
        "update",          "query",          "movement",        "local_ops",
        "sub_query",       "partial",        "sync",            "meta_broadcast",
        "workload_report", "migrate_expect", "migrate_expect_ack", "migrate_out",
        "migrate_package", "migrate_fwd_op", "migrate_done",    "migrate_error",
        "commit_drop",     "commit_activate","migrate_abort",   "owner_broadcast",
        "deregister",      "timer"};
    return names[p.index()];
}

inline std::uint64_t payload_digest(const Payload& p) {
    detail::Fnv f;
    f.u64(p.index());
    std::visit([&](const auto& m) { detail::hash_into(f, m); }, p);
    return f.h;
}

} // namespace gridstream::msg
