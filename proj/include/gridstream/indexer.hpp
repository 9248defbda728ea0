// indexer.hpp — grid-based global index: cell -> owner map plus per-cell
// metadata replica. Routes movements as delete/insert operators, prunes
// candidate cells for queries and fans them out per owner.

#pragma once

#include <cstdint>
#include <map>
#include <queue>
#include <span>
#include <vector>

#include "gridstream/messages.hpp"
#include "gridstream/runtime.hpp"
#include "gridstream/types.hpp"

namespace gridstream {

enum class Mode : std::uint8_t { Cheetah, CheetahMinus, Broadcast };

inline const char* mode_name(Mode m) {
    switch (m) {
    case Mode::Cheetah: return "cheetah";
    case Mode::CheetahMinus: return "cheetah-minus";
    case Mode::Broadcast: return "broadcast";
    }
    return "?";
}

struct KnnPlan {
    std::vector<CellId> cells;
    double radius = 0.0;
    // true when the metadata guarantee could not be established and the plan
    // degenerated to the metadata-non-empty / all-cells fallback.
    bool fallback = false;
};

// Candidate cells for a kNN query via ring expansion over the metadata grid.
//
// Cells are examined in Chebyshev rings around the query's cell. A cell with
// positive adjusted count max(0, count - delta) enters a min-heap keyed by
// its enclosure distance (max point-to-cell distance); it is accumulated only
// once no unexamined ring can contain a smaller enclosure distance (cells in
// ring p+1 and beyond lie at least p*min(cell_w,cell_h) away). Accumulation
// stops when the guaranteed count reaches k; the pruning circle radius r* is
// the largest enclosure distance accumulated, optionally widened by one ring
// of counted cells as slack for the periodic-sync window. The delta
// adjustment keeps the ">= k objects inside the circle" guarantee valid under
// un-synced deletions of up to delta per cell.
//
// Degenerate paths: before any sync broadcast every cell is a candidate;
// when the adjusted or raw metadata total cannot reach k, all cells with
// non-zero metadata plus the center cell are.
inline KnnPlan knn_candidate_cells(const GridConfig& g, std::span<const CellMetadata> meta,
                                   std::uint64_t total_meta, bool any_sync_seen, Point q,
                                   std::uint32_t k, std::uint64_t delta, bool ring_slack) {
    KnnPlan plan;
    const CellId c0 = g.cell_of(q);

    auto all_cells = [&] {
        plan.fallback = true;
        plan.radius = max_distance(q, g.region());
        plan.cells.resize(g.n_cells());
        for (CellId c = 0; c < g.n_cells(); ++c)
            plan.cells[c] = c;
    };
    auto nonempty_plus_center = [&] {
        plan.fallback = true;
        for (CellId c = 0; c < g.n_cells(); ++c)
            if (meta[c].count > 0 || c == c0)
                plan.cells.push_back(c);
    };

    if (!any_sync_seen) {
        all_cells();
        return plan;
    }
    if (total_meta < k) {
        nonempty_plus_center();
        return plan;
    }

    auto adjusted = [&](CellId c) -> std::uint64_t {
        const std::uint64_t n = meta[c].count;
        return n > delta ? n - delta : 0;
    };

    struct HeapEntry {
        double enclose_dist;
        CellId cell;
        std::uint64_t count;
        bool operator>(const HeapEntry& o) const {
            return enclose_dist != o.enclose_dist ? enclose_dist > o.enclose_dist : cell > o.cell;
        }
    };
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> heap;

    const double min_side = std::min(g.cell_width, g.cell_height);
    const std::uint32_t max_ring = std::max(g.n_rows, g.n_cols);
    std::uint64_t guaranteed = 0;
    double r_star = 0.0;
    std::uint32_t stop_ring = max_ring + 1;

    for (std::uint32_t ring = 0; ring <= max_ring && guaranteed < k; ++ring) {
        for (CellId c : chebyshev_ring(c0, ring, g)) {
            const std::uint64_t a = adjusted(c);
            if (a > 0)
                heap.push(HeapEntry{max_distance(q, g.cell_bounds(c)), c, a});
        }
        const double bound = static_cast<double>(ring) * min_side;
        while (guaranteed < k && !heap.empty() && heap.top().enclose_dist < bound) {
            guaranteed += heap.top().count;
            r_star = std::max(r_star, heap.top().enclose_dist);
            heap.pop();
        }
        if (guaranteed >= k)
            stop_ring = ring;
    }
    // all rings examined; remaining heap entries can be taken in order
    while (guaranteed < k && !heap.empty()) {
        guaranteed += heap.top().count;
        r_star = std::max(r_star, heap.top().enclose_dist);
        heap.pop();
        stop_ring = max_ring;
    }
    if (guaranteed < k) {
        // adjusted counts cannot certify k even though raw metadata could
        nonempty_plus_center();
        return plan;
    }
    if (ring_slack) {
        for (CellId c : chebyshev_ring(c0, stop_ring + 1, g))
            if (adjusted(c) > 0)
                r_star = std::max(r_star, max_distance(q, g.cell_bounds(c)));
    }
    plan.radius = r_star;
    plan.cells = cells_intersecting_circle(q, r_star, g);
    return plan;
}

// Split a sorted candidate set into per-owner sub-queries (disjoint cell
// sets, keyed by ascending owner id).
inline std::map<InstanceId, std::vector<CellId>> group_by_owner(const std::vector<CellId>& cells,
                                                                std::span<const InstanceId> owner) {
    std::map<InstanceId, std::vector<CellId>> groups;
    for (CellId c : cells)
        groups[owner[c]].push_back(c);
    return groups;
}

class IndexerActor final : public rt::Actor<msg::Payload> {
public:
    struct Config {
        GridConfig grid;
        std::vector<InstanceId> initial_owner; // one entry per cell
        std::uint32_t n_local_processors = 1;
        std::uint32_t n_aggregators = 1;
        Mode mode = Mode::Cheetah;
        std::uint64_t knn_delta = 32; // staleness margin (accumulative threshold)
        bool knn_ring_slack = true;
    };

    IndexerActor(InstanceId id, Config cfg) : id_(id), cfg_(std::move(cfg)) {
        owner_ = cfg_.initial_owner;
        meta_.assign(cfg_.grid.n_cells(), CellMetadata{});
    }

    void on_message(rt::Context<msg::Payload>& ctx, const rt::Envelope<msg::Payload>& env) override {
        if (const auto* m = std::get_if<msg::MovementMsg>(&env.payload)) {
            route_movement(ctx, m->movement);
        } else if (const auto* q = std::get_if<msg::QueryMsg>(&env.payload)) {
            plan_query(ctx, *q);
        } else if (const auto* b = std::get_if<msg::MetaBroadcastMsg>(&env.payload)) {
            apply_meta_broadcast(ctx, *b);
        } else if (const auto* o = std::get_if<msg::OwnerBroadcastMsg>(&env.payload)) {
            for (const auto& [cell, new_owner] : o->moves)
                if (cell < owner_.size())
                    owner_[cell] = new_owner;
        }
    }

    const std::vector<InstanceId>& owner_map() const { return owner_; }
    const std::vector<CellMetadata>& metadata() const { return meta_; }
    std::uint64_t total_metadata_count() const { return total_meta_; }
    std::uint64_t unknown_cell_warnings() const { return unknown_cell_warnings_; }

private:
    rt::ActorAddress lp(InstanceId i) const {
        return rt::ActorAddress{rt::FunctionKind::LocalProcessor, i};
    }
    rt::ActorAddress aggregator_for(QueryId qid) const {
        return rt::ActorAddress{rt::FunctionKind::Aggregator,
                                static_cast<std::uint32_t>(qid % cfg_.n_aggregators)};
    }

    void route_movement(rt::Context<msg::Payload>& ctx, const Movement& m) {
        ctx.charge(1);
        msg::CellOp del{msg::CellOp::Kind::Delete, 0, m.object_id, {}, m.timestamp};
        msg::CellOp ins{msg::CellOp::Kind::Insert, m.new_cell, m.object_id, m.new_point, m.timestamp};
        if (!m.old_cell) {
            ctx.send(lp(owner_[m.new_cell]), msg::LocalOpsMsg{{ins}});
            return;
        }
        del.cell = *m.old_cell;
        const InstanceId old_owner = owner_[*m.old_cell];
        const InstanceId new_owner = owner_[m.new_cell];
        if (old_owner == new_owner) {
            ctx.send(lp(new_owner), msg::LocalOpsMsg{{del, ins}});
        } else {
            ctx.send(lp(old_owner), msg::LocalOpsMsg{{del}});
            ctx.send(lp(new_owner), msg::LocalOpsMsg{{ins}});
        }
    }

    void plan_query(rt::Context<msg::Payload>& ctx, const msg::QueryMsg& qm) {
        const Query& q = qm.query;
        if (const auto* rq = std::get_if<RangeCountQuery>(&q.body)) {
            plan_range_count(ctx, q.query_id, *rq, qm.issue_ns);
        } else if (const auto* kq = std::get_if<KnnQuery>(&q.body)) {
            plan_knn(ctx, q.query_id, *kq, qm.issue_ns);
        } else if (const auto* oq = std::get_if<ObjectQuery>(&q.body)) {
            // reaches the Indexer only in the broadcast baseline
            broadcast_object_lookup(ctx, q.query_id, *oq, qm.issue_ns);
        }
    }

    void send_groups(rt::Context<msg::Payload>& ctx, QueryId qid, QueryKind kind,
                     const std::map<InstanceId, std::vector<CellId>>& groups,
                     std::uint64_t issue_ns, const Rect& rect, Point q, std::uint32_t k,
                     ObjectId oid = 0) {
        const auto fanout = static_cast<std::uint32_t>(groups.size());
        for (const auto& [inst, cells] : groups) {
            msg::RoutedSubQuery sub;
            sub.query_id = qid;
            sub.kind = kind;
            sub.rect = rect;
            sub.q = q;
            sub.k = k;
            sub.object_id = oid;
            sub.candidate_cells = cells;
            sub.fanout = fanout;
            sub.issue_ns = issue_ns;
            ctx.send(lp(inst), msg::SubQueryMsg{std::move(sub)});
        }
    }

    void plan_range_count(rt::Context<msg::Payload>& ctx, QueryId qid, const RangeCountQuery& rq,
                          std::uint64_t issue_ns) {
        std::vector<CellId> candidates;
        Rect clamped{};
        if (cfg_.mode == Mode::Broadcast) {
            clamped = rq.rect;
            candidates.resize(cfg_.grid.n_cells());
            for (CellId c = 0; c < cfg_.grid.n_cells(); ++c)
                candidates[c] = c;
        } else if (auto cl = cfg_.grid.clamp_rect(rq.rect)) {
            clamped = *cl;
            candidates = cells_intersecting_rect(clamped, cfg_.grid);
        }
        ctx.charge(candidates.size());
        if (candidates.empty()) {
            // degenerate clamped rect: answer zero directly, no fanout
            msg::PartialMsg p;
            p.query_id = qid;
            p.kind = QueryKind::RangeCount;
            p.fanout = 1;
            p.sender = kIndexerSender;
            p.issue_ns = issue_ns;
            p.count = 0;
            ctx.send(aggregator_for(qid), std::move(p));
            return;
        }
        send_groups(ctx, qid, QueryKind::RangeCount, group_by_owner(candidates, owner_), issue_ns,
                    clamped, Point{}, 0);
    }

    void plan_knn(rt::Context<msg::Payload>& ctx, QueryId qid, const KnnQuery& kq,
                  std::uint64_t issue_ns) {
        std::vector<CellId> candidates;
        if (cfg_.mode == Mode::Cheetah) {
            candidates = knn_candidate_cells(cfg_.grid, meta_, total_meta_, any_sync_seen_, kq.q,
                                             kq.k, cfg_.knn_delta, cfg_.knn_ring_slack)
                             .cells;
        } else {
            // no metadata pruning: a radius large enough to cover the region
            candidates.resize(cfg_.grid.n_cells());
            for (CellId c = 0; c < cfg_.grid.n_cells(); ++c)
                candidates[c] = c;
        }
        ctx.charge(candidates.size());
        send_groups(ctx, qid, QueryKind::Knn, group_by_owner(candidates, owner_), issue_ns, Rect{},
                    kq.q, kq.k);
    }

    void broadcast_object_lookup(rt::Context<msg::Payload>& ctx, QueryId qid, const ObjectQuery& oq,
                                 std::uint64_t issue_ns) {
        std::map<InstanceId, std::vector<CellId>> groups;
        for (InstanceId i = 0; i < cfg_.n_local_processors; ++i)
            groups[i] = {};
        ctx.charge(cfg_.n_local_processors);
        send_groups(ctx, qid, QueryKind::Object, groups, issue_ns, Rect{}, Point{}, 0, oq.object_id);
    }

    void apply_meta_broadcast(rt::Context<msg::Payload>& ctx, const msg::MetaBroadcastMsg& b) {
        ctx.charge(b.entries.size());
        any_sync_seen_ = true;
        for (const auto& [cell, count] : b.entries) {
            if (cell >= meta_.size()) {
                ++unknown_cell_warnings_;
                continue;
            }
            total_meta_ += count;
            total_meta_ -= meta_[cell].count;
            meta_[cell].count = count;
            meta_[cell].last_sync_ms = ctx.now_ms();
        }
    }

public:
    static constexpr std::uint32_t kIndexerSender = 0xFFFFFFFFu;

private:
    InstanceId id_;
    Config cfg_;
    std::vector<InstanceId> owner_;
    std::vector<CellMetadata> meta_;
    std::uint64_t total_meta_ = 0;
    bool any_sync_seen_ = false;
    std::uint64_t unknown_cell_warnings_ = 0;
};

} // namespace gridstream
