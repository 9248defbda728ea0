// local_processor.hpp — stores exact object locations for its cell group
// (many-to-one execution mode), executes sub-queries, tracks per-cell
// workload, feeds metadata synchronization, and takes part in packaged cell
// migration.
//
// Consecutive movements of one object can reach this instance through
// different Indexers and therefore out of order. Every operator carries its
// update's event timestamp; stores keep per-object timestamps plus deletion
// tombstones and drop superseded operators, so the quiescent state is
// order-independent.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "gridstream/indexer.hpp"
#include "gridstream/messages.hpp"
#include "gridstream/runtime.hpp"
#include "gridstream/types.hpp"

namespace gridstream {

class LocalProcessorActor final : public rt::Actor<msg::Payload> {
public:
    struct Config {
        GridConfig grid;
        std::vector<CellId> owned_cells;
        std::uint32_t n_aggregators = 1;
        SyncConfig sync;
        bool workload_reports = true;
        TimestampMs workload_window_ms = 10'000;
        std::uint64_t package_size = 10'000;
    };

    struct StoredObject {
        Point p;
        TimestampMs ts = 0;
    };

    enum class CellState : std::uint8_t { Owned, MigratingOut, Incoming };

    struct CellSlot {
        std::unordered_map<ObjectId, StoredObject> live;
        std::unordered_map<ObjectId, TimestampMs> tombstones;
        // workload window
        std::uint64_t win_ops = 0;
        std::uint64_t win_visited = 0;
        // sync bookkeeping
        std::uint64_t last_sent_count = 0;
        TimestampMs last_sent_ms = 0;
        // migration
        CellState state = CellState::Owned;
        std::uint64_t plan_id = 0;
        InstanceId migrate_peer = 0; // target when MigratingOut, source when Incoming
        std::uint64_t migrate_bytes = 0;
    };

    struct Counters {
        std::uint64_t absent_deletes = 0; // delete of an object not present
        std::uint64_t guard_drops = 0;    // superseded out-of-order operators
        std::uint64_t misrouted = 0;      // op/sub-query for a cell never held, no forward target
        std::uint64_t forwarded_ops = 0;
        std::uint64_t forwarded_subqueries = 0;
        std::uint64_t hop_overflows = 0;
        std::uint64_t sync_periodic_sent = 0;
        std::uint64_t sync_accumulative_sent = 0;
    };

    LocalProcessorActor(InstanceId id, Config cfg) : id_(id), cfg_(std::move(cfg)) {
        for (CellId c : cfg_.owned_cells)
            cells_.try_emplace(c);
    }

    void on_start(rt::Context<msg::Payload>& ctx) override {
        if (cfg_.sync.enabled)
            ctx.schedule_after_ms(cfg_.sync.period_ms, msg::TimerMsg{msg::TimerKind::SyncTick});
        if (cfg_.workload_reports)
            ctx.schedule_after_ms(cfg_.workload_window_ms, msg::TimerMsg{msg::TimerKind::WorkloadTick});
    }

    void on_message(rt::Context<msg::Payload>& ctx, const rt::Envelope<msg::Payload>& env) override {
        if (const auto* ops = std::get_if<msg::LocalOpsMsg>(&env.payload)) {
            for (const auto& op : ops->ops)
                apply_op(ctx, op, /*dual_forwarded=*/false);
        } else if (const auto* sq = std::get_if<msg::SubQueryMsg>(&env.payload)) {
            exec_sub_query(ctx, sq->sub);
        } else if (const auto* t = std::get_if<msg::TimerMsg>(&env.payload)) {
            on_timer(ctx, *t);
        } else if (const auto* fw = std::get_if<msg::MigrateForwardOpMsg>(&env.payload)) {
            apply_op(ctx, fw->op, /*dual_forwarded=*/true);
        } else if (const auto* ex = std::get_if<msg::MigrateExpectMsg>(&env.payload)) {
            migrate_expect(ctx, *ex);
        } else if (const auto* out = std::get_if<msg::MigrateOutMsg>(&env.payload)) {
            migrate_out(ctx, *out);
        } else if (const auto* pk = std::get_if<msg::MigratePackageMsg>(&env.payload)) {
            migrate_in(ctx, *pk);
        } else if (const auto* dr = std::get_if<msg::CommitDropMsg>(&env.payload)) {
            commit_drop(*dr);
        } else if (const auto* ac = std::get_if<msg::CommitActivateMsg>(&env.payload)) {
            commit_activate(*ac);
        } else if (const auto* ab = std::get_if<msg::MigrateAbortMsg>(&env.payload)) {
            migrate_abort(*ab);
        }
    }

    // --- inspection (tests / harness, after quiescence) ---

    const std::unordered_map<CellId, CellSlot>& cells() const { return cells_; }
    const Counters& counters() const { return counters_; }

    std::uint64_t stored_object_count() const {
        std::uint64_t n = 0;
        for (const auto& [c, s] : cells_)
            if (s.state != CellState::Incoming)
                n += s.live.size();
        return n;
    }

private:
    static rt::ActorAddress lp(InstanceId i) {
        return rt::ActorAddress{rt::FunctionKind::LocalProcessor, i};
    }
    static rt::ActorAddress metasync() { return rt::ActorAddress{rt::FunctionKind::MetaSync, 0}; }
    static rt::ActorAddress balancer() { return rt::ActorAddress{rt::FunctionKind::Balancer, 0}; }
    rt::ActorAddress aggregator_for(QueryId qid) const {
        return rt::ActorAddress{rt::FunctionKind::Aggregator,
                                static_cast<std::uint32_t>(qid % cfg_.n_aggregators)};
    }

    // ---- operators ----

    void apply_op(rt::Context<msg::Payload>& ctx, const msg::CellOp& op, bool dual_forwarded) {
        auto it = cells_.find(op.cell);
        if (it == cells_.end()) {
            if (dual_forwarded) {
                ++counters_.misrouted; // incoming copy dropped by a plan abort
                return;
            }
            if (auto f = forward_to_.find(op.cell); f != forward_to_.end()) {
                ++counters_.forwarded_ops;
                ctx.send(lp(f->second), msg::LocalOpsMsg{{op}});
            } else {
                ++counters_.misrouted;
            }
            return;
        }
        CellSlot& s = it->second;
        s.win_ops += 1;
        ctx.charge(1);

        if (op.kind == msg::CellOp::Kind::Insert) {
            auto tb = s.tombstones.find(op.object_id);
            if (tb != s.tombstones.end() && tb->second >= op.ts) {
                ++counters_.guard_drops;
            } else {
                auto lv = s.live.find(op.object_id);
                if (lv != s.live.end() && lv->second.ts >= op.ts) {
                    ++counters_.guard_drops;
                } else {
                    s.live[op.object_id] = StoredObject{op.point, op.ts};
                    if (tb != s.tombstones.end())
                        s.tombstones.erase(tb);
                }
            }
        } else {
            auto lv = s.live.find(op.object_id);
            if (lv == s.live.end()) {
                ++counters_.absent_deletes; // can occur transiently during migration/reorder
                auto& t = s.tombstones[op.object_id];
                t = std::max(t, op.ts);
            } else if (lv->second.ts > op.ts) {
                ++counters_.guard_drops; // delete superseded by a newer insert
            } else {
                s.live.erase(lv);
                auto& t = s.tombstones[op.object_id];
                t = std::max(t, op.ts);
            }
        }

        if (s.state == CellState::MigratingOut && !dual_forwarded)
            ctx.send(lp(s.migrate_peer), msg::MigrateForwardOpMsg{s.plan_id, op});

        if (cfg_.sync.enabled && s.state != CellState::Incoming)
            check_accumulative(ctx, op.cell, s);
    }

    void check_accumulative(rt::Context<msg::Payload>& ctx, CellId cell, CellSlot& s) {
        const std::uint64_t n = s.live.size();
        const std::uint64_t drift = n > s.last_sent_count ? n - s.last_sent_count : s.last_sent_count - n;
        if (drift >= cfg_.sync.acc_threshold) {
            ctx.send(metasync(), msg::SyncMsg{cell, n, /*accumulative=*/true, id_});
            s.last_sent_count = n;
            s.last_sent_ms = ctx.now_ms();
            ++counters_.sync_accumulative_sent;
        }
    }

    // ---- queries ----

    void exec_sub_query(rt::Context<msg::Payload>& ctx, const msg::RoutedSubQuery& sub) {
        // split off cells this instance no longer holds (stale owner map)
        std::map<InstanceId, std::vector<CellId>> fwd;
        std::vector<CellId> local;
        if (sub.kind == QueryKind::Object) {
            // broadcast baseline: scan everything held
            for (const auto& [c, s] : cells_)
                local.push_back(c);
            std::sort(local.begin(), local.end());
        } else {
            for (CellId c : sub.candidate_cells) {
                if (cells_.contains(c)) {
                    local.push_back(c);
                } else if (auto f = forward_to_.find(c); f != forward_to_.end()) {
                    fwd[f->second].push_back(c);
                } else {
                    ++counters_.misrouted; // never held; scanned as empty
                }
            }
        }
        for (const auto& [target, cells] : fwd) {
            if (sub.hop >= 1)
                ++counters_.hop_overflows;
            msg::RoutedSubQuery f = sub;
            f.candidate_cells = cells;
            f.hop = static_cast<std::uint8_t>(sub.hop + 1);
            ++counters_.forwarded_subqueries;
            ctx.send(lp(target), msg::SubQueryMsg{std::move(f)});
        }

        msg::PartialMsg p;
        p.query_id = sub.query_id;
        p.kind = sub.kind;
        p.fanout = sub.fanout;
        p.k = sub.k;
        p.forwarded = sub.hop > 0;
        p.announced_forwards = static_cast<std::uint32_t>(fwd.size());
        p.sender = id_;
        p.issue_ns = sub.issue_ns;

        std::uint64_t visited = 0;
        if (sub.kind == QueryKind::RangeCount) {
            for (CellId c : local) {
                CellSlot& s = cells_.at(c);
                s.win_visited += s.live.size();
                visited += s.live.size();
                for (const auto& [oid, obj] : s.live)
                    if (sub.rect.contains(obj.p))
                        ++p.count;
            }
        } else if (sub.kind == QueryKind::Knn) {
            // local top-k, worst on top; ties resolved toward smaller id
            auto worse = [](const Neighbor& a, const Neighbor& b) { return neighbor_less(a, b); };
            std::vector<Neighbor> heap;
            for (CellId c : local) {
                CellSlot& s = cells_.at(c);
                s.win_visited += s.live.size();
                visited += s.live.size();
                for (const auto& [oid, obj] : s.live) {
                    Neighbor n{oid, obj.p, distance(sub.q, obj.p)};
                    if (heap.size() < sub.k) {
                        heap.push_back(n);
                        std::push_heap(heap.begin(), heap.end(), worse);
                    } else if (!heap.empty() && neighbor_less(n, heap.front())) {
                        std::pop_heap(heap.begin(), heap.end(), worse);
                        heap.back() = n;
                        std::push_heap(heap.begin(), heap.end(), worse);
                    }
                }
            }
            std::sort(heap.begin(), heap.end(), neighbor_less);
            p.neighbors = std::move(heap);
        } else { // Object lookup, broadcast baseline
            const ObjectId want = sub.object_id;
            for (CellId c : local) {
                CellSlot& s = cells_.at(c);
                s.win_visited += s.live.size();
                visited += s.live.size();
                auto lv = s.live.find(want);
                if (lv != s.live.end()) {
                    if (!p.location || lv->second.ts > p.location->timestamp)
                        p.location = LocationResult{lv->second.p, lv->second.ts};
                }
            }
        }
        ctx.charge(visited + local.size());
        ctx.send(aggregator_for(sub.query_id), std::move(p));
    }

    // ---- timers ----

    void on_timer(rt::Context<msg::Payload>& ctx, const msg::TimerMsg& t) {
        if (t.kind == msg::TimerKind::SyncTick) {
            periodic_sync_check(ctx);
            ctx.schedule_after_ms(cfg_.sync.period_ms, msg::TimerMsg{msg::TimerKind::SyncTick});
        } else if (t.kind == msg::TimerKind::WorkloadTick) {
            report_workload(ctx);
            ctx.schedule_after_ms(cfg_.workload_window_ms,
                                  msg::TimerMsg{msg::TimerKind::WorkloadTick});
        }
    }

    void periodic_sync_check(rt::Context<msg::Payload>& ctx) {
        const TimestampMs now = ctx.now_ms();
        std::vector<CellId> ids;
        ids.reserve(cells_.size());
        for (const auto& [c, s] : cells_)
            ids.push_back(c);
        std::sort(ids.begin(), ids.end());
        for (CellId c : ids) {
            CellSlot& s = cells_.at(c);
            if (s.state == CellState::Incoming)
                continue;
            const std::uint64_t n = s.live.size();
            if (n != s.last_sent_count && now - s.last_sent_ms >= cfg_.sync.period_ms) {
                ctx.send(metasync(), msg::SyncMsg{c, n, /*accumulative=*/false, id_});
                s.last_sent_count = n;
                s.last_sent_ms = now;
                ++counters_.sync_periodic_sent;
            }
        }
        ctx.charge(ids.size());
    }

    void report_workload(rt::Context<msg::Payload>& ctx) {
        WorkloadReport rep;
        rep.instance = id_;
        rep.window_end_ms = ctx.now_ms();
        rep.window_ms = cfg_.workload_window_ms;
        std::vector<CellId> ids;
        for (const auto& [c, s] : cells_)
            ids.push_back(c);
        std::sort(ids.begin(), ids.end());
        for (CellId c : ids) {
            CellSlot& s = cells_.at(c);
            if (s.state != CellState::Incoming && (s.win_ops || s.win_visited))
                rep.cells.push_back(CellWorkload{c, s.win_ops, s.win_visited});
            s.win_ops = 0;
            s.win_visited = 0;
        }
        ctx.send(balancer(), msg::WorkloadReportMsg{std::move(rep)});
    }

    // ---- migration ----

    void migrate_expect(rt::Context<msg::Payload>& ctx, const msg::MigrateExpectMsg& ex) {
        auto [it, fresh] = cells_.try_emplace(ex.cell);
        if (!fresh && it->second.state != CellState::Incoming) {
            ctx.send(balancer(), msg::MigrateErrorMsg{ex.plan_id, ex.cell, id_});
            return;
        }
        CellSlot& s = it->second;
        s.state = CellState::Incoming;
        s.plan_id = ex.plan_id;
        s.migrate_peer = ex.from_instance;
        s.migrate_bytes = 0;
        forward_to_.erase(ex.cell); // the cell is coming back here
        ctx.send(balancer(), msg::MigrateExpectAckMsg{ex.plan_id, ex.cell});
    }

    void migrate_out(rt::Context<msg::Payload>& ctx, const msg::MigrateOutMsg& out) {
        auto it = cells_.find(out.cell);
        if (it == cells_.end() || it->second.state != CellState::Owned) {
            ctx.send(balancer(), msg::MigrateErrorMsg{out.plan_id, out.cell, id_});
            return;
        }
        CellSlot& s = it->second;
        s.state = CellState::MigratingOut;
        s.plan_id = out.plan_id;
        s.migrate_peer = out.target;

        std::vector<msg::StoredEntry> entries;
        entries.reserve(s.live.size());
        for (const auto& [oid, obj] : s.live)
            entries.push_back(msg::StoredEntry{oid, obj.p, obj.ts});
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.object_id < b.object_id; });
        ctx.charge(entries.size());

        const std::uint64_t psz = std::max<std::uint64_t>(1, cfg_.package_size);
        std::uint32_t seq = 0;
        std::size_t i = 0;
        do {
            msg::MigratePackageMsg pkg;
            pkg.plan_id = out.plan_id;
            pkg.cell = out.cell;
            pkg.from_instance = id_;
            pkg.seq = seq++;
            const std::size_t n = std::min<std::size_t>(psz, entries.size() - i);
            pkg.entries.assign(entries.begin() + i, entries.begin() + i + n);
            i += n;
            pkg.final = i >= entries.size();
            if (pkg.final) {
                pkg.tombstones.assign(s.tombstones.begin(), s.tombstones.end());
                std::sort(pkg.tombstones.begin(), pkg.tombstones.end());
            }
            ctx.send(lp(out.target), std::move(pkg));
        } while (i < entries.size());
        // the cell keeps serving ops and queries here until the commit
    }

    void migrate_in(rt::Context<msg::Payload>& ctx, const msg::MigratePackageMsg& pkg) {
        auto it = cells_.find(pkg.cell);
        if (it == cells_.end() || it->second.state != CellState::Incoming ||
            it->second.plan_id != pkg.plan_id || it->second.migrate_peer != pkg.from_instance) {
            ctx.send(balancer(), msg::MigrateErrorMsg{pkg.plan_id, pkg.cell, id_});
            return;
        }
        CellSlot& s = it->second;
        ctx.charge(pkg.entries.size());
        for (const auto& e : pkg.entries)
            s.live[e.object_id] = StoredObject{e.p, e.ts};
        s.migrate_bytes += pkg.entries.size() * sizeof(msg::StoredEntry) +
                           pkg.tombstones.size() * sizeof(std::pair<ObjectId, TimestampMs>);
        if (pkg.final) {
            for (const auto& [oid, ts] : pkg.tombstones) {
                auto& t = s.tombstones[oid];
                t = std::max(t, ts);
            }
            ctx.send(balancer(), msg::MigrateDoneMsg{pkg.plan_id, pkg.cell, pkg.from_instance, id_,
                                                     s.migrate_bytes});
        }
    }

    void commit_drop(const msg::CommitDropMsg& dr) {
        auto it = cells_.find(dr.cell);
        if (it == cells_.end() || it->second.state != CellState::MigratingOut)
            return;
        cells_.erase(it);
        forward_to_[dr.cell] = dr.new_owner;
    }

    void commit_activate(const msg::CommitActivateMsg& ac) {
        auto it = cells_.find(ac.cell);
        if (it == cells_.end() || it->second.state != CellState::Incoming)
            return;
        CellSlot& s = it->second;
        s.state = CellState::Owned;
        // fresh sync bookkeeping: this owner has never reported the cell
        s.last_sent_count = 0;
        s.last_sent_ms = 0;
    }

    void migrate_abort(const msg::MigrateAbortMsg& ab) {
        auto it = cells_.find(ab.cell);
        if (it == cells_.end() || it->second.plan_id != ab.plan_id)
            return;
        if (it->second.state == CellState::MigratingOut)
            it->second.state = CellState::Owned;
        else if (it->second.state == CellState::Incoming)
            cells_.erase(it);
    }

    InstanceId id_;
    Config cfg_;
    std::unordered_map<CellId, CellSlot> cells_;
    std::unordered_map<CellId, InstanceId> forward_to_; // dropped cell -> new owner
    Counters counters_;
};

} // namespace gridstream
