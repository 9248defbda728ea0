// transformer.hpp — converts raw object updates into movements and answers
// object queries from its latest-position table.
//
// Instances partition objects by object_id modulo instance count, so each
// object's movement chain is produced serially. Movements are shuffled to a
// uniformly random Indexer instance.

#pragma once

#include <cstdint>
#include <random>
#include <unordered_map>

#include "gridstream/messages.hpp"
#include "gridstream/results.hpp"
#include "gridstream/runtime.hpp"
#include "gridstream/types.hpp"

namespace gridstream {

class TransformerActor final : public rt::Actor<msg::Payload> {
public:
    struct Entry {
        Point p;
        TimestampMs ts = 0;
        CellId cell = 0;
    };

    TransformerActor(InstanceId id, GridConfig grid, std::uint32_t n_indexers, ResultSink& sink)
        : id_(id), grid_(grid), n_indexers_(n_indexers), sink_(sink) {}

    void on_message(rt::Context<msg::Payload>& ctx, const rt::Envelope<msg::Payload>& env) override {
        if (const auto* u = std::get_if<msg::UpdateMsg>(&env.payload)) {
            ingest(ctx, u->update);
        } else if (const auto* q = std::get_if<msg::QueryMsg>(&env.payload)) {
            answer_object_query(ctx, *q);
        }
    }

    const std::unordered_map<ObjectId, Entry>& table() const { return table_; }
    std::uint64_t stale_dropped() const { return stale_dropped_; }

private:
    void ingest(rt::Context<msg::Payload>& ctx, const ObjectUpdate& u) {
        ctx.charge(1);
        const CellId new_cell = grid_.cell_of(u.point());
        Movement m;
        m.object_id = u.object_id;
        m.new_cell = new_cell;
        m.new_point = u.point();
        m.timestamp = u.timestamp;
        auto it = table_.find(u.object_id);
        if (it != table_.end()) {
            if (u.timestamp <= it->second.ts) {
                ++stale_dropped_;
                return;
            }
            m.old_cell = it->second.cell;
            it->second = Entry{u.point(), u.timestamp, new_cell};
        } else {
            table_.emplace(u.object_id, Entry{u.point(), u.timestamp, new_cell});
        }
        const std::uint32_t target =
            std::uniform_int_distribution<std::uint32_t>(0, n_indexers_ - 1)(ctx.rng());
        ctx.send(rt::ActorAddress{rt::FunctionKind::Indexer, target}, msg::MovementMsg{m});
    }

    void answer_object_query(rt::Context<msg::Payload>& ctx, const msg::QueryMsg& q) {
        ctx.charge(1);
        const auto& oq = std::get<ObjectQuery>(q.query.body);
        ResultRecord rec;
        rec.query_id = q.query.query_id;
        rec.kind = QueryKind::Object;
        rec.issue_ns = q.issue_ns;
        rec.done_ns = ctx.now_ns();
        rec.result.query_id = q.query.query_id;
        auto it = table_.find(oq.object_id);
        if (it == table_.end())
            rec.result.payload = NotFoundResult{};
        else
            rec.result.payload = LocationResult{it->second.p, it->second.ts};
        sink_.record(std::move(rec));
    }

    InstanceId id_;
    GridConfig grid_;
    std::uint32_t n_indexers_;
    ResultSink& sink_;
    std::unordered_map<ObjectId, Entry> table_;
    std::uint64_t stale_dropped_ = 0;
};

} // namespace gridstream
