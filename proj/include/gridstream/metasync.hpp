// metasync.hpp — single instance integrating per-cell count reports from
// Local Processors and broadcasting them to all Indexers. Periodic-policy
// reports are batched into a dirty set flushed on a broadcast timer;
// accumulative-policy reports are broadcast immediately.

#pragma once

#include <cstdint>
#include <set>
#include <unordered_map>

#include "gridstream/messages.hpp"
#include "gridstream/runtime.hpp"
#include "gridstream/types.hpp"

namespace gridstream {

class MetaSyncActor final : public rt::Actor<msg::Payload> {
public:
    struct Config {
        SyncConfig sync;
        std::uint32_t n_indexers = 1;
    };

    struct Counters {
        std::uint64_t periodic_received = 0;
        std::uint64_t accumulative_received = 0;
        std::uint64_t broadcasts = 0;
    };

    MetaSyncActor(Config cfg) : cfg_(cfg) {}

    void on_start(rt::Context<msg::Payload>& ctx) override {
        if (cfg_.sync.enabled)
            ctx.schedule_after_ms(cfg_.sync.broadcast_period_ms,
                                  msg::TimerMsg{msg::TimerKind::BroadcastTick});
    }

    void on_message(rt::Context<msg::Payload>& ctx, const rt::Envelope<msg::Payload>& env) override {
        if (const auto* s = std::get_if<msg::SyncMsg>(&env.payload)) {
            ctx.charge(1);
            table_[s->cell] = s->count;
            if (s->accumulative) {
                ++counters_.accumulative_received;
                dirty_.erase(s->cell); // about to be fresher than the batch
                broadcast(ctx, {{s->cell, s->count}});
            } else {
                ++counters_.periodic_received;
                dirty_.insert(s->cell);
            }
        } else if (const auto* t = std::get_if<msg::TimerMsg>(&env.payload)) {
            if (t->kind == msg::TimerKind::BroadcastTick) {
                broadcast_tick(ctx);
                ctx.schedule_after_ms(cfg_.sync.broadcast_period_ms,
                                      msg::TimerMsg{msg::TimerKind::BroadcastTick});
            }
        }
    }

    const std::unordered_map<CellId, std::uint64_t>& table() const { return table_; }
    const Counters& counters() const { return counters_; }
    std::size_t dirty_count() const { return dirty_.size(); }

private:
    void broadcast_tick(rt::Context<msg::Payload>& ctx) {
        if (dirty_.empty())
            return;
        std::vector<std::pair<CellId, std::uint64_t>> entries;
        entries.reserve(dirty_.size());
        for (CellId c : dirty_) // std::set: ascending, deterministic
            entries.push_back({c, table_.at(c)});
        dirty_.clear();
        broadcast(ctx, std::move(entries));
    }

    void broadcast(rt::Context<msg::Payload>& ctx,
                   std::vector<std::pair<CellId, std::uint64_t>> entries) {
        ctx.charge(entries.size());
        ++counters_.broadcasts;
        for (std::uint32_t i = 0; i < cfg_.n_indexers; ++i)
            ctx.send(rt::ActorAddress{rt::FunctionKind::Indexer, i},
                     msg::MetaBroadcastMsg{entries});
    }

    Config cfg_;
    std::unordered_map<CellId, std::uint64_t> table_;
    std::set<CellId> dirty_;
    Counters counters_;
};

} // namespace gridstream
