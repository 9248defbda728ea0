// aggregator.hpp — collects partial results per query, detects completion via
// the fanout count stamped into every sub-query, merges, and emits the final
// result. Queries are hash-routed here by query_id, so all partials of one
// query meet at one instance. Also hosts continuous-query registrations,
// re-issuing the inner snapshot query through the normal Indexer path on a
// refresh timer.

#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <unordered_map>

#include "gridstream/messages.hpp"
#include "gridstream/results.hpp"
#include "gridstream/runtime.hpp"
#include "gridstream/types.hpp"

namespace gridstream {

class AggregatorActor final : public rt::Actor<msg::Payload> {
public:
    struct Config {
        std::uint32_t n_indexers = 1;
        std::uint32_t n_aggregators = 1;
    };

    struct Counters {
        std::uint64_t duplicate_partials = 0;
        std::uint64_t duplicate_registrations = 0;
    };

    AggregatorActor(InstanceId id, Config cfg, ResultSink& sink)
        : id_(id), cfg_(cfg), sink_(sink) {}

    void on_message(rt::Context<msg::Payload>& ctx, const rt::Envelope<msg::Payload>& env) override {
        if (const auto* p = std::get_if<msg::PartialMsg>(&env.payload)) {
            accept_partial(ctx, *p);
        } else if (const auto* q = std::get_if<msg::QueryMsg>(&env.payload)) {
            register_continuous(ctx, *q);
        } else if (const auto* t = std::get_if<msg::TimerMsg>(&env.payload)) {
            if (t->kind == msg::TimerKind::RefreshTick)
                refresh(ctx, t->arg);
        } else if (const auto* d = std::get_if<msg::DeregisterMsg>(&env.payload)) {
            registrations_.erase(d->query_id);
        }
    }

    std::size_t pending_count() const { return pending_.size(); }
    const Counters& counters() const { return counters_; }

private:
    struct Pending {
        QueryKind kind = QueryKind::RangeCount;
        std::uint32_t fanout = 0;
        std::uint32_t k = 0;
        std::uint32_t normal_received = 0;
        std::uint32_t fwd_announced = 0;
        std::uint32_t fwd_received = 0;
        std::uint64_t issue_ns = 0;
        std::uint64_t count = 0;
        std::vector<Neighbor> neighbors;
        std::optional<LocationResult> location;
        std::set<std::uint32_t> normal_senders;
    };

    struct Registration {
        std::variant<RangeCountQuery, KnnQuery> inner;
        TimestampMs interval_ms = 0;
        std::uint32_t max_refreshes = 0;
        std::uint32_t issued = 0;
    };

    void accept_partial(rt::Context<msg::Payload>& ctx, const msg::PartialMsg& p) {
        ctx.charge(1 + p.neighbors.size());
        Pending& pend = pending_[p.query_id];
        if (pend.fanout == 0) {
            pend.kind = p.kind;
            pend.fanout = p.fanout;
            pend.k = p.k;
            pend.issue_ns = p.issue_ns;
        }
        if (p.forwarded) {
            ++pend.fwd_received;
        } else {
            if (!pend.normal_senders.insert(p.sender).second) {
                ++counters_.duplicate_partials;
                return;
            }
            ++pend.normal_received;
        }
        pend.fwd_announced += p.announced_forwards;

        switch (p.kind) {
        case QueryKind::RangeCount:
            pend.count += p.count;
            break;
        case QueryKind::Knn:
            merge_neighbors(pend, p.neighbors);
            break;
        case QueryKind::Object:
            if (p.location && (!pend.location || p.location->timestamp > pend.location->timestamp))
                pend.location = p.location;
            break;
        }

        if (pend.normal_received == pend.fanout && pend.fwd_received == pend.fwd_announced)
            finalize(ctx, p.query_id);
    }

    static void merge_neighbors(Pending& pend, const std::vector<Neighbor>& add) {
        auto& acc = pend.neighbors;
        for (const Neighbor& n : add) {
            // an object may transiently surface twice mid-update; keep the nearer
            bool dup = false;
            for (auto& e : acc)
                if (e.object_id == n.object_id) {
                    if (neighbor_less(n, e))
                        e = n;
                    dup = true;
                    break;
                }
            if (!dup)
                acc.push_back(n);
        }
        std::sort(acc.begin(), acc.end(), neighbor_less);
        if (acc.size() > pend.k)
            acc.resize(pend.k);
    }

    void finalize(rt::Context<msg::Payload>& ctx, QueryId qid) {
        Pending pend = std::move(pending_.at(qid));
        pending_.erase(qid);

        QueryResult result;
        switch (pend.kind) {
        case QueryKind::RangeCount:
            result.payload = CountResult{pend.count};
            break;
        case QueryKind::Knn:
            result.payload = NeighborsResult{std::move(pend.neighbors)};
            break;
        case QueryKind::Object:
            if (pend.location)
                result.payload = *pend.location;
            else
                result.payload = NotFoundResult{};
            break;
        }

        ResultRecord rec;
        rec.kind = pend.kind;
        rec.issue_ns = pend.issue_ns;
        rec.done_ns = ctx.now_ns();
        if (auto it = inner_to_registration_.find(qid); it != inner_to_registration_.end()) {
            rec.query_id = it->second.first;
            rec.refresh_seq = it->second.second;
            inner_to_registration_.erase(it);
        } else {
            rec.query_id = qid;
        }
        result.query_id = rec.query_id;
        rec.result = std::move(result);
        sink_.record(std::move(rec));
    }

    void register_continuous(rt::Context<msg::Payload>& ctx, const msg::QueryMsg& qm) {
        const auto* reg = std::get_if<ContinuousRegistration>(&qm.query.body);
        if (!reg || reg->refresh_interval_ms == 0)
            return;
        auto [it, fresh] = registrations_.try_emplace(
            qm.query.query_id,
            Registration{reg->inner, reg->refresh_interval_ms, reg->max_refreshes, 0});
        if (!fresh) {
            ++counters_.duplicate_registrations;
            return;
        }
        ctx.schedule_after_ms(reg->refresh_interval_ms,
                              msg::TimerMsg{msg::TimerKind::RefreshTick, qm.query.query_id});
    }

    void refresh(rt::Context<msg::Payload>& ctx, QueryId reg_id) {
        auto it = registrations_.find(reg_id);
        if (it == registrations_.end())
            return;
        Registration& reg = it->second;
        ++reg.issued;

        // unique system-wide and hash-routed back to this instance
        const QueryId inner_qid =
            (QueryId{1} << 63) | (inner_seq_++ * cfg_.n_aggregators + id_);
        inner_to_registration_[inner_qid] = {reg_id, reg.issued};

        Query q;
        q.query_id = inner_qid;
        if (const auto* r = std::get_if<RangeCountQuery>(&reg.inner))
            q.body = *r;
        else
            q.body = std::get<KnnQuery>(reg.inner);
        const std::uint32_t idx =
            std::uniform_int_distribution<std::uint32_t>(0, cfg_.n_indexers - 1)(ctx.rng());
        ctx.send(rt::ActorAddress{rt::FunctionKind::Indexer, idx},
                 msg::QueryMsg{std::move(q), ctx.now_ns()});

        if (reg.max_refreshes == 0 || reg.issued < reg.max_refreshes)
            ctx.schedule_after_ms(reg.interval_ms,
                                  msg::TimerMsg{msg::TimerKind::RefreshTick, reg_id});
        else
            registrations_.erase(it);
    }

    InstanceId id_;
    Config cfg_;
    ResultSink& sink_;
    std::unordered_map<QueryId, Pending> pending_;
    std::unordered_map<QueryId, Registration> registrations_;
    std::unordered_map<QueryId, std::pair<QueryId, std::uint32_t>> inner_to_registration_;
    std::uint64_t inner_seq_ = 0;
    Counters counters_;
};

} // namespace gridstream
