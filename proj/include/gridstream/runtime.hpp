// runtime.hpp — in-process actor substrate.
//
// Addressable function instances with serial mailboxes, exactly-once and
// per-(from,to) FIFO delivery, configurable task slots with optional
// exclusive pinning, and two engines:
//
//   * deterministic: seeded discrete-event simulation on a virtual
//     nanosecond clock. Each handler invocation occupies a slot for
//     per_message_ns + per_unit_ns * charged-work; messages emitted by a
//     handler become visible at its finish time. Two runs with the same
//     seed and inputs produce byte-identical event logs.
//   * threaded: one worker thread per slot, bounded mailboxes with sender
//     blocking, wall-clock timers, and a stall detector for protocol
//     deadlocks.
//
// The payload type P must provide ADL-visible payload_kind_name(const P&)
// and payload_digest(const P&) for event logging.

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gridstream::rt {

enum class FunctionKind : std::uint8_t {
    Transformer,
    Indexer,
    LocalProcessor,
    Aggregator,
    MetaSync,
    Balancer,
    External, // driver-side source address; never hosts an actor
};

inline const char* kind_name(FunctionKind k) {
    switch (k) {
    case FunctionKind::Transformer: return "transformer";
    case FunctionKind::Indexer: return "indexer";
    case FunctionKind::LocalProcessor: return "local_processor";
    case FunctionKind::Aggregator: return "aggregator";
    case FunctionKind::MetaSync: return "metasync";
    case FunctionKind::Balancer: return "balancer";
    case FunctionKind::External: return "external";
    }
    return "?";
}

struct ActorAddress {
    FunctionKind kind = FunctionKind::External;
    std::uint32_t instance = 0;

    friend bool operator==(const ActorAddress&, const ActorAddress&) = default;
    friend auto operator<=>(const ActorAddress&, const ActorAddress&) = default;

    std::string str() const {
        return std::string(kind_name(kind)) + ":" + std::to_string(instance);
    }
};

struct SlotPolicy {
    std::uint32_t n_slots = 2;
    std::map<ActorAddress, std::uint32_t> pinned; // actor -> exclusive slot index
};

template <class P>
struct Envelope {
    ActorAddress from;
    ActorAddress to;
    std::uint64_t seq = 0; // strictly increasing per (from,to)
    P payload;
};

struct CostModel {
    std::uint64_t per_message_ns = 2'000;
    std::uint64_t per_unit_ns = 100;
};

struct DeadlockError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RoutingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One delivery, as recorded by the deterministic engine.
struct EventRecord {
    std::uint64_t seq_global = 0;
    ActorAddress from;
    ActorAddress to;
    const char* kind = "";
    std::uint64_t digest = 0;
};

template <class P>
class Runtime;

// Handler-side services. Valid only for the duration of one handler call.
template <class P>
class Context {
public:
    Context(Runtime<P>& rt, ActorAddress self, std::uint64_t now_ns, std::mt19937_64& rng)
        : rt_(rt), self_(self), now_ns_(now_ns), rng_(rng) {}

    ActorAddress self() const { return self_; }
    std::uint64_t now_ns() const { return now_ns_; }
    std::uint64_t now_ms() const { return now_ns_ / 1'000'000; }
    std::mt19937_64& rng() { return rng_; }

    void send(ActorAddress to, P payload) {
        rt_.send_from_handler(self_, to, std::move(payload), *this);
    }
    // Self-message delivered after `delay_ms` of virtual/wall time.
    void schedule_after_ms(std::uint64_t delay_ms, P payload) {
        rt_.schedule_timer(self_, now_ns_ + delay_ms * 1'000'000, std::move(payload));
    }
    // Report work units performed by this handler (drives the cost model).
    void charge(std::uint64_t units) { charged_ += units; }
    std::uint64_t charged() const { return charged_; }

private:
    friend class Runtime<P>;
    Runtime<P>& rt_;
    ActorAddress self_;
    std::uint64_t now_ns_;
    std::mt19937_64& rng_;
    std::uint64_t charged_ = 0;
    std::vector<Envelope<P>> outbox_;
};

template <class P>
struct Actor {
    virtual ~Actor() = default;
    virtual void on_start(Context<P>&) {}
    virtual void on_message(Context<P>&, const Envelope<P>&) = 0;
};

template <class P>
class Runtime {
public:
    Runtime(SlotPolicy policy, std::optional<std::uint64_t> seed, CostModel cost = {},
            std::size_t mailbox_capacity = 65'536)
        : policy_(std::move(policy)), seed_(seed), cost_(cost), mailbox_capacity_(mailbox_capacity) {
        if (policy_.n_slots == 0)
            throw std::invalid_argument("runtime: need at least one slot");
        if (policy_.pinned.size() > policy_.n_slots)
            throw std::invalid_argument("runtime: more pinned actors than slots");
        std::vector<bool> taken(policy_.n_slots, false);
        for (const auto& [addr, slot] : policy_.pinned) {
            if (slot >= policy_.n_slots)
                throw std::invalid_argument("runtime: pinned slot out of range");
            if (taken[slot])
                throw std::invalid_argument("runtime: slot pinned twice");
            taken[slot] = true;
        }
        slot_free_ns_.assign(policy_.n_slots, 0);
        slot_is_pinned_.assign(policy_.n_slots, false);
        for (const auto& [addr, slot] : policy_.pinned)
            slot_is_pinned_[slot] = true;
        slot_exec_counts_.resize(policy_.n_slots);
    }

    ~Runtime() { stop(); }

    Runtime(const Runtime&) = delete;
    Runtime& operator=(const Runtime&) = delete;

    bool deterministic() const { return seed_.has_value(); }
    const SlotPolicy& policy() const { return policy_; }

    void register_actor(ActorAddress addr, Actor<P>* actor) {
        if (started_)
            throw std::logic_error("runtime: register after start");
        if (addr.kind == FunctionKind::External)
            throw std::invalid_argument("runtime: cannot host an external actor");
        auto [it, fresh] = actors_.try_emplace(addr);
        if (!fresh)
            throw std::invalid_argument("runtime: duplicate actor address " + addr.str());
        it->second.actor = actor;
        it->second.addr = addr;
        it->second.rng.seed(mix_seed(seed_.value_or(0x5eedULL), addr));
        if (auto p = policy_.pinned.find(addr); p != policy_.pinned.end())
            it->second.pinned_slot = static_cast<int>(p->second);
    }

    // Creates scheduler state and runs every actor's on_start (at virtual
    // time 0 in deterministic mode; before workers spin up otherwise).
    void start() {
        if (started_)
            return;
        // every pinned address must host a registered actor
        for (const auto& [addr, slot] : policy_.pinned)
            if (!actors_.contains(addr))
                throw std::invalid_argument("runtime: pinned actor not registered: " + addr.str());
        if (policy_.pinned.size() == policy_.n_slots) {
            for (auto& [addr, st] : actors_)
                if (st.pinned_slot < 0)
                    throw std::invalid_argument("runtime: no shared slots left for unpinned actors");
        }
        started_ = true;
        sched_rng_.seed(seed_.value_or(0) ^ 0x9e3779b97f4a7c15ULL);
        for (auto& [addr, st] : actors_) {
            Context<P> ctx(*this, addr, now_ns_, st.rng);
            st.actor->on_start(ctx);
            commit_outbox(ctx, /*finish_ns=*/now_ns_, st);
        }
        if (!deterministic())
            start_threads();
    }

    // --- external injection ------------------------------------------------

    // Deterministic mode: enqueue from an external source at virtual time
    // `at_ms` (defaults to the current frontier). Threaded mode: immediate.
    void inject(ActorAddress from, ActorAddress to, P payload, std::optional<std::uint64_t> at_ms = {}) {
        require_started();
        if (deterministic()) {
            const std::uint64_t ready = at_ms ? *at_ms * 1'000'000 : now_ns_;
            enqueue_det(from, to, std::move(payload), std::max(ready, now_ns_), /*timer=*/false);
        } else {
            enqueue_threaded(from, to, std::move(payload));
        }
    }

    // --- deterministic engine ----------------------------------------------

    // Process deliveries until only future timer messages remain.
    void run_until_quiescent() {
        require_det();
        while (step(/*horizon_ns=*/std::nullopt, /*timers_only_future=*/true)) {
        }
    }

    // Process every delivery that can start at or before virtual time `ms`,
    // then advance the clock to exactly `ms`.
    void advance_to_ms(std::uint64_t ms) {
        require_det();
        const std::uint64_t horizon = ms * 1'000'000;
        while (step(horizon, false)) {
        }
        now_ns_ = std::max(now_ns_, horizon);
    }

    void run_for_ms(std::uint64_t ms) {
        require_det();
        advance_to_ms(now_ns_ / 1'000'000 + ms);
    }

    std::uint64_t now_virtual_ms() const { return now_ns_ / 1'000'000; }
    std::uint64_t now_virtual_ns() const { return now_ns_; }

    const std::vector<EventRecord>& event_log() const { return event_log_; }

    std::string event_log_text() const {
        std::ostringstream os;
        for (const auto& e : event_log_)
            os << e.seq_global << ',' << e.from.str() << ',' << e.to.str() << ',' << e.kind << ','
               << e.digest << '\n';
        return os.str();
    }

    // --- threaded engine ---------------------------------------------------

    void run_for_wall_ms(std::uint64_t ms) {
        require_started();
        if (deterministic()) {
            run_for_ms(ms);
            return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    }

    // Block until all mailboxes are empty and no handler is running. Throws
    // DeadlockError if messages remain but no delivery happens for 2s.
    void drain() {
        require_started();
        if (deterministic()) {
            run_until_quiescent();
            return;
        }
        std::uint64_t last = delivered_.load();
        auto last_change = std::chrono::steady_clock::now();
        for (;;) {
            if (threaded_idle())
                return;
            std::this_thread::sleep_for(std::chrono::milliseconds(2));
            const std::uint64_t d = delivered_.load();
            if (d != last) {
                last = d;
                last_change = std::chrono::steady_clock::now();
            } else if (std::chrono::steady_clock::now() - last_change > std::chrono::seconds(2)) {
                if (!threaded_idle())
                    throw DeadlockError("runtime: no actor runnable but mailboxes non-empty");
                return;
            }
        }
    }

    void stop_timers() {
        if (deterministic())
            return;
        {
            std::lock_guard lk(timer_mu_);
            timers_stopped_ = true;
        }
        timer_cv_.notify_all();
    }

    void stop() {
        if (!started_ || stopped_.exchange(true))
            return;
        if (!deterministic()) {
            stop_timers();
            {
                std::lock_guard lk(runq_mu_);
                workers_quit_ = true;
            }
            runq_cv_.notify_all();
            for (auto& [addr, st] : actors_)
                st.cv_space.notify_all(); // release senders blocked on full mailboxes
            for (auto& t : workers_)
                t.join();
            if (timer_thread_.joinable())
                timer_thread_.join();
        }
    }

    std::uint64_t delivered_count() const { return delivered_.load(); }

    // Per-slot handler-execution counts, keyed by actor address.
    std::vector<std::map<ActorAddress, std::uint64_t>> slot_execution_log() const {
        return slot_exec_counts_;
    }

    std::uint64_t current_time_ms() const {
        if (deterministic())
            return now_virtual_ms();
        const auto d = std::chrono::steady_clock::now() - wall_epoch_;
        return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(d).count());
    }

private:
    friend class Context<P>;

    struct DetEntry {
        std::uint64_t ready_ns = 0;
        std::uint64_t arrival = 0; // global arrival order; per-pair FIFO tie-break
        bool is_timer = false;
        Envelope<P> env;
    };
    struct DetEntryCmp {
        bool operator()(const DetEntry& a, const DetEntry& b) const {
            if (a.ready_ns != b.ready_ns)
                return a.ready_ns > b.ready_ns;
            return a.arrival > b.arrival;
        }
    };

    struct ActorState {
        Actor<P>* actor = nullptr;
        ActorAddress addr;
        std::mt19937_64 rng;
        int pinned_slot = -1;

        // deterministic engine
        std::priority_queue<DetEntry, std::vector<DetEntry>, DetEntryCmp> det_inbox;
        std::uint64_t busy_until_ns = 0;

        // threaded engine
        std::mutex mu;
        std::condition_variable cv_space;
        std::deque<Envelope<P>> mailbox;
        std::map<ActorAddress, std::uint64_t> next_seq_from;
        enum class RunState : std::uint8_t { Idle, Queued, Running } run_state = RunState::Idle;
        bool in_handler = false; // serial-handler assertion
    };

    static std::uint64_t mix_seed(std::uint64_t seed, ActorAddress a) {
        std::uint64_t h = seed ^ 0x2545F4914F6CDD1DULL;
        h ^= (static_cast<std::uint64_t>(a.kind) << 32) | a.instance;
        h *= 0xff51afd7ed558ccdULL;
        h ^= h >> 33;
        return h;
    }

    void require_started() const {
        if (!started_)
            throw std::logic_error("runtime: not started");
    }
    void require_det() const {
        require_started();
        if (!deterministic())
            throw std::logic_error("runtime: deterministic-mode API on threaded runtime");
    }

    ActorState& lookup(ActorAddress to) {
        auto it = actors_.find(to);
        if (it == actors_.end())
            throw RoutingError("runtime: unknown address " + to.str());
        return it->second;
    }

    // ---- send paths ----

    void send_from_handler(ActorAddress from, ActorAddress to, P payload, Context<P>& ctx) {
        lookup(to); // routing error surfaces to the sender immediately
        ctx.outbox_.push_back(Envelope<P>{from, to, 0, std::move(payload)});
    }

    void schedule_timer(ActorAddress self, std::uint64_t fire_ns, P payload) {
        if (deterministic()) {
            enqueue_det(self, self, std::move(payload), fire_ns, /*timer=*/true);
        } else {
            {
                std::lock_guard lk(timer_mu_);
                timers_.push(TimerEntry{fire_ns, timer_seq_++, self, std::move(payload)});
            }
            timer_cv_.notify_all();
        }
    }

    void enqueue_det(ActorAddress from, ActorAddress to, P payload, std::uint64_t ready_ns, bool timer) {
        ActorState& st = lookup(to);
        const std::uint64_t seq = det_pair_seq_[{from, to}]++;
        st.det_inbox.push(DetEntry{ready_ns, det_arrival_++, timer,
                                   Envelope<P>{from, to, seq, std::move(payload)}});
    }

    void enqueue_threaded(ActorAddress from, ActorAddress to, P payload) {
        ActorState& st = lookup(to);
        bool need_queue = false;
        {
            std::unique_lock lk(st.mu);
            st.cv_space.wait(lk, [&] { return st.mailbox.size() < mailbox_capacity_ || stopped_; });
            if (stopped_)
                return;
            const std::uint64_t seq = st.next_seq_from[from]++;
            st.mailbox.push_back(Envelope<P>{from, to, seq, std::move(payload)});
            if (st.run_state == ActorState::RunState::Idle) {
                st.run_state = ActorState::RunState::Queued;
                need_queue = true;
            }
        }
        if (need_queue)
            push_runnable(&st);
    }

    // Messages a handler emitted become visible at its finish time
    // (deterministic) or immediately (threaded).
    void commit_outbox(Context<P>& ctx, std::uint64_t finish_ns, ActorState& sender) {
        for (auto& env : ctx.outbox_) {
            if (deterministic())
                enqueue_det(env.from, env.to, std::move(env.payload), finish_ns, false);
            else
                enqueue_threaded(env.from, env.to, std::move(env.payload));
        }
        ctx.outbox_.clear();
        (void)sender;
    }

    // ---- deterministic engine ----

    // Earliest time `st` could begin its next delivery, or nullopt if its
    // inbox is empty (or holds only future timers when timers_only_future).
    std::optional<std::uint64_t> det_candidate_start(const ActorState& st, bool timers_only_future,
                                                     std::uint64_t frontier) const {
        if (st.det_inbox.empty())
            return std::nullopt;
        const DetEntry& top = st.det_inbox.top();
        if (timers_only_future && top.is_timer && top.ready_ns > frontier)
            return std::nullopt;
        std::uint64_t slot_free;
        if (st.pinned_slot >= 0) {
            slot_free = slot_free_ns_[st.pinned_slot];
        } else {
            slot_free = std::numeric_limits<std::uint64_t>::max();
            for (std::uint32_t s = 0; s < policy_.n_slots; ++s)
                if (!slot_is_pinned_[s])
                    slot_free = std::min(slot_free, slot_free_ns_[s]);
            if (slot_free == std::numeric_limits<std::uint64_t>::max())
                slot_free = 0; // all slots pinned; validated against at start
        }
        return std::max({top.ready_ns, st.busy_until_ns, slot_free});
    }

    // One delivery. Returns false when nothing is schedulable (within the
    // horizon, if given).
    bool step(std::optional<std::uint64_t> horizon_ns, bool timers_only_future) {
        // quiescence frontier: latest point any work has reached
        std::uint64_t frontier = now_ns_;
        for (std::uint32_t s = 0; s < policy_.n_slots; ++s)
            frontier = std::max(frontier, slot_free_ns_[s]);

        ActorState* best = nullptr;
        std::uint64_t best_start = 0;
        std::uint32_t n_tied = 0;
        for (auto& [addr, st] : actors_) {
            auto cand = det_candidate_start(st, timers_only_future, frontier);
            if (!cand)
                continue;
            if (!best || *cand < best_start) {
                best = &st;
                best_start = *cand;
                n_tied = 1;
            } else if (*cand == best_start) {
                // reservoir-pick uniformly among ties with the scheduler rng
                ++n_tied;
                if (std::uniform_int_distribution<std::uint32_t>(1, n_tied)(sched_rng_) == 1)
                    best = &st;
            }
        }
        if (!best)
            return false;
        if (horizon_ns && best_start > *horizon_ns)
            return false;

        ActorState& st = *best;
        DetEntry entry = st.det_inbox.top();
        st.det_inbox.pop();

        now_ns_ = std::max(now_ns_, best_start);

        // pick the concrete slot
        std::uint32_t slot;
        if (st.pinned_slot >= 0) {
            slot = static_cast<std::uint32_t>(st.pinned_slot);
        } else {
            slot = 0;
            std::uint64_t bestf = std::numeric_limits<std::uint64_t>::max();
            for (std::uint32_t s = 0; s < policy_.n_slots; ++s)
                if (!slot_is_pinned_[s] && slot_free_ns_[s] < bestf) {
                    bestf = slot_free_ns_[s];
                    slot = s;
                }
        }

        Context<P> ctx(*this, st.addr, best_start, st.rng);
        st.actor->on_message(ctx, entry.env);

        const std::uint64_t cost = cost_.per_message_ns + cost_.per_unit_ns * ctx.charged();
        const std::uint64_t finish = best_start + cost;
        slot_free_ns_[slot] = finish;
        st.busy_until_ns = finish;
        slot_exec_counts_[slot][st.addr] += 1;
        delivered_.fetch_add(1, std::memory_order_relaxed);
        event_log_.push_back(EventRecord{event_seq_++, entry.env.from, entry.env.to,
                                         payload_kind_name(entry.env.payload),
                                         payload_digest(entry.env.payload)});
        commit_outbox(ctx, finish, st);
        return true;
    }

    // ---- threaded engine ----

    struct TimerEntry {
        std::uint64_t fire_ns;
        std::uint64_t seq;
        ActorAddress to;
        P payload;
        bool operator>(const TimerEntry& o) const {
            return fire_ns != o.fire_ns ? fire_ns > o.fire_ns : seq > o.seq;
        }
    };

    void push_runnable(ActorState* st) {
        {
            std::lock_guard lk(runq_mu_);
            if (st->pinned_slot >= 0)
                pinned_runq_[st->pinned_slot].push_back(st);
            else
                shared_runq_.push_back(st);
        }
        runq_cv_.notify_all();
    }

    bool threaded_idle() {
        for (auto& [addr, st] : actors_) {
            std::lock_guard lk(st.mu);
            if (!st.mailbox.empty() || st.run_state != ActorState::RunState::Idle)
                return false;
        }
        return true;
    }

    void start_threads() {
        wall_epoch_ = std::chrono::steady_clock::now();
        pinned_runq_.resize(policy_.n_slots);
        workers_.reserve(policy_.n_slots);
        for (std::uint32_t s = 0; s < policy_.n_slots; ++s)
            workers_.emplace_back([this, s] { worker_loop(s); });
        timer_thread_ = std::thread([this] { timer_loop(); });
    }

    void worker_loop(std::uint32_t slot) {
        const bool pinned_slot = slot_is_pinned_[slot];
        for (;;) {
            ActorState* st = nullptr;
            {
                std::unique_lock lk(runq_mu_);
                runq_cv_.wait(lk, [&] {
                    return workers_quit_ || !pinned_runq_[slot].empty() ||
                           (!pinned_slot && !shared_runq_.empty());
                });
                if (workers_quit_)
                    return;
                if (!pinned_runq_[slot].empty()) {
                    st = pinned_runq_[slot].front();
                    pinned_runq_[slot].pop_front();
                } else if (!pinned_slot && !shared_runq_.empty()) {
                    st = shared_runq_.front();
                    shared_runq_.pop_front();
                } else {
                    continue;
                }
            }
            process_batch(*st, slot);
        }
    }

    void process_batch(ActorState& st, std::uint32_t slot) {
        constexpr int kBatch = 64;
        int done = 0;
        for (;;) {
            Envelope<P> env;
            {
                std::lock_guard lk(st.mu);
                if (st.mailbox.empty() || done == kBatch) {
                    if (st.mailbox.empty()) {
                        st.run_state = ActorState::RunState::Idle;
                    } else {
                        st.run_state = ActorState::RunState::Queued;
                    }
                    break;
                }
                st.run_state = ActorState::RunState::Running;
                env = std::move(st.mailbox.front());
                st.mailbox.pop_front();
                if (st.in_handler)
                    throw std::logic_error("runtime: handler re-entered concurrently");
                st.in_handler = true;
            }
            st.cv_space.notify_all();
            const std::uint64_t now_ns = static_cast<std::uint64_t>(
                std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() -
                                                                     wall_epoch_)
                    .count());
            Context<P> ctx(*this, st.addr, now_ns, st.rng);
            st.actor->on_message(ctx, env);
            {
                std::lock_guard lk(st.mu);
                st.in_handler = false;
            }
            slot_exec_mu_.lock();
            slot_exec_counts_[slot][st.addr] += 1;
            slot_exec_mu_.unlock();
            delivered_.fetch_add(1, std::memory_order_relaxed);
            commit_outbox(ctx, 0, st);
            ++done;
        }
        bool requeue;
        {
            std::lock_guard lk(st.mu);
            requeue = st.run_state == ActorState::RunState::Queued;
        }
        if (requeue)
            push_runnable(&st);
    }

    void timer_loop() {
        std::unique_lock lk(timer_mu_);
        for (;;) {
            if (timers_stopped_)
                return;
            if (timers_.empty()) {
                timer_cv_.wait(lk, [&] { return timers_stopped_ || !timers_.empty(); });
                continue;
            }
            const auto deadline = wall_epoch_ + std::chrono::nanoseconds(timers_.top().fire_ns);
            if (std::chrono::steady_clock::now() >= deadline) {
                TimerEntry e = std::move(const_cast<TimerEntry&>(timers_.top()));
                timers_.pop();
                lk.unlock();
                enqueue_threaded(e.to, e.to, std::move(e.payload));
                lk.lock();
                continue;
            }
            // wakes early when a new (possibly earlier) timer or stop arrives
            timer_cv_.wait_until(lk, deadline);
        }
    }

    // ---- data ----

    SlotPolicy policy_;
    std::optional<std::uint64_t> seed_;
    CostModel cost_;
    std::size_t mailbox_capacity_;

    std::map<ActorAddress, ActorState> actors_;
    bool started_ = false;
    std::atomic<bool> stopped_{false};

    // deterministic engine
    std::uint64_t now_ns_ = 0;
    std::vector<std::uint64_t> slot_free_ns_;
    std::vector<bool> slot_is_pinned_;
    std::map<std::pair<ActorAddress, ActorAddress>, std::uint64_t> det_pair_seq_;
    std::uint64_t det_arrival_ = 0;
    std::mt19937_64 sched_rng_;
    std::vector<EventRecord> event_log_;
    std::uint64_t event_seq_ = 0;

    // threaded engine
    std::vector<std::thread> workers_;
    std::thread timer_thread_;
    std::mutex runq_mu_;
    std::condition_variable runq_cv_;
    std::deque<ActorState*> shared_runq_;
    std::vector<std::deque<ActorState*>> pinned_runq_;
    bool workers_quit_ = false;
    std::mutex timer_mu_;
    std::condition_variable timer_cv_;
    std::priority_queue<TimerEntry, std::vector<TimerEntry>, std::greater<>> timers_;
    std::uint64_t timer_seq_ = 0;
    bool timers_stopped_ = false;
    std::chrono::steady_clock::time_point wall_epoch_;

    std::atomic<std::uint64_t> delivered_{0};
    std::mutex slot_exec_mu_;
    std::vector<std::map<ActorAddress, std::uint64_t>> slot_exec_counts_;
};

} // namespace gridstream::rt
