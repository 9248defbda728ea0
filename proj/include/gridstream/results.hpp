// results.hpp — the query result stream consumed by the harness.

#pragma once

#include <cstdint>
#include <mutex>
#include <vector>

#include "gridstream/types.hpp"

namespace gridstream {

struct ResultRecord {
    QueryId query_id = 0;
    QueryKind kind = QueryKind::RangeCount;
    QueryResult result;
    std::uint64_t issue_ns = 0;
    std::uint64_t done_ns = 0;
    std::uint32_t refresh_seq = 0; // >0 for continuous-query refreshes

    double latency_ms() const {
        return static_cast<double>(done_ns - issue_ns) / 1e6;
    }
};

// Thread-safe append-only collector. In deterministic runs the append order
// is itself deterministic.
class ResultSink {
public:
    void record(ResultRecord r) {
        std::lock_guard lk(mu_);
        records_.push_back(std::move(r));
    }
    std::vector<ResultRecord> snapshot() const {
        std::lock_guard lk(mu_);
        return records_;
    }
    std::size_t size() const {
        std::lock_guard lk(mu_);
        return records_.size();
    }

private:
    mutable std::mutex mu_;
    std::vector<ResultRecord> records_;
};

} // namespace gridstream
