// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "bounds.hpp"
#include "network.hpp"

namespace nnsimplify {

/// Threshold semantics for one query.
///   Epsilon: is there an input driving the candidate's value to >= epsilon?
///            Mirrors backends that only accept non-strict constraints.
///   Strict:  is there an input driving it strictly above zero? A Dead answer
///            certifies the value is <= 0 over the whole box, i.e. the node's
///            post-activation is exactly zero everywhere.
struct QueryMode {
    enum class Kind { Strict, Epsilon };
    Kind kind = Kind::Strict;
    double epsilon = 0.0;

    static QueryMode strict() { return {Kind::Strict, 0.0}; }
    static QueryMode with_epsilon(double eps) {
        if (!(eps > 0.0)) raise(ErrorKind::InvalidConfig, "epsilon must be positive");
        return {Kind::Epsilon, eps};
    }

    bool operator==(const QueryMode&) const = default;
};

struct QueryBudgets {
    std::uint64_t max_regions = 1'000'000;
    double timeout_seconds = 60.0;  // 0 disables the wall clock

    bool operator==(const QueryBudgets&) const = default;
};

/// One candidate node's verification problem: the truncated single-output
/// subnetwork plus the threshold mode and budgets. This pair with Verdict is
/// the backend-neutral interface; any engine mapping queries to verdicts with
/// the same contract can be substituted.
struct VerificationQuery {
    Network subnet;
    QueryMode mode;
    QueryBudgets budgets;
};

enum class VerdictKind { Dead, Alive, Unknown };
enum class UnknownReason { None, Budget, Timeout };

inline const char* to_string(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::Dead: return "dead";
        case VerdictKind::Alive: return "alive";
        case VerdictKind::Unknown: return "unknown";
    }
    return "?";
}

inline const char* to_string(UnknownReason reason) {
    switch (reason) {
        case UnknownReason::None: return "none";
        case UnknownReason::Budget: return "budget";
        case UnknownReason::Timeout: return "timeout";
    }
    return "?";
}

struct VerifyStats {
    std::uint64_t regions_explored = 0;
    double wall_seconds = 0.0;
};

struct Verdict {
    VerdictKind kind = VerdictKind::Unknown;
    std::vector<double> witness;  // original units; set for Alive
    UnknownReason reason = UnknownReason::None;
    VerifyStats stats;
};

/// Optional instrumentation for tests: records exploration order and the
/// parent/child upper-bound pairs produced by each bisection.
struct VerifyTrace {
    struct Split {
        double parent_upper;
        double child_upper;
    };
    std::vector<double> popped_uppers;
    std::vector<Split> splits;
};

inline VerificationQuery make_query(const Network& net, NodeId v, QueryMode mode,
                                    QueryBudgets budgets) {
    return {truncate(net, v), mode, budgets};
}

namespace verify_detail {

struct Region {
    Box box;
    double upper;
    std::uint64_t seq;
};

struct RegionOrder {
    // Max-heap on the upper bound; FIFO among equal bounds.
    bool operator()(const Region& a, const Region& b) const {
        if (a.upper != b.upper) return a.upper < b.upper;
        return a.seq > b.seq;
    }
};

inline double combined_upper(const Network& subnet, const Box& region) {
    return symbolic_bounds(subnet, region).outputs[0].pre.hi;
}

inline bool prunable(double upper, const QueryMode& mode) {
    // A region can be discarded only when no point in it can satisfy the
    // query: value >= eps is impossible when upper < eps; value > 0 is
    // impossible when upper <= 0.
    return mode.kind == QueryMode::Kind::Epsilon ? upper < mode.epsilon : upper <= 0.0;
}

inline bool satisfies(double value, const QueryMode& mode) {
    return mode.kind == QueryMode::Kind::Epsilon ? value >= mode.epsilon : value > 0.0;
}

/// Center plus box corners, capped at 64 probes for high dimensions.
inline std::optional<std::vector<double>> probe(const Network& subnet, const Box& region,
                                                const QueryMode& mode) {
    std::vector<double> x(region.size());
    for (std::size_t j = 0; j < region.size(); ++j) x[j] = region[j].mid();
    if (satisfies(evaluate(subnet, x)[0], mode)) return x;

    const std::size_t d = region.size();
    const std::uint64_t corner_count = d >= 63 ? 63 : (std::uint64_t{1} << d);
    const std::uint64_t cap = d > 6 ? 63 : corner_count;
    for (std::uint64_t mask = 0; mask < corner_count && mask < cap; ++mask) {
        for (std::size_t j = 0; j < d; ++j) {
            x[j] = (mask >> j) & 1 ? region[j].hi : region[j].lo;
        }
        if (satisfies(evaluate(subnet, x)[0], mode)) return x;
    }
    return std::nullopt;
}

inline std::size_t widest_dimension(const Box& region) {
    std::size_t best = 0;
    double best_width = region[0].width();
    for (std::size_t j = 1; j < region.size(); ++j) {
        if (region[j].width() > best_width) {
            best_width = region[j].width();
            best = j;
        }
    }
    return best;
}

}  // namespace verify_detail

/// Best-first branch-and-bound on input sub-boxes, ordered by descending
/// combined upper bound. Regions whose bound rules out the threshold are
/// discarded; the center and corners of surviving regions are probed for a
/// witness; everything else is bisected along the widest input dimension
/// (ties to the lowest index). Dead when the queue empties, Alive on a
/// witness, Unknown when the region budget or the wall clock runs out.
/// Dead and Alive are deterministic under a pure region budget.
inline Verdict verify(const VerificationQuery& query, VerifyTrace* trace = nullptr) {
    using namespace verify_detail;
    using Clock = std::chrono::steady_clock;

    if (query.subnet.output_size() != 1) {
        raise(ErrorKind::InvalidConfig, "verification subnet must have a single output");
    }

    const auto start = Clock::now();
    Verdict verdict;
    auto finish = [&](VerdictKind kind, UnknownReason reason) {
        verdict.kind = kind;
        verdict.reason = reason;
        verdict.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
        return verdict;
    };
    auto timed_out = [&] {
        return query.budgets.timeout_seconds > 0.0 &&
               std::chrono::duration<double>(Clock::now() - start).count() >=
                   query.budgets.timeout_seconds;
    };

    std::uint64_t& explored = verdict.stats.regions_explored;
    if (query.budgets.max_regions == 0) return finish(VerdictKind::Unknown, UnknownReason::Budget);

    std::priority_queue<Region, std::vector<Region>, RegionOrder> queue;
    std::uint64_t seq = 0;

    const double root_upper = combined_upper(query.subnet, query.subnet.input_box());
    explored = 1;
    if (!prunable(root_upper, query.mode)) {
        queue.push({query.subnet.input_box(), root_upper, seq++});
    }

    while (!queue.empty()) {
        if (timed_out()) return finish(VerdictKind::Unknown, UnknownReason::Timeout);

        Region region = queue.top();
        queue.pop();
        if (trace) trace->popped_uppers.push_back(region.upper);

        if (auto witness = probe(query.subnet, region.box, query.mode)) {
            verdict.witness = std::move(*witness);
            return finish(VerdictKind::Alive, UnknownReason::None);
        }

        const std::size_t dim = widest_dimension(region.box);
        const double mid = region.box[dim].mid();
        for (int half = 0; half < 2; ++half) {
            Box child = region.box;
            child[dim] = half == 0 ? Interval{child[dim].lo, mid} : Interval{mid, child[dim].hi};
            if (explored >= query.budgets.max_regions) {
                return finish(VerdictKind::Unknown, UnknownReason::Budget);
            }
            ++explored;
            // A child's bound never exceeds its parent's: both are sound for
            // the child, so take the tighter.
            const double upper = std::min(combined_upper(query.subnet, child), region.upper);
            if (trace) trace->splits.push_back({region.upper, upper});
            if (!prunable(upper, query.mode)) queue.push({std::move(child), upper, seq++});
        }
    }
    return finish(VerdictKind::Dead, UnknownReason::None);
}

}  // namespace nnsimplify
