// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "nnet_io.hpp"
#include "simplifier.hpp"
#include "simulation.hpp"
#include "verifier.hpp"

namespace nnsimplify {

inline constexpr const char* kVersion = "0.1.0";

enum class PipelineMode { Strict, Epsilon };

inline const char* to_string(PipelineMode mode) {
    return mode == PipelineMode::Strict ? "strict" : "epsilon";
}

/// Strict mode proves exact deadness (max pre-activation <= 0) and keeps the
/// simplified network equal to the original on every input. Epsilon mode uses
/// the weaker "never reaches epsilon" query; removals are then approximate
/// and opting into the mode is the acknowledgement of that.
struct PipelineConfig {
    std::string input_path;
    std::string output_path;   // empty: skip writing
    std::string report_path;   // empty: skip writing
    std::uint64_t simulations = 20000;
    std::uint64_t seed = 0;
    PipelineMode mode = PipelineMode::Strict;
    double epsilon = 0.01;
    double timeout_seconds = 60.0;  // 0 disables the wall clock (deterministic runs)
    std::uint64_t region_budget = 1'000'000;
    unsigned workers = 0;  // 0: machine parallelism
};

struct NodeReport {
    NodeId node;
    VerdictKind kind = VerdictKind::Unknown;
    UnknownReason reason = UnknownReason::None;
    std::uint64_t regions = 0;
    double wall_seconds = 0.0;
    std::vector<double> witness;
};

struct ReportTotals {
    std::uint64_t candidates = 0;
    std::uint64_t dead = 0;
    std::uint64_t alive = 0;
    std::uint64_t unknown = 0;
    std::uint64_t unknown_budget = 0;
    std::uint64_t unknown_timeout = 0;
    std::uint64_t cascade_removed = 0;
    std::uint64_t removed_total = 0;
    std::uint64_t hidden_original = 0;
    std::uint64_t hidden_simplified = 0;
    double reduction_percent = 0.0;
};

struct SimplificationReport {
    std::vector<NodeReport> nodes;  // ordered by (layer, index)
    ReportTotals totals;
    std::vector<CascadeRemoval> cascade_removed;
    EquivalenceReport equivalence;
    bool constant_result = false;
    std::vector<double> constant_output;
    // configuration echo
    std::uint64_t simulations = 0;
    std::uint64_t seed = 0;
    PipelineMode mode = PipelineMode::Strict;
    double epsilon = 0.01;
    double timeout_seconds = 0.0;
    std::uint64_t region_budget = 0;
    unsigned workers = 1;
    std::string version = kVersion;
};

struct RunOutput {
    SimplificationReport report;
    SimplifiedNetwork result;
    SimplificationPlan plan;
};

using ProgressCallback = std::function<void(const NodeReport&)>;

namespace pipeline_detail {

inline void validate_config(const PipelineConfig& config) {
    if (!(config.epsilon > 0.0)) raise(ErrorKind::InvalidConfig, "epsilon must be positive");
    if (config.timeout_seconds < 0.0) {
        raise(ErrorKind::InvalidConfig, "timeout must be non-negative");
    }
}

inline unsigned resolve_workers(const PipelineConfig& config) {
    if (config.workers > 0) return config.workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

inline std::string shortest_decimal(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace pipeline_detail

/// The three-stage run on an in-memory network: simulation filters
/// candidates, the verifier decides them layer by ascending layer on a
/// worker pool (each query truncates the original network; removals never
/// feed back within a run), and the simplifier prunes Dead nodes, cascades,
/// and samples for equivalence. Verdicts are deterministic under a pure
/// region budget regardless of the worker count.
inline RunOutput run_core(const Network& net, const PipelineConfig& config,
                          const ProgressCallback& progress = {}) {
    pipeline_detail::validate_config(config);
    const unsigned workers = pipeline_detail::resolve_workers(config);

    const CandidateSet candidates =
        filter_candidates(net, {config.simulations, config.seed});

    const QueryMode mode = config.mode == PipelineMode::Strict
                               ? QueryMode::strict()
                               : QueryMode::with_epsilon(config.epsilon);
    const QueryBudgets budgets{config.region_budget, config.timeout_seconds};

    SimplificationReport report;
    SimplificationPlan plan;

    for (int layer = 1; layer <= net.hidden_layer_count(); ++layer) {
        std::vector<NodeId> layer_nodes;
        for (NodeId v : candidates.members) {
            if (v.layer == layer) layer_nodes.push_back(v);
        }
        if (layer_nodes.empty()) continue;

        std::vector<Verdict> verdicts(layer_nodes.size());
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= layer_nodes.size()) break;
                try {
                    verdicts[i] = verify(make_query(net, layer_nodes[i], mode, budgets));
                } catch (...) {
                    // A query failure never aborts the run; the node simply
                    // is not removed.
                    verdicts[i].kind = VerdictKind::Unknown;
                    verdicts[i].reason = UnknownReason::Budget;
                }
            }
        };
        const std::size_t pool =
            std::min<std::size_t>(workers, layer_nodes.size());
        std::vector<std::thread> threads;
        for (std::size_t t = 1; t < pool; ++t) threads.emplace_back(work);
        work();
        for (std::thread& t : threads) t.join();

        for (std::size_t i = 0; i < layer_nodes.size(); ++i) {
            NodeReport entry;
            entry.node = layer_nodes[i];
            entry.kind = verdicts[i].kind;
            entry.reason = verdicts[i].reason;
            entry.regions = verdicts[i].stats.regions_explored;
            entry.wall_seconds = verdicts[i].stats.wall_seconds;
            entry.witness = verdicts[i].witness;
            if (progress) progress(entry);
            report.nodes.push_back(std::move(entry));
            if (verdicts[i].kind == VerdictKind::Dead) {
                plan.verified_dead.emplace_back(layer_nodes[i], std::move(verdicts[i]));
            }
        }
    }

    std::vector<NodeId> dead;
    for (const auto& entry : plan.verified_dead) dead.push_back(entry.first);
    const Network pruned = prune(net, dead);
    SimplifiedNetwork result = cascade(pruned, plan);

    report.equivalence =
        check_equivalence(net, result.network, 10000, config.seed ^ 0x9e3779b97f4a7c15ull);
    report.cascade_removed = plan.cascade_removed;
    report.constant_result = result.is_constant;
    report.constant_output = result.constant_output;

    ReportTotals& totals = report.totals;
    totals.candidates = candidates.members.size();
    for (const NodeReport& entry : report.nodes) {
        switch (entry.kind) {
            case VerdictKind::Dead: ++totals.dead; break;
            case VerdictKind::Alive: ++totals.alive; break;
            case VerdictKind::Unknown:
                ++totals.unknown;
                if (entry.reason == UnknownReason::Timeout) ++totals.unknown_timeout;
                else ++totals.unknown_budget;
                break;
        }
    }
    totals.cascade_removed = plan.cascade_removed.size();
    totals.removed_total = totals.dead + totals.cascade_removed;
    totals.hidden_original = static_cast<std::uint64_t>(net.hidden_count());
    totals.hidden_simplified =
        static_cast<std::uint64_t>(result.is_constant ? 0 : result.network.hidden_count());
    totals.reduction_percent =
        totals.hidden_original == 0
            ? 0.0
            : 100.0 * static_cast<double>(totals.removed_total) /
                  static_cast<double>(totals.hidden_original);

    report.simulations = config.simulations;
    report.seed = config.seed;
    report.mode = config.mode;
    report.epsilon = config.epsilon;
    report.timeout_seconds = config.timeout_seconds;
    report.region_budget = config.region_budget;
    report.workers = workers;
    return {std::move(report), std::move(result), std::move(plan)};
}

/// Canonical JSON: keys sorted, stable across runs with equal inputs. The
/// equivalence deviation is rendered as a decimal string so its exact value
/// survives any JSON consumer. Per-node wall-clock fields are included only
/// when a wall-clock timeout is active, since they are machine-dependent;
/// pure region-budget runs produce byte-identical reports.
inline std::string emit_report(const SimplificationReport& report) {
    using nlohmann::json;
    const bool timing = report.timeout_seconds > 0.0;

    json j;
    j["config"] = {
        {"epsilon", report.epsilon},
        {"mode", to_string(report.mode)},
        {"region_budget", report.region_budget},
        {"seed", report.seed},
        {"simulations", report.simulations},
        {"timeout_seconds", report.timeout_seconds},
        {"workers", report.workers},
    };

    json nodes = json::array();
    for (const NodeReport& entry : report.nodes) {
        json n = {
            {"index", entry.node.index},
            {"layer", entry.node.layer},
            {"regions", entry.regions},
            {"verdict", to_string(entry.kind)},
        };
        if (entry.kind == VerdictKind::Unknown) n["reason"] = to_string(entry.reason);
        if (entry.kind == VerdictKind::Alive) n["witness"] = entry.witness;
        if (timing) n["wall_seconds"] = entry.wall_seconds;
        nodes.push_back(std::move(n));
    }
    j["nodes"] = std::move(nodes);

    json cascade_list = json::array();
    for (const CascadeRemoval& removal : report.cascade_removed) {
        cascade_list.push_back({
            {"index", removal.node.index},
            {"layer", removal.node.layer},
            {"reason", to_string(removal.reason)},
        });
    }
    j["cascade"] = std::move(cascade_list);

    j["equivalence"] = {
        {"max_deviation", pipeline_detail::shortest_decimal(report.equivalence.max_deviation)},
        {"samples", report.equivalence.samples},
        {"worst_input", report.equivalence.worst_input},
    };

    j["result"] = {
        {"constant", report.constant_result},
        {"hidden_original", report.totals.hidden_original},
        {"hidden_simplified", report.totals.hidden_simplified},
        {"reduction_percent", report.totals.reduction_percent},
    };
    if (report.constant_result) j["result"]["constant_output"] = report.constant_output;

    j["totals"] = {
        {"alive", report.totals.alive},
        {"candidates", report.totals.candidates},
        {"cascade_removed", report.totals.cascade_removed},
        {"dead", report.totals.dead},
        {"removed_total", report.totals.removed_total},
        {"unknown", report.totals.unknown},
        {"unknown_budget", report.totals.unknown_budget},
        {"unknown_timeout", report.totals.unknown_timeout},
    };
    j["version"] = report.version;
    return j.dump(2) + "\n";
}

/// File-based entry point: reads the input network, runs the pipeline, and
/// writes the simplified network and the JSON report wherever paths are set.
inline RunOutput run(const PipelineConfig& config, const ProgressCallback& progress = {}) {
    pipeline_detail::validate_config(config);

    std::ifstream in(config.input_path, std::ios::binary);
    if (!in) raise(ErrorKind::InputUnreadable, "cannot open " + config.input_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) raise(ErrorKind::InputUnreadable, "cannot read " + config.input_path);

    const NNetDocument doc = parse_nnet(buffer.str());
    const Network net = from_document(doc);
    RunOutput out = run_core(net, config, progress);

    if (!config.output_path.empty()) {
        NNetDocument out_doc = to_document(out.result.network);
        out_doc.header_comments = doc.header_comments;
        std::ofstream os(config.output_path, std::ios::binary);
        os << write_nnet(out_doc);
        if (!os) raise(ErrorKind::InputUnreadable, "cannot write " + config.output_path);
    }
    if (!config.report_path.empty()) {
        std::ofstream os(config.report_path, std::ios::binary);
        os << emit_report(out.report);
        if (!os) raise(ErrorKind::InputUnreadable, "cannot write " + config.report_path);
    }
    return out;
}

}  // namespace nnsimplify
