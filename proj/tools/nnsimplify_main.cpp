// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include <nnsimplify/pipeline.hpp>

namespace {

void print_node(const nnsimplify::NodeReport& entry) {
    std::string line = "layer " + std::to_string(entry.node.layer) + " node " +
                       std::to_string(entry.node.index) + ": " +
                       nnsimplify::to_string(entry.kind);
    if (entry.kind == nnsimplify::VerdictKind::Unknown) {
        line += std::string(" (") + nnsimplify::to_string(entry.reason) + ")";
    }
    line += " [regions=" + std::to_string(entry.regions) + "]";
    std::printf("%s\n", line.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Removes hidden neurons that are provably zero for every input in the "
        "network's input box, emitting a smaller equivalent network."};

    nnsimplify::PipelineConfig config;
    std::string mode = "strict";

    app.add_option("input", config.input_path, "input network (NNet format)")->required();
    app.add_option("--out", config.output_path, "path for the simplified network")->required();
    app.add_option("--report", config.report_path, "path for the JSON report")->required();
    app.add_option("--simulations", config.simulations,
                   "random forward passes for candidate filtering");
    app.add_option("--seed", config.seed, "seed for sampling and the equivalence check");
    app.add_option("--mode", mode, "strict: prove exact deadness; epsilon: prove value < epsilon")
        ->check(CLI::IsMember({"strict", "epsilon"}));
    app.add_option("--epsilon", config.epsilon, "threshold for epsilon mode");
    app.add_option("--timeout", config.timeout_seconds,
                   "per-query wall clock in seconds (0 disables)");
    app.add_option("--budget", config.region_budget, "per-query region budget");
    app.add_option("--jobs", config.workers, "worker count (0: machine parallelism)")
        ->envname("NNSIMPLIFY_JOBS");

    CLI11_PARSE(app, argc, argv);
    config.mode = mode == "epsilon" ? nnsimplify::PipelineMode::Epsilon
                                    : nnsimplify::PipelineMode::Strict;

    try {
        const nnsimplify::RunOutput out = nnsimplify::run(config, print_node);
        const auto& totals = out.report.totals;
        std::printf("candidates %llu: dead %llu, alive %llu, unknown %llu; cascade %llu\n",
                    static_cast<unsigned long long>(totals.candidates),
                    static_cast<unsigned long long>(totals.dead),
                    static_cast<unsigned long long>(totals.alive),
                    static_cast<unsigned long long>(totals.unknown),
                    static_cast<unsigned long long>(totals.cascade_removed));
        std::printf("hidden neurons %llu -> %llu (%.1f%% removed)\n",
                    static_cast<unsigned long long>(totals.hidden_original),
                    static_cast<unsigned long long>(totals.hidden_simplified),
                    totals.reduction_percent);
        std::printf("max deviation over %llu samples: %g\n",
                    static_cast<unsigned long long>(out.report.equivalence.samples),
                    out.report.equivalence.max_deviation);
        if (config.mode == nnsimplify::PipelineMode::Strict &&
            out.report.equivalence.max_deviation > 0.0) {
            std::fprintf(stderr,
                         "strict-mode run produced a nonzero deviation; this indicates an "
                         "unsound removal\n");
            return 2;
        }
        return 0;
    } catch (const nnsimplify::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
