// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "network.hpp"
#include "simulation.hpp"
#include "verifier.hpp"

namespace nnsimplify {

enum class RemovalReason { NoOutgoingEdges, ConstantFolded };

inline const char* to_string(RemovalReason reason) {
    switch (reason) {
        case RemovalReason::NoOutgoingEdges: return "no-outgoing-edges";
        case RemovalReason::ConstantFolded: return "constant-folded";
    }
    return "?";
}

struct CascadeRemoval {
    NodeId node;  // original coordinates
    RemovalReason reason;
};

/// What was removed and why. Node ids always refer to the original network.
struct SimplificationPlan {
    std::vector<std::pair<NodeId, Verdict>> verified_dead;  // ascending by node
    std::vector<CascadeRemoval> cascade_removed;            // in removal order
    bool constant_result = false;
    std::vector<double> constant_output;  // original units, set when constant
};

/// Deletes each dead node's incoming weight row and bias and its outgoing
/// weight column. Layers may end up empty; cascade() resolves that. Since
/// evaluation accumulates in a fixed order and a dead node's post-activation
/// is exactly 0.0, deleting its outgoing terms cannot change any output.
inline Network prune(const Network& net, const std::vector<NodeId>& dead) {
    for (NodeId v : dead) {
        if (!net.is_hidden(v)) {
            raise(ErrorKind::DimensionMismatch, "prune target must be a hidden node");
        }
    }
    std::vector<int> sizes = net.layer_sizes();
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    for (std::size_t i = 0; i < net.weight_layer_count(); ++i) {
        weights.push_back(net.weights(i));
        biases.push_back(net.biases(i));
    }

    // Per layer, descending index order keeps the remaining indices valid.
    std::vector<NodeId> ordered = dead;
    std::sort(ordered.begin(), ordered.end());
    if (std::adjacent_find(ordered.begin(), ordered.end()) != ordered.end()) {
        raise(ErrorKind::InvalidConfig, "duplicate node in dead set");
    }
    for (auto it = ordered.rbegin(); it != ordered.rend(); ++it) {
        const NodeId v = *it;
        const auto layer = static_cast<std::size_t>(v.layer);
        const auto k = static_cast<std::size_t>(v.index);
        weights[layer - 1] = weights[layer - 1].without_row(k);
        biases[layer - 1].erase(biases[layer - 1].begin() + static_cast<std::ptrdiff_t>(k));
        weights[layer] = weights[layer].without_col(k);
        --sizes[layer];
    }
    return Network(std::move(sizes), std::move(weights), std::move(biases), net.input_box(),
                   net.normalization());
}

inline bool has_empty_hidden_layer(const Network& net) {
    for (int l = 1; l <= net.hidden_layer_count(); ++l) {
        if (net.layer_size(l) == 0) return true;
    }
    return false;
}

struct SimplifiedNetwork {
    Network network;  // when constant: a zero-hidden-layer affine network
    bool is_constant = false;
    std::vector<double> constant_output;  // original units
};

/// Fixpoint cleanup after pruning:
///   (a) a hidden node whose outgoing weights are all exactly 0.0 is removed;
///   (b) a hidden node with no nonzero incoming weight computes the constant
///       ReLU(bias), which is folded into the next layer's biases before the
///       node is removed;
/// emptied layers make every downstream node constant, so folding either
/// terminates with a standard network or collapses the whole function to a
/// constant, recorded in the plan and emitted as a zero-hidden-layer network.
///
/// `pruned` must come from prune() with plan.verified_dead describing the
/// removed set, so cascade can report original node ids.
inline SimplifiedNetwork cascade(const Network& pruned, SimplificationPlan& plan) {
    const int hidden_layers = pruned.hidden_layer_count();
    std::vector<int> sizes = pruned.layer_sizes();
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    for (std::size_t i = 0; i < pruned.weight_layer_count(); ++i) {
        weights.push_back(pruned.weights(i));
        biases.push_back(pruned.biases(i));
    }

    // Original index of each surviving node, recovered from the dead set.
    std::vector<std::vector<int>> orig(hidden_layers);
    for (int l = 1; l <= hidden_layers; ++l) {
        std::vector<int> dead_here;
        for (const auto& entry : plan.verified_dead) {
            if (entry.first.layer == l) dead_here.push_back(entry.first.index);
        }
        std::sort(dead_here.begin(), dead_here.end());
        const int original_size = sizes[l] + static_cast<int>(dead_here.size());
        for (int k = 0; k < original_size; ++k) {
            if (!std::binary_search(dead_here.begin(), dead_here.end(), k)) {
                orig[l - 1].push_back(k);
            }
        }
    }

    auto remove_node = [&](int layer, int k, RemovalReason reason) {
        plan.cascade_removed.push_back({{layer, orig[layer - 1][k]}, reason});
        orig[layer - 1].erase(orig[layer - 1].begin() + k);
        weights[layer - 1] = weights[layer - 1].without_row(static_cast<std::size_t>(k));
        biases[layer - 1].erase(biases[layer - 1].begin() + k);
        weights[layer] = weights[layer].without_col(static_cast<std::size_t>(k));
        --sizes[layer];
    };

    bool changed = true;
    while (changed) {
        changed = false;
        // Rule (a): no remaining outgoing edges.
        for (int l = 1; l <= hidden_layers && !changed; ++l) {
            for (int k = 0; k < sizes[l] && !changed; ++k) {
                const Matrix& out = weights[l];
                bool all_zero = true;
                for (std::size_t r = 0; r < out.rows() && all_zero; ++r) {
                    all_zero = out.at(r, static_cast<std::size_t>(k)) == 0.0;
                }
                if (all_zero) {
                    remove_node(l, k, RemovalReason::NoOutgoingEdges);
                    changed = true;
                }
            }
        }
        if (changed) continue;
        // Rule (b): no remaining incoming edges; the node is the constant
        // ReLU(bias), folded into the next layer's biases.
        for (int l = 1; l <= hidden_layers && !changed; ++l) {
            for (int k = 0; k < sizes[l] && !changed; ++k) {
                const Matrix& in = weights[l - 1];
                bool all_zero = true;
                for (std::size_t c = 0; c < in.cols() && all_zero; ++c) {
                    all_zero = in.at(static_cast<std::size_t>(k), c) == 0.0;
                }
                if (all_zero) {
                    const double constant = net_detail::relu(biases[l - 1][k]);
                    for (std::size_t r = 0; r < weights[l].rows(); ++r) {
                        biases[l][r] += weights[l].at(r, static_cast<std::size_t>(k)) * constant;
                    }
                    remove_node(l, k, RemovalReason::ConstantFolded);
                    changed = true;
                }
            }
        }
    }

    bool any_empty = false;
    for (int l = 1; l <= hidden_layers; ++l) any_empty = any_empty || sizes[l] == 0;
    if (!any_empty) {
        return {Network(std::move(sizes), std::move(weights), std::move(biases),
                        pruned.input_box(), pruned.normalization()),
                false,
                {}};
    }

    // At the fixpoint an empty layer implies every hidden node is gone: a
    // node before the gap would have no outgoing edges (rule a), a node after
    // it no incoming ones (rule b). The outputs are the (possibly folded)
    // output biases; emit the constant as a zero-hidden-layer affine network.
    for (int l = 1; l <= hidden_layers; ++l) {
        if (sizes[l] != 0) {
            raise(ErrorKind::InvalidConfig, "internal: cascade fixpoint left a partial layer");
        }
    }
    const auto in_size = static_cast<std::size_t>(pruned.input_size());
    const auto out_size = static_cast<std::size_t>(pruned.output_size());
    const std::vector<double>& out_bias = biases.back();
    const Normalization& norm = pruned.normalization();
    std::vector<double> constant(out_size);
    for (std::size_t o = 0; o < out_size; ++o) {
        constant[o] = out_bias[o] * norm.output_range + norm.output_mean;
    }
    plan.constant_result = true;
    plan.constant_output = constant;
    return {Network({static_cast<int>(in_size), static_cast<int>(out_size)},
                    {Matrix(out_size, in_size, 0.0)}, {out_bias}, pruned.input_box(), norm),
            true, std::move(constant)};
}

struct EquivalenceReport {
    double max_deviation = 0.0;
    std::vector<double> per_output;
    std::vector<double> worst_input;
    std::uint64_t samples = 0;
};

/// Largest absolute output deviation between the two networks over uniform
/// samples from the original's input box. Deterministic given the seed.
inline EquivalenceReport check_equivalence(const Network& original, const Network& simplified,
                                           std::uint64_t num_samples, std::uint64_t seed) {
    if (original.input_size() != simplified.input_size() ||
        original.output_size() != simplified.output_size()) {
        raise(ErrorKind::DimensionMismatch, "networks must share input/output dimensions");
    }
    EquivalenceReport report;
    report.per_output.assign(static_cast<std::size_t>(original.output_size()), 0.0);
    report.samples = num_samples;
    std::mt19937_64 rng(seed);
    for (std::uint64_t s = 0; s < num_samples; ++s) {
        const std::vector<double> x = sample_input(rng, original);
        const std::vector<double> a = evaluate(original, x);
        const std::vector<double> b = evaluate(simplified, x);
        for (std::size_t o = 0; o < a.size(); ++o) {
            const double dev = std::abs(a[o] - b[o]);
            if (dev > report.per_output[o]) report.per_output[o] = dev;
            if (dev > report.max_deviation) {
                report.max_deviation = dev;
                report.worst_input = x;
            }
        }
    }
    return report;
}

}  // namespace nnsimplify
