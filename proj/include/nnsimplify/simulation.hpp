// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "network.hpp"

namespace nnsimplify {

struct SimulationConfig {
    std::uint64_t num_samples = 20000;
    std::uint64_t seed = 0;
};

/// Hidden nodes never observed with a nonzero post-activation. Every node
/// that is zero for all inputs is necessarily a member; sampling can only
/// remove nodes it has witnessed alive.
struct CandidateSet {
    std::vector<NodeId> members;  // ascending (layer, index)
    std::uint64_t samples_used = 0;

    bool contains(NodeId v) const {
        return std::binary_search(members.begin(), members.end(), v);
    }
};

/// Uniform draw in [0, 1) with an implementation-independent mapping, so a
/// seed pins the sample sequence on every platform.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1p-53;
}

/// One input point, each coordinate uniform over its input-box interval
/// (original units).
inline std::vector<double> sample_input(std::mt19937_64& rng, const Network& net) {
    const Box& box = net.input_box();
    std::vector<double> x(box.size());
    for (std::size_t j = 0; j < box.size(); ++j) {
        x[j] = box[j].lo + uniform_unit(rng) * (box[j].hi - box[j].lo);
    }
    return x;
}

/// Stage 1: every hidden node starts as a candidate; a node is struck from
/// the set the first time a sampled input gives it a positive
/// post-activation. Sample i of a longer run equals sample i of a shorter
/// run with the same seed, so growing num_samples only shrinks the set.
inline CandidateSet filter_candidates(const Network& net, const SimulationConfig& config) {
    const int hidden_layers = net.hidden_layer_count();
    std::vector<std::vector<char>> seen_nonzero(hidden_layers);
    for (int l = 0; l < hidden_layers; ++l) {
        seen_nonzero[l].assign(static_cast<std::size_t>(net.layer_size(l + 1)), 0);
    }

    std::mt19937_64 rng(config.seed);
    std::vector<double> x, cur, next;
    for (std::uint64_t s = 0; s < config.num_samples; ++s) {
        x = sample_input(rng, net);
        cur = normalized_input(net, x);
        for (int i = 0; i < hidden_layers; ++i) {
            const Matrix& w = net.weights(i);
            next.resize(w.rows());
            for (std::size_t r = 0; r < w.rows(); ++r) {
                const double post =
                    net_detail::relu(net_detail::dot_row(w.row(r), cur, net.biases(i)[r]));
                next[r] = post;
                if (post > 0.0) seen_nonzero[i][r] = 1;
            }
            std::swap(cur, next);
        }
    }

    CandidateSet result;
    result.samples_used = config.num_samples;
    for (int l = 0; l < hidden_layers; ++l) {
        for (std::size_t k = 0; k < seen_nonzero[l].size(); ++k) {
            if (!seen_nonzero[l][k]) result.members.push_back({l + 1, static_cast<int>(k)});
        }
    }
    return result;
}

}  // namespace nnsimplify
