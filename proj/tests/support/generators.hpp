// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include <nnsimplify/bounds.hpp>
#include <nnsimplify/network.hpp>
#include <nnsimplify/nnet_io.hpp>
#include <nnsimplify/verifier.hpp>

namespace nnsimplify::testing {

/// Dyadic values on the k/128 grid keep every generated weight exactly
/// representable and keep the oracle's rationals small.
inline double dyadic(std::mt19937_64& rng, int lo_num, int hi_num) {
    const auto span = static_cast<std::uint64_t>(hi_num - lo_num + 1);
    const int k = lo_num + static_cast<int>(rng() % span);
    return static_cast<double>(k) / 128.0;
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

struct GeneratorOptions {
    int bias_lo = -64;
    int bias_hi = 64;
    int weight_lo = -192;
    int weight_hi = 192;
    bool randomize_normalization = false;
};

inline Network random_network(std::mt19937_64& rng, const std::vector<int>& sizes,
                              const GeneratorOptions& opts = {}) {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        const auto rows = static_cast<std::size_t>(sizes[i + 1]);
        const auto cols = static_cast<std::size_t>(sizes[i]);
        Matrix w(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                double v = dyadic(rng, opts.weight_lo, opts.weight_hi);
                if (v == 0.0) v = 1.0 / 128.0;  // keep edges dense
                w.at(r, c) = v;
            }
        }
        std::vector<double> b(rows);
        for (double& v : b) v = dyadic(rng, opts.bias_lo, opts.bias_hi);
        weights.push_back(std::move(w));
        biases.push_back(std::move(b));
    }

    const auto d = static_cast<std::size_t>(sizes.front());
    Box box(d, {-1.0, 1.0});
    Normalization norm = Normalization::identity(d);
    if (opts.randomize_normalization) {
        const double ranges[3] = {0.5, 1.0, 2.0};
        for (std::size_t j = 0; j < d; ++j) {
            norm.input_means[j] = dyadic(rng, -32, 32);
            norm.input_ranges[j] = ranges[rng() % 3];
        }
        norm.output_mean = dyadic(rng, -32, 32);
        norm.output_range = ranges[rng() % 3];
    }
    return Network(sizes, std::move(weights), std::move(biases), std::move(box), std::move(norm));
}

/// Rebuilds `net` with one bias replaced.
inline Network with_bias(const Network& net, NodeId v, double bias) {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    for (std::size_t i = 0; i < net.weight_layer_count(); ++i) {
        weights.push_back(net.weights(i));
        biases.push_back(net.biases(i));
    }
    biases[static_cast<std::size_t>(v.layer - 1)][static_cast<std::size_t>(v.index)] = bias;
    return Network(net.layer_sizes(), std::move(weights), std::move(biases), net.input_box(),
                   net.normalization());
}

/// Drives the node's bias below the negated absolute-weight sum of its
/// incoming values over the box, so its pre-activation is negative for every
/// input. Returns the modified network.
inline Network plant_dead(const Network& net, NodeId v) {
    const NeuronBounds bounds = concrete_bounds(net, net.input_box());
    const Box nbox = normalized_region(net, net.input_box());
    const std::size_t layer = static_cast<std::size_t>(v.layer);
    const Matrix& w = net.weights(layer - 1);
    double sum = 0.0;
    for (std::size_t c = 0; c < w.cols(); ++c) {
        double magnitude;
        if (layer == 1) {
            magnitude = std::max(std::abs(nbox[c].lo), std::abs(nbox[c].hi));
        } else {
            magnitude = std::max(0.0, bounds.hidden[layer - 2][c].pre.hi);
        }
        sum += std::abs(w.at(static_cast<std::size_t>(v.index), c)) * magnitude;
    }
    return with_bias(net, v, -(sum * 1.0625 + 0.5));
}

struct PlantedNetwork {
    Network net;
    std::vector<NodeId> planted;  // ascending
};

/// A network in the planted-dead family: 2-4 hidden layers, 4-20 neurons per
/// layer (widths before the last hidden layer kept small enough that any
/// truncation stays within the oracle's enumeration bound), 2-5 inputs, and
/// 1-3 neurons forced dead by bias.
inline PlantedNetwork planted_dead_network(std::mt19937_64& rng) {
    const int hidden_layers = uniform_int(rng, 2, 4);
    std::vector<int> sizes;
    sizes.push_back(uniform_int(rng, 2, 5));
    int prefix = 0;
    for (int l = 1; l < hidden_layers; ++l) {
        const int remaining = hidden_layers - 1 - l;
        const int max_here = 16 - prefix - 4 * remaining;
        const int size = uniform_int(rng, 4, std::min(12, max_here));
        sizes.push_back(size);
        prefix += size;
    }
    sizes.push_back(uniform_int(rng, 4, 20));
    sizes.push_back(uniform_int(rng, 1, 3));

    GeneratorOptions opts;
    opts.randomize_normalization = (rng() % 4) == 0;
    Network net = random_network(rng, sizes, opts);

    const int plant_count = uniform_int(rng, 1, 3);
    std::vector<NodeId> planted;
    while (static_cast<int>(planted.size()) < plant_count) {
        const int layer = uniform_int(rng, 1, hidden_layers);
        const int index = uniform_int(rng, 0, sizes[layer] - 1);
        const NodeId v{layer, index};
        if (std::find(planted.begin(), planted.end(), v) != planted.end()) continue;
        int in_layer = 0;
        for (NodeId p : planted) {
            if (p.layer == layer) ++in_layer;
        }
        if (in_layer >= sizes[layer] - 2) continue;  // never kill a whole layer
        planted.push_back(v);
    }
    std::sort(planted.begin(), planted.end());
    for (NodeId v : planted) net = plant_dead(net, v);

    // Keep the family bimodal: every non-planted node either stays below the
    // smallest epsilon probe (1e-4) or reaches the largest one (1). Nodes
    // whose maxima land in between (typically nodes starved by upstream
    // planting) are forced dead as well; they surface as incidental
    // removals.
    const QueryBudgets probe_budget{20000, 0.0};
    bool changed = true;
    while (changed) {
        changed = false;
        for (NodeId v : net.hidden_nodes()) {
            if (std::find(planted.begin(), planted.end(), v) != planted.end()) continue;
            const Verdict reaches_one =
                verify(make_query(net, v, QueryMode::with_epsilon(1.0), probe_budget));
            if (reaches_one.kind == VerdictKind::Alive) continue;
            const Verdict below_all =
                verify(make_query(net, v, QueryMode::with_epsilon(1e-4), probe_budget));
            if (below_all.kind == VerdictKind::Dead) continue;
            net = plant_dead(net, v);
            changed = true;
        }
    }
    return {std::move(net), std::move(planted)};
}

/// Query over a random truncated subnet with at most `max_hidden` hidden
/// neurons, mixing strict and epsilon modes and biasing some nodes negative
/// so dead verdicts occur.
inline VerificationQuery random_truncated_query(std::mt19937_64& rng, int max_hidden,
                                                QueryBudgets budgets) {
    while (true) {
        const int hidden_layers = uniform_int(rng, 1, 3);
        std::vector<int> sizes;
        sizes.push_back(uniform_int(rng, 2, 5));
        for (int l = 0; l < hidden_layers; ++l) sizes.push_back(uniform_int(rng, 2, 6));
        sizes.push_back(1);

        GeneratorOptions opts;
        opts.bias_lo = -112;  // shifted negative: a mix of dead and alive nodes
        opts.bias_hi = 48;
        opts.randomize_normalization = (rng() % 4) == 0;
        Network net = random_network(rng, sizes, opts);

        const int layer = uniform_int(rng, 1, hidden_layers);
        const int index = uniform_int(rng, 0, sizes[layer] - 1);
        int prefix = 0;
        for (int l = 1; l < layer; ++l) prefix += sizes[l];
        if (prefix > max_hidden) continue;

        const QueryMode mode =
            (rng() % 2) == 0 ? QueryMode::strict() : QueryMode::with_epsilon(0.01);
        return make_query(net, {layer, index}, mode, budgets);
    }
}

inline NNetDocument random_document(std::mt19937_64& rng) {
    const int hidden_layers = uniform_int(rng, 1, 3);
    std::vector<int> sizes;
    sizes.push_back(uniform_int(rng, 1, 5));
    for (int l = 0; l < hidden_layers; ++l) sizes.push_back(uniform_int(rng, 1, 6));
    sizes.push_back(uniform_int(rng, 1, 4));

    NNetDocument doc;
    doc.header_comments = {"// generated fixture", "// second comment line"};
    doc.num_layers = static_cast<int>(sizes.size()) - 1;
    doc.input_size = sizes.front();
    doc.output_size = sizes.back();
    doc.max_layer_size = *std::max_element(sizes.begin(), sizes.end());
    doc.layer_sizes = sizes;
    const auto d = static_cast<std::size_t>(doc.input_size);
    std::uniform_real_distribution<double> real(-2.0, 2.0);
    for (std::size_t j = 0; j < d; ++j) {
        const double a = real(rng);
        const double b = real(rng);
        doc.input_mins.push_back(std::min(a, b));
        doc.input_maxes.push_back(std::max(a, b));
    }
    for (std::size_t j = 0; j <= d; ++j) {
        doc.means.push_back(real(rng));
        doc.ranges.push_back(0.25 + std::abs(real(rng)));
    }
    for (int i = 0; i < doc.num_layers; ++i) {
        const auto rows = static_cast<std::size_t>(sizes[i + 1]);
        const auto cols = static_cast<std::size_t>(sizes[i]);
        Matrix w(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) w.at(r, c) = real(rng);
        }
        std::vector<double> b(rows);
        for (double& v : b) v = real(rng);
        doc.weights.push_back(std::move(w));
        doc.biases.push_back(std::move(b));
    }
    return doc;
}

}  // namespace nnsimplify::testing
