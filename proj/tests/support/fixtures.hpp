// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <nnsimplify/network.hpp>
#include <nnsimplify/nnet_io.hpp>

namespace nnsimplify::testing {

inline Matrix matrix_from(std::vector<std::vector<double>> rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) m.at(r, c) = rows[r][c];
    }
    return m;
}

inline Network make_network(std::vector<int> sizes,
                            std::vector<std::vector<std::vector<double>>> weights,
                            std::vector<std::vector<double>> biases,
                            Box box = {}, Normalization norm = {}) {
    std::vector<Matrix> ws;
    for (auto& w : weights) ws.push_back(matrix_from(std::move(w)));
    if (box.empty()) box.assign(static_cast<std::size_t>(sizes.front()), {-1.0, 1.0});
    if (norm.input_means.empty()) {
        norm = Normalization::identity(static_cast<std::size_t>(sizes.front()));
    }
    return Network(std::move(sizes), std::move(ws), std::move(biases), std::move(box),
                   std::move(norm));
}

/// 1-1-1 network computing ReLU(x) into a unit output weight.
inline Network identity_network() {
    return make_network({1, 1, 1}, {{{1.0}}, {{1.0}}}, {{0.0}, {0.0}});
}

/// One input feeding two hidden neurons (weights 1.3 and -2) combined with
/// output weights 0.7 and 4.2. At x = 1 the hidden posts are [1.3, 0] and the
/// output is 0.91.
inline Network two_neuron_network() {
    return make_network({1, 2, 1}, {{{1.3}, {-2.0}}, {{0.7, 4.2}}}, {{0.0, 0.0}, {0.0}});
}

/// The cancelling-pair network: two identical first-layer neurons feed a
/// second-layer neuron with weights +1/-1, so that neuron is always zero and
/// the output is constant. The canonical end-to-end fixture.
inline Network cancellation_network() {
    return make_network({1, 2, 1, 1}, {{{1.0}, {1.0}}, {{1.0, -1.0}}, {{1.0}}},
                        {{0.0, 0.0}, {0.0}, {0.0}});
}

inline NodeId cancellation_dead_node() { return {2, 0}; }

inline Network zero_network(std::vector<int> sizes, std::vector<std::vector<double>> biases) {
    std::vector<std::vector<std::vector<double>>> weights;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        weights.emplace_back(static_cast<std::size_t>(sizes[i + 1]),
                             std::vector<double>(static_cast<std::size_t>(sizes[i]), 0.0));
    }
    return make_network(std::move(sizes), std::move(weights), std::move(biases));
}

inline std::string identity_nnet_text() {
    return "// identity test network\n"
           "2,1,1,1,\n"
           "1,1,1,\n"
           "0,\n"
           "-1,\n"
           "1,\n"
           "0,0,\n"
           "1,1,\n"
           "1,\n"
           "0,\n"
           "1,\n"
           "0,\n";
}

}  // namespace nnsimplify::testing
