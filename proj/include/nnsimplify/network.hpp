// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "nnet_io.hpp"

namespace nnsimplify {

/// Per-input affine normalization plus one shared output pair. Inputs are
/// mapped to (x - mean) / range before the first layer; outputs are mapped
/// back with y * range + mean after the last.
struct Normalization {
    std::vector<double> input_means;
    std::vector<double> input_ranges;  // strictly positive
    double output_mean = 0.0;
    double output_range = 1.0;

    static Normalization identity(std::size_t inputs) {
        Normalization n;
        n.input_means.assign(inputs, 0.0);
        n.input_ranges.assign(inputs, 1.0);
        return n;
    }

    bool operator==(const Normalization&) const = default;
};

/// Identifies a hidden neuron: `layer` counts hidden layers starting at 1,
/// `index` is the position within the layer starting at 0. Input and output
/// neurons are never addressed this way.
struct NodeId {
    int layer = 0;
    int index = 0;

    auto operator<=>(const NodeId&) const = default;
};

/// A layered fully-connected network with ReLU hidden activations and an
/// affine output layer. Immutable after construction.
class Network {
public:
    Network(std::vector<int> layer_sizes, std::vector<Matrix> weights,
            std::vector<std::vector<double>> biases, Box input_box, Normalization norm)
        : layer_sizes_(std::move(layer_sizes)),
          weights_(std::move(weights)),
          biases_(std::move(biases)),
          input_box_(std::move(input_box)),
          norm_(std::move(norm)) {
        check_shape();
    }

    int input_size() const { return layer_sizes_.front(); }
    int output_size() const { return layer_sizes_.back(); }
    std::size_t weight_layer_count() const { return weights_.size(); }
    int hidden_layer_count() const { return static_cast<int>(weights_.size()) - 1; }
    int layer_size(std::size_t i) const { return layer_sizes_[i]; }
    const std::vector<int>& layer_sizes() const { return layer_sizes_; }
    const Matrix& weights(std::size_t i) const { return weights_[i]; }
    const std::vector<double>& biases(std::size_t i) const { return biases_[i]; }
    const Box& input_box() const { return input_box_; }
    const Normalization& normalization() const { return norm_; }

    int hidden_count() const {
        int n = 0;
        for (int l = 1; l + 1 < static_cast<int>(layer_sizes_.size()); ++l) n += layer_sizes_[l];
        return n;
    }

    bool is_hidden(NodeId v) const {
        return v.layer >= 1 && v.layer <= hidden_layer_count() && v.index >= 0 &&
               v.index < layer_sizes_[v.layer];
    }

    /// All hidden nodes in ascending (layer, index) order.
    std::vector<NodeId> hidden_nodes() const {
        std::vector<NodeId> nodes;
        nodes.reserve(static_cast<std::size_t>(hidden_count()));
        for (int l = 1; l <= hidden_layer_count(); ++l) {
            for (int k = 0; k < layer_sizes_[l]; ++k) nodes.push_back({l, k});
        }
        return nodes;
    }

    bool operator==(const Network&) const = default;

private:
    void check_shape() const {
        if (layer_sizes_.size() < 2) {
            raise(ErrorKind::DimensionMismatch, "network needs input and output layers");
        }
        if (weights_.size() != layer_sizes_.size() - 1 || biases_.size() != weights_.size()) {
            raise(ErrorKind::DimensionMismatch, "weight/bias layer count mismatch");
        }
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            if (weights_[i].rows() != static_cast<std::size_t>(layer_sizes_[i + 1]) ||
                weights_[i].cols() != static_cast<std::size_t>(layer_sizes_[i]) ||
                biases_[i].size() != weights_[i].rows()) {
                raise(ErrorKind::DimensionMismatch, "layer " + std::to_string(i) + " shape");
            }
        }
        const auto d = static_cast<std::size_t>(layer_sizes_.front());
        if (input_box_.size() != d || norm_.input_means.size() != d ||
            norm_.input_ranges.size() != d) {
            raise(ErrorKind::DimensionMismatch, "input box/normalization size mismatch");
        }
        for (const Interval& iv : input_box_) {
            if (iv.lo > iv.hi) raise(ErrorKind::MalformedHeader, "empty input box dimension");
        }
        for (double r : norm_.input_ranges) {
            if (!(r > 0.0)) raise(ErrorKind::NonPositiveRange, "input range must be positive");
        }
        if (!(norm_.output_range > 0.0)) {
            raise(ErrorKind::NonPositiveRange, "output range must be positive");
        }
    }

    std::vector<int> layer_sizes_;
    std::vector<Matrix> weights_;
    std::vector<std::vector<double>> biases_;
    Box input_box_;
    Normalization norm_;
};

inline Network from_document(const NNetDocument& doc) {
    validate(doc);
    const auto d = static_cast<std::size_t>(doc.input_size);
    Box box(d);
    for (std::size_t j = 0; j < d; ++j) box[j] = {doc.input_mins[j], doc.input_maxes[j]};
    Normalization norm;
    norm.input_means.assign(doc.means.begin(), doc.means.begin() + doc.input_size);
    norm.input_ranges.assign(doc.ranges.begin(), doc.ranges.begin() + doc.input_size);
    norm.output_mean = doc.means.back();
    norm.output_range = doc.ranges.back();
    return Network(doc.layer_sizes, doc.weights, doc.biases, std::move(box), std::move(norm));
}

inline NNetDocument to_document(const Network& net) {
    NNetDocument doc;
    doc.num_layers = static_cast<int>(net.weight_layer_count());
    doc.input_size = net.input_size();
    doc.output_size = net.output_size();
    doc.layer_sizes = net.layer_sizes();
    doc.max_layer_size = *std::max_element(doc.layer_sizes.begin(), doc.layer_sizes.end());
    const auto d = static_cast<std::size_t>(net.input_size());
    doc.input_mins.resize(d);
    doc.input_maxes.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        doc.input_mins[j] = net.input_box()[j].lo;
        doc.input_maxes[j] = net.input_box()[j].hi;
    }
    doc.means = net.normalization().input_means;
    doc.means.push_back(net.normalization().output_mean);
    doc.ranges = net.normalization().input_ranges;
    doc.ranges.push_back(net.normalization().output_range);
    for (std::size_t i = 0; i < net.weight_layer_count(); ++i) {
        doc.weights.push_back(net.weights(i));
        doc.biases.push_back(net.biases(i));
    }
    return doc;
}

namespace net_detail {

/// Weighted sum plus bias, accumulated in ascending source-index order. The
/// fixed order makes removing exactly-zero terms an output-preserving edit.
inline double dot_row(std::span<const double> row, std::span<const double> in, double bias) {
    double acc = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * in[c];
    acc += bias;
    return acc;
}

inline double relu(double x) { return std::max(0.0, x); }

}  // namespace net_detail

inline std::vector<double> normalized_input(const Network& net, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(net.input_size())) {
        raise(ErrorKind::DimensionMismatch, "input vector has wrong length");
    }
    std::vector<double> xn(x.size());
    const Normalization& norm = net.normalization();
    for (std::size_t j = 0; j < x.size(); ++j) {
        xn[j] = (x[j] - norm.input_means[j]) / norm.input_ranges[j];
    }
    return xn;
}

/// Forward pass in original units: normalize, ReLU hidden layers, affine
/// output layer, denormalize.
inline std::vector<double> evaluate(const Network& net, std::span<const double> x) {
    std::vector<double> cur = normalized_input(net, x);
    std::vector<double> next;
    for (std::size_t i = 0; i < net.weight_layer_count(); ++i) {
        const Matrix& w = net.weights(i);
        next.resize(w.rows());
        for (std::size_t r = 0; r < w.rows(); ++r) {
            next[r] = net_detail::dot_row(w.row(r), cur, net.biases(i)[r]);
        }
        if (i + 1 < net.weight_layer_count()) {
            for (double& v : next) v = net_detail::relu(v);
        }
        std::swap(cur, next);
    }
    const Normalization& norm = net.normalization();
    for (double& v : cur) v = v * norm.output_range + norm.output_mean;
    return cur;
}

/// Pre- and post-activation values of every hidden neuron, indexed as
/// [hidden layer - 1][neuron index]. Consistent with evaluate().
struct NodeValues {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> post;

    double pre_of(NodeId v) const { return pre[v.layer - 1][v.index]; }
    double post_of(NodeId v) const { return post[v.layer - 1][v.index]; }
};

inline NodeValues node_values(const Network& net, std::span<const double> x) {
    NodeValues values;
    std::vector<double> cur = normalized_input(net, x);
    for (std::size_t i = 0; i + 1 < net.weight_layer_count(); ++i) {
        const Matrix& w = net.weights(i);
        std::vector<double> pre(w.rows());
        for (std::size_t r = 0; r < w.rows(); ++r) {
            pre[r] = net_detail::dot_row(w.row(r), cur, net.biases(i)[r]);
        }
        std::vector<double> post(pre.size());
        for (std::size_t r = 0; r < pre.size(); ++r) post[r] = net_detail::relu(pre[r]);
        cur = post;
        values.pre.push_back(std::move(pre));
        values.post.push_back(std::move(post));
    }
    return values;
}

/// The prefix of `net` up to hidden node `v`, with v's pre-activation as the
/// single output. Hidden layers before v's layer are kept, v's siblings and
/// all later layers are dropped, and the output normalization is identity, so
/// evaluate(truncate(net, v), x) equals node_values(net, x).pre_of(v).
inline Network truncate(const Network& net, NodeId v) {
    if (!net.is_hidden(v)) {
        raise(ErrorKind::DimensionMismatch, "truncation target must be a hidden node");
    }
    std::vector<int> sizes(net.layer_sizes().begin(), net.layer_sizes().begin() + v.layer);
    sizes.push_back(1);

    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    for (int i = 0; i + 1 < v.layer; ++i) {
        weights.push_back(net.weights(i));
        biases.push_back(net.biases(i));
    }
    const Matrix& last = net.weights(v.layer - 1);
    Matrix out_row(1, last.cols());
    for (std::size_t c = 0; c < last.cols(); ++c) {
        out_row.at(0, c) = last.at(v.index, c);
    }
    weights.push_back(std::move(out_row));
    biases.push_back({net.biases(v.layer - 1)[v.index]});

    Normalization norm = net.normalization();
    norm.output_mean = 0.0;
    norm.output_range = 1.0;
    return Network(std::move(sizes), std::move(weights), std::move(biases), net.input_box(),
                   std::move(norm));
}

}  // namespace nnsimplify
