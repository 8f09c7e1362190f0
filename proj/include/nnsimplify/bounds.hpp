// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "network.hpp"

namespace nnsimplify {

/// Affine function of the normalized inputs: coeffs . x + constant.
struct AffineForm {
    std::vector<double> coeffs;
    double constant = 0.0;

    static AffineForm zero(std::size_t dims) { return {std::vector<double>(dims, 0.0), 0.0}; }

    bool operator==(const AffineForm&) const = default;
};

/// Sound enclosure of one neuron's pre-activation over a region: a concrete
/// interval and, when computed symbolically, affine lower/upper bounds over
/// the normalized inputs. `exact` marks lower == upper as functions.
struct NeuronBoundEntry {
    Interval pre;
    AffineForm lower;
    AffineForm upper;
    bool has_symbolic = false;
    bool exact = false;
};

struct NeuronBounds {
    std::vector<std::vector<NeuronBoundEntry>> hidden;  // [hidden layer][neuron]
    std::vector<NeuronBoundEntry> outputs;
};

/// Outward rounding slack, applied in proportion to the magnitude of the
/// terms entering a bound. Far larger than accumulated double rounding for
/// the layer counts involved, far smaller than any quantity of interest.
inline constexpr double kOutwardSlack = 0x1p-40;

namespace bound_detail {

inline Interval pad_outward(double lo, double hi, double term_mag, double bias_mag) {
    if (term_mag > 0.0) {
        const double pad = (term_mag + bias_mag) * kOutwardSlack;
        return {lo - pad, hi + pad};
    }
    return {lo, hi};
}

/// Interval image of row . in + bias.
inline Interval affine_image(std::span<const double> row, double bias,
                             const std::vector<Interval>& in) {
    double lo = 0.0, hi = 0.0, mag = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
        const double w = row[k];
        if (w == 0.0) continue;
        const double a = w * in[k].lo;
        const double b = w * in[k].hi;
        lo += std::min(a, b);
        hi += std::max(a, b);
        mag += std::abs(w) * std::max(std::abs(in[k].lo), std::abs(in[k].hi));
    }
    return pad_outward(lo + bias, hi + bias, mag, std::abs(bias));
}

inline void add_scaled(AffineForm& dst, double w, const AffineForm& src) {
    for (std::size_t j = 0; j < dst.coeffs.size(); ++j) dst.coeffs[j] += w * src.coeffs[j];
    dst.constant += w * src.constant;
}

enum class Phase { Linear, Active, Inactive, Unstable };

struct SourceState {
    AffineForm pre_lower;
    AffineForm pre_upper;
    bool pre_exact = false;
    Interval pre;   // combined concrete pre-activation enclosure
    Interval post;  // concrete post-activation enclosure (inputs: the region)
    Phase phase = Phase::Linear;
};

/// Linear upper relaxation of ReLU over pre-activation range [l, u] with
/// l < 0 < u, applied to an affine bound f: the chord u * (f - l) / (u - l).
inline AffineForm chord_of(const AffineForm& f, double l, double u) {
    const double slope = u / (u - l);
    AffineForm out = f;
    for (double& c : out.coeffs) c *= slope;
    out.constant = slope * (f.constant - l);
    return out;
}

}  // namespace bound_detail

/// The region mapped into normalized input coordinates, padded outward.
inline Box normalized_region(const Network& net, const Box& region) {
    if (region.size() != static_cast<std::size_t>(net.input_size())) {
        raise(ErrorKind::DimensionMismatch, "region has wrong dimension");
    }
    const Normalization& norm = net.normalization();
    Box out(region.size());
    for (std::size_t j = 0; j < region.size(); ++j) {
        const double a = (region[j].lo - norm.input_means[j]) / norm.input_ranges[j];
        const double b = (region[j].hi - norm.input_means[j]) / norm.input_ranges[j];
        const double pad = kOutwardSlack * std::max(std::abs(a), std::abs(b));
        out[j] = {a - pad, b + pad};
    }
    return out;
}

/// Largest value of the form over the normalized region, padded outward.
inline double concretize_upper(const AffineForm& f, const Box& nregion) {
    double acc = f.constant, mag = 0.0;
    for (std::size_t j = 0; j < f.coeffs.size(); ++j) {
        const double c = f.coeffs[j];
        if (c == 0.0) continue;
        acc += c > 0.0 ? c * nregion[j].hi : c * nregion[j].lo;
        mag += std::abs(c) * std::max(std::abs(nregion[j].lo), std::abs(nregion[j].hi));
    }
    if (mag > 0.0) acc += (mag + std::abs(f.constant)) * kOutwardSlack;
    return acc;
}

inline double concretize_lower(const AffineForm& f, const Box& nregion) {
    double acc = f.constant, mag = 0.0;
    for (std::size_t j = 0; j < f.coeffs.size(); ++j) {
        const double c = f.coeffs[j];
        if (c == 0.0) continue;
        acc += c > 0.0 ? c * nregion[j].lo : c * nregion[j].hi;
        mag += std::abs(c) * std::max(std::abs(nregion[j].lo), std::abs(nregion[j].hi));
    }
    if (mag > 0.0) acc -= (mag + std::abs(f.constant)) * kOutwardSlack;
    return acc;
}

/// Layer-by-layer interval propagation: affine image of intervals, lower
/// bounds clamped at zero across each ReLU. Sound for every input in the
/// region.
inline NeuronBounds concrete_bounds(const Network& subnet, const Box& region) {
    using namespace bound_detail;
    NeuronBounds bounds;
    std::vector<Interval> post = normalized_region(subnet, region);
    for (std::size_t i = 0; i < subnet.weight_layer_count(); ++i) {
        const Matrix& w = subnet.weights(i);
        const bool is_output = i + 1 == subnet.weight_layer_count();
        std::vector<NeuronBoundEntry> entries(w.rows());
        std::vector<Interval> next(w.rows());
        for (std::size_t r = 0; r < w.rows(); ++r) {
            const Interval pre = affine_image(w.row(r), subnet.biases(i)[r], post);
            entries[r].pre = pre;
            next[r] = is_output ? pre : Interval{std::max(0.0, pre.lo), std::max(0.0, pre.hi)};
        }
        if (is_output) {
            bounds.outputs = std::move(entries);
        } else {
            bounds.hidden.push_back(std::move(entries));
        }
        post = std::move(next);
    }
    return bounds;
}

/// Affine bound propagation with the triangle relaxation for unstable ReLUs:
/// stable-off neurons contribute the zero function, stable-on neurons pass
/// their forms through, unstable ones are bounded above by the chord and
/// below by zero. Unstable neurons whose pre-activation forms are exact and
/// identical are merged before relaxation, so equal-and-opposite weights
/// cancel exactly instead of accumulating relaxation gap.
///
/// The returned intervals are the elementwise intersection of interval
/// propagation and the concretized affine bounds, so they are never looser
/// than concrete_bounds.
inline NeuronBounds symbolic_bounds(const Network& subnet, const Box& region) {
    using namespace bound_detail;
    const Box nregion = normalized_region(subnet, region);
    const auto dims = nregion.size();

    std::vector<SourceState> sources(dims);
    for (std::size_t j = 0; j < dims; ++j) {
        AffineForm unit = AffineForm::zero(dims);
        unit.coeffs[j] = 1.0;
        sources[j] = {unit, unit, true, nregion[j], nregion[j], Phase::Linear};
    }

    NeuronBounds bounds;
    for (std::size_t i = 0; i < subnet.weight_layer_count(); ++i) {
        const Matrix& w = subnet.weights(i);
        const bool is_output = i + 1 == subnet.weight_layer_count();

        // Partition unstable sources into relaxation groups: neurons sharing
        // an exact pre-activation form share one group, everything else is a
        // singleton. Group count is small, so a linear scan beats hashing.
        struct Group {
            std::vector<std::size_t> members;
            AffineForm chord;
            bool mergeable = false;
        };
        std::vector<Group> groups;
        for (std::size_t k = 0; k < sources.size(); ++k) {
            const SourceState& src = sources[k];
            if (src.phase != Phase::Unstable) continue;
            const Interval pre_iv = src.pre;
            if (src.pre_exact) {
                bool merged = false;
                for (Group& g : groups) {
                    if (g.mergeable && sources[g.members.front()].pre_upper == src.pre_upper) {
                        g.members.push_back(k);
                        merged = true;
                        break;
                    }
                }
                if (!merged) {
                    groups.push_back(
                        {{k}, chord_of(src.pre_upper, pre_iv.lo, pre_iv.hi), true});
                }
            } else {
                groups.push_back({{k}, chord_of(src.pre_upper, pre_iv.lo, pre_iv.hi), false});
            }
        }

        std::vector<Interval> post_intervals(sources.size());
        for (std::size_t k = 0; k < sources.size(); ++k) post_intervals[k] = sources[k].post;

        std::vector<NeuronBoundEntry> entries(w.rows());
        std::vector<SourceState> next(w.rows());
        for (std::size_t r = 0; r < w.rows(); ++r) {
            const double bias = subnet.biases(i)[r];
            AffineForm up = AffineForm::zero(dims);
            AffineForm lo = AffineForm::zero(dims);
            bool exact = true;

            for (std::size_t k = 0; k < sources.size(); ++k) {
                const SourceState& src = sources[k];
                if (src.phase == Phase::Inactive || src.phase == Phase::Unstable) continue;
                const double wk = w.at(r, k);
                if (wk == 0.0) continue;
                add_scaled(up, wk, wk > 0.0 ? src.pre_upper : src.pre_lower);
                add_scaled(lo, wk, wk > 0.0 ? src.pre_lower : src.pre_upper);
                exact = exact && src.pre_exact;
            }

            for (const Group& g : groups) {
                double combined = 0.0;
                for (std::size_t k : g.members) combined += w.at(r, k);
                if (combined == 0.0) continue;  // exact groups cancel outright
                if (combined > 0.0) {
                    add_scaled(up, combined, g.chord);
                } else {
                    add_scaled(lo, combined, g.chord);
                }
                exact = false;
            }

            up.constant += bias;
            lo.constant += bias;

            const Interval from_intervals = affine_image(w.row(r), bias, post_intervals);
            const Interval from_forms = {concretize_lower(lo, nregion),
                                         concretize_upper(up, nregion)};
            const Interval pre = {std::max(from_intervals.lo, from_forms.lo),
                                  std::min(from_intervals.hi, from_forms.hi)};

            entries[r] = {pre, lo, up, true, exact};
            if (!is_output) {
                SourceState state;
                state.pre_lower = std::move(lo);
                state.pre_upper = std::move(up);
                state.pre_exact = exact;
                state.pre = pre;
                if (pre.hi <= 0.0) {
                    state.phase = Phase::Inactive;
                    state.pre_lower = AffineForm::zero(dims);
                    state.pre_upper = AffineForm::zero(dims);
                    state.pre_exact = true;
                    state.post = {0.0, 0.0};
                } else if (pre.lo >= 0.0) {
                    state.phase = Phase::Active;
                    state.post = pre;
                } else {
                    state.phase = Phase::Unstable;
                    state.post = {0.0, pre.hi};
                }
                next[r] = std::move(state);
            }
        }

        if (is_output) {
            bounds.outputs = std::move(entries);
        } else {
            bounds.hidden.push_back(std::move(entries));
            sources = std::move(next);
        }
    }
    return bounds;
}

}  // namespace nnsimplify
