// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "network.hpp"
#include "rational_lp.hpp"
#include "verifier.hpp"

namespace nnsimplify {

/// Enumeration bound for the exact procedure.
inline constexpr int kOracleMaxHiddenNeurons = 16;

/// Assignment of every hidden ReLU in a subnet to its linear regime:
/// active (output = pre-activation, pre >= 0) or inactive (output = 0,
/// pre <= 0). Layer-major order.
struct PhasePattern {
    std::vector<std::uint8_t> active;
};

struct ExactMax {
    Rational value;
    std::vector<Rational> argmax_normalized;
    std::vector<double> argmax;  // original units
    PhasePattern pattern;        // phases at the maximizer
};

namespace oracle_detail {

struct RationalAffine {
    std::vector<Rational> coeffs;
    Rational constant;
};

inline RationalAffine zero_affine(std::size_t dims) {
    return {std::vector<Rational>(dims, Rational(0)), Rational(0)};
}

struct RationalInterval {
    Rational lo, hi;
};

/// Exact interval of an affine form over a rational box.
inline RationalInterval interval_over_box(const RationalAffine& f,
                                          const std::vector<RationalInterval>& box) {
    RationalInterval out{f.constant, f.constant};
    for (std::size_t j = 0; j < f.coeffs.size(); ++j) {
        const Rational& c = f.coeffs[j];
        if (c == 0) continue;
        if (c > 0) {
            out.lo += c * box[j].lo;
            out.hi += c * box[j].hi;
        } else {
            out.lo += c * box[j].hi;
            out.hi += c * box[j].lo;
        }
    }
    return out;
}

inline std::vector<RationalInterval> normalized_rational_box(const Network& net,
                                                             const Box& box_orig) {
    const auto d = static_cast<std::size_t>(net.input_size());
    std::vector<RationalInterval> box(d);
    const Normalization& norm = net.normalization();
    for (std::size_t j = 0; j < d; ++j) {
        const Rational mean = to_rational(norm.input_means[j]);
        const Rational range = to_rational(norm.input_ranges[j]);
        box[j].lo = (to_rational(box_orig[j].lo) - mean) / range;
        box[j].hi = (to_rational(box_orig[j].hi) - mean) / range;
    }
    return box;
}

/// Exact forward pass at a normalized rational point; returns the network
/// outputs in original units.
inline std::vector<Rational> evaluate_rational(const Network& net,
                                               const std::vector<Rational>& xn) {
    std::vector<Rational> cur = xn;
    for (std::size_t i = 0; i < net.weight_layer_count(); ++i) {
        const Matrix& w = net.weights(i);
        std::vector<Rational> next(w.rows(), Rational(0));
        for (std::size_t r = 0; r < w.rows(); ++r) {
            Rational acc = 0;
            for (std::size_t c = 0; c < w.cols(); ++c) {
                if (w.at(r, c) != 0.0) acc += to_rational(w.at(r, c)) * cur[c];
            }
            acc += to_rational(net.biases(i)[r]);
            if (i + 1 < net.weight_layer_count() && acc < 0) acc = 0;
            next[r] = std::move(acc);
        }
        cur = std::move(next);
    }
    const Rational range = to_rational(net.normalization().output_range);
    const Rational mean = to_rational(net.normalization().output_mean);
    for (Rational& v : cur) v = v * range + mean;
    return cur;
}

struct DfsState {
    const Network* net = nullptr;
    std::size_t dims = 0;
    std::vector<RationalInterval> box;
    ConstraintSystem constraints{0};
    std::vector<std::vector<Rational>> witnesses;
    std::vector<std::uint8_t> phases;
    bool has_best = false;
    Rational best_value;
    std::vector<Rational> best_point;
    PhasePattern best_pattern;
};

inline RationalAffine compose_row(const Network& net, std::size_t layer, std::size_t row,
                                  const std::vector<RationalAffine>& posts, std::size_t dims) {
    RationalAffine f = zero_affine(dims);
    const Matrix& w = net.weights(layer);
    for (std::size_t c = 0; c < w.cols(); ++c) {
        const double wd = w.at(row, c);
        if (wd == 0.0) continue;
        const Rational wr = to_rational(wd);
        for (std::size_t j = 0; j < dims; ++j) f.coeffs[j] += wr * posts[c].coeffs[j];
        f.constant += wr * posts[c].constant;
    }
    f.constant += to_rational(net.biases(layer)[row]);
    return f;
}

inline LpSolution maximize_form(DfsState& st, const RationalAffine& f, bool negate) {
    std::vector<Rational> objective = f.coeffs;
    if (negate) {
        for (Rational& c : objective) c = -c;
    }
    LpSolution sol = maximize(st.constraints, objective);
    if (sol.status == LpStatus::Optimal) {
        sol.value += negate ? -f.constant : f.constant;
    }
    return sol;
}

inline void leaf(DfsState& st, const std::vector<RationalAffine>& posts) {
    const std::size_t out_layer = st.net->weight_layer_count() - 1;
    const RationalAffine f = compose_row(*st.net, out_layer, 0, posts, st.dims);
    const LpSolution sol = maximize_form(st, f, /*negate=*/false);
    if (sol.status != LpStatus::Optimal) return;  // cell emptied by degeneracy; skip
    if (!st.has_best || sol.value > st.best_value) {
        st.has_best = true;
        st.best_value = sol.value;
        st.best_point = sol.point;
        st.best_pattern.active = st.phases;
    }
}

inline void dfs_layer(DfsState& st, std::size_t layer, const std::vector<RationalAffine>& posts);

inline void dfs_neuron(DfsState& st, std::size_t layer, std::size_t k,
                       const std::vector<RationalAffine>& pres,
                       std::vector<RationalAffine>& posts) {
    const auto width = static_cast<std::size_t>(st.net->layer_size(layer + 1));
    if (k == width) {
        dfs_layer(st, layer + 1, posts);
        return;
    }
    const RationalAffine& f = pres[k];
    const RationalInterval box_range = interval_over_box(f, st.box);

    // Witness evidence: any stored feasible point decides a side for free.
    bool active_witnessed = false, inactive_witnessed = false;
    for (const auto& w : st.witnesses) {
        Rational v = f.constant;
        for (std::size_t j = 0; j < st.dims; ++j) v += f.coeffs[j] * w[j];
        if (v >= 0) active_witnessed = true;
        if (v <= 0) inactive_witnessed = true;
        if (active_witnessed && inactive_witnessed) break;
    }

    struct Side {
        bool active;
        bool box_possible;
        bool witnessed;
    };
    const Side sides[2] = {{true, box_range.hi >= 0, active_witnessed},
                           {false, box_range.lo <= 0, inactive_witnessed}};

    for (const Side& side : sides) {
        if (!side.box_possible) continue;
        std::vector<Rational> lp_point;
        if (!side.witnessed) {
            // The active side is feasible iff max f >= 0 over the current
            // cell, the inactive side iff min f <= 0, i.e. max(-f) >= 0.
            const LpSolution sol = maximize_form(st, f, /*negate=*/!side.active);
            if (sol.status != LpStatus::Optimal || sol.value < 0) continue;
            lp_point = sol.point;
        }

        // Enter the branch: phase constraint, filtered witnesses, post form.
        std::vector<Rational> row(st.dims);
        for (std::size_t j = 0; j < st.dims; ++j) {
            row[j] = side.active ? -f.coeffs[j] : f.coeffs[j];
        }
        st.constraints.add(std::move(row),
                           side.active ? f.constant : -f.constant);

        std::vector<std::vector<Rational>> saved_witnesses;
        saved_witnesses.swap(st.witnesses);
        for (const auto& w : saved_witnesses) {
            Rational v = f.constant;
            for (std::size_t j = 0; j < st.dims; ++j) v += f.coeffs[j] * w[j];
            if (side.active ? v >= 0 : v <= 0) st.witnesses.push_back(w);
        }
        if (!lp_point.empty()) st.witnesses.push_back(lp_point);
        if (st.witnesses.size() > 8) {
            st.witnesses.erase(st.witnesses.begin(),
                               st.witnesses.begin() + (st.witnesses.size() - 8));
        }

        st.phases.push_back(side.active ? 1 : 0);
        posts.push_back(side.active ? f : zero_affine(st.dims));
        dfs_neuron(st, layer, k + 1, pres, posts);
        posts.pop_back();
        st.phases.pop_back();
        st.witnesses.swap(saved_witnesses);
        st.constraints.pop();
    }
}

inline void dfs_layer(DfsState& st, std::size_t layer, const std::vector<RationalAffine>& posts) {
    if (layer + 1 == st.net->weight_layer_count()) {
        leaf(st, posts);
        return;
    }
    const auto width = static_cast<std::size_t>(st.net->layer_size(layer + 1));
    std::vector<RationalAffine> pres;
    pres.reserve(width);
    for (std::size_t r = 0; r < width; ++r) {
        pres.push_back(compose_row(*st.net, layer, r, posts, st.dims));
    }
    std::vector<RationalAffine> next_posts;
    next_posts.reserve(width);
    dfs_neuron(st, layer, 0, pres, next_posts);
}

}  // namespace oracle_detail

/// Exact maximum of a single-output subnet over its input box, by exhausting
/// ReLU phase patterns: each pattern induces a linear objective over a
/// polytope, solved with exact rational arithmetic. Pattern prefixes whose
/// polytope is empty are pruned, which cannot change the maximum. Throws
/// TooLarge beyond the enumeration bound.
inline ExactMax exact_max(const Network& subnet, const Box& box) {
    using namespace oracle_detail;
    if (subnet.output_size() != 1) {
        raise(ErrorKind::DimensionMismatch, "exact_max needs a single-output subnet");
    }
    if (box.size() != static_cast<std::size_t>(subnet.input_size())) {
        raise(ErrorKind::DimensionMismatch, "box dimension");
    }
    if (subnet.hidden_count() > kOracleMaxHiddenNeurons) {
        raise(ErrorKind::TooLarge,
              "subnet has " + std::to_string(subnet.hidden_count()) + " hidden neurons");
    }

    DfsState st;
    st.net = &subnet;
    st.dims = static_cast<std::size_t>(subnet.input_size());
    st.box = normalized_rational_box(subnet, box);
    st.constraints = ConstraintSystem(st.dims);
    for (std::size_t j = 0; j < st.dims; ++j) {
        std::vector<Rational> row(st.dims, Rational(0));
        row[j] = 1;
        st.constraints.add(row, st.box[j].hi);
        for (Rational& c : row) c = 0;
        row[j] = -1;
        st.constraints.add(std::move(row), -st.box[j].lo);
    }
    {
        std::vector<Rational> center(st.dims);
        for (std::size_t j = 0; j < st.dims; ++j) {
            center[j] = (st.box[j].lo + st.box[j].hi) / 2;
        }
        st.witnesses.push_back(std::move(center));
    }

    std::vector<RationalAffine> inputs;
    inputs.reserve(st.dims);
    for (std::size_t j = 0; j < st.dims; ++j) {
        RationalAffine unit = zero_affine(st.dims);
        unit.coeffs[j] = 1;
        inputs.push_back(std::move(unit));
    }
    dfs_layer(st, 0, inputs);

    // Every input belongs to some phase pattern, so a maximizer exists.
    if (!st.has_best) {
        raise(ErrorKind::InvalidConfig, "internal: no feasible phase pattern");
    }
    ExactMax out;
    out.value = st.best_value;
    out.argmax_normalized = st.best_point;
    out.pattern = st.best_pattern;
    const Normalization& norm = subnet.normalization();
    out.argmax.resize(st.dims);
    for (std::size_t j = 0; j < st.dims; ++j) {
        const Rational orig = st.best_point[j] * to_rational(norm.input_ranges[j]) +
                              to_rational(norm.input_means[j]);
        double x = to_double(orig);
        x = std::min(std::max(x, box[j].lo), box[j].hi);
        out.argmax[j] = x;
    }
    // The subnet output is the single pre-activation; denormalize exactly.
    out.value = out.value * to_rational(norm.output_range) + to_rational(norm.output_mean);
    return out;
}

/// Independent exact verdict for a query. Inexpensive exact shortcuts
/// (rational interval propagation for the Dead side, exact evaluation at
/// center and corners for the Alive side) answer most queries; borderline
/// ones fall through to full phase enumeration.
inline Verdict oracle_verdict(const VerificationQuery& query) {
    using namespace oracle_detail;
    const Network& subnet = query.subnet;
    if (subnet.output_size() != 1) {
        raise(ErrorKind::DimensionMismatch, "oracle needs a single-output subnet");
    }
    const bool epsilon_mode = query.mode.kind == QueryMode::Kind::Epsilon;
    const Rational threshold = epsilon_mode ? to_rational(query.mode.epsilon) : Rational(0);
    auto alive_value = [&](const Rational& v) {
        return epsilon_mode ? v >= threshold : v > 0;
    };

    Verdict verdict;
    const std::vector<RationalInterval> nbox = normalized_rational_box(subnet, subnet.input_box());
    const Rational out_range = to_rational(subnet.normalization().output_range);
    const Rational out_mean = to_rational(subnet.normalization().output_mean);

    // Dead shortcut: exact interval propagation.
    {
        std::vector<RationalInterval> cur = nbox;
        for (std::size_t i = 0; i < subnet.weight_layer_count(); ++i) {
            const Matrix& w = subnet.weights(i);
            std::vector<RationalInterval> next(w.rows());
            for (std::size_t r = 0; r < w.rows(); ++r) {
                RationalAffine f = zero_affine(w.cols());
                for (std::size_t c = 0; c < w.cols(); ++c) f.coeffs[c] = to_rational(w.at(r, c));
                f.constant = to_rational(subnet.biases(i)[r]);
                next[r] = interval_over_box(f, cur);
                if (i + 1 < subnet.weight_layer_count()) {
                    if (next[r].lo < 0) next[r].lo = 0;
                    if (next[r].hi < 0) next[r].hi = 0;
                }
            }
            cur = std::move(next);
        }
        const Rational hi = cur[0].hi * out_range + out_mean;
        if (epsilon_mode ? hi < threshold : hi <= 0) {
            verdict.kind = VerdictKind::Dead;
            return verdict;
        }
    }

    // Alive shortcut: exact evaluation at the center and corners.
    {
        const std::size_t d = nbox.size();
        std::vector<Rational> point(d);
        auto try_point = [&]() -> bool {
            const Rational value = evaluate_rational(subnet, point)[0];
            if (!alive_value(value)) return false;
            verdict.kind = VerdictKind::Alive;
            verdict.witness.resize(d);
            for (std::size_t j = 0; j < d; ++j) {
                const Rational orig =
                    point[j] * to_rational(subnet.normalization().input_ranges[j]) +
                    to_rational(subnet.normalization().input_means[j]);
                double x = to_double(orig);
                x = std::min(std::max(x, subnet.input_box()[j].lo), subnet.input_box()[j].hi);
                verdict.witness[j] = x;
            }
            return true;
        };
        for (std::size_t j = 0; j < d; ++j) point[j] = (nbox[j].lo + nbox[j].hi) / 2;
        if (try_point()) return verdict;
        const std::uint64_t corners = d >= 6 ? 64 : (std::uint64_t{1} << d);
        for (std::uint64_t mask = 0; mask < corners; ++mask) {
            for (std::size_t j = 0; j < d; ++j) {
                point[j] = (mask >> j) & 1 ? nbox[j].hi : nbox[j].lo;
            }
            if (try_point()) return verdict;
        }
    }

    const ExactMax result = exact_max(subnet, subnet.input_box());
    if (alive_value(result.value)) {
        verdict.kind = VerdictKind::Alive;
        verdict.witness = result.argmax;
    } else {
        verdict.kind = VerdictKind::Dead;
    }
    return verdict;
}

}  // namespace nnsimplify
