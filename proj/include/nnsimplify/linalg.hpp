// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace nnsimplify {

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return lo + 0.5 * (hi - lo); }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool operator==(const Interval&) const = default;
};

/// Axis-aligned box, one interval per input dimension.
using Box = std::vector<Interval>;

/// Dense row-major matrix. Rows index the destination layer, columns the
/// source layer, so row r is the incoming weight vector of destination
/// neuron r.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t r, std::size_t c) {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }
    double at(std::size_t r, std::size_t c) const {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }

    std::span<const double> row(std::size_t r) const {
        assert(r < rows_);
        return {data_.data() + r * cols_, cols_};
    }
    std::span<double> row(std::size_t r) {
        assert(r < rows_);
        return {data_.data() + r * cols_, cols_};
    }

    /// Matrix with row r deleted.
    Matrix without_row(std::size_t r) const {
        assert(r < rows_);
        Matrix out(rows_ - 1, cols_);
        for (std::size_t i = 0, o = 0; i < rows_; ++i) {
            if (i == r) continue;
            for (std::size_t c = 0; c < cols_; ++c) out.at(o, c) = at(i, c);
            ++o;
        }
        return out;
    }

    /// Matrix with column c deleted.
    Matrix without_col(std::size_t c) const {
        assert(c < cols_);
        Matrix out(rows_, cols_ - 1);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t i = 0, o = 0; i < cols_; ++i) {
                if (i == c) continue;
                out.at(r, o++) = at(r, i);
            }
        }
        return out;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace nnsimplify
