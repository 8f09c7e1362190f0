// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"

namespace nnsimplify {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Exact conversion; every finite double is a dyadic rational.
inline Rational to_rational(double x) {
    if (!std::isfinite(x)) raise(ErrorKind::InvalidConfig, "non-finite value");
    if (x == 0.0) return Rational(0);
    int exp = 0;
    const double mantissa = std::frexp(x, &exp);
    const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
    const int e2 = exp - 53;
    BigInt num = scaled;
    BigInt den = 1;
    if (e2 >= 0) {
        num <<= e2;
    } else {
        den <<= -e2;
    }
    return Rational(num, den);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Linear constraints rows[i] . x <= rhs[i] over num_vars free variables.
struct ConstraintSystem {
    std::size_t num_vars = 0;
    std::vector<std::vector<Rational>> rows;
    std::vector<Rational> rhs;

    explicit ConstraintSystem(std::size_t vars = 0) : num_vars(vars) {}

    void add(std::vector<Rational> row, Rational bound) {
        if (row.size() != num_vars) raise(ErrorKind::DimensionMismatch, "constraint row length");
        rows.push_back(std::move(row));
        rhs.push_back(std::move(bound));
    }

    void pop() {
        rows.pop_back();
        rhs.pop_back();
    }

    std::size_t size() const { return rows.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Rational value;
    std::vector<Rational> point;
};

namespace lp_detail {

/// Dense two-phase tableau simplex with Bland's rule. Exact arithmetic, so
/// optimality and feasibility answers are certificates, not approximations.
class Simplex {
public:
    Simplex(const ConstraintSystem& sys, const std::vector<Rational>& objective)
        : n_(sys.num_vars), m_(sys.rows.size()) {
        // Free variables are split as x = u - v with u, v >= 0.
        structural_ = 2 * n_;
        num_artificial_ = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (sys.rhs[i] < 0) ++num_artificial_;
        }
        cols_ = structural_ + m_ + num_artificial_;
        table_.assign(m_, std::vector<Rational>(cols_ + 1, Rational(0)));
        basis_.assign(m_, 0);

        std::size_t art = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            const bool negate = sys.rhs[i] < 0;
            const Rational sign = negate ? Rational(-1) : Rational(1);
            for (std::size_t j = 0; j < n_; ++j) {
                table_[i][j] = sign * sys.rows[i][j];
                table_[i][n_ + j] = -table_[i][j];
            }
            table_[i][structural_ + i] = negate ? Rational(-1) : Rational(1);
            table_[i][cols_] = sign * sys.rhs[i];
            if (negate) {
                const std::size_t col = structural_ + m_ + art++;
                table_[i][col] = 1;
                basis_[i] = col;
            } else {
                basis_[i] = structural_ + i;
            }
        }

        objective_.assign(cols_, Rational(0));
        for (std::size_t j = 0; j < n_; ++j) {
            objective_[j] = objective[j];
            objective_[n_ + j] = -objective[j];
        }
    }

    LpSolution solve() {
        if (num_artificial_ > 0) {
            std::vector<Rational> phase1(cols_, Rational(0));
            for (std::size_t j = structural_ + m_; j < cols_; ++j) phase1[j] = -1;
            if (!run(phase1, /*allow_artificial=*/true)) {
                return {LpStatus::Unbounded, 0, {}};  // cannot happen in phase 1
            }
            Rational value = 0;
            for (std::size_t r = 0; r < m_; ++r) value += phase1[basis_[r]] * table_[r][cols_];
            if (value != 0) return {LpStatus::Infeasible, 0, {}};
            evict_artificials();
        }
        if (!run(objective_, /*allow_artificial=*/false)) {
            return {LpStatus::Unbounded, 0, {}};
        }
        LpSolution out;
        out.status = LpStatus::Optimal;
        out.point.assign(n_, Rational(0));
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_) out.point[basis_[r]] += table_[r][cols_];
            else if (basis_[r] < structural_) out.point[basis_[r] - n_] -= table_[r][cols_];
        }
        out.value = 0;
        for (std::size_t r = 0; r < m_; ++r) out.value += objective_[basis_[r]] * table_[r][cols_];
        return out;
    }

private:
    bool run(const std::vector<Rational>& cvec, bool allow_artificial) {
        while (true) {
            // Reduced costs relative to the current basis; recomputed each
            // iteration, which is cheap at these sizes and avoids drift bugs.
            std::size_t entering = cols_;
            for (std::size_t j = 0; j < cols_; ++j) {
                if (!allow_artificial && j >= structural_ + m_) break;
                if (is_basic(j)) continue;
                Rational reduced = cvec[j];
                for (std::size_t r = 0; r < m_; ++r) {
                    if (cvec[basis_[r]] != 0) reduced -= cvec[basis_[r]] * table_[r][j];
                }
                if (reduced > 0) {
                    entering = j;  // Bland: first improving column
                    break;
                }
            }
            if (entering == cols_) return true;  // optimal

            std::size_t leaving = m_;
            Rational best_ratio = 0;
            for (std::size_t r = 0; r < m_; ++r) {
                if (table_[r][entering] <= 0) continue;
                const Rational ratio = table_[r][cols_] / table_[r][entering];
                if (leaving == m_ || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[r] < basis_[leaving])) {
                    leaving = r;
                    best_ratio = ratio;
                }
            }
            if (leaving == m_) return false;  // unbounded direction
            pivot(leaving, entering);
        }
    }

    void evict_artificials() {
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < structural_ + m_) continue;
            std::size_t col = cols_;
            for (std::size_t j = 0; j < structural_ + m_; ++j) {
                if (table_[r][j] != 0) {
                    col = j;
                    break;
                }
            }
            if (col != cols_) pivot(r, col);
            // Otherwise the row is redundant; the artificial stays basic at
            // level zero and is barred from re-entering in phase 2.
        }
    }

    bool is_basic(std::size_t col) const {
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] == col) return true;
        }
        return false;
    }

    void pivot(std::size_t row, std::size_t col) {
        const Rational inv = table_[row][col];
        for (auto& v : table_[row]) v /= inv;
        for (std::size_t r = 0; r < m_; ++r) {
            if (r == row || table_[r][col] == 0) continue;
            const Rational factor = table_[r][col];
            for (std::size_t j = 0; j <= cols_; ++j) {
                table_[r][j] -= factor * table_[row][j];
            }
        }
        basis_[row] = col;
    }

    std::size_t n_, m_, structural_, num_artificial_, cols_;
    std::vector<std::vector<Rational>> table_;
    std::vector<std::size_t> basis_;
    std::vector<Rational> objective_;
};

}  // namespace lp_detail

/// Exact maximum of objective . x over the constraint system.
inline LpSolution maximize(const ConstraintSystem& sys, const std::vector<Rational>& objective) {
    if (objective.size() != sys.num_vars) {
        raise(ErrorKind::DimensionMismatch, "objective length");
    }
    return lp_detail::Simplex(sys, objective).solve();
}

/// Fourier-Motzkin feasibility for a . x <= b. Exponential in the variable
/// count; meant for small systems and as an independent check of the simplex.
inline bool fourier_motzkin_feasible(const ConstraintSystem& sys) {
    std::vector<std::vector<Rational>> rows = sys.rows;
    std::vector<Rational> rhs = sys.rhs;
    for (std::size_t var = 0; var < sys.num_vars; ++var) {
        std::vector<std::vector<Rational>> next_rows;
        std::vector<Rational> next_rhs;
        std::vector<std::size_t> pos, neg;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i][var] > 0) {
                pos.push_back(i);
            } else if (rows[i][var] < 0) {
                neg.push_back(i);
            } else {
                next_rows.push_back(rows[i]);
                next_rhs.push_back(rhs[i]);
            }
        }
        for (std::size_t p : pos) {
            for (std::size_t q : neg) {
                std::vector<Rational> combined(sys.num_vars, Rational(0));
                for (std::size_t j = 0; j < sys.num_vars; ++j) {
                    combined[j] = rows[p][var] * rows[q][j] - rows[q][var] * rows[p][j];
                }
                next_rows.push_back(std::move(combined));
                next_rhs.push_back(rows[p][var] * rhs[q] - rows[q][var] * rhs[p]);
            }
        }
        rows = std::move(next_rows);
        rhs = std::move(next_rhs);
    }
    for (const Rational& b : rhs) {
        if (b < 0) return false;
    }
    return true;
}

/// Brute-force maximization by enumerating candidate vertices (all d-subsets
/// of tight constraints). Exponential; used to validate the simplex on small
/// instances. Returns nullopt when no feasible vertex exists.
inline std::optional<LpSolution> vertex_enumerate_max(const ConstraintSystem& sys,
                                                      const std::vector<Rational>& objective) {
    const std::size_t n = sys.num_vars;
    const std::size_t m = sys.rows.size();
    if (m < n) return std::nullopt;

    std::optional<LpSolution> best;
    std::vector<std::size_t> pick(n);
    for (std::size_t i = 0; i < n; ++i) pick[i] = i;

    auto advance = [&]() -> bool {
        std::size_t i = n;
        while (i-- > 0) {
            if (pick[i] + (n - i) < m + 0) {
                ++pick[i];
                for (std::size_t j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
                return true;
            }
        }
        return false;
    };

    do {
        // Solve the square system given by the picked tight constraints.
        std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1));
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) a[r][c] = sys.rows[pick[r]][c];
            a[r][n] = sys.rhs[pick[r]];
        }
        bool singular = false;
        for (std::size_t col = 0; col < n && !singular; ++col) {
            std::size_t piv = col;
            while (piv < n && a[piv][col] == 0) ++piv;
            if (piv == n) {
                singular = true;
                break;
            }
            std::swap(a[piv], a[col]);
            for (std::size_t r = 0; r < n; ++r) {
                if (r == col || a[r][col] == 0) continue;
                const Rational f = a[r][col] / a[col][col];
                for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
            }
        }
        if (singular) continue;
        std::vector<Rational> x(n);
        for (std::size_t r = 0; r < n; ++r) x[r] = a[r][n] / a[r][r];

        bool feasible = true;
        for (std::size_t i = 0; i < m && feasible; ++i) {
            Rational lhs = 0;
            for (std::size_t j = 0; j < n; ++j) lhs += sys.rows[i][j] * x[j];
            feasible = lhs <= sys.rhs[i];
        }
        if (!feasible) continue;

        Rational value = 0;
        for (std::size_t j = 0; j < n; ++j) value += objective[j] * x[j];
        if (!best || value > best->value) {
            best = LpSolution{LpStatus::Optimal, value, x};
        }
    } while (advance());
    return best;
}

}  // namespace nnsimplify
