#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "glauber/state_space.hpp"

namespace glauber {

struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    double value;
};

// Real matrix on the 2^n state space, CSR storage, entries sorted by
// (row, col). Generator-shaped operators have at most n+1 nonzeros per row.
class SparseOperator {
public:
    SparseOperator() = default;

    static SparseOperator from_triplets(std::size_t dim, std::vector<Triplet> t,
                                        bool symmetric = false) {
        std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
            return std::tie(a.row, a.col) < std::tie(b.row, b.col);
        });
        SparseOperator op;
        op.dim_ = dim;
        op.symmetric_ = symmetric;
        op.row_ptr_.assign(dim + 1, 0);
        op.col_.reserve(t.size());
        op.val_.reserve(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i].row >= dim || t[i].col >= dim)
                throw std::invalid_argument("SparseOperator: index out of range");
            if (!op.col_.empty() && i > 0 && t[i].row == t[i - 1].row && t[i].col == t[i - 1].col) {
                op.val_.back() += t[i].value;  // merge duplicates
                continue;
            }
            op.row_ptr_[t[i].row + 1]++;
            op.col_.push_back(t[i].col);
            op.val_.push_back(t[i].value);
        }
        for (std::size_t r = 0; r < dim; ++r) op.row_ptr_[r + 1] += op.row_ptr_[r];
        return op;
    }

    static SparseOperator diagonal(const std::vector<double>& d) {
        std::vector<Triplet> t;
        t.reserve(d.size());
        for (std::uint32_t i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
        return from_triplets(d.size(), std::move(t), true);
    }

    static SparseOperator identity(std::size_t dim) {
        return diagonal(std::vector<double>(dim, 1.0));
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t nnz() const noexcept { return val_.size(); }
    bool symmetric_flag() const noexcept { return symmetric_; }
    void set_symmetric_flag(bool s) noexcept { symmetric_ = s; }

    double coeff(std::uint32_t r, std::uint32_t c) const {
        const auto lo = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
        const auto hi = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
        const auto it = std::lower_bound(lo, hi, c);
        if (it == hi || *it != c) return 0.0;
        return val_[static_cast<std::size_t>(it - col_.begin())];
    }

    void apply(const double* x, double* y) const {
        for (std::size_t r = 0; r < dim_; ++r) {
            double s = 0.0;
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += val_[k] * x[col_[k]];
            y[r] = s;
        }
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        if (x.size() != dim_) throw std::invalid_argument("SparseOperator::apply: size mismatch");
        std::vector<double> y(dim_);
        apply(x.data(), y.data());
        return y;
    }

    StateVector apply(const StateVector& v) const {
        StateVector out = v;
        out.amp = apply(v.amp);
        return out;
    }

    double quadratic_form(const std::vector<double>& x) const {
        const std::vector<double> y = apply(x);
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) s += x[i] * y[i];
        return s;
    }

    std::vector<std::vector<double>> to_dense() const {
        std::vector<std::vector<double>> m(dim_, std::vector<double>(dim_, 0.0));
        for (std::size_t r = 0; r < dim_; ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) m[r][col_[k]] = val_[k];
        return m;
    }

    // max |A_ij - A_ji| relative to the largest entry magnitude.
    double max_relative_asymmetry() const {
        double max_abs = 0.0;
        for (double v : val_) max_abs = std::max(max_abs, std::fabs(v));
        if (max_abs == 0.0) return 0.0;
        double worst = 0.0;
        for (std::size_t r = 0; r < dim_; ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                worst = std::max(worst,
                                 std::fabs(val_[k] - coeff(col_[k], static_cast<std::uint32_t>(r))));
        return worst / max_abs;
    }

    double max_abs_entry() const {
        double m = 0.0;
        for (double v : val_) m = std::max(m, std::fabs(v));
        return m;
    }

    static double max_abs_difference(const SparseOperator& a, const SparseOperator& b) {
        if (a.dim() != b.dim()) throw std::invalid_argument("max_abs_difference: dim mismatch");
        double worst = 0.0;
        for (std::size_t r = 0; r < a.dim_; ++r) {
            for (std::size_t k = a.row_ptr_[r]; k < a.row_ptr_[r + 1]; ++k)
                worst = std::max(worst, std::fabs(a.val_[k] -
                                                  b.coeff(static_cast<std::uint32_t>(r), a.col_[k])));
            for (std::size_t k = b.row_ptr_[r]; k < b.row_ptr_[r + 1]; ++k)
                worst = std::max(worst, std::fabs(b.val_[k] -
                                                  a.coeff(static_cast<std::uint32_t>(r), b.col_[k])));
        }
        return worst;
    }

    // Coordinate-triplet text format. Header: dim nnz; one "row col value"
    // line per entry, 17 significant digits.
    void write_coordinate(std::ostream& os) const {
        os << dim_ << ' ' << nnz() << '\n';
        os << std::setprecision(17);
        for (std::size_t r = 0; r < dim_; ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                os << r << ' ' << col_[k] << ' ' << val_[k] << '\n';
    }

    static SparseOperator read_coordinate(std::istream& is) {
        std::size_t dim = 0, nnz = 0;
        if (!(is >> dim >> nnz)) throw std::runtime_error("read_coordinate: bad header");
        std::vector<Triplet> t;
        t.reserve(nnz);
        for (std::size_t i = 0; i < nnz; ++i) {
            Triplet x{};
            if (!(is >> x.row >> x.col >> x.value))
                throw std::runtime_error("read_coordinate: truncated entry list");
            t.push_back(x);
        }
        return from_triplets(dim, std::move(t));
    }

    const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
    const std::vector<std::uint32_t>& cols() const noexcept { return col_; }
    const std::vector<double>& values() const noexcept { return val_; }

private:
    std::size_t dim_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::uint32_t> col_;
    std::vector<double> val_;
    bool symmetric_ = false;
};

}  // namespace glauber
