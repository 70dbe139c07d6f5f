#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace icid {

// Row-major dense matrix of doubles. Rows are observations, columns are
// dimensions. Kept deliberately minimal: the kernels below only ever need
// contiguous row access.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        Matrix m;
        for (const auto& r : rows) {
            if (m.cols_ == 0) {
                m.cols_ = r.size();
            } else if (r.size() != m.cols_) {
                throw std::invalid_argument("from_rows: ragged initializer");
            }
            m.data_.insert(m.data_.end(), r.begin(), r.end());
            ++m.rows_;
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }

    void push_row(std::span<const double> r) {
        if (cols_ == 0) cols_ = r.size();
        if (r.size() != cols_) throw std::invalid_argument("push_row: width mismatch");
        data_.insert(data_.end(), r.begin(), r.end());
        ++rows_;
    }

    // Copy of rows [begin, end).
    Matrix slice_rows(std::size_t begin, std::size_t end) const {
        if (begin > end || end > rows_) throw std::out_of_range("slice_rows: bad range");
        Matrix out(end - begin, cols_);
        std::copy(data_.begin() + begin * cols_, data_.begin() + end * cols_,
                  out.data_.begin());
        return out;
    }

    // Single-column copy as an n x 1 matrix.
    Matrix select_col(std::size_t j) const {
        if (j >= cols_) throw std::out_of_range("select_col: bad column");
        Matrix out(rows_, 1);
        for (std::size_t i = 0; i < rows_; ++i) out(i, 0) = (*this)(i, j);
        return out;
    }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace icid
