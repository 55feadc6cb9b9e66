#include "kmc/rational.hpp"

#include <stdexcept>

namespace kmc {

QMat QMat::identity(int n) {
    QMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

QMat QMat::operator+(const QMat& o) const {
    if (rows != o.rows || cols != o.cols) throw std::invalid_argument("shape mismatch");
    QMat r(rows, cols);
    for (size_t k = 0; k < a.size(); ++k) r.a[k] = a[k] + o.a[k];
    return r;
}

QMat QMat::operator-(const QMat& o) const {
    if (rows != o.rows || cols != o.cols) throw std::invalid_argument("shape mismatch");
    QMat r(rows, cols);
    for (size_t k = 0; k < a.size(); ++k) r.a[k] = a[k] - o.a[k];
    return r;
}

QMat QMat::operator*(const QMat& o) const {
    if (cols != o.rows) throw std::invalid_argument("shape mismatch");
    QMat r(rows, o.cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k) {
            const Rat& x = (*this)(i, k);
            if (x == 0) continue;
            for (int j = 0; j < o.cols; ++j) {
                const Rat& y = o(k, j);
                if (y != 0) r(i, j) += x * y;
            }
        }
    return r;
}

QMat QMat::scaled(const Rat& s) const {
    QMat r(rows, cols);
    for (size_t k = 0; k < a.size(); ++k) r.a[k] = a[k] * s;
    return r;
}

QMat QMat::transpose() const {
    QMat r(cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) r(j, i) = (*this)(i, j);
    return r;
}

QMat QMat::kron(const QMat& o) const {
    QMat r(rows * o.rows, cols * o.cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const Rat& x = (*this)(i, j);
            if (x == 0) continue;
            for (int p = 0; p < o.rows; ++p)
                for (int q = 0; q < o.cols; ++q) {
                    const Rat& y = o(p, q);
                    if (y != 0) r(i * o.rows + p, j * o.cols + q) = x * y;
                }
        }
    return r;
}

bool QMat::is_zero() const {
    for (const auto& x : a)
        if (x != 0) return false;
    return true;
}

QMat commutator(const QMat& x, const QMat& y) { return x * y - y * x; }

RatVec mat_vec(const QMat& m, const RatVec& v) {
    if (static_cast<int>(v.size()) != m.cols) throw std::invalid_argument("shape mismatch");
    RatVec r(m.rows, Rat(0));
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j)
            if (m(i, j) != 0 && v[j] != 0) r[i] += m(i, j) * v[j];
    return r;
}

namespace {

// Row echelon in place; returns pivot columns.
std::vector<int> echelon(QMat& m) {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < m.cols && row < m.rows; ++col) {
        int p = -1;
        for (int i = row; i < m.rows; ++i)
            if (m(i, col) != 0) { p = i; break; }
        if (p < 0) continue;
        if (p != row)
            for (int j = 0; j < m.cols; ++j) std::swap(m(row, j), m(p, j));
        Rat inv = 1 / m(row, col);
        for (int j = col; j < m.cols; ++j) m(row, j) *= inv;
        for (int i = 0; i < m.rows; ++i) {
            if (i == row || m(i, col) == 0) continue;
            Rat f = m(i, col);
            for (int j = col; j < m.cols; ++j) m(i, j) -= f * m(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace

int rank(QMat m) { return static_cast<int>(echelon(m).size()); }

std::vector<RatVec> kernel(QMat m) {
    int n = m.cols;
    auto pivots = echelon(m);
    std::vector<bool> is_pivot(n, false);
    for (int c : pivots) is_pivot[c] = true;
    std::vector<RatVec> basis;
    for (int free = 0; free < n; ++free) {
        if (is_pivot[free]) continue;
        RatVec v(n, Rat(0));
        v[free] = 1;
        for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(static_cast<int>(r), free);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<RatVec> solve(QMat m, RatVec b) {
    if (static_cast<int>(b.size()) != m.rows) throw std::invalid_argument("shape mismatch");
    QMat aug(m.rows, m.cols + 1);
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) aug(i, j) = m(i, j);
        aug(i, m.cols) = b[i];
    }
    auto pivots = echelon(aug);
    for (int c : pivots)
        if (c == m.cols) return std::nullopt;
    RatVec x(m.cols, Rat(0));
    for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(static_cast<int>(r), m.cols);
    return x;
}

std::optional<QMat> inverse(const QMat& m) {
    if (m.rows != m.cols) return std::nullopt;
    int n = m.rows;
    QMat aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = 1;
    }
    auto pivots = echelon(aug);
    if (static_cast<int>(pivots.size()) != n) return std::nullopt;
    if (n > 0 && pivots[n - 1] != n - 1) return std::nullopt;
    QMat r(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = aug(i, n + j);
    return r;
}

}  // namespace kmc
