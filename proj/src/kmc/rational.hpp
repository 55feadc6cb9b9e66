#pragma once

#include <gmpxx.h>

#include <initializer_list>
#include <optional>
#include <vector>

namespace kmc {

using Rat = mpq_class;
using RatVec = std::vector<Rat>;

// Dense matrix over the rationals. Small sizes only; everything is exact.
struct QMat {
    int rows = 0;
    int cols = 0;
    std::vector<Rat> a;

    QMat() = default;
    QMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

    static QMat identity(int n);
    static QMat zero(int r, int c) { return QMat(r, c); }

    Rat& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Rat& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    QMat operator+(const QMat& o) const;
    QMat operator-(const QMat& o) const;
    QMat operator*(const QMat& o) const;
    QMat scaled(const Rat& s) const;
    QMat transpose() const;
    QMat kron(const QMat& o) const;

    bool operator==(const QMat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
    bool is_zero() const;
};

QMat commutator(const QMat& x, const QMat& y);
RatVec mat_vec(const QMat& m, const RatVec& v);

int rank(QMat m);
std::vector<RatVec> kernel(QMat m);
std::optional<RatVec> solve(QMat m, RatVec b);
std::optional<QMat> inverse(const QMat& m);

}  // namespace kmc
