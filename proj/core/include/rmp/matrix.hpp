#pragma once

#include <limits>
#include <span>

#include "rmp/distributions.hpp"
#include "rmp/stats.hpp"

namespace rmp {

struct Matrix2 {
    double m00 = 0.0, m01 = 0.0;
    double m10 = 0.0, m11 = 0.0;

    friend Matrix2 operator*(const Matrix2& x, const Matrix2& y) noexcept {
        return {x.m00 * y.m00 + x.m01 * y.m10, x.m00 * y.m01 + x.m01 * y.m11,
                x.m10 * y.m00 + x.m11 * y.m10, x.m10 * y.m01 + x.m11 * y.m11};
    }

    double determinant() const noexcept { return m00 * m11 - m01 * m10; }
    double max_abs() const noexcept;
    double hilbert_schmidt() const noexcept;
};

// [[a, b], [c, bc/a]]
Matrix2 build_matrix(const EntryTriple& t) noexcept;

/// Running state for log||S_n|| with S_n = Y_n ... Y_1, using the rank-one
/// representation S_n = beta_n [[a_n, r a_n], [c_n, r c_n]] where r = b_1/a_1
/// and beta_n is the product of the cross terms a_j + b_{j+1} c_j / a_{j+1}.
/// Only log|beta_n| is kept; the sign never affects the norm.
class ProductAccumulator {
public:
    explicit ProductAccumulator(const EntryTriple& first) noexcept;

    void step(const EntryTriple& next) noexcept;

    // log of the Hilbert-Schmidt norm of S_n; -inf once any cross term vanished.
    double log_norm() const noexcept;

    std::size_t count() const noexcept { return n_; }
    double sum_log_terms() const noexcept { return collapsed_ ? -kInf : sum_.value(); }
    double head_ratio() const noexcept { return head_ratio_; }
    double tail_a() const noexcept { return pending_.a; }
    double tail_c() const noexcept { return pending_.c; }
    const EntryTriple& pending() const noexcept { return pending_; }
    bool collapsed() const noexcept { return collapsed_; }

private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    std::size_t n_ = 1;
    CompensatedSum sum_;
    bool collapsed_ = false;
    double head_ratio_;
    EntryTriple pending_;
};

// Naive Y_n ... Y_1 with max-abs rescaling after every factor. Oracle for
// ProductAccumulator. Returns -inf if the product becomes the zero matrix.
double direct_log_norm(std::span<const Matrix2> matrices);

}  // namespace rmp
