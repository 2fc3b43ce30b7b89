#include "rmp/matrix.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace rmp {

double Matrix2::max_abs() const noexcept {
    return std::max({std::abs(m00), std::abs(m01), std::abs(m10), std::abs(m11)});
}

double Matrix2::hilbert_schmidt() const noexcept {
    return std::hypot(std::hypot(m00, m01), std::hypot(m10, m11));
}

Matrix2 build_matrix(const EntryTriple& t) noexcept { return {t.a, t.b, t.c, t.b * t.c / t.a}; }

ProductAccumulator::ProductAccumulator(const EntryTriple& first) noexcept
    : head_ratio_(first.b / first.a), pending_(first) {}

void ProductAccumulator::step(const EntryTriple& next) noexcept {
    ++n_;
    if (!collapsed_) {
        const double cross = pending_.a + next.b * pending_.c / next.a;
        if (cross == 0.0)
            collapsed_ = true;
        else
            sum_.add(std::log(std::abs(cross)));
    }
    pending_ = next;
}

double ProductAccumulator::log_norm() const noexcept {
    if (collapsed_) return -kInf;
    // ||[[a, r a], [c, r c]]||_HS = sqrt(a^2 + c^2) * sqrt(1 + r^2)
    return sum_.value() + std::log(std::hypot(pending_.a, pending_.c)) + std::log(std::hypot(1.0, head_ratio_));
}

double direct_log_norm(std::span<const Matrix2> matrices) {
    assert(!matrices.empty());
    constexpr double kInf = std::numeric_limits<double>::infinity();
    Matrix2 product{1.0, 0.0, 0.0, 1.0};
    CompensatedSum log_scale;
    for (const Matrix2& y : matrices) {
        product = y * product;
        const double scale = product.max_abs();
        if (scale == 0.0) return -kInf;
        product = {product.m00 / scale, product.m01 / scale, product.m10 / scale, product.m11 / scale};
        log_scale.add(std::log(scale));
    }
    return log_scale.value() + std::log(product.hilbert_schmidt());
}

}  // namespace rmp
