#include "emml/kernels.hpp"

#include "emml/parallel.hpp"

namespace emml {

namespace {

void check_mul(const Matrix& a, const Matrix& b, std::size_t ak, std::size_t bk) {
    if (ak != bk) throw DimensionMismatch("matmul: inner dimensions differ");
    (void)a;
    (void)b;
}

// One output row of a*b: out_row[j] = sum_k a_row[k] * b[k][j], k ascending.
inline void mul_row(std::span<const double> a_row, const Matrix& b, std::span<double> out_row) {
    const std::size_t k_dim = b.rows();
    const std::size_t n = b.cols();
    for (std::size_t j = 0; j < n; ++j) out_row[j] = 0.0;
    for (std::size_t k = 0; k < k_dim; ++k) {
        const double av = a_row[k];
        auto b_row = b.row(k);
        for (std::size_t j = 0; j < n; ++j) out_row[j] += av * b_row[j];
    }
}

} // namespace

void matmul_serial(const Matrix& a, const Matrix& b, Matrix& out) {
    check_mul(a, b, a.cols(), b.rows());
    out = Matrix(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) mul_row(a.row(i), b, out.row(i));
}

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
    check_mul(a, b, a.cols(), b.rows());
    out = Matrix(a.rows(), b.cols());
    Matrix* out_ptr = &out;
    const Matrix* a_ptr = &a;
    const Matrix* b_ptr = &b;
    parallel_for(a.rows(), [=](std::size_t i) { mul_row(a_ptr->row(i), *b_ptr, out_ptr->row(i)); });
}

namespace {

// Row r of a^T*b: out_row[j] = sum_s a[s][r] * b[s][j], s ascending.
inline void at_b_row(const Matrix& a, const Matrix& b, std::size_t r, std::span<double> out_row) {
    const std::size_t m = a.rows();
    const std::size_t n = b.cols();
    for (std::size_t j = 0; j < n; ++j) out_row[j] = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
        const double av = a.at(s, r);
        auto b_row = b.row(s);
        for (std::size_t j = 0; j < n; ++j) out_row[j] += av * b_row[j];
    }
}

// Row i of a*b^T: out_row[j] = dot(a.row(i), b.row(j)), inner index ascending.
inline void a_bt_row(const Matrix& a, const Matrix& b, std::size_t i, std::span<double> out_row) {
    const std::size_t n = a.cols();
    auto a_row = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
        auto b_row = b.row(j);
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += a_row[k] * b_row[k];
        out_row[j] = acc;
    }
}

} // namespace

void matmul_at_b_serial(const Matrix& a, const Matrix& b, Matrix& out) {
    check_mul(a, b, a.rows(), b.rows());
    out = Matrix(a.cols(), b.cols());
    for (std::size_t r = 0; r < a.cols(); ++r) at_b_row(a, b, r, out.row(r));
}

void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out) {
    check_mul(a, b, a.rows(), b.rows());
    out = Matrix(a.cols(), b.cols());
    Matrix* out_ptr = &out;
    const Matrix* a_ptr = &a;
    const Matrix* b_ptr = &b;
    parallel_for(a.cols(), [=](std::size_t r) { at_b_row(*a_ptr, *b_ptr, r, out_ptr->row(r)); });
}

void matmul_a_bt_serial(const Matrix& a, const Matrix& b, Matrix& out) {
    check_mul(a, b, a.cols(), b.cols());
    out = Matrix(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) a_bt_row(a, b, i, out.row(i));
}

void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out) {
    check_mul(a, b, a.cols(), b.cols());
    out = Matrix(a.rows(), b.rows());
    Matrix* out_ptr = &out;
    const Matrix* a_ptr = &a;
    const Matrix* b_ptr = &b;
    parallel_for(a.rows(), [=](std::size_t i) { a_bt_row(*a_ptr, *b_ptr, i, out_ptr->row(i)); });
}

} // namespace emml
