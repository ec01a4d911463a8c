#pragma once

#include "emml/matrix.hpp"

namespace emml {

// Dense matrix products used by the network trainer. Each kernel has a plain
// serial reference and an OpenMP variant; the parallel variants split work so
// that every output element is accumulated in the same order as the serial
// code, hence results are bit-identical for any thread count.

// out[m x n] = a[m x k] * b[k x n]
void matmul_serial(const Matrix& a, const Matrix& b, Matrix& out);
void matmul(const Matrix& a, const Matrix& b, Matrix& out);

// out[k x n] = a^T[k x m] * b[m x n]   (a is m x k)
void matmul_at_b_serial(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out);

// out[m x k] = a[m x n] * b^T[n x k]   (b is k x n)
void matmul_a_bt_serial(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out);

} // namespace emml
