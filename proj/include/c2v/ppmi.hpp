// Count-based baseline: symmetric windowed co-occurrence counts, positive
// pointwise mutual information, and a truncated SVD (dense Jacobi path for
// small vocabularies, randomized subspace iteration for large ones).
// Word vectors are U * Sigma^(1/2).
#pragma once

#include <cstdint>
#include <vector>

#include "c2v/model.hpp"

namespace c2v {

// Symmetric sparse matrix in CSR form (both triangles stored).
struct SparseSym {
  size_t n = 0;
  std::vector<size_t> row_ptr;
  std::vector<uint32_t> col;
  std::vector<double> val;

  size_t nnz() const { return col.size(); }
};

SparseSym cooccurrence_counts(const std::vector<uint32_t>& ids, uint32_t vocab_size,
                              uint32_t window);

// In place: counts -> max(0, log(p(w,c) / (p(w) p(c)))), zeros removed.
void ppmi_transform(SparseSym& m);

struct SvdResult {
  Mat u;      // n x k, left singular vectors
  Vec sigma;  // k singular values, descending
};

// Rank-k factorization of a symmetric sparse matrix. Uses a dense Jacobi
// eigendecomposition for small n and randomized subspace iteration with
// 10 power steps and oversampling 16 otherwise. Throws when k exceeds the
// attainable rank bound min(n, n) = n.
SvdResult truncated_sym_svd(const SparseSym& m, uint32_t k, uint64_t seed);

// Jacobi eigendecomposition of a small dense symmetric matrix; eigenpairs
// sorted by descending |eigenvalue|. Exposed for tests.
void jacobi_eigen_sym(Mat a, Vec& eigenvalues, Mat& eigenvectors);

// Fills model.target_table with the PPMI-SVD vectors.
void ppmi_svd_train(ModelParams& model, const std::vector<uint32_t>& ids);

}  // namespace c2v
