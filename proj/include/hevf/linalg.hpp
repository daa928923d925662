// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>

#include "hevf/ckks.hpp"

namespace hevf {

// Square plaintext matrix stored as generalized cyclic diagonals,
// diagonals[i][j] = entries[j][(j+i) mod d].
class ProjectionMatrix {
  public:
    ProjectionMatrix() = default;
    // Takes the matrix itself.
    explicit ProjectionMatrix(std::vector<std::vector<double>> entries);

    static ProjectionMatrix identity(uint32_t dim);
    // Q = P P^T from a (possibly rectangular, rows x dim) projection P;
    // the result is checked positive semidefinite.
    static ProjectionMatrix from_projection(const std::vector<std::vector<double>>& p);

    uint32_t dim() const { return dim_; }
    uint32_t padded_dim() const { return padded_; }
    double entry(uint32_t r, uint32_t c) const { return entries_[r][c]; }
    const std::vector<std::vector<double>>& entries() const { return entries_; }

    // Diagonal i zero-extended to the padded dimension.
    const std::vector<double>& diagonal(uint32_t i) const { return diagonals_[i]; }

    bool is_identity() const;

  private:
    uint32_t dim_ = 0;
    uint32_t padded_ = 0;
    std::vector<std::vector<double>> entries_;
    std::vector<std::vector<double>> diagonals_;
};

uint32_t next_pow2(uint32_t v);

// Ciphertext carrying a length-d real vector in its leading slots,
// zero-padded; n is the padded power-of-two block size.
struct PackedVector {
    Ciphertext ct;
    uint32_t logical_dim = 0;
    uint32_t padded_dim = 0;
};

PackedVector pack(const std::vector<double>& v, const Evaluator& ev, const PublicKey& pk, Rng& rng,
                  double scale = 0.0, int level = -1);

// Encrypted linear algebra over an Evaluator (which supplies keys).
namespace linalg {

// Tiles the leading n-slot block across the whole slot vector by repeated
// rotate-and-add doubling, making every rotation by k < n behave cyclically
// within each block. Consumes no level.
Ciphertext extend_periodic(const Evaluator& ev, const Ciphertext& ct, uint32_t n);

// w^T Q as a slot vector; w must be periodically extended (or get extended
// here when tile=true). diag_scale is a public constant folded into the
// diagonal encodings. Consumes exactly one level.
Ciphertext matvec_diag(const Evaluator& ev, const ProjectionMatrix& q, const Ciphertext& w, uint32_t n,
                       double diag_scale = 1.0, bool tile = true);
PackedVector matvec_diag(const Evaluator& ev, const ProjectionMatrix& q, const PackedVector& w);

// Window sums: output slot j = sum of input slots j..j+n-1. Consumes no
// level; n must be a power of two.
Ciphertext rotate_sum(const Evaluator& ev, const Ciphertext& ct, uint32_t n);

// <a, b> in slot 0 (and in every block-start slot for block-packed inputs):
// one Hadamard multiply + rescale, then log2(n) rotate-adds. Consumes
// exactly one level. Levels must match; scales multiply as tracked.
Ciphertext dot_core(const Evaluator& ev, const Ciphertext& a, const Ciphertext& b, uint32_t n);

// Spec'd entry point: additionally requires equal scales.
Ciphertext dot_rotate_sum(const Evaluator& ev, const PackedVector& a, const PackedVector& b);

// Replicates slot 0 across the first n slots (masks slot 0, then doubles).
// Consumes one level for the mask multiplication.
Ciphertext broadcast_scalar(const Evaluator& ev, const Ciphertext& ct, uint32_t n);

}  // namespace linalg
}  // namespace hevf
