// SPDX-License-Identifier: Apache-2.0
#include "hevf/linalg.hpp"

#include <cmath>

namespace hevf {

uint32_t next_pow2(uint32_t v) {
    uint32_t n = 1;
    while (n < v) n <<= 1;
    return n;
}

ProjectionMatrix::ProjectionMatrix(std::vector<std::vector<double>> entries) {
    dim_ = uint32_t(entries.size());
    if (dim_ == 0) throw param_error("projection matrix: empty");
    for (const auto& row : entries)
        if (row.size() != dim_) throw param_error("projection matrix: not square");
    padded_ = next_pow2(dim_);
    entries_ = std::move(entries);
    diagonals_.assign(dim_, std::vector<double>(padded_, 0.0));
    for (uint32_t i = 0; i < dim_; ++i)
        for (uint32_t j = 0; j < dim_; ++j) diagonals_[i][j] = entries_[j][(j + i) % dim_];
}

ProjectionMatrix ProjectionMatrix::identity(uint32_t dim) {
    std::vector<std::vector<double>> e(dim, std::vector<double>(dim, 0.0));
    for (uint32_t i = 0; i < dim; ++i) e[i][i] = 1.0;
    return ProjectionMatrix(std::move(e));
}

ProjectionMatrix ProjectionMatrix::from_projection(const std::vector<std::vector<double>>& p) {
    if (p.empty() || p[0].empty()) throw param_error("projection matrix: empty P");
    size_t rows = p.size(), dim = p[0].size();
    for (const auto& row : p)
        if (row.size() != dim) throw param_error("projection matrix: ragged P");
    std::vector<std::vector<double>> q(dim, std::vector<double>(dim, 0.0));
    for (size_t i = 0; i < dim; ++i)
        for (size_t j = 0; j < dim; ++j) {
            double s = 0.0;
            for (size_t r = 0; r < rows; ++r) s += p[r][i] * p[r][j];
            q[i][j] = s;
        }
    // PSD probe: x^T Q x = |P x|^2 >= 0 must hold for random x.
    Rng rng(0x9d5f);
    for (int t = 0; t < 8; ++t) {
        std::vector<double> x(dim);
        for (auto& v : x) v = 2.0 * rng.uniform01() - 1.0;
        double acc = 0.0;
        for (size_t i = 0; i < dim; ++i)
            for (size_t j = 0; j < dim; ++j) acc += x[i] * q[i][j] * x[j];
        if (acc < -1e-9) throw param_error("projection matrix: not positive semidefinite");
    }
    return ProjectionMatrix(std::move(q));
}

bool ProjectionMatrix::is_identity() const {
    for (uint32_t i = 0; i < dim_; ++i)
        for (uint32_t j = 0; j < dim_; ++j)
            if (std::abs(entries_[i][j] - (i == j ? 1.0 : 0.0)) > 1e-15) return false;
    return true;
}

PackedVector pack(const std::vector<double>& v, const Evaluator& ev, const PublicKey& pk, Rng& rng,
                  double scale, int level) {
    if (v.size() > ev.context().slot_count()) throw param_error("pack: vector longer than slot count");
    PackedVector out;
    out.logical_dim = uint32_t(v.size());
    out.padded_dim = next_pow2(out.logical_dim);
    out.ct = ev.encrypt(v, pk, rng, scale, level);
    return out;
}

namespace linalg {

Ciphertext extend_periodic(const Evaluator& ev, const Ciphertext& ct, uint32_t n) {
    const uint32_t slots = ev.context().slot_count();
    if (n == 0 || (n & (n - 1)) != 0) throw param_error("extend_periodic: n must be a power of two");
    if (n > slots) throw param_error("extend_periodic: block larger than slot count");
    Ciphertext cur = ct;
    for (uint32_t filled = n; filled < slots; filled <<= 1)
        cur = ev.add(cur, ev.rotate(cur, slots - filled));
    return cur;
}

Ciphertext matvec_diag(const Evaluator& ev, const ProjectionMatrix& q, const Ciphertext& w, uint32_t n,
                       double diag_scale, bool tile) {
    if (q.padded_dim() > n) throw param_error("matvec: matrix dimension exceeds block size");
    if (w.level < 1) throw param_error("level exhausted: matvec needs at least one level");
    const auto& ctx = ev.context();
    const uint32_t slots = ctx.slot_count();
    const double plain_scale = ctx.params().delta();

    Ciphertext cur = tile ? extend_periodic(ev, w, n) : w;
    Ciphertext acc;
    bool have = false;
    std::vector<double> diag(slots);
    for (uint32_t k = 0; k < n; ++k) {
        if (k > 0) cur = ev.rotate(cur, 1);
        // Diagonal k of the zero-padded n x n matrix, tiled across all blocks.
        bool all_zero = true;
        for (uint32_t j = 0; j < n; ++j) {
            uint32_t col = (j + k) % n;
            double v = (j < q.dim() && col < q.dim()) ? q.entry(j, col) * diag_scale : 0.0;
            diag[j] = v;
            all_zero &= (v == 0.0);
        }
        if (all_zero) continue;
        for (uint32_t j = n; j < slots; ++j) diag[j] = diag[j % n];
        Ciphertext term = ev.mul_plain(cur, diag, plain_scale);
        if (!have) {
            acc = std::move(term);
            have = true;
        } else {
            acc = ev.add(acc, term);
        }
    }
    if (!have) throw param_error("matvec: zero matrix");
    return ev.rescale(acc);
}

PackedVector matvec_diag(const Evaluator& ev, const ProjectionMatrix& q, const PackedVector& w) {
    if (q.dim() != w.logical_dim) throw param_error("matvec: dimension mismatch");
    PackedVector out;
    out.logical_dim = w.logical_dim;
    out.padded_dim = w.padded_dim;
    out.ct = matvec_diag(ev, q, w.ct, w.padded_dim);
    return out;
}

Ciphertext rotate_sum(const Evaluator& ev, const Ciphertext& ct, uint32_t n) {
    if (n == 0 || (n & (n - 1)) != 0) throw param_error("rotate_sum: n must be a power of two");
    Ciphertext cur = ct;
    for (uint32_t step = n >> 1; step >= 1; step >>= 1) cur = ev.add(cur, ev.rotate(cur, step));
    return cur;
}

Ciphertext dot_core(const Evaluator& ev, const Ciphertext& a, const Ciphertext& b, uint32_t n) {
    return rotate_sum(ev, ev.rescale(ev.mul(a, b)), n);
}

Ciphertext dot_rotate_sum(const Evaluator& ev, const PackedVector& a, const PackedVector& b) {
    if (a.padded_dim != b.padded_dim) throw param_error("dot: padded dimensions differ");
    double rel = std::abs(a.ct.scale - b.ct.scale) / std::max(a.ct.scale, b.ct.scale);
    if (rel > 1e-9) throw param_error("dot: scale mismatch");
    return dot_core(ev, a.ct, b.ct, a.padded_dim);
}

Ciphertext broadcast_scalar(const Evaluator& ev, const Ciphertext& ct, uint32_t n) {
    if (n == 0 || (n & (n - 1)) != 0) throw param_error("broadcast: n must be a power of two");
    const uint32_t slots = ev.context().slot_count();
    std::vector<double> mask(slots, 0.0);
    mask[0] = 1.0;
    Ciphertext cur = ev.rescale(ev.mul_plain(ct, mask));
    for (uint32_t step = 1; step < n; step <<= 1) cur = ev.add(cur, ev.rotate(cur, slots - step));
    return cur;
}

}  // namespace linalg
}  // namespace hevf
