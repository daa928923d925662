// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <list>
#include <vector>

#include "hevf/modulus.hpp"

namespace hevf {

// Precomputed tables for the negacyclic NTT over Z_q[X]/(X^N+1).
// Twiddles are powers of a primitive 2N-th root of unity stored in
// bit-reversed order, with Shoup companions for fast multiplication.
class NttTables {
  public:
    NttTables() = default;
    NttTables(uint32_t degree, const Modulus& q);

    const Modulus& modulus() const { return q_; }
    uint32_t degree() const { return n_; }

    // In-place: coefficient order -> NTT (bit-reversed evaluation) order.
    void forward(uint64_t* data) const;
    // In-place inverse; output in coefficient order.
    void inverse(uint64_t* data) const;

  private:
    Modulus q_;
    uint32_t n_ = 0;
    uint32_t log_n_ = 0;
    std::vector<uint64_t> root_powers_;       // psi^bitrev(i)
    std::vector<uint64_t> root_powers_sh_;
    std::vector<uint64_t> inv_root_powers_;   // psi^-bitrev(i) layout for GS
    std::vector<uint64_t> inv_root_powers_sh_;
    uint64_t inv_n_ = 0;
    uint64_t inv_n_sh_ = 0;
};

// Lazily-built table cache, one NTT table per modulus at a fixed degree.
// Read-only after warm-up; warm explicitly before sharing across threads.
class TableCache {
  public:
    explicit TableCache(uint32_t degree = 0) : degree_(degree) {}

    uint32_t degree() const { return degree_; }

    const NttTables& get(const Modulus& q) const {
        for (const auto& t : tables_)
            if (t.modulus() == q) return t;
        tables_.emplace_back(degree_, q);
        return tables_.back();
    }

    void warm(const std::vector<Modulus>& moduli) const {
        for (const auto& q : moduli) get(q);
    }

  private:
    uint32_t degree_;
    mutable std::list<NttTables> tables_;  // list: references stay valid as the cache grows
};

}  // namespace hevf
