// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace hevf {

// Error categories map 1:1 onto CLI exit codes.
enum class errc : int { param = 2, crypto = 3, io = 4, protocol = 5 };

class error : public std::runtime_error {
  public:
    error(errc c, const std::string& msg) : std::runtime_error(msg), code_(c) {}
    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

struct param_error : error {
    explicit param_error(const std::string& m) : error(errc::param, m) {}
};
struct crypto_error : error {
    explicit crypto_error(const std::string& m) : error(errc::crypto, m) {}
};
struct io_error : error {
    explicit io_error(const std::string& m) : error(errc::io, m) {}
};
struct protocol_error : error {
    explicit protocol_error(const std::string& m) : error(errc::protocol, m) {}
};

// Deterministic RNG. Gaussian draws are hand-rolled (Box-Muller) so that a
// fixed seed yields the same stream on every standard library.
class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(seed), seed_mix_(seed) {}

    uint64_t u64() { return gen_(); }

    // Uniform in [0, bound) without modulo bias.
    uint64_t u64_below(uint64_t bound) {
        uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = gen_();
            if (r >= threshold) return r % bound;
        }
    }

    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Independent child stream, e.g. one per parallel trial.
    Rng spawn(uint64_t id) const {
        uint64_t x = seed_mix_ ^ (id + 0x9e3779b97f4a7c15ull);
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ull;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebull;
        x ^= x >> 31;
        return Rng(x);
    }

    void reseed(uint64_t seed) {
        gen_.seed(seed);
        seed_mix_ = seed;
        have_spare_ = false;
    }

  private:
    std::mt19937_64 gen_;
    uint64_t seed_mix_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace hevf
