// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hevf/ckks.hpp"
#include "hevf/keys.hpp"
#include "hevf/params.hpp"

namespace hevf::serio {

// Container layout: "HEVF" magic, u16 version, u8 kind, u64 params hash,
// then the kind-specific payload. All integers little-endian.
enum class Kind : uint8_t {
    params = 1,
    public_key = 2,
    secret_key = 3,
    relin_key = 4,
    galois_keys = 5,
    ciphertext = 6,
    enroll_request = 7,
    verify_request = 8,
    verify_response = 9,
};

constexpr uint16_t kVersion = 1;

class Writer {
  public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v);
    void u32(uint32_t v);
    void u64(uint64_t v);
    void f64(double v);
    void str(const std::string& s);
    void bytes(const void* p, size_t n);

    std::vector<uint8_t> take() { return std::move(buf_); }
    const std::vector<uint8_t>& data() const { return buf_; }

  private:
    std::vector<uint8_t> buf_;
};

class Reader {
  public:
    Reader(const uint8_t* p, size_t n) : p_(p), end_(p + n) {}
    explicit Reader(const std::vector<uint8_t>& v) : Reader(v.data(), v.size()) {}

    uint8_t u8();
    uint16_t u16();
    uint32_t u32();
    uint64_t u64();
    double f64();
    std::string str();
    void bytes(void* out, size_t n);
    bool done() const { return p_ == end_; }

  private:
    void need(size_t n) const;
    const uint8_t* p_;
    const uint8_t* end_;
};

void write_header(Writer& w, Kind kind, uint64_t params_hash);
// Returns the params hash; throws io_error on bad magic/version/kind.
uint64_t read_header(Reader& r, Kind expected);
// Peeks the kind byte without consuming the header.
Kind peek_kind(const std::vector<uint8_t>& buf);

void write_poly(Writer& w, const RnsPoly& p);
RnsPoly read_poly(Reader& r);

std::vector<uint8_t> save_params(const ParameterSet& p);
ParameterSet load_params(const std::vector<uint8_t>& buf);

std::vector<uint8_t> save_public_key(const PublicKey& k);
PublicKey load_public_key(const std::vector<uint8_t>& buf);

std::vector<uint8_t> save_secret_key(const SecretKey& k);
SecretKey load_secret_key(const std::vector<uint8_t>& buf);

std::vector<uint8_t> save_relin_key(const RelinKey& k);
RelinKey load_relin_key(const std::vector<uint8_t>& buf);

std::vector<uint8_t> save_galois_keys(const GaloisKeys& k);
GaloisKeys load_galois_keys(const std::vector<uint8_t>& buf);

std::vector<uint8_t> save_ciphertext(const Ciphertext& ct);
Ciphertext load_ciphertext(const std::vector<uint8_t>& buf);

// Nested helpers for protocol messages.
void write_ciphertext(Writer& w, const Ciphertext& ct);
Ciphertext read_ciphertext(Reader& r);
void write_ksw_key(Writer& w, const KswKey& k);
KswKey read_ksw_key(Reader& r);

// File helpers.
void write_file(const std::string& path, const std::vector<uint8_t>& buf);
std::vector<uint8_t> read_file(const std::string& path);

}  // namespace hevf::serio
