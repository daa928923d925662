// SPDX-License-Identifier: Apache-2.0
#include "hevf/serio.hpp"

#include <cstring>
#include <fstream>

namespace hevf::serio {

void Writer::u16(uint16_t v) {
    buf_.push_back(uint8_t(v));
    buf_.push_back(uint8_t(v >> 8));
}

void Writer::u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
}

void Writer::u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
}

void Writer::f64(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
}

void Writer::str(const std::string& s) {
    u32(uint32_t(s.size()));
    bytes(s.data(), s.size());
}

void Writer::bytes(const void* p, size_t n) {
    const auto* b = static_cast<const uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
}

void Reader::need(size_t n) const {
    if (size_t(end_ - p_) < n) throw io_error("truncated container");
}

uint8_t Reader::u8() {
    need(1);
    return *p_++;
}

uint16_t Reader::u16() {
    need(2);
    uint16_t v = uint16_t(p_[0]) | uint16_t(p_[1]) << 8;
    p_ += 2;
    return v;
}

uint32_t Reader::u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(p_[i]) << (8 * i);
    p_ += 4;
    return v;
}

uint64_t Reader::u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(p_[i]) << (8 * i);
    p_ += 8;
    return v;
}

double Reader::f64() {
    uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

std::string Reader::str() {
    uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(p_), n);
    p_ += n;
    return s;
}

void Reader::bytes(void* out, size_t n) {
    need(n);
    std::memcpy(out, p_, n);
    p_ += n;
}

void write_header(Writer& w, Kind kind, uint64_t params_hash) {
    w.bytes("HEVF", 4);
    w.u16(kVersion);
    w.u8(uint8_t(kind));
    w.u64(params_hash);
}

uint64_t read_header(Reader& r, Kind expected) {
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, "HEVF", 4) != 0) throw io_error("bad magic, not an HEVF container");
    uint16_t ver = r.u16();
    if (ver != kVersion) throw io_error("unsupported container version " + std::to_string(ver));
    uint8_t kind = r.u8();
    if (kind != uint8_t(expected))
        throw io_error("container kind " + std::to_string(kind) + ", expected " +
                       std::to_string(uint8_t(expected)));
    return r.u64();
}

Kind peek_kind(const std::vector<uint8_t>& buf) {
    if (buf.size() < 7 || std::memcmp(buf.data(), "HEVF", 4) != 0)
        throw io_error("bad magic, not an HEVF container");
    return Kind(buf[6]);
}

void write_poly(Writer& w, const RnsPoly& p) {
    w.u32(p.degree());
    w.u8(uint8_t(p.form()));
    w.u32(uint32_t(p.limb_count()));
    for (size_t l = 0; l < p.limb_count(); ++l) w.u64(p.modulus(l).value);
    for (uint64_t v : p.raw()) w.u64(v);
}

RnsPoly read_poly(Reader& r) {
    uint32_t degree = r.u32();
    Form form = Form(r.u8());
    uint32_t limbs = r.u32();
    if (degree == 0 || (degree & (degree - 1)) != 0 || limbs == 0 || limbs > 64)
        throw io_error("implausible polynomial shape");
    std::vector<Modulus> mods;
    mods.reserve(limbs);
    for (uint32_t l = 0; l < limbs; ++l) mods.emplace_back(r.u64());
    RnsPoly p(degree, std::move(mods), form);
    for (uint64_t& v : p.raw()) {
        v = r.u64();
        // No element may exceed its modulus; find the limb lazily below.
    }
    for (size_t l = 0; l < p.limb_count(); ++l)
        for (uint32_t k = 0; k < degree; ++k)
            if (p.limb(l)[k] >= p.modulus(l).value) throw io_error("coefficient out of range");
    return p;
}

std::vector<uint8_t> save_params(const ParameterSet& p) {
    Writer w;
    write_header(w, Kind::params, 0);
    w.str(p.name);
    w.u32(p.degree);
    w.u32(p.delta_bits);
    w.u32(p.levels);
    w.u32(p.security_bits);
    w.u32(uint32_t(p.chain_bits.size()));
    for (uint32_t b : p.chain_bits) w.u32(b);
    return w.take();
}

ParameterSet load_params(const std::vector<uint8_t>& buf) {
    Reader r(buf);
    read_header(r, Kind::params);
    ParameterSet p;
    p.name = r.str();
    p.degree = r.u32();
    p.delta_bits = r.u32();
    p.levels = r.u32();
    p.security_bits = r.u32();
    uint32_t n = r.u32();
    p.chain_bits.resize(n);
    for (uint32_t i = 0; i < n; ++i) p.chain_bits[i] = r.u32();
    return validate_params(std::move(p));
}

std::vector<uint8_t> save_public_key(const PublicKey& k) {
    Writer w;
    write_header(w, Kind::public_key, k.params_hash);
    write_poly(w, k.b);
    write_poly(w, k.a);
    return w.take();
}

PublicKey load_public_key(const std::vector<uint8_t>& buf) {
    Reader r(buf);
    PublicKey k;
    k.params_hash = read_header(r, Kind::public_key);
    k.b = read_poly(r);
    k.a = read_poly(r);
    return k;
}

std::vector<uint8_t> save_secret_key(const SecretKey& k) {
    Writer w;
    write_header(w, Kind::secret_key, k.params_hash);
    write_poly(w, k.s_ntt);
    write_poly(w, k.s_coeff);
    return w.take();
}

SecretKey load_secret_key(const std::vector<uint8_t>& buf) {
    Reader r(buf);
    SecretKey k;
    k.params_hash = read_header(r, Kind::secret_key);
    k.s_ntt = read_poly(r);
    k.s_coeff = read_poly(r);
    return k;
}

void write_ksw_key(Writer& w, const KswKey& k) {
    w.u32(uint32_t(k.b.size()));
    for (size_t j = 0; j < k.b.size(); ++j) {
        write_poly(w, k.b[j]);
        write_poly(w, k.a[j]);
    }
}

KswKey read_ksw_key(Reader& r) {
    uint32_t n = r.u32();
    KswKey k;
    k.b.reserve(n);
    k.a.reserve(n);
    for (uint32_t j = 0; j < n; ++j) {
        k.b.push_back(read_poly(r));
        k.a.push_back(read_poly(r));
    }
    return k;
}

std::vector<uint8_t> save_relin_key(const RelinKey& k) {
    Writer w;
    write_header(w, Kind::relin_key, k.params_hash);
    write_ksw_key(w, k.key);
    return w.take();
}

RelinKey load_relin_key(const std::vector<uint8_t>& buf) {
    Reader r(buf);
    RelinKey k;
    k.params_hash = read_header(r, Kind::relin_key);
    k.key = read_ksw_key(r);
    return k;
}

std::vector<uint8_t> save_galois_keys(const GaloisKeys& k) {
    Writer w;
    write_header(w, Kind::galois_keys, k.params_hash);
    w.u32(uint32_t(k.keys.size()));
    for (const auto& [step, key] : k.keys) {
        w.u32(step);
        write_ksw_key(w, key);
    }
    return w.take();
}

GaloisKeys load_galois_keys(const std::vector<uint8_t>& buf) {
    Reader r(buf);
    GaloisKeys k;
    k.params_hash = read_header(r, Kind::galois_keys);
    uint32_t n = r.u32();
    for (uint32_t i = 0; i < n; ++i) {
        uint32_t step = r.u32();
        k.keys.emplace(step, read_ksw_key(r));
    }
    return k;
}

void write_ciphertext(Writer& w, const Ciphertext& ct) {
    w.u32(ct.level);
    w.f64(ct.scale);
    w.u32(ct.slot_count);
    write_poly(w, ct.c0);
    write_poly(w, ct.c1);
}

Ciphertext read_ciphertext(Reader& r) {
    Ciphertext ct;
    ct.level = r.u32();
    ct.scale = r.f64();
    ct.slot_count = r.u32();
    ct.c0 = read_poly(r);
    ct.c1 = read_poly(r);
    if (!(ct.scale > 0.0)) throw io_error("ciphertext scale must be positive");
    if (ct.c0.limb_count() != ct.level + 1) throw io_error("ciphertext limb count disagrees with level");
    return ct;
}

std::vector<uint8_t> save_ciphertext(const Ciphertext& ct) {
    Writer w;
    write_header(w, Kind::ciphertext, ct.params_hash);
    write_ciphertext(w, ct);
    return w.take();
}

Ciphertext load_ciphertext(const std::vector<uint8_t>& buf) {
    Reader r(buf);
    Ciphertext ct;
    uint64_t h = read_header(r, Kind::ciphertext);
    ct = read_ciphertext(r);
    ct.params_hash = h;
    return ct;
}

void write_file(const std::string& path, const std::vector<uint8_t>& buf) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot open for writing: " + path);
    f.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    if (!f) throw io_error("write failed: " + path);
}

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary | std::ios::ate);
    if (!f) throw io_error("cannot open: " + path);
    auto size = f.tellg();
    f.seekg(0);
    std::vector<uint8_t> buf(static_cast<size_t>(size));
    f.read(reinterpret_cast<char*>(buf.data()), size);
    if (!f) throw io_error("read failed: " + path);
    return buf;
}

}  // namespace hevf::serio
