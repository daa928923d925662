// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "hevf/serio.hpp"

using namespace hevf;

namespace {

ParamContext toy_context() {
    ParameterSet p;
    p.name = "toy";
    p.degree = 2048;
    p.levels = 4;
    p.delta_bits = 40;
    p.chain_bits = {50, 40, 40, 40, 40, 50};
    p.security_bits = 0;
    return ParamContext(p);
}

struct Fixture {
    ParamContext ctx = toy_context();
    Rng rng{777};
    KeyBundle keys = keygen(ctx, rng);
    Evaluator ev{ctx, &keys.relin, &keys.galois};
};

}  // namespace

TEST_CASE("writer/reader primitive roundtrip") {
    serio::Writer w;
    w.u8(0xab);
    w.u16(0x1234);
    w.u32(0xdeadbeef);
    w.u64(0x0123456789abcdefull);
    w.f64(-3.25);
    w.str("hello");
    auto buf = w.take();
    serio::Reader r(buf);
    CHECK(r.u8() == 0xab);
    CHECK(r.u16() == 0x1234);
    CHECK(r.u32() == 0xdeadbeef);
    CHECK(r.u64() == 0x0123456789abcdefull);
    CHECK(r.f64() == -3.25);
    CHECK(r.str() == "hello");
    CHECK(r.done());
}

TEST_CASE("little-endian layout is fixed") {
    serio::Writer w;
    w.u32(0x01020304);
    const auto& b = w.data();
    REQUIRE(b.size() == 4);
    CHECK(b[0] == 0x04);
    CHECK(b[1] == 0x03);
    CHECK(b[2] == 0x02);
    CHECK(b[3] == 0x01);
}

TEST_CASE("reader rejects truncated input") {
    serio::Writer w;
    w.u32(42);
    auto buf = w.take();
    buf.pop_back();
    serio::Reader r(buf);
    CHECK_THROWS_AS(r.u32(), io_error);
}

TEST_CASE("params roundtrip and peek") {
    auto p = preset_set2();
    auto buf = serio::save_params(p);
    CHECK(serio::peek_kind(buf) == serio::Kind::params);
    auto q = serio::load_params(buf);
    CHECK(q.name == p.name);
    CHECK(q.degree == p.degree);
    CHECK(q.chain_bits == p.chain_bits);
    CHECK(q.delta_bits == p.delta_bits);
    CHECK(q.levels == p.levels);
    CHECK(q.security_bits == p.security_bits);
    // Serialization is canonical: save(load(save(x))) == save(x).
    CHECK(serio::save_params(q) == buf);
}

TEST_CASE("corrupted magic is rejected") {
    auto buf = serio::save_params(preset_set1());
    buf[0] = 'X';
    CHECK_THROWS_AS(serio::load_params(buf), io_error);
}

TEST_CASE("kind mismatch is rejected") {
    auto buf = serio::save_params(preset_set1());
    CHECK_THROWS_AS(serio::load_public_key(buf), io_error);
}

TEST_CASE("key containers roundtrip byte-exactly") {
    Fixture f;
    auto pkb = serio::save_public_key(f.keys.pub);
    auto pk = serio::load_public_key(pkb);
    CHECK(pk.params_hash == f.ctx.hash());
    CHECK(serio::save_public_key(pk) == pkb);

    auto skb = serio::save_secret_key(f.keys.secret);
    auto sk = serio::load_secret_key(skb);
    CHECK(serio::save_secret_key(sk) == skb);

    auto rkb = serio::save_relin_key(f.keys.relin);
    auto rk = serio::load_relin_key(rkb);
    CHECK(serio::save_relin_key(rk) == rkb);

    auto gkb = serio::save_galois_keys(f.keys.galois);
    auto gk = serio::load_galois_keys(gkb);
    CHECK(gk.keys.size() == f.keys.galois.keys.size());
    CHECK(serio::save_galois_keys(gk) == gkb);
}

TEST_CASE("loaded keys still work") {
    Fixture f;
    auto sk = serio::load_secret_key(serio::save_secret_key(f.keys.secret));
    auto pk = serio::load_public_key(serio::save_public_key(f.keys.pub));
    auto rk = serio::load_relin_key(serio::save_relin_key(f.keys.relin));
    auto gk = serio::load_galois_keys(serio::save_galois_keys(f.keys.galois));
    Evaluator ev(f.ctx, &rk, &gk);
    std::vector<double> v(f.ctx.slot_count(), 0.5);
    auto ct = ev.encrypt(v, pk, f.rng);
    auto prod = ev.rescale(ev.mul(ct, ct));
    auto rot = ev.rotate(prod, 3);
    auto out = ev.decrypt(rot, sk);
    CHECK(std::abs(out[0] - 0.25) < 1e-5);
}

TEST_CASE("ciphertext roundtrip preserves metadata and decrypts") {
    Fixture f;
    std::vector<double> v(f.ctx.slot_count());
    for (size_t j = 0; j < v.size(); ++j) v[j] = std::sin(double(j));
    auto ct = f.ev.rescale(f.ev.mul_plain(f.ev.encrypt(v, f.keys.pub, f.rng), v));
    auto buf = serio::save_ciphertext(ct);
    CHECK(serio::peek_kind(buf) == serio::Kind::ciphertext);
    auto ct2 = serio::load_ciphertext(buf);
    CHECK(ct2.level == ct.level);
    CHECK(ct2.scale == ct.scale);
    CHECK(ct2.slot_count == ct.slot_count);
    CHECK(ct2.params_hash == ct.params_hash);
    CHECK(serio::save_ciphertext(ct2) == buf);
    auto out = f.ev.decrypt(ct2, f.keys.secret);
    for (size_t j = 0; j < 16; ++j) CHECK(std::abs(out[j] - v[j] * v[j]) < 1e-5);
}

TEST_CASE("file helpers roundtrip") {
    std::string path = "serio_test_tmp.bin";
    std::vector<uint8_t> data = {1, 2, 3, 250, 0, 9};
    serio::write_file(path, data);
    CHECK(serio::read_file(path) == data);
    std::remove(path.c_str());
    CHECK_THROWS_AS(serio::read_file(path), io_error);
}
