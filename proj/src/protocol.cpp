// SPDX-License-Identifier: Apache-2.0
#include "hevf/protocol.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <filesystem>

namespace fs = std::filesystem;

namespace hevf {

namespace {

void write_blob(serio::Writer& w, const std::vector<uint8_t>& b) {
    w.u32(uint32_t(b.size()));
    w.bytes(b.data(), b.size());
}

std::vector<uint8_t> read_blob(serio::Reader& r) {
    uint32_t n = r.u32();
    std::vector<uint8_t> b(n);
    r.bytes(b.data(), n);
    return b;
}

}  // namespace

std::vector<uint8_t> save_enroll_request(const EnrollmentRequest& req) {
    serio::Writer w;
    serio::write_header(w, serio::Kind::enroll_request, req.ct_a.params_hash);
    w.str(req.user_id);
    write_blob(w, serio::save_params(req.params));
    write_blob(w, req.pk);
    write_blob(w, req.relin);
    write_blob(w, req.galois);
    serio::write_ciphertext(w, req.ct_a);
    serio::write_ciphertext(w, req.ct_b);
    w.f64(req.x0);
    w.u32(req.dim);
    return w.take();
}

EnrollmentRequest load_enroll_request(const std::vector<uint8_t>& buf) {
    serio::Reader r(buf);
    uint64_t h = serio::read_header(r, serio::Kind::enroll_request);
    EnrollmentRequest req;
    req.user_id = r.str();
    req.params = serio::load_params(read_blob(r));
    req.pk = read_blob(r);
    req.relin = read_blob(r);
    req.galois = read_blob(r);
    req.ct_a = serio::read_ciphertext(r);
    req.ct_b = serio::read_ciphertext(r);
    req.ct_a.params_hash = req.ct_b.params_hash = h;
    req.x0 = r.f64();
    req.dim = r.u32();
    if (!(req.x0 > 0.0)) throw protocol_error("enrollment: x0 must be positive");
    if (req.dim == 0) throw protocol_error("enrollment: zero dimension");
    return req;
}

std::vector<uint8_t> save_verify_request(const VerificationRequest& req) {
    serio::Writer w;
    serio::write_header(w, serio::Kind::verify_request, req.ct_w2.params_hash);
    w.str(req.user_id);
    serio::write_ciphertext(w, req.ct_w2);
    return w.take();
}

VerificationRequest load_verify_request(const std::vector<uint8_t>& buf) {
    serio::Reader r(buf);
    uint64_t h = serio::read_header(r, serio::Kind::verify_request);
    VerificationRequest req;
    req.user_id = r.str();
    req.ct_w2 = serio::read_ciphertext(r);
    req.ct_w2.params_hash = h;
    return req;
}

std::vector<uint8_t> save_verify_response(const VerificationResponse& resp) {
    serio::Writer w;
    serio::write_header(w, serio::Kind::verify_response, resp.ct_score.params_hash);
    w.str(resp.user_id);
    serio::write_ciphertext(w, resp.ct_score);
    w.str(resp.plan_report);
    return w.take();
}

VerificationResponse load_verify_response(const std::vector<uint8_t>& buf) {
    serio::Reader r(buf);
    uint64_t h = serio::read_header(r, serio::Kind::verify_response);
    VerificationResponse resp;
    resp.user_id = r.str();
    resp.ct_score = serio::read_ciphertext(r);
    resp.ct_score.params_hash = h;
    resp.plan_report = r.str();
    return resp;
}

EnrollmentStore::EnrollmentStore(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw io_error("cannot create store directory " + dir_ + ": " + ec.message());
}

std::string EnrollmentStore::path_for(const std::string& user_id) const {
    char name[32];
    std::snprintf(name, sizeof name, "%016llx.rec",
                  (unsigned long long)fnv1a64(user_id.data(), user_id.size()));
    return (fs::path(dir_) / name).string();
}

void EnrollmentStore::put(const EnrollmentRequest& req) {
    // Write-then-rename so a concurrent reader never sees a torn record.
    std::string final_path = path_for(req.user_id);
    std::string tmp = final_path + ".tmp";
    serio::write_file(tmp, save_enroll_request(req));
    std::error_code ec;
    fs::rename(tmp, final_path, ec);
    if (ec) throw io_error("cannot finalize enrollment record: " + ec.message());
}

EnrollmentRequest EnrollmentStore::get(const std::string& user_id) const {
    std::string p = path_for(user_id);
    if (!fs::exists(p)) throw protocol_error("no enrollment for user '" + user_id + "'");
    return load_enroll_request(serio::read_file(p));
}

bool EnrollmentStore::contains(const std::string& user_id) const {
    return fs::exists(path_for(user_id));
}

std::vector<std::string> EnrollmentStore::user_ids() const {
    std::vector<std::string> ids;
    for (const auto& e : fs::directory_iterator(dir_)) {
        if (e.path().extension() != ".rec") continue;
        ids.push_back(load_enroll_request(serio::read_file(e.path().string())).user_id);
    }
    return ids;
}

Verifier::Verifier(const ParamContext& ctx, ProjectionMatrix q, uint32_t iterations)
    : ctx_(ctx), q_(std::move(q)), plan_(make_plan(iterations, ctx.levels())) {}

void Verifier::enroll(const EnrollmentRequest& req, EnrollmentStore& store) const {
    ParameterSet p = validate_params(req.params);  // re-check the budget table
    ParamContext check(p);
    if (check.hash() != ctx_.hash())
        throw protocol_error("enrollment parameters do not match the server's configured set");
    if (req.ct_a.params_hash != ctx_.hash() || req.ct_b.params_hash != ctx_.hash())
        throw protocol_error("enrollment ciphertexts from a different parameter set");
    if (req.ct_a.level != ctx_.levels() || req.ct_b.level != ctx_.levels())
        throw protocol_error("enrollment ciphertexts must be at full level");
    if (req.dim != q_.dim()) throw protocol_error("enrollment dimension does not match server's Q");
    store.put(req);
}

VerificationResponse Verifier::verify(const VerificationRequest& req, const EnrollmentStore& store) const {
    EnrollmentRequest rec = store.get(req.user_id);
    if (req.ct_w2.params_hash != ctx_.hash())
        throw protocol_error("verification ciphertext from a different parameter set");

    RelinKey relin = serio::load_relin_key(rec.relin);
    GaloisKeys galois = serio::load_galois_keys(rec.galois);
    Evaluator ev(ctx_, &relin, &galois);

    EnrollmentRecord er;
    er.user_id = rec.user_id;
    er.ct_a = rec.ct_a;
    er.ct_b = rec.ct_b;
    er.x0 = rec.x0;
    er.dim = rec.dim;
    er.params_hash = ctx_.hash();

    VerificationResponse resp;
    resp.user_id = req.user_id;
    resp.ct_score = score_encrypted(ev, er, req.ct_w2, q_, plan_);
    resp.plan_report = plan_.report();
    return resp;
}

Decision client_decide(const VerificationResponse& resp, const SecretKey& sk, double theta,
                       const Evaluator& ev) {
    Decision d;
    d.score = ev.decrypt(resp.ct_score, sk)[0];
    d.accept = d.score >= theta;
    return d;
}

namespace {

void send_all(int fd, const void* data, size_t n) {
    const char* p = static_cast<const char*>(data);
    while (n > 0) {
        ssize_t w = ::send(fd, p, n, 0);
        if (w <= 0) throw io_error("socket send failed");
        p += w;
        n -= size_t(w);
    }
}

void recv_all(int fd, void* data, size_t n) {
    char* p = static_cast<char*>(data);
    while (n > 0) {
        ssize_t r = ::recv(fd, p, n, 0);
        if (r <= 0) throw io_error("socket receive failed or peer closed");
        p += r;
        n -= size_t(r);
    }
}

struct Fd {
    int fd = -1;
    ~Fd() {
        if (fd >= 0) ::close(fd);
    }
};

int connect_to(const std::string& host, uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw io_error("cannot create socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw io_error("bad host address: " + host);
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        ::close(fd);
        throw io_error("cannot connect to " + host + ":" + std::to_string(port));
    }
    return fd;
}

[[noreturn]] void rethrow_remote(const Frame& f) {
    serio::Reader r(f.payload);
    auto code = errc(r.u8());
    throw error(code, "server: " + r.str());
}

}  // namespace

void send_frame(int fd, FrameKind kind, const std::vector<uint8_t>& payload) {
    uint8_t head[5];
    uint32_t n = uint32_t(payload.size());
    head[0] = uint8_t(n);
    head[1] = uint8_t(n >> 8);
    head[2] = uint8_t(n >> 16);
    head[3] = uint8_t(n >> 24);
    head[4] = uint8_t(kind);
    send_all(fd, head, sizeof head);
    if (n > 0) send_all(fd, payload.data(), n);
}

Frame recv_frame(int fd) {
    uint8_t head[5];
    recv_all(fd, head, sizeof head);
    uint32_t n = uint32_t(head[0]) | uint32_t(head[1]) << 8 | uint32_t(head[2]) << 16 |
                 uint32_t(head[3]) << 24;
    if (n > (1u << 30)) throw protocol_error("oversized frame");
    Frame f;
    f.kind = FrameKind(head[4]);
    f.payload.resize(n);
    if (n > 0) recv_all(fd, f.payload.data(), n);
    return f;
}

size_t serve(uint16_t port, const Verifier& verifier, EnrollmentStore& store,
             const std::atomic<bool>* stop, size_t max_requests) {
    Fd listener;
    listener.fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener.fd < 0) throw io_error("cannot create socket");
    int one = 1;
    ::setsockopt(listener.fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(listener.fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
        throw io_error("cannot bind port " + std::to_string(port));
    if (::listen(listener.fd, 8) != 0) throw io_error("cannot listen");

    size_t handled = 0;
    while ((max_requests == 0 || handled < max_requests) && !(stop && stop->load())) {
        Fd conn;
        conn.fd = ::accept(listener.fd, nullptr, nullptr);
        if (conn.fd < 0) throw io_error("accept failed");
        try {
            Frame req = recv_frame(conn.fd);
            switch (req.kind) {
                case FrameKind::enroll_request: {
                    verifier.enroll(load_enroll_request(req.payload), store);
                    send_frame(conn.fd, FrameKind::enroll_ack, {});
                    break;
                }
                case FrameKind::verify_request: {
                    auto resp = verifier.verify(load_verify_request(req.payload), store);
                    send_frame(conn.fd, FrameKind::verify_response, save_verify_response(resp));
                    break;
                }
                default:
                    throw protocol_error("unexpected frame kind");
            }
        } catch (const error& e) {
            serio::Writer w;
            w.u8(uint8_t(e.code()));
            w.str(e.what());
            try {
                send_frame(conn.fd, FrameKind::error, w.take());
            } catch (const error&) {
            }
        }
        ++handled;
    }
    return handled;
}

void send_enroll(const std::string& host, uint16_t port, const EnrollmentRequest& req) {
    Fd c;
    c.fd = connect_to(host, port);
    send_frame(c.fd, FrameKind::enroll_request, save_enroll_request(req));
    Frame ack = recv_frame(c.fd);
    if (ack.kind == FrameKind::error) rethrow_remote(ack);
    if (ack.kind != FrameKind::enroll_ack) throw protocol_error("unexpected reply to enrollment");
}

VerificationResponse send_verify(const std::string& host, uint16_t port, const VerificationRequest& req) {
    Fd c;
    c.fd = connect_to(host, port);
    send_frame(c.fd, FrameKind::verify_request, save_verify_request(req));
    Frame resp = recv_frame(c.fd);
    if (resp.kind == FrameKind::error) rethrow_remote(resp);
    if (resp.kind != FrameKind::verify_response) throw protocol_error("unexpected reply to verification");
    return load_verify_response(resp.payload);
}

}  // namespace hevf
