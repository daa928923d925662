// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <optional>

#include "hevf/score.hpp"
#include "hevf/serio.hpp"

namespace hevf {

struct EnrollmentRequest {
    std::string user_id;
    ParameterSet params;
    std::vector<uint8_t> pk;      // serialized containers, stored verbatim
    std::vector<uint8_t> relin;
    std::vector<uint8_t> galois;
    Ciphertext ct_a;  // 1.5 x0 w1
    Ciphertext ct_b;  // 0.5 x0^3 w1
    double x0 = 650.0;
    uint32_t dim = 0;
};

struct VerificationRequest {
    std::string user_id;
    Ciphertext ct_w2;
};

struct VerificationResponse {
    std::string user_id;
    Ciphertext ct_score;
    std::string plan_report;
};

std::vector<uint8_t> save_enroll_request(const EnrollmentRequest& req);
EnrollmentRequest load_enroll_request(const std::vector<uint8_t>& buf);
std::vector<uint8_t> save_verify_request(const VerificationRequest& req);
VerificationRequest load_verify_request(const std::vector<uint8_t>& buf);
std::vector<uint8_t> save_verify_response(const VerificationResponse& resp);
VerificationResponse load_verify_response(const std::vector<uint8_t>& buf);

// Directory-backed store, one file per user id (keyed by its hash).
// Never holds secret-key material.
class EnrollmentStore {
  public:
    explicit EnrollmentStore(std::string dir);

    void put(const EnrollmentRequest& req);  // replaces any existing record
    EnrollmentRequest get(const std::string& user_id) const;
    bool contains(const std::string& user_id) const;
    std::vector<std::string> user_ids() const;

    const std::string& dir() const { return dir_; }

  private:
    std::string path_for(const std::string& user_id) const;
    std::string dir_;
};

// Server-side verification service. Holds no secret keys.
class Verifier {
  public:
    Verifier(const ParamContext& ctx, ProjectionMatrix q, uint32_t iterations);

    void enroll(const EnrollmentRequest& req, EnrollmentStore& store) const;
    VerificationResponse verify(const VerificationRequest& req, const EnrollmentStore& store) const;

    const ScoreCircuitPlan& plan() const { return plan_; }

  private:
    const ParamContext& ctx_;
    ProjectionMatrix q_;
    ScoreCircuitPlan plan_;
};

struct Decision {
    bool accept = false;
    double score = 0.0;
};

// Client-side: decrypt slot 0 and compare against theta (accept iff >=).
Decision client_decide(const VerificationResponse& resp, const SecretKey& sk, double theta,
                       const Evaluator& ev);

// Length-prefixed loopback framing: u32 LE payload length, u8 frame kind,
// payload bytes.
enum class FrameKind : uint8_t {
    enroll_request = 1,
    enroll_ack = 2,
    verify_request = 3,
    verify_response = 4,
    error = 5,
};

struct Frame {
    FrameKind kind;
    std::vector<uint8_t> payload;
};

void send_frame(int fd, FrameKind kind, const std::vector<uint8_t>& payload);
Frame recv_frame(int fd);

// Serves enroll/verify frames on a loopback TCP port until `stop` becomes
// true (checked between connections) or max_requests is reached (0 = no
// limit). Returns the number of requests handled.
size_t serve(uint16_t port, const Verifier& verifier, EnrollmentStore& store,
             const std::atomic<bool>* stop = nullptr, size_t max_requests = 0);

// Client helpers; each opens one connection per request.
void send_enroll(const std::string& host, uint16_t port, const EnrollmentRequest& req);
VerificationResponse send_verify(const std::string& host, uint16_t port, const VerificationRequest& req);

}  // namespace hevf
