// SPDX-License-Identifier: Apache-2.0
//
// Command-line surface for the encrypted speaker-verification stack.
// Every command is a thin composition over the library; exit codes are
// the library's error categories (param=2, crypto=3, io=4, protocol=5).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "hevf/eval.hpp"
#include "hevf/protocol.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Cfg {
    std::string preset = "set1";
    std::string chain;  // "N:b0,b1,...,bspecial" overrides the preset
    uint32_t security_bits = 128;
    uint32_t dim = 16;
    uint32_t iterations = 1;
    double x0 = 650.0;
    double theta = 0.34;
    std::string store = "store";
    std::string q_matrix;
    std::string corpus;
    uint64_t seed = 0;  // 0: draw a random seed and print it
    std::string mode = "file";
    std::string connect = "127.0.0.1:7101";
    std::string listen = "127.0.0.1:7101";
};

void to_json(json& j, const Cfg& c) {
    j = json{{"preset", c.preset},       {"chain", c.chain},
             {"security_bits", c.security_bits}, {"dim", c.dim},
             {"iterations", c.iterations}, {"x0", c.x0},
             {"theta", c.theta},          {"store", c.store},
             {"q_matrix", c.q_matrix},    {"corpus", c.corpus},
             {"seed", c.seed},            {"mode", c.mode},
             {"connect", c.connect},      {"listen", c.listen}};
}

void from_json(const json& j, Cfg& c) {
    j.at("preset").get_to(c.preset);
    j.at("chain").get_to(c.chain);
    j.at("security_bits").get_to(c.security_bits);
    j.at("dim").get_to(c.dim);
    j.at("iterations").get_to(c.iterations);
    j.at("x0").get_to(c.x0);
    j.at("theta").get_to(c.theta);
    j.at("store").get_to(c.store);
    j.at("q_matrix").get_to(c.q_matrix);
    j.at("corpus").get_to(c.corpus);
    j.at("seed").get_to(c.seed);
    j.at("mode").get_to(c.mode);
    j.at("connect").get_to(c.connect);
    j.at("listen").get_to(c.listen);
}

hevf::ParameterSet params_from(const Cfg& cfg) {
    if (cfg.chain.empty()) return hevf::preset_by_name(cfg.preset);
    // Custom chain "N:b0,b1,...,bspecial"; the delta limbs sit between the
    // base and special entries.
    hevf::ParameterSet p;
    p.name = "custom";
    std::istringstream is(cfg.chain);
    char sep = 0;
    if (!(is >> p.degree >> sep) || sep != ':')
        throw hevf::param_error("bad --chain, expected N:b0,b1,...,bspecial");
    uint32_t bits = 0;
    while (is >> bits) {
        p.chain_bits.push_back(bits);
        is >> sep;
    }
    if (p.chain_bits.size() < 3) throw hevf::param_error("--chain needs at least 3 limbs");
    p.levels = uint32_t(p.chain_bits.size()) - 2;
    p.delta_bits = p.chain_bits[1];
    p.security_bits = cfg.security_bits;
    return hevf::validate_params(p);
}

uint64_t effective_seed(const Cfg& cfg) {
    if (cfg.seed != 0) return cfg.seed;
    uint64_t s = (uint64_t(std::random_device{}()) << 32) ^ std::random_device{}();
    if (s == 0) s = 1;
    std::cout << "seed: " << s << "\n";
    return s;
}

std::vector<double> read_vector(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw hevf::io_error("cannot open vector file: " + path);
    std::vector<double> v;
    double x = 0.0;
    while (f >> x) v.push_back(x);
    if (v.empty()) throw hevf::io_error("empty vector file: " + path);
    return v;
}

hevf::ProjectionMatrix read_q(const std::string& path, uint32_t dim) {
    if (path.empty()) {
        std::cerr << "warning: no --q-matrix given, using the identity projection\n";
        return hevf::ProjectionMatrix::identity(dim);
    }
    std::ifstream f(path);
    if (!f) throw hevf::io_error("cannot open Q matrix file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(f, line)) {
        for (char& c : line)
            if (c == ',' || c == ';') c = ' ';
        std::istringstream is(line);
        std::vector<double> row;
        double x = 0.0;
        while (is >> x) row.push_back(x);
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw hevf::io_error("empty Q matrix file: " + path);
    return hevf::ProjectionMatrix(std::move(rows));
}

std::string keyfile(const std::string& dir, const char* name) {
    return (fs::path(dir) / name).string();
}

struct LoadedKeys {
    hevf::ParameterSet params;
    hevf::PublicKey pk;
    hevf::RelinKey relin;
    hevf::GaloisKeys galois;
};

LoadedKeys load_public_material(const std::string& dir) {
    LoadedKeys k;
    k.params = hevf::serio::load_params(hevf::serio::read_file(keyfile(dir, "params.bin")));
    k.pk = hevf::serio::load_public_key(hevf::serio::read_file(keyfile(dir, "pk.bin")));
    k.relin = hevf::serio::load_relin_key(hevf::serio::read_file(keyfile(dir, "relin.bin")));
    k.galois = hevf::serio::load_galois_keys(hevf::serio::read_file(keyfile(dir, "galois.bin")));
    return k;
}

std::pair<std::string, uint16_t> split_hostport(const std::string& s) {
    auto pos = s.rfind(':');
    if (pos == std::string::npos) throw hevf::param_error("expected host:port, got " + s);
    int port = std::atoi(s.c_str() + pos + 1);
    if (port <= 0 || port > 65535) throw hevf::param_error("bad port in " + s);
    return {s.substr(0, pos), uint16_t(port)};
}

hevf::EnrollmentRequest build_enroll_request(const Cfg& cfg, const LoadedKeys& keys,
                                             const hevf::ParamContext& ctx, const std::string& user,
                                             const std::vector<double>& w1, hevf::Rng& rng) {
    hevf::NewtonConfig ncfg;
    ncfg.x0 = cfg.x0;
    ncfg.iterations = cfg.iterations;
    hevf::Evaluator ev(ctx);
    auto rec = hevf::make_enrollment(user, w1, ncfg, ev, keys.pk, rng);

    hevf::EnrollmentRequest req;
    req.user_id = user;
    req.params = keys.params;
    req.pk = hevf::serio::save_public_key(keys.pk);
    req.relin = hevf::serio::save_relin_key(keys.relin);
    req.galois = hevf::serio::save_galois_keys(keys.galois);
    req.ct_a = rec.ct_a;
    req.ct_b = rec.ct_b;
    req.x0 = rec.x0;
    req.dim = rec.dim;
    return req;
}

int run(int argc, char** argv) {
    CLI::App app{"Privacy-preserving speaker verification over CKKS"};
    app.require_subcommand(1);

    Cfg cfg;
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags override its values");
    auto* preset_opt = app.add_option("--preset", cfg.preset, "Parameter preset: set1, set2, set3");
    auto* chain_opt = app.add_option("--chain", cfg.chain, "Custom chain N:b0,b1,...,bspecial");
    auto* sec_opt = app.add_option("--security-bits", cfg.security_bits, "Security target for --chain (0 = toy)");
    auto* dim_opt = app.add_option("--dim", cfg.dim, "Feature vector dimension");
    auto* iter_opt = app.add_option("--iterations", cfg.iterations, "Newton iterations (1 or 2)");
    auto* x0_opt = app.add_option("--x0", cfg.x0, "Newton initialisation constant");
    auto* theta_opt = app.add_option("--theta", cfg.theta, "Decision threshold");
    auto* store_opt = app.add_option("--store", cfg.store, "Enrollment store directory");
    auto* q_opt = app.add_option("--q-matrix", cfg.q_matrix, "Square delimited-text projection matrix Q");
    auto* corpus_opt = app.add_option("--corpus", cfg.corpus, "Synthetic corpus file");
    auto* seed_opt = app.add_option("--seed", cfg.seed, "RNG seed (0 = random, printed)");
    auto* mode_opt = app.add_option("--mode", cfg.mode, "Transport: file or socket")
                         ->check(CLI::IsMember({"file", "socket"}));
    auto* connect_opt = app.add_option("--connect", cfg.connect, "Server address for socket mode");
    auto* listen_opt = app.add_option("--listen", cfg.listen, "Listen address for serve");

    std::string out, in, user, vector_path, keys_dir = "keys", scorers = "baseline,approx1";
    uint32_t repetitions = 3;
    size_t max_requests = 0;
    bool with_attacks = false;

    auto* c_keygen = app.add_subcommand("keygen", "Generate parameters and a key bundle");
    c_keygen->add_option("--out", keys_dir, "Output directory for key files");

    auto* c_enroll = app.add_subcommand("enroll", "Enroll a user from a plaintext feature vector");
    c_enroll->add_option("--user", user, "User id")->required();
    c_enroll->add_option("--vector", vector_path, "Feature vector file")->required();
    c_enroll->add_option("--keys", keys_dir, "Key directory from keygen");
    c_enroll->add_option("--out", out, "Also write the raw enrollment request here");

    auto* c_verify = app.add_subcommand("verify", "Run an encrypted verification");
    c_verify->add_option("--user", user, "User id")->required();
    c_verify->add_option("--vector", vector_path, "Feature vector file")->required();
    c_verify->add_option("--keys", keys_dir, "Key directory from keygen");
    c_verify->add_option("--out", out, "Response file")->required();

    auto* c_decide = app.add_subcommand("decide", "Decrypt a response and apply the threshold");
    c_decide->add_option("--in", in, "Response file from verify")->required();
    c_decide->add_option("--keys", keys_dir, "Key directory holding sk.bin");

    auto* c_serve = app.add_subcommand("serve", "Serve enroll/verify requests on a loopback socket");
    c_serve->add_option("--max-requests", max_requests, "Stop after this many requests (0 = run forever)");

    auto* c_bench = app.add_subcommand("bench", "Time keygen/enroll/verify/decrypt");
    c_bench->add_option("--repetitions", repetitions, "Median over this many runs");

    auto* c_eval = app.add_subcommand("eval-eer", "EER evaluation on a synthetic corpus");
    c_eval->add_option("--scorers", scorers,
                       "Comma list: baseline, approx1, approx2, enc-set1, enc-set2, enc-set3");
    c_eval->add_flag("--attacks", with_attacks, "Also run the attack simulations");
    c_eval->add_option("--out", out, "Write the generated corpus here");

    auto* c_plan = app.add_subcommand("plan", "Print the score-circuit level decomposition");

    auto* c_emit = app.add_subcommand("emit-config", "Write the effective config as JSON");
    c_emit->add_option("--out", out, "Config file path")->required();

    // Shared flags live on the root app; subcommands pass them through.
    for (auto* sc : app.get_subcommands([](const CLI::App*) { return true; })) sc->fallthrough();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw hevf::io_error("cannot open config: " + config_path);
        Cfg file_cfg = json::parse(f).get<Cfg>();
        // Flags given on the command line win over the file.
        if (!*preset_opt) cfg.preset = file_cfg.preset;
        if (!*chain_opt) cfg.chain = file_cfg.chain;
        if (!*sec_opt) cfg.security_bits = file_cfg.security_bits;
        if (!*dim_opt) cfg.dim = file_cfg.dim;
        if (!*iter_opt) cfg.iterations = file_cfg.iterations;
        if (!*x0_opt) cfg.x0 = file_cfg.x0;
        if (!*theta_opt) cfg.theta = file_cfg.theta;
        if (!*store_opt) cfg.store = file_cfg.store;
        if (!*q_opt) cfg.q_matrix = file_cfg.q_matrix;
        if (!*corpus_opt) cfg.corpus = file_cfg.corpus;
        if (!*seed_opt) cfg.seed = file_cfg.seed;
        if (!*mode_opt) cfg.mode = file_cfg.mode;
        if (!*connect_opt) cfg.connect = file_cfg.connect;
        if (!*listen_opt) cfg.listen = file_cfg.listen;
    }
    if (const char* env = std::getenv("HEVF_STORE")) cfg.store = env;

    if (*c_plan) {
        auto params = hevf::validate_params(params_from(cfg));
        auto plan = hevf::make_plan(cfg.iterations, params.levels);
        std::cout << "preset " << params.name << ", L=" << params.levels << "\n" << plan.report();
        return 0;
    }

    if (*c_emit) {
        std::ofstream f(out, std::ios::trunc);
        if (!f) throw hevf::io_error("cannot write config: " + out);
        f << json(cfg).dump(2) << "\n";
        return 0;
    }

    if (*c_keygen) {
        auto params = hevf::validate_params(params_from(cfg));
        hevf::ParamContext ctx(params);
        hevf::Rng rng(effective_seed(cfg));
        auto steps = hevf::default_rotation_steps(ctx);
        for (uint32_t s : hevf::batch_rotation_steps(ctx.slot_count(), hevf::next_pow2(cfg.dim)))
            steps.push_back(s);
        auto keys = hevf::keygen(ctx, rng, steps);
        fs::create_directories(keys_dir);
        hevf::serio::write_file(keyfile(keys_dir, "params.bin"), hevf::serio::save_params(params));
        hevf::serio::write_file(keyfile(keys_dir, "pk.bin"), hevf::serio::save_public_key(keys.pub));
        hevf::serio::write_file(keyfile(keys_dir, "sk.bin"), hevf::serio::save_secret_key(keys.secret));
        hevf::serio::write_file(keyfile(keys_dir, "relin.bin"), hevf::serio::save_relin_key(keys.relin));
        hevf::serio::write_file(keyfile(keys_dir, "galois.bin"),
                                hevf::serio::save_galois_keys(keys.galois));
        std::cout << "wrote " << keys_dir << "/{params,pk,sk,relin,galois}.bin (" << params.name
                  << ", N=" << params.degree << ", L=" << params.levels << ")\n";
        return 0;
    }

    if (*c_enroll) {
        auto keys = load_public_material(keys_dir);
        hevf::ParamContext ctx(keys.params);
        hevf::Rng rng(effective_seed(cfg));
        auto w1 = read_vector(vector_path);
        auto req = build_enroll_request(cfg, keys, ctx, user, w1, rng);
        if (!out.empty()) hevf::serio::write_file(out, hevf::save_enroll_request(req));
        if (cfg.mode == "socket") {
            auto [host, port] = split_hostport(cfg.connect);
            hevf::send_enroll(host, port, req);
            std::cout << "enrolled '" << user << "' via " << cfg.connect << "\n";
        } else {
            auto q = read_q(cfg.q_matrix, req.dim);
            hevf::EnrollmentStore store(cfg.store);
            hevf::Verifier verifier(ctx, q, cfg.iterations);
            verifier.enroll(req, store);
            std::cout << "enrolled '" << user << "' into " << cfg.store << "\n";
        }
        return 0;
    }

    if (*c_verify) {
        auto keys = load_public_material(keys_dir);
        hevf::ParamContext ctx(keys.params);
        hevf::Rng rng(effective_seed(cfg));
        auto w2 = read_vector(vector_path);

        hevf::VerificationRequest req;
        req.user_id = user;
        hevf::Evaluator ev(ctx);
        req.ct_w2 = ev.encrypt(w2, keys.pk, rng);

        hevf::VerificationResponse resp;
        if (cfg.mode == "socket") {
            auto [host, port] = split_hostport(cfg.connect);
            resp = hevf::send_verify(host, port, req);
        } else {
            auto q = read_q(cfg.q_matrix, uint32_t(w2.size()));
            hevf::EnrollmentStore store(cfg.store);
            hevf::Verifier verifier(ctx, q, cfg.iterations);
            resp = verifier.verify(req, store);
        }
        hevf::serio::write_file(out, hevf::save_verify_response(resp));
        std::cout << "response for '" << user << "' written to " << out << "\n";
        return 0;
    }

    if (*c_decide) {
        auto params = hevf::serio::load_params(hevf::serio::read_file(keyfile(keys_dir, "params.bin")));
        auto sk = hevf::serio::load_secret_key(hevf::serio::read_file(keyfile(keys_dir, "sk.bin")));
        hevf::ParamContext ctx(params);
        hevf::Evaluator ev(ctx);
        auto resp = hevf::load_verify_response(hevf::serio::read_file(in));
        auto d = hevf::client_decide(resp, sk, cfg.theta, ev);
        std::cout << (d.accept ? "accept" : "reject") << " score=" << d.score
                  << " theta=" << cfg.theta << "\n";
        return 0;
    }

    if (*c_serve) {
        auto [host, port] = split_hostport(cfg.listen);
        if (host != "127.0.0.1" && host != "localhost")
            throw hevf::param_error("serve binds loopback only");
        auto params = hevf::validate_params(params_from(cfg));
        hevf::ParamContext ctx(params);
        auto q = read_q(cfg.q_matrix, cfg.dim);
        hevf::EnrollmentStore store(cfg.store);
        hevf::Verifier verifier(ctx, q, cfg.iterations);
        std::cout << "serving on " << cfg.listen << " (store " << cfg.store << ")\n" << std::flush;
        size_t n = hevf::serve(port, verifier, store, nullptr, max_requests);
        std::cout << "handled " << n << " requests\n";
        return 0;
    }

    if (*c_bench) {
        auto params = hevf::validate_params(params_from(cfg));
        auto rep = hevf::bench(params, cfg.dim, repetitions, cfg.iterations, effective_seed(cfg));
        std::cout << rep.table();
        return 0;
    }

    if (*c_eval) {
        hevf::CorpusSpec spec;
        spec.dim = cfg.dim;
        hevf::SyntheticCorpus corpus;
        if (!cfg.corpus.empty()) {
            corpus = hevf::load_corpus(cfg.corpus);
            spec = corpus.spec;
        } else {
            corpus = hevf::gen_corpus(spec, effective_seed(cfg));
        }
        if (!out.empty()) hevf::save_corpus(corpus, out);
        hevf::ProjectionMatrix q = cfg.q_matrix.empty() ? hevf::corpus_matched_q(spec)
                                                        : read_q(cfg.q_matrix, spec.dim);
        if (cfg.q_matrix.empty())
            std::cerr << "note: using the corpus-calibrated identity projection\n";

        std::cout << "corpus: S=" << spec.speakers << " T=" << spec.tests_per_speaker
                  << " d=" << spec.dim << " seed=" << corpus.seed << "\n";
        std::istringstream is(scorers);
        std::string name;
        while (std::getline(is, name, ',')) {
            hevf::ScorerConfig sc;
            sc.newton.x0 = cfg.x0;
            if (name == "baseline") {
                sc.kind = hevf::ScorerKind::baseline;
            } else if (name == "approx1" || name == "approx2") {
                sc.kind = hevf::ScorerKind::approx;
                sc.newton.iterations = name == "approx1" ? 1 : 2;
            } else if (name.rfind("enc-", 0) == 0) {
                sc.kind = hevf::ScorerKind::encrypted;
                sc.params = hevf::preset_by_name(name.substr(4));
                sc.newton.iterations = cfg.iterations;
                sc.seed = corpus.seed + 1;
            } else {
                throw hevf::param_error("unknown scorer: " + name);
            }
            auto ts = hevf::run_trials(corpus, q, sc);
            auto rep = hevf::compute_eer(ts.genuine, ts.imposter);
            std::cout << name << ": EER " << 100.0 * rep.eer << "% at theta " << rep.eer_threshold
                      << " (" << ts.genuine.size() << " genuine / " << ts.imposter.size()
                      << " imposter)\n";
        }
        if (with_attacks) {
            hevf::NewtonConfig ncfg;
            ncfg.x0 = cfg.x0;
            auto ra = hevf::attack_random(corpus, q, ncfg, corpus.seed + 2);
            auto rp = hevf::attack_patterned(corpus, q, ncfg);
            std::cout << "attack random: FAR " << 100.0 * ra.attack_far << "% vs baseline "
                      << 100.0 * ra.baseline_far << "% at theta " << ra.theta << "\n";
            std::cout << "attack all-ones: FAR " << 100.0 * rp.attack_far << "% vs baseline "
                      << 100.0 * rp.baseline_far << "% at theta " << rp.theta << "\n";
        }
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const hevf::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return int(e.code());
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return int(hevf::errc::io);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
