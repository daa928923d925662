// SPDX-License-Identifier: Apache-2.0
//
// Ring multiply micro-benchmark: serial schoolbook reference vs the NTT
// path used everywhere else. Run with OMP_NUM_THREADS to see the parallel
// speedup of the NTT kernels.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>

#include "hevf/ref/serial_ring.hpp"
#include "hevf/rns_poly.hpp"
#include "hevf/sampling.hpp"

using namespace hevf;
using clk = std::chrono::steady_clock;

namespace {

double time_s(const std::function<void()>& fn, uint32_t reps) {
    double best = 1e30;
    for (uint32_t r = 0; r < reps; ++r) {
        auto t0 = clk::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(clk::now() - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Negacyclic ring multiply: schoolbook reference vs NTT"};
    std::vector<uint32_t> degrees = {256, 1024, 4096};
    uint32_t limbs = 3, reps = 3;
    uint64_t seed = 1;
    bool skip_schoolbook = false;
    app.add_option("--degrees", degrees, "Ring degrees to benchmark");
    app.add_option("--limbs", limbs, "RNS limb count");
    app.add_option("--repetitions", reps, "Best-of repetitions");
    app.add_option("--seed", seed, "RNG seed");
    app.add_flag("--ntt-only", skip_schoolbook, "Skip the O(N^2) reference");
    CLI11_PARSE(app, argc, argv);

    std::printf("%8s %6s %14s %12s %9s\n", "N", "limbs", "schoolbook", "ntt", "speedup");
    for (uint32_t n : degrees) {
        auto mods = generate_ntt_primes(n, std::vector<uint32_t>(limbs, 40));
        TableCache tables(n);
        Rng rng(seed);
        RnsPoly a = sample::uniform(n, mods, rng);
        RnsPoly b = sample::uniform(n, mods, rng);

        RnsPoly out_ntt(n, mods, Form::coeff);
        double t_ntt = time_s([&] { out_ntt = ring::ring_mul(a, b, tables); }, reps);

        if (skip_schoolbook) {
            std::printf("%8u %6u %14s %10.3f ms %9s\n", n, limbs, "-", 1e3 * t_ntt, "-");
            continue;
        }
        RnsPoly out_ref(n, mods, Form::coeff);
        double t_ref = time_s([&] { out_ref = ref::ring_mul_schoolbook(a, b); }, reps);
        if (out_ref.raw() != out_ntt.raw()) {
            std::fprintf(stderr, "mismatch at N=%u\n", n);
            return 1;
        }
        std::printf("%8u %6u %11.3f ms %10.3f ms %8.1fx\n", n, limbs, 1e3 * t_ref, 1e3 * t_ntt,
                    t_ref / t_ntt);
    }
    return 0;
}
