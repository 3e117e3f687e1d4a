// Wall-clock comparison of the OpenMP ensemble driver against the serial
// reference on the same trajectories.
//
//   bench_ensemble [trajectories] [workers]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "qzeno/ensemble.hpp"

int main(int argc, char** argv) {
    using namespace qzeno;
    const std::size_t m = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 16;
    const int workers = argc > 2 ? std::atoi(argv[2]) : omp_get_max_threads();

    ModelSpec model;
    model.scenario = Scenario::CpbReduced;
    model.k = 1.0;
    model.lambda = 0.75;
    model.omega_R = 20.0;
    model.E_J_over_hbar = 1000.0;
    model.Gamma = 2e-3;
    model.T = 0.0;
    model.gamma_CPB = 0.02;
    model.dims = SpaceLayout{20, 2};
    IntegratorConfig ic;
    ic.dt = 1e-3;
    ic.t_final = 5.0;
    ic.unraveling = Unraveling::Sme;
    ic.snapshot_stride = 10;
    const ModelSystem sys = build_model(model);
    const InitialState init = kron(coherent_state(20, {std::sqrt(2.0), 0.0}), cpb_ground());
    const TrajectoryFn fn = [&](std::uint64_t i) { return run_trajectory(sys, init, ic, {"N_R"}, i); };

    auto time = [](auto&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        auto r = f();
        return std::make_pair(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
                              std::move(r));
    };
    const auto [t_serial, serial] = time([&] { return run_ensemble_serial(fn, {m, 1, false}); });
    const auto [t_par, par] = time([&] { return run_ensemble(fn, {m, workers, false}); });

    const bool identical = serial.mean.at("N_R") == par.mean.at("N_R");
    std::printf("trajectories=%zu dim=40 steps=%lld\n", m, static_cast<long long>(ic.num_steps()));
    std::printf("serial   : %8.3f s\n", t_serial);
    std::printf("openmp x%d: %8.3f s  (speedup %.2f)\n", workers, t_par, t_serial / t_par);
    std::printf("results identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
