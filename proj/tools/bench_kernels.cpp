// Timing comparison between the serial reference kernels and the
// OpenMP-parallel paths: dense matmul and the symbol grid sweep.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "clqr/cli.hpp"
#include "clqr/condense.hpp"
#include "clqr/matkit.hpp"
#include "clqr/symbol.hpp"

using clock_type = std::chrono::steady_clock;

static double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

static matkit::Mat random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    matkit::Mat m(rows, cols);
    std::uint64_t s = seed;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            s += 0x9E3779B97f4A7C15ULL;
            std::uint64_t z = s;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            z ^= z >> 31;
            m(i, j) = static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
        }
    return m;
}

int main() {
#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled at build time\n");
#endif

    // Dense matmul at the sizes condensation produces (N n x N m blocks).
    for (std::size_t n : {128u, 256u, 512u, 900u}) {
        const matkit::Mat a = random_matrix(n, n, 1);
        const matkit::Mat b = random_matrix(n, n, 2);

        auto t0 = clock_type::now();
        const matkit::Mat cs = matkit::serial::matmul(a, b);
        const double serial_s = seconds_since(t0);

        t0 = clock_type::now();
        const matkit::Mat cp = matkit::matmul(a, b);
        const double parallel_s = seconds_since(t0);

        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                diff = std::max(diff, std::abs(cs(i, j) - cp(i, j)));

        std::printf("matmul %4zu x %4zu  serial %8.4fs  parallel %8.4fs  speedup %5.2fx  "
                    "max|diff| %g\n",
                    n, n, serial_s, parallel_s, serial_s / parallel_s, diff);
    }

    // Symbol sweep: 4096 grid eigensolves for the prestabilized pendulum.
    {
        const clqr::ModelBundle bundle = clqr::cli::resolve_system("pendulum", 0.02);
        clqr::ClqrSpec spec = bundle.spec;
        spec.terminal.kind = clqr::TerminalKind::DareSolution;
        const clqr::CondensedQp qp = clqr::condense(bundle.model, spec, true);
        const clqr::MatrixSymbol sym = clqr::hessian_symbol(qp);

        auto t0 = clock_type::now();
        clqr::SpectralBounds b1 = clqr::symbol_bounds(sym);
        const double sweep_s = seconds_since(t0);
        std::printf("symbol sweep 4096 pts: %8.4fs  kappa %.9f\n", sweep_s, b1.kappa);
    }
    return 0;
}
