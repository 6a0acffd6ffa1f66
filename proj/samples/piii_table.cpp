// Prints r_n, rbar_n and v_n for the P-III' system from the determinant
// and the discrete Painleve II recurrence, with their relative deviation.

#include <cstdio>

#include "ptau/ptau.hpp"

int main(int argc, char** argv) {
    using namespace ptau;
    const char* t = argc > 1 ? argv[1] : "1";
    const char* mu = argc > 2 ? argv[2] : "0.3";
    const long n_max = 12;

    PrecisionPolicy pol;
    PrecisionScope scope(pol.bits_for(n_max));
    const SystemParams p = SystemParams::parse(System::PIII, t, mu, "0", pol, working_precision());
    const ReflectionSequence det = det_route(p, n_max);
    const ReflectionSequence rec = run_dp2(p, n_max);

    std::printf("%3s  %-26s %-26s %-26s %s\n", "n", "r_n", "rbar_n", "v_n", "dev");
    for (long n = 0; n <= n_max; ++n) {
        const Real dev = max(rel_deviation(rec.r(n), det.r(n), deviation_floor()),
                             rel_deviation(rec.rbar(n), det.rbar(n), deviation_floor()));
        std::printf("%3ld  %-26s %-26s %-26s %s\n", n, det.r(n).to_string(18).c_str(), det.rbar(n).to_string(18).c_str(),
                    det.v(n).to_string(18).c_str(), dev.to_string(2).c_str());
    }
}
