// Watches the P-V reflection coefficients approach P-III' as nu grows.

#include <cstdio>

#include "ptau/ptau.hpp"

int main() {
    using namespace ptau;
    StudyConfig cfg;
    PrecisionPolicy pol;
    cfg.params = SystemParams::parse(System::PIII, "1", "0.3", "0", pol, pol.bits_for(4));
    cfg.degeneration_n = 4;
    for (int nu = 16; nu <= 1024; nu *= 2) cfg.nu_list.emplace_back(nu);

    const DegenerationReport rep = run_degeneration(cfg);
    std::printf("%6s  %-10s %-10s %s\n", "nu", "err", "hyp_err", "ratio");
    for (const auto& row : rep.rows) {
        std::printf("%6s  %-10s %-10s %.4f\n", row.nu.to_string(4).c_str(), row.err.to_string(3).c_str(),
                    row.hyp_err.to_string(3).c_str(), row.ratio);
    }
}
