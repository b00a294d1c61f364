// Dumps the seeded oracle series as CSV so oracle/compute_adf_reference.py can
// run the reference statistical package over the exact same values. Usage:
//   make_adf_fixtures <output-dir>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "aqf/numfmt.hpp"
#include "support/series_fixtures.hpp"

namespace {

void dump(const std::string& dir, const std::string& name, const std::vector<double>& x) {
    std::ofstream out(dir + "/" + name + ".csv");
    out << "value\n";
    for (double v : x) out << aqf::format_double17(v) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_adf_fixtures <output-dir>\n";
        return 1;
    }
    const std::string dir = argv[1];
    std::filesystem::create_directories(dir);
    constexpr int n = 500;
    for (std::uint64_t seed = 101; seed <= 105; ++seed)
        dump(dir, "walk_" + std::to_string(seed), fixtures::random_walk_series(seed, n));
    for (std::uint64_t seed = 201; seed <= 205; ++seed)
        dump(dir, "noise_" + std::to_string(seed), fixtures::iid_noise_series(seed, n));
    std::cout << "fixtures written to " << dir << '\n';
    return 0;
}
