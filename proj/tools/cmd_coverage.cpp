#include "cli_common.hpp"

#include "relight/curve.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace relight::cli {

namespace fs = std::filesystem;

int cmd_coverage(const Args& args) {
    const struct {
        const char* name;
        ActionSpace space;
    } spaces[] = {
        {"ours", ActionSpace::wide()},
        {"baseline", ActionSpace::baseline()},
    };
    const int steps[] = {1, 3, 6};

    std::printf("%-12s", "action space");
    for (int n : steps) std::printf("     N=%d", n);
    std::printf("\n");
    for (const auto& row : spaces) {
        std::printf("%-12s", row.name);
        for (int n : steps) std::printf("  %.4f", coverage_range(row.space, n));
        std::printf("\n");
    }

    if (args.out) {
        fs::create_directories(*args.out);
        const fs::path file = fs::path{*args.out} / "envelopes.csv";
        std::ofstream out{file, std::ios::trunc};
        if (!out) throw IoError{"cannot write " + file.string()};
        out << "space,n,s,f_min,f_max\n";
        constexpr int kSamples = 257;
        for (const auto& row : spaces)
            for (int n : steps)
                for (int i = 0; i < kSamples; ++i) {
                    const double s = static_cast<double>(i) / (kSamples - 1);
                    const Envelope e = envelope_at(row.space, n, s);
                    char line[160];
                    std::snprintf(line, sizeof line, "%s,%d,%.8f,%.8f,%.8f\n", row.name, n, s,
                                  e.lower, e.upper);
                    out << line;
                }
        std::cout << "envelope samples: " << file.string() << '\n';
    }
    return 0;
}

} // namespace relight::cli
