#pragma once

#include <string>
#include <vector>

namespace bim::verify {

struct Criterion {
    int id = 0;
    std::string name;
    bool pass = false;
    bool skipped = false;
    std::string detail;     // deterministic measurement summary
    double seconds = 0.0;   // wall clock, reported separately from the log
};

struct Options {
    bool quick = false;  // skip the K=3 oracle comparison (criterion 5)
};

struct Report {
    std::vector<Criterion> criteria;
    bool all_pass = false;
    double seconds = 0.0;
};

// Runs the full verification suite. The determinism criterion re-runs the
// other criteria a second time and compares the rendered logs byte for byte.
Report run(const Options& opt = {});

// One line per criterion; deterministic (contains no timings).
std::string render(const Report& report);

}  // namespace bim::verify
