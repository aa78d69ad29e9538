#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace nlvis {

struct AcceptanceOptions {
    bool quick = false;  // reduced R lists, path counts and sample counts
    std::uint64_t seed = 20240611;
    std::filesystem::path output = "out/reproduce";
    bool inject_wrong_exponent = false;  // negative control: predicted exponents shifted by +1
    bool determinism = true;             // criterion 12 reruns the suite
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Runs criteria 1-11 into output/run1 and, for criterion 12, again into
// output/run2, comparing every CSV byte for byte. Prints one line per
// criterion as results complete, in criterion order.
std::vector<CriterionResult> reproduce_all(const AcceptanceOptions& opts, std::ostream& out);

// 0 when every criterion passes, 2 otherwise.
int acceptance_exit_code(const std::vector<CriterionResult>& results);

}  // namespace nlvis
