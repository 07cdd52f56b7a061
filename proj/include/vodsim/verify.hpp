#pragma once

#include <string>
#include <vector>

namespace vodsim {

struct VerifyCheck {
    std::string name;
    bool passed;
    std::string detail;
};

struct VerifyOptions {
    bool quick = false;             // reduced Monte Carlo sample counts
    bool negative_control = false;  // corrupt a demand table and expect detection
};

/// The oracle cross-check battery behind the `verify` CLI command:
/// multinomial normalization, enumeration agreement, quadrature agreement,
/// ball-volume form agreement, inclusion-exclusion vs Monte Carlo volume,
/// and a conservation replay of the channel state machine.
std::vector<VerifyCheck> run_verify(const VerifyOptions& options);

bool all_passed(const std::vector<VerifyCheck>& checks);

}  // namespace vodsim
