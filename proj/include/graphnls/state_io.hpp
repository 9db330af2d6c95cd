#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graphnls/morse.hpp"
#include "graphnls/stationary.hpp"

namespace graphnls {

/// One verifier line of a state report.
struct Check {
    std::string name;
    double value = 0.0;
    std::string criterion;   // human-readable threshold, e.g. "<= 1e-6"
    bool pass = false;
};

struct VerificationReport {
    std::vector<Check> checks;
    bool pass = true;
    std::string first_failure;

    void add(const std::string& name, double value, const std::string& criterion, bool ok);
};

/// Run every verifier on a state: positivity, lambda sign, mass target,
/// Pohozaev, action identities, edge-Hamiltonian constancy, Kirchhoff flux,
/// the negative-level bound, and the Morse certificate.
VerificationReport verify_state(const StationaryState& s,
                                std::optional<double> mass_target = std::nullopt,
                                bool with_morse = true);

std::string format_report(const VerificationReport& rep);

/// Solver metadata needed to rebuild the discretization of a saved state.
struct StateFileMeta {
    double h = 0.01;
    double truncation = 10.0;
    FarBc far_bc = FarBc::Dirichlet;
    std::optional<double> mass_target;
    unsigned long seed = 0;
};

/// Structured-text state file: metadata block, the serialized graph, and the
/// CSV function dump.
std::string write_state_file(const StationaryState& s, const StateFileMeta& meta);

struct LoadedState {
    StationaryState state;
    StateFileMeta meta;
};

LoadedState read_state_file(const std::string& text);
LoadedState load_state_file(const std::string& path);

}  // namespace graphnls
