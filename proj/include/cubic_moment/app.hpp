// SPDX-License-Identifier: Apache-2.0

#ifndef CUBIC_MOMENT_APP_HPP
#define CUBIC_MOMENT_APP_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "measure.hpp"

namespace cubic_moment::app {

enum ExitCode : int {
    kOk = 0,
    kInputError = 1,
    kSingularM1 = 2,
    kVerificationFailure = 3,
};

/// Malformed or inconsistent JSON input.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveRequest {
    std::array<double, 10> beta{};
    Tolerances tolerances;
    std::optional<std::uint64_t> seed;
};

/// Overrides given on the command line; they win over the request body.
struct CliOptions {
    std::optional<double> tol_psd;
    std::optional<double> tol_k;
    std::optional<double> tol_accept;
    std::optional<std::uint64_t> seed;
    bool emit_matrices = false;
    bool quiet = false;
};

SolveRequest parse_request(const nlohmann::json& j);
SolveRequest read_request(std::istream& in);
AtomicMeasure<double> parse_measure(const nlohmann::json& j);
MomentSequence<double> to_sequence(const SolveRequest& req);

/// --seed, then the request's seed, then MOMENT_SOLVER_SEED, then the default.
std::uint64_t resolve_seed(const CliOptions& opts, const SolveRequest& req);
SolveOptions resolve_options(const CliOptions& opts, const SolveRequest& req);

nlohmann::json solve_response(const SolveResult<double>& result, const MomentSequence<double>& beta,
                              bool emit_matrices);
nlohmann::json error_body(std::string_view code, std::string_view message);

/// Draws n atoms from a generator seeded with seed and returns their exact
/// cubic moments; redraws until both minors of the normalized M(1) are >= 0.01.
std::array<double, 10> random_instance(int n_atoms, std::uint64_t seed);

int cmd_solve(std::istream& in, const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const std::string& beta_path, const std::string& measure_path, double tol, std::ostream& out,
               std::ostream& err);
int cmd_random(int n_atoms, std::uint64_t seed, std::ostream& out, std::ostream& err);
int cmd_info(std::istream& in, const CliOptions& opts, std::ostream& out, std::ostream& err);

} // namespace cubic_moment::app

#endif // CUBIC_MOMENT_APP_HPP
