// SPDX-License-Identifier: Apache-2.0

// moment_solver: nonsingular cubic moment problems from the command line.
//
//   moment_solver solve [input.json] [--emit-matrices] [--seed N] ...
//   moment_solver verify beta.json measure.json [--tol 1e-8]
//   moment_solver random --atoms N --seed S
//   moment_solver info [input.json]

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cubic_moment/app.hpp"

namespace app = cubic_moment::app;

namespace {

/// Opens path, or stdin for "" and "-". Returns nullptr if the file is unreadable.
std::istream* open_input(const std::string& path, std::ifstream& file)
{
    if (path.empty() || path == "-")
        return &std::cin;
    file.open(path);
    return file ? &file : nullptr;
}

int missing_input(const std::string& path)
{
    std::cout << app::error_body("input_error", "cannot open " + path).dump(2) << '\n';
    std::cerr << "error: cannot open " << path << '\n';
    return app::kInputError;
}

void add_solver_flags(CLI::App* cmd, app::CliOptions& opts, std::optional<std::uint64_t>& seed)
{
    cmd->add_option("--tol-psd", opts.tol_psd, "PSD tolerance on smallest eigenvalues");
    cmd->add_option("--tol-k", opts.tol_k, "threshold below which |k| counts as zero");
    cmd->add_option("--tol-accept", opts.tol_accept, "acceptance threshold on the moment residual");
    cmd->add_option("--seed", seed, "seed for the joint eigenvalue retries (falls back to MOMENT_SOLVER_SEED)");
    cmd->add_flag("--quiet", opts.quiet, "suppress diagnostics on stderr");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App cli{"Atomic representing measures for nonsingular cubic bivariate moment sequences"};
    cli.require_subcommand(1);

    app::CliOptions opts;
    std::optional<std::uint64_t> seed;
    std::string input;

    auto* solve = cli.add_subcommand("solve", "recover a 3- or 4-atomic representing measure");
    solve->add_option("input", input, "request JSON (default: stdin)");
    solve->add_flag("--emit-matrices", opts.emit_matrices, "include M(1), M(2) and M(3) in the response");
    add_solver_flags(solve, opts, seed);

    auto* info = cli.add_subcommand("info", "print normalization diagnostics and k without solving");
    info->add_option("input", input, "request JSON (default: stdin)");
    add_solver_flags(info, opts, seed);

    std::string beta_path, measure_path;
    double tol = 1e-8;
    auto* verify = cli.add_subcommand("verify", "check a measure against a moment sequence");
    verify->add_option("beta", beta_path, "request JSON holding beta")->required();
    verify->add_option("measure", measure_path, "JSON with an \"atoms\" array (e.g. solve output)")->required();
    verify->add_option("--tol", tol, "residual threshold, scaled by max(1, max |beta|)");

    int atoms = 4;
    std::uint64_t random_seed = 0;
    auto* random = cli.add_subcommand("random", "emit the moments of a random atomic measure");
    random->add_option("--atoms", atoms, "number of atoms (>= 3)");
    random->add_option("--seed", random_seed, "generator seed");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = cli.exit(e);
        return rc == 0 ? 0 : app::kInputError;
    }
    opts.seed = seed;

    if (*solve || *info) {
        std::ifstream file;
        std::istream* in = open_input(input, file);
        if (!in)
            return missing_input(input);
        return *solve ? app::cmd_solve(*in, opts, std::cout, std::cerr) : app::cmd_info(*in, opts, std::cout, std::cerr);
    }
    if (*verify)
        return app::cmd_verify(beta_path, measure_path, tol, std::cout, std::cerr);
    return app::cmd_random(atoms, random_seed, std::cout, std::cerr);
}
