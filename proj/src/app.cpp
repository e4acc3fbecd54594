// SPDX-License-Identifier: Apache-2.0

#include "cubic_moment/app.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

namespace cubic_moment::app {

using nlohmann::json;

namespace {

double number(const json& j, const char* what)
{
    if (!j.is_number())
        throw InputError(std::string(what) + " must be a number");
    return j.get<double>();
}

json matrix_json(const Matrix<double>& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_json(const Eigen::Ref<const Vector<double>>& v)
{
    json a = json::array();
    for (Eigen::Index n = 0; n < v.size(); ++n)
        a.push_back(v(n));
    return a;
}

json map_json(const AffineMap<double>& psi)
{
    return {{"a", psi.a}, {"b", psi.b}, {"c", psi.c}, {"d", psi.d}, {"e", psi.e}, {"f", psi.f}};
}

json polynomial_json(const Polynomial2<double>& p)
{
    json o = json::object();
    for (const auto& [m, c] : p.terms())
        o[to_string(m)] = c;
    return o;
}

json certificate_json(const NormalizationCertificate<double>& cert)
{
    return {{"beta00", cert.scale},
            {"d2", cert.d2},
            {"d3", cert.d3},
            {"map", map_json(cert.map)},
            {"a_vec", vector_json(cert.a_vec)},
            {"normalized_beta", vector_json(cert.normalized.values())}};
}

json extension_json(const ExtensionResult<double>& ext)
{
    json basis = json::array();
    for (const auto& m : ext.basis)
        basis.push_back(to_string(m));
    json relations = json::array();
    for (const auto& r : ext.relations)
        relations.push_back({{"target", to_string(r.target)}, {"combo", polynomial_json(r.combo)}});
    const auto& q = ext.quartics;
    json out = {{"quartics", {{"b40", q(0)}, {"b31", q(1)}, {"b22", q(2)}, {"b13", q(3)}, {"b04", q(4)}}},
                {"basis", basis},
                {"relations", relations}};
    if (ext.p_vec)
        out["p_vec"] = vector_json(*ext.p_vec);
    if (ext.beta50)
        out["beta50"] = *ext.beta50;
    return out;
}

std::string read_all(std::istream& in)
{
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw InputError("cannot open " + path);
    try {
        return json::parse(read_all(f));
    } catch (const json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

int report_error(std::ostream& out, std::ostream& err, bool quiet, int code, std::string_view tag,
                 const std::string& message, json extra = json::object())
{
    json body = error_body(tag, message);
    for (auto& [key, value] : extra.items())
        body["error"][key] = value;
    out << body.dump(2) << '\n';
    if (!quiet)
        err << "error: " << message << '\n';
    return code;
}

/// Runs body, mapping library exceptions onto exit codes and error bodies.
template <typename Body>
int guarded(std::ostream& out, std::ostream& err, bool quiet, Body&& body)
{
    try {
        return body();
    } catch (const InputError& e) {
        return report_error(out, err, quiet, kInputError, "input_error", e.what());
    } catch (const json::exception& e) {
        return report_error(out, err, quiet, kInputError, "input_error", e.what());
    } catch (const SingularM1Error& e) {
        return report_error(out, err, quiet, kSingularM1, "singular_m1", e.what(),
                            {{"minor", e.minor}, {"value", e.value}});
    } catch (const PreconditionError& e) {
        return report_error(out, err, quiet, kInputError, "input_error", e.what());
    } catch (const DegreeError& e) {
        return report_error(out, err, quiet, kInputError, "input_error", e.what());
    } catch (const MomentError& e) {
        return report_error(out, err, quiet, kVerificationFailure, "verification_failed", e.what());
    }
}

} // namespace

SolveRequest parse_request(const json& j)
{
    if (!j.is_object())
        throw InputError("request must be a JSON object");
    if (!j.contains("beta") || !j["beta"].is_array())
        throw InputError("request needs a \"beta\" array");
    const auto& beta = j["beta"];
    if (beta.size() != 10)
        throw InputError("\"beta\" must hold exactly 10 moments (b00 b10 b01 b20 b11 b02 b30 b21 b12 b03), got " +
                         std::to_string(beta.size()));
    SolveRequest req;
    for (std::size_t n = 0; n < 10; ++n)
        req.beta[n] = number(beta[n], "beta entry");
    if (!(req.beta[0] > 0.0))
        throw InputError("beta00 must be positive");

    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (!t.is_object())
            throw InputError("\"tolerances\" must be an object");
        Tolerances& tol = req.tolerances;
        const std::pair<const char*, double*> fields[] = {
            {"psd", &tol.psd},         {"range", &tol.range},     {"flat", &tol.flat},
            {"commute", &tol.commute}, {"eig", &tol.eig},         {"cluster", &tol.cluster},
            {"k", &tol.k},             {"accept", &tol.accept},   {"singular", &tol.singular},
            {"min_weight", &tol.min_weight}, {"atom_separation", &tol.atom_separation},
            {"variety", &tol.variety}};
        for (const auto& [key, value] : t.items()) {
            bool known = false;
            for (const auto& [name, slot] : fields)
                if (key == name) {
                    *slot = number(value, "tolerance");
                    known = true;
                }
            if (!known)
                throw InputError("unknown tolerance \"" + key + "\"");
        }
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned())
            throw InputError("\"seed\" must be a nonnegative integer");
        req.seed = j["seed"].get<std::uint64_t>();
    }
    return req;
}

SolveRequest read_request(std::istream& in)
{
    try {
        return parse_request(json::parse(read_all(in)));
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

AtomicMeasure<double> parse_measure(const json& j)
{
    if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array())
        throw InputError("measure needs an \"atoms\" array");
    AtomicMeasure<double> mu;
    for (const auto& a : j["atoms"]) {
        if (!a.is_object() || !a.contains("x") || !a.contains("y") || !a.contains("weight"))
            throw InputError("each atom needs x, y and weight");
        mu.atoms.push_back({number(a["x"], "x"), number(a["y"], "y"), number(a["weight"], "weight")});
    }
    return mu;
}

MomentSequence<double> to_sequence(const SolveRequest& req)
{
    return MomentSequence<double>(3, Eigen::Map<const Vector<double>>(req.beta.data(), 10));
}

std::uint64_t resolve_seed(const CliOptions& opts, const SolveRequest& req)
{
    if (opts.seed)
        return *opts.seed;
    if (req.seed)
        return *req.seed;
    if (const char* env = std::getenv("MOMENT_SOLVER_SEED"); env && *env) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0')
            return v;
        throw InputError("MOMENT_SOLVER_SEED must be a nonnegative integer");
    }
    return SolveOptions{}.seed;
}

SolveOptions resolve_options(const CliOptions& opts, const SolveRequest& req)
{
    SolveOptions so;
    so.tol = req.tolerances;
    if (opts.tol_psd)
        so.tol.psd = *opts.tol_psd;
    if (opts.tol_k)
        so.tol.k = *opts.tol_k;
    if (opts.tol_accept)
        so.tol.accept = *opts.tol_accept;
    so.seed = resolve_seed(opts, req);
    return so;
}

json error_body(std::string_view code, std::string_view message)
{
    return {{"error", {{"code", code}, {"message", message}}}};
}

json solve_response(const SolveResult<double>& result, const MomentSequence<double>& beta, bool emit_matrices)
{
    json atoms = json::array();
    for (const auto& a : result.measure.atoms)
        atoms.push_back({{"x", a.x}, {"y", a.y}, {"weight", a.weight}});
    const auto& rep = result.report;
    json diag = {{"case", case_name(rep.case_tag)},
                 {"k", rep.k},
                 {"rank", rep.rank},
                 {"variety_size", rep.variety_size},
                 {"max_moment_residual", rep.max_moment_residual},
                 {"min_weight", rep.min_weight},
                 {"commutator_norm", rep.commutator_norm},
                 {"variety_residual", rep.variety_residual},
                 {"d2", rep.certificate.d2},
                 {"d3", rep.certificate.d3},
                 {"a_vec", vector_json(rep.certificate.a_vec)}};
    json out = {{"atoms", atoms},
                {"diagnostics", diag},
                {"certificate",
                 {{"normalization", certificate_json(rep.certificate)}, {"extension", extension_json(result.extension)}}}};
    if (emit_matrices) {
        json m = {{"m1", matrix_json(moment_matrix(beta, 1).entries)}, {"m2", matrix_json(result.extension.m2.entries)}};
        if (result.extension.m3)
            m["m3"] = matrix_json(result.extension.m3->entries);
        out["matrices"] = m;
    }
    return out;
}

std::array<double, 10> random_instance(int n_atoms, std::uint64_t seed)
{
    if (n_atoms < 3)
        throw InputError("--atoms must be at least 3 for M(1) to be nonsingular");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    for (;;) {
        std::vector<double> xs, ys, ws;
        for (int n = 0; n < n_atoms; ++n) {
            xs.push_back(coord(rng));
            ys.push_back(coord(rng));
            ws.push_back(weight(rng));
        }
        const Vector<double> m = atomic_moments(xs, ys, ws, 3);
        std::array<double, 10> beta{};
        for (std::size_t n = 0; n < 10; ++n)
            beta[n] = m(static_cast<Eigen::Index>(n));
        const auto [d2, d3] = minors(MomentSequence<double>(3, m));
        if (d2 >= 0.01 && d3 >= 0.01)
            return beta;
    }
}

int cmd_solve(std::istream& in, const CliOptions& opts, std::ostream& out, std::ostream& err)
{
    return guarded(out, err, opts.quiet, [&] {
        const SolveRequest req = read_request(in);
        const auto beta = to_sequence(req);
        const auto options = resolve_options(opts, req);
        const auto result = solve_cubic(beta, options);
        out << solve_response(result, beta, opts.emit_matrices).dump(2) << '\n';
        if (!opts.quiet)
            err << case_name(result.report.case_tag) << ": " << result.measure.size() << " atoms, max residual "
                << result.report.max_moment_residual << '\n';
        return int(kOk);
    });
}

int cmd_verify(const std::string& beta_path, const std::string& measure_path, double tol, std::ostream& out,
               std::ostream& err)
{
    return guarded(out, err, false, [&] {
        const auto req = parse_request(read_json_file(beta_path));
        const auto mu = parse_measure(read_json_file(measure_path));
        const auto beta = to_sequence(req);
        const auto rep = verify_measure(mu, beta);
        const double threshold = tol * std::max(1.0, beta.values().cwiseAbs().maxCoeff());

        const auto labels = degree_lex_monomials(3);
        char line[160];
        std::snprintf(line, sizeof line, "%-8s %24s %24s %12s\n", "moment", "target", "measure", "residual");
        out << line;
        for (std::size_t n = 0; n < labels.size(); ++n) {
            const auto idx = static_cast<Eigen::Index>(n);
            const std::string name = "b" + std::to_string(labels[n].i) + std::to_string(labels[n].j);
            std::snprintf(line, sizeof line, "%-8s %24.17g %24.17g %12.3e\n", name.c_str(), beta.values()(idx),
                          beta.values()(idx) + rep.residuals(idx), std::abs(rep.residuals(idx)));
            out << line;
        }
        const bool ok = rep.max_moment_residual <= threshold;
        std::snprintf(line, sizeof line, "max_residual %.3e threshold %.3e min_weight %.6g %s\n",
                      rep.max_moment_residual, threshold, rep.min_weight, ok ? "OK" : "FAIL");
        out << line;
        return int(ok ? kOk : kVerificationFailure);
    });
}

int cmd_random(int n_atoms, std::uint64_t seed, std::ostream& out, std::ostream& err)
{
    return guarded(out, err, false, [&] {
        const auto beta = random_instance(n_atoms, seed);
        out << json{{"beta", beta}}.dump(2) << '\n';
        return int(kOk);
    });
}

int cmd_info(std::istream& in, const CliOptions& opts, std::ostream& out, std::ostream& err)
{
    return guarded(out, err, opts.quiet, [&] {
        const SolveRequest req = read_request(in);
        const auto options = resolve_options(opts, req);
        const auto cert = normalize(to_sequence(req), options.tol);
        const double k = compute_k(cert.a_vec);
        const CaseTag tag = classify(k, options.tol);
        json body = certificate_json(cert);
        body["k"] = k;
        body["case"] = case_name(tag);
        out << body.dump(2) << '\n';
        return int(kOk);
    });
}

} // namespace cubic_moment::app
