#include "dualinv/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

namespace dualinv {

namespace {

double finite_number(const Json& v, const char* where) {
    if (!v.is_number()) {
        throw SchemaError(std::string(where) + ": expected a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ValueError(std::string(where) + ": non-finite entry");
    }
    return x;
}

template <BaseField T>
T entry_from_json(const Json& v, const char* where) {
    if constexpr (is_complex_v<T>) {
        if (!v.is_array() || v.size() != 2) {
            throw SchemaError(std::string(where) + ": complex entries must be [re, im] pairs");
        }
        return {finite_number(v[0], where), finite_number(v[1], where)};
    } else {
        return finite_number(v, where);
    }
}

template <BaseField T>
BaseMatrix<T> matrix_from_json(const Json& v, Eigen::Index rows, Eigen::Index cols, const char* where) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows) {
        throw SchemaError(std::string(where) + ": expected " + std::to_string(rows) + " rows");
    }
    BaseMatrix<T> M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Json& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw SchemaError(std::string(where) + ": every row must have " + std::to_string(cols) + " entries");
        }
        for (Eigen::Index j = 0; j < cols; ++j) {
            M(i, j) = entry_from_json<T>(row[static_cast<std::size_t>(j)], where);
        }
    }
    return M;
}

Eigen::Index dimension(const Json& doc, const char* key) {
    if (!doc.contains(key)) {
        throw SchemaError(std::string("missing key '") + key + "'");
    }
    const Json& v = doc[key];
    if (!v.is_number_integer() || v.get<long long>() < 1) {
        throw SchemaError(std::string("'") + key + "' must be a positive integer");
    }
    return static_cast<Eigen::Index>(v.get<long long>());
}

const Json& member(const Json& doc, const char* key) {
    if (!doc.contains(key)) {
        throw SchemaError(std::string("missing key '") + key + "'");
    }
    return doc[key];
}

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    } catch (const Json::out_of_range& e) {
        // A numeric literal beyond the double range, e.g. 1e999.
        throw ValueError(std::string("non-finite number: ") + e.what());
    }
}

template <BaseField T>
Json entry_to_json(const T& v) {
    if constexpr (is_complex_v<T>) {
        return Json::array({v.real(), v.imag()});
    } else {
        return v;
    }
}

}  // namespace

AnyDualMatrix from_json(const Json& doc) {
    if (!doc.is_object()) {
        throw SchemaError("dual matrix document must be a JSON object");
    }
    const Eigen::Index rows = dimension(doc, "rows");
    const Eigen::Index cols = dimension(doc, "cols");
    const Json& field = member(doc, "field");
    if (!field.is_string()) {
        throw SchemaError("'field' must be \"real\" or \"complex\"");
    }
    const std::string f = field.get<std::string>();
    if (f == "real") {
        return DualMatrix<double>(matrix_from_json<double>(member(doc, "standard"), rows, cols, "standard"),
                                  matrix_from_json<double>(member(doc, "dual"), rows, cols, "dual"));
    }
    if (f == "complex") {
        return DualMatrix<Complex>(matrix_from_json<Complex>(member(doc, "standard"), rows, cols, "standard"),
                                   matrix_from_json<Complex>(member(doc, "dual"), rows, cols, "dual"));
    }
    throw SchemaError("'field' must be \"real\" or \"complex\"");
}

AnyDualMatrix parse(const std::string& document) { return from_json(parse_json(document)); }

template <BaseField T>
Json matrix_to_json(const BaseMatrix<T>& M) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            row.push_back(entry_to_json<T>(M(i, j)));
        }
        out.push_back(std::move(row));
    }
    return out;
}

template <BaseField T>
Json to_json(const DualMatrix<T>& A) {
    Json out;
    out["rows"] = A.rows();
    out["cols"] = A.cols();
    out["field"] = is_complex_v<T> ? "complex" : "real";
    out["standard"] = matrix_to_json<T>(A.standard());
    out["dual"] = matrix_to_json<T>(A.dual());
    return out;
}

std::string dump(const Json& j) { return j.dump() + "\n"; }

template <BaseField T>
std::string emit(const DualMatrix<T>& A) {
    return dump(to_json(A));
}

std::string emit(const AnyDualMatrix& A) {
    return std::visit([](const auto& m) { return emit(m); }, A);
}

template <BaseField T>
Json svd_to_json(const DualSVD<T>& f) {
    Json sigma = Json::array();
    for (const auto& s : f.sigma) {
        Json e;
        e["standard"] = s.standard();
        e["dual"] = s.dual();
        sigma.push_back(std::move(e));
    }
    Json out;
    out["sigma"] = std::move(sigma);
    out["r"] = f.r;
    out["t"] = f.t;
    out["U"] = to_json(f.U);
    out["V"] = to_json(f.V);
    return out;
}

template <BaseField T>
Json classification_to_json(const Classification<T>& c) {
    Json out;
    out["M2"] = matrix_to_json<T>(c.M2);
    out["M3"] = matrix_to_json<T>(c.M3);
    out["M4"] = matrix_to_json<T>(c.M4);
    out["dmpgi_exists"] = c.dmpgi_exists;
    out["gmpi_equals_mpdgi"] = c.gmpi_equals_mpdgi;
    out["all_three_equal"] = c.all_three_equal;
    out["summary"] = c.summary();
    return out;
}

Json condition_report_to_json(const ConditionReport& rep) {
    Json residuals;
    Json passes;
    for (Condition c : kAllConditions) {
        residuals[condition_name(c)] = rep.residual(c);
        passes[condition_name(c)] = rep.passes(c);
    }
    Json out;
    out["residuals"] = std::move(residuals);
    out["passes"] = std::move(passes);
    out["threshold"] = rep.threshold;
    return out;
}

Json harness_report_to_json(const HarnessReport& rep) {
    Json props;
    for (const auto& [name, st] : rep.properties) {
        Json failures = Json::array();
        for (const auto& f : st.failures) {
            Json e;
            e["spec"] = f.spec_index;
            e["trial"] = f.trial;
            e["seed"] = f.seed;
            e["residual"] = f.residual;
            failures.push_back(std::move(e));
        }
        Json p;
        p["pass"] = st.pass;
        p["fail"] = st.fail;
        p["vacuous"] = st.vacuous;
        p["max_residual"] = st.max_residual;
        p["failures"] = std::move(failures);
        props[name] = std::move(p);
    }
    Json out;
    out["trials"] = rep.trials;
    out["all_passed"] = rep.all_passed();
    out["properties"] = std::move(props);
    return out;
}

std::vector<EnsembleSpec> parse_specs(const std::string& document) {
    const Json doc = parse_json(document);
    if (!doc.is_object() || !doc.contains("specs") || !doc["specs"].is_array()) {
        throw SchemaError("harness spec must be an object with a \"specs\" array");
    }
    std::vector<EnsembleSpec> out;
    for (const Json& s : doc["specs"]) {
        if (!s.is_object()) {
            throw SchemaError("each ensemble spec must be an object");
        }
        EnsembleSpec e;
        e.rows = dimension(s, "rows");
        e.cols = dimension(s, "cols");
        const Json& field = member(s, "field");
        if (!field.is_string()) {
            throw SchemaError("'field' must be a string");
        }
        e.field = field_from_string(field.get<std::string>());
        if (s.contains("standard_rank")) {
            const Json& r = s["standard_rank"];
            if (r.is_string() && r.get<std::string>() == "random") {
                e.standard_rank.reset();
            } else if (r.is_number_integer()) {
                e.standard_rank = static_cast<Eigen::Index>(r.get<long long>());
            } else {
                throw SchemaError("'standard_rank' must be an integer or \"random\"");
            }
        }
        if (s.contains("structure")) {
            if (!s["structure"].is_string()) {
                throw SchemaError("'structure' must be a string");
            }
            e.structure = structure_from_string(s["structure"].get<std::string>());
        }
        const Json& trials = member(s, "trials");
        if (!trials.is_number_integer() || trials.get<long long>() < 1) {
            throw InvalidSpec("'trials' must be a positive integer");
        }
        e.trials = static_cast<std::size_t>(trials.get<long long>());
        if (s.contains("seed")) {
            if (!s["seed"].is_number_unsigned()) {
                throw SchemaError("'seed' must be an unsigned integer");
            }
            e.seed = s["seed"].get<std::uint64_t>();
        }
        if (s.contains("sigma_range")) {
            const Json& r = s["sigma_range"];
            if (!r.is_array() || r.size() != 2) {
                throw SchemaError("'sigma_range' must be [lo, hi]");
            }
            e.sigma_min = finite_number(r[0], "sigma_range");
            e.sigma_max = finite_number(r[1], "sigma_range");
        }
        e.validate();
        out.push_back(e);
    }
    if (out.empty()) {
        throw InvalidSpec("harness spec lists no ensembles");
    }
    return out;
}

namespace {

std::string read_source(const std::string& path, std::istream& in) {
    std::ostringstream buf;
    if (path == "-") {
        buf << in.rdbuf();
    } else {
        std::ifstream file(path, std::ios::binary);
        if (!file) {
            throw std::ios_base::failure("cannot open '" + path + "'");
        }
        buf << file.rdbuf();
    }
    return buf.str();
}

struct Options {
    std::string input;
    std::string output;
    std::string inverse;
    std::string spec;
    double tol_rank = 0.0;
    double tol_residual = 1e-10;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;

    TolerancePolicy policy() const { return {tol_rank, tol_residual}; }
};

Json run_matrix_command(const std::string& cmd, const AnyDualMatrix& any, const TolerancePolicy& tol) {
    return std::visit(
        [&](const auto& A) -> Json {
            if (cmd == "mpdgi") return to_json(mpdgi(A, tol));
            if (cmd == "dmpgi") return to_json(dmpgi(A, tol));
            if (cmd == "gmpi") return to_json(gmpi(A, tol));
            if (cmd == "svd") return svd_to_json(dual_svd(A, tol));
            return classification_to_json(classify(A, tol));
        },
        any);
}

Json run_check(const AnyDualMatrix& a, const AnyDualMatrix& x, const TolerancePolicy& tol) {
    // Mixed fields are compared over the complex numbers.
    auto promote = [](const AnyDualMatrix& m) {
        return std::visit(
            [](const auto& v) -> DualMatrix<Complex> {
                if constexpr (std::is_same_v<std::decay_t<decltype(v)>, DualMatrix<double>>) {
                    return to_complex(v);
                } else {
                    return v;
                }
            },
            m);
    };
    if (a.index() == x.index() && a.index() == 0) {
        return condition_report_to_json(check_conditions(std::get<0>(a), std::get<0>(x), tol));
    }
    return condition_report_to_json(check_conditions(promote(a), promote(x), tol));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generalized inverses of dual real and dual complex matrices", "dualinv"};
    app.require_subcommand(1, 1);
    Options opt;

    auto add_common = [&](CLI::App* sub, bool needs_input) {
        auto* input = sub->add_option("--input", opt.input, "dual matrix document ('-' for standard input)");
        if (needs_input) input->required();
        sub->add_option("--output", opt.output, "write the result here instead of standard output");
        sub->add_option("--tol-rank", opt.tol_rank, "relative rank cutoff (0: max(m,n)*machine epsilon)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--tol-residual", opt.tol_residual, "residual tolerance")->check(CLI::PositiveNumber);
    };

    std::vector<std::pair<std::string, std::string>> matrix_cmds = {
        {"mpdgi", "Moore-Penrose dual generalized inverse A_s+ - A_s+ A_d A_s+ eps"},
        {"dmpgi", "dual Moore-Penrose generalized inverse (essential matrices only)"},
        {"gmpi", "genuine Moore-Penrose inverse, defined for every dual matrix"},
        {"svd", "dual singular value decomposition"},
        {"classify", "projector blocks M2, M3, M4 and which inverses coincide"},
    };
    for (const auto& [name, help] : matrix_cmds) {
        add_common(app.add_subcommand(name, help), true);
    }
    auto* check = app.add_subcommand("check", "residuals of the Penrose conditions for a candidate inverse");
    add_common(check, true);
    check->add_option("--inverse", opt.inverse, "candidate inverse document")->required();
    auto* harness = app.add_subcommand("harness", "randomized verification over generated ensembles");
    harness->add_option("--spec", opt.spec, "ensemble list document")->required();
    harness->add_option("--output", opt.output, "write the report here instead of standard output");
    harness->add_option("--tol-rank", opt.tol_rank, "relative rank cutoff (0: automatic)")->check(CLI::NonNegativeNumber);
    harness->add_option("--tol-residual", opt.tol_residual, "residual tolerance")->check(CLI::PositiveNumber);
    harness->add_option("--seed", opt.seed, "seed of the first ensemble; ensemble i uses seed + i");
    harness->add_option("--threads", opt.threads, "worker threads (0: hardware concurrency)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "dualinv: " << e.what() << "\n";
        return kExitUsage;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const std::string cmd = sub->get_name();

    try {
        Json result;
        if (cmd == "harness") {
            auto specs = parse_specs(read_source(opt.spec, in));
            if (opt.seed) {
                for (std::size_t i = 0; i < specs.size(); ++i) {
                    specs[i].seed = *opt.seed + i;
                }
            }
            const HarnessReport rep = run_suite(specs, opt.policy(), opt.threads);
            err << "dualinv: harness ran " << rep.trials << " trials in " << rep.wall_time_seconds << " s\n";
            result = harness_report_to_json(rep);
        } else if (cmd == "check") {
            if (opt.input == "-" && opt.inverse == "-") {
                throw std::ios_base::failure("--input and --inverse cannot both read standard input");
            }
            const AnyDualMatrix A = parse(read_source(opt.input, in));
            const AnyDualMatrix X = parse(read_source(opt.inverse, in));
            result = run_check(A, X, opt.policy());
        } else {
            result = run_matrix_command(cmd, parse(read_source(opt.input, in)), opt.policy());
        }

        const std::string text = dump(result);
        if (opt.output.empty()) {
            out << text;
        } else {
            std::ofstream file(opt.output, std::ios::binary);
            if (!(file << text) || !file.flush()) {
                throw std::ios_base::failure("cannot write '" + opt.output + "'");
            }
        }
        return kExitOk;
    } catch (const DmpgiNotExist& e) {
        err << "dualinv: " << e.what() << "\n";
        return kExitNoDmpgi;
    } catch (const ConvergenceFailure& e) {
        err << "dualinv: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        err << "dualinv: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::ios_base::failure& e) {
        err << "dualinv: " << e.what() << "\n";
        return kExitInput;
    }
}

#define DUALINV_INSTANTIATE(T)                                                \
    template std::string emit<T>(const DualMatrix<T>&);                       \
    template Json to_json<T>(const DualMatrix<T>&);                           \
    template Json matrix_to_json<T>(const BaseMatrix<T>&);                    \
    template Json svd_to_json<T>(const DualSVD<T>&);                          \
    template Json classification_to_json<T>(const Classification<T>&);

DUALINV_INSTANTIATE(double)
DUALINV_INSTANTIATE(Complex)

#undef DUALINV_INSTANTIATE

}  // namespace dualinv
