#pragma once

/**
 * @file cli_io.hpp
 * @brief JSON documents for dual matrices and reports, and the `dualinv` command line.
 *
 * A dual matrix document is
 *
 *     {"rows":2,"cols":2,"field":"real","standard":[[1,0],[0,0]],"dual":[[0,1],[1,0]]}
 *
 * with complex entries written as [re, im] pairs. `emit` writes keys in that
 * order, numbers in shortest round-trip form, and a trailing newline.
 */

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dualinv/harness.hpp"

namespace dualinv {

using Json = nlohmann::ordered_json;

/// Throws ParseError (malformed JSON), SchemaError (shape or encoding) or
/// ValueError (non-finite entry).
AnyDualMatrix parse(const std::string& document);
AnyDualMatrix from_json(const Json& doc);

template <BaseField T>
std::string emit(const DualMatrix<T>& A);
std::string emit(const AnyDualMatrix& A);

template <BaseField T>
Json to_json(const DualMatrix<T>& A);

/// 2-D array in the document encoding of field T.
template <BaseField T>
Json matrix_to_json(const BaseMatrix<T>& M);

template <BaseField T>
Json svd_to_json(const DualSVD<T>& f);

template <BaseField T>
Json classification_to_json(const Classification<T>& c);

Json condition_report_to_json(const ConditionReport& rep);

/// Wall time is left out so that identical runs give identical bytes.
Json harness_report_to_json(const HarnessReport& rep);

/// `{"specs":[{"rows":…,"cols":…,"field":…,"standard_rank":k|"random",
/// "structure":…,"trials":…,"seed":…,"sigma_range":[lo,hi]}, …]}`.
/// `sigma_range` is optional. Throws ParseError, SchemaError or InvalidSpec.
std::vector<EnsembleSpec> parse_specs(const std::string& document);

/// Compact JSON followed by a newline.
std::string dump(const Json& j);

/// Exit codes of the command line.
enum ExitCode : int {
    kExitOk = 0,
    kExitInput = 1,
    kExitNoDmpgi = 2,
    kExitNumerical = 3,
    kExitUsage = 4,
};

/// The whole `dualinv` program; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace dualinv
