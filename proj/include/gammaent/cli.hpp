#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gammaent/mle.hpp"
#include "gammaent/simlab.hpp"

namespace gammaent::cli {

/// Parses whitespace-, newline- or comma-separated positive numbers. A
/// single non-numeric token on the first non-empty line is taken as a CSV
/// header and skipped. Errors name the offending line or value.
std::vector<double> parse_numbers(std::string_view text);

/// parse_numbers followed by SampleStats validation.
SampleStats ingest_text(std::string_view text);

/// Reads a file, or standard input when `path` is empty or "-".
SampleStats ingest(const std::string& path, std::istream& stdin_stream);

/// One study per (alpha, beta) pair listed in a flat `key = value` file.
/// Keys: alpha, beta (equal-length lists), sample_sizes, replicates,
/// estimators, R, burn, jump, cW, seH, level, seed, init (truth|closed-form).
/// '#' starts a comment. Unknown keys and bad values raise Error(Config)
/// naming the key.
std::vector<simlab::StudyConfig> parse_study_config(std::string_view text,
                                                    std::uint64_t default_seed);

/// Rounds to 7 significant digits, the precision of the printed reports.
double round_sig7(double v);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Returns the process exit code; success output goes to
/// `out`, structured JSON errors also go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace gammaent::cli
