#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gapforge/arith.hpp"
#include "gapforge/jacobsthal.hpp"
#include "gapforge/sieve.hpp"

namespace gapforge::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kInvalidInput = 1,
    kResourceLimit = 2,
    kPeriodTooLarge = 3,
    kInsufficientPrimes = 4,
    kVerificationFailed = 5,
    kIoOrParse = 6,
};

enum class OutputFormat { Table, Json, Csv };

struct Config {
    u64 memory_budget = u64{1} << 30;
    u64 segment_size = u64{1} << 20;
    u64 period_cap = kDefaultPeriodCap;
    OutputFormat output_format = OutputFormat::Table;
    unsigned threads = 1;

    SieveConfig sieve() const { return SieveConfig{memory_budget, segment_size, threads}; }
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads GAPFORGE_* variables from the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Parses "n", "n/d" or a decimal literal such as "0.26" into an exact rational.
Rational parse_rational(const std::string& text);

/// Runs one invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_env);

}  // namespace gapforge::cli
