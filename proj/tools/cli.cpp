#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gapforge/covering.hpp"

namespace gapforge::cli {

namespace {

using nlohmann::ordered_json;

std::string str(u64 v) { return std::to_string(v); }

u64 parse_u64(const std::string& text, const std::string& what) {
    if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw CLI::ValidationError(what, "expected a natural number, got '" + text + "'");
    }
    try {
        return std::stoull(text);
    } catch (const std::out_of_range&) {
        throw CLI::ValidationError(what, "value out of 64-bit range: '" + text + "'");
    }
}

std::string fixed(double v, int digits = 6) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

ordered_json rational_json(const Rational& r) { return ordered_json{{"num", r.num()}, {"den", r.den()}}; }

/// Everything a subcommand needs at run time.
struct Context {
    Config config;
    std::ostream& out;
    std::ostream& err;

    bool json() const { return config.output_format == OutputFormat::Json; }
    bool csv() const { return config.output_format == OutputFormat::Csv; }
};

// --- subcommands -----------------------------------------------------------

int cmd_gaps(Context& ctx, u64 limit) {
    const GapRecord g = max_prime_gap(limit, ctx.config.sieve());
    if (ctx.json()) {
        ctx.out << ordered_json{{"gap", g.gap}, {"lo", g.lo}, {"hi", g.hi}}.dump() << "\n";
    } else if (ctx.csv()) {
        ctx.out << "limit,gap,lo,hi\n" << limit << "," << g.gap << "," << g.lo << "," << g.hi << "\n";
    } else {
        ctx.out << "G(" << limit << ") = " << g.gap << " (" << g.lo << " → " << g.hi << ")\n";
    }
    return kOk;
}

int cmd_jacobsthal(Context& ctx, u64 u) {
    const JacobsthalValue j = jacobsthal_exact(u, ctx.config.period_cap, ctx.config.sieve());
    const GapRecord w = j.witness();
    if (ctx.json()) {
        ctx.out << ordered_json{{"u", j.u}, {"value", j.value}, {"lo", w.lo}, {"hi", w.hi}, {"exact", j.exact}}.dump()
                << "\n";
    } else if (ctx.csv()) {
        ctx.out << "u,value,lo,hi\n" << j.u << "," << j.value << "," << w.lo << "," << w.hi << "\n";
    } else {
        ctx.out << "J(" << j.u << ") = " << j.value << " (" << w.lo << " → " << w.hi << ")\n";
    }
    return kOk;
}

int cmd_pi_ap(Context& ctx, u64 x, u64 q, u64 b) {
    const ProgressionStats s = prime_count_ap(x, q, b, ctx.config.sieve());
    if (ctx.json()) {
        ctx.out << ordered_json{{"x", s.x}, {"q", s.q}, {"b", s.b}, {"count", s.count}, {"delta", rational_json(s.delta)}}
                       .dump()
                << "\n";
    } else if (ctx.csv()) {
        ctx.out << "x,q,b,count,delta_num,delta_den\n"
                << s.x << "," << s.q << "," << s.b << "," << s.count << "," << s.delta.num() << "," << s.delta.den() << "\n";
    } else {
        ctx.out << "π(" << x << "; " << q << ", " << b << ") = " << s.count << ", so π(x;q,b) ≤ δx/φ(q) with δ = "
                << s.delta.to_string() << " ≈ " << fixed(s.delta.to_double()) << "\n";
    }
    return kOk;
}

int cmd_least_prime(Context& ctx, u64 q, u64 b, u64 limit) {
    const std::optional<u64> p = least_prime_ap(q, b, limit);
    if (ctx.json()) {
        ordered_json j{{"q", q}, {"b", b}, {"limit", limit}, {"prime", nullptr}};
        if (p) j["prime"] = *p;
        ctx.out << j.dump() << "\n";
    } else if (ctx.csv()) {
        ctx.out << "q,b,limit,prime\n" << q << "," << b << "," << limit << "," << (p ? str(*p) : "") << "\n";
    } else if (p) {
        ctx.out << "L(" << q << ", " << b << ") = " << *p << "\n";
    } else {
        ctx.out << "L(" << q << ", " << b << ") > " << limit << " (no prime ≡ " << b << " mod " << q << " up to " << limit
                << ")\n";
    }
    return kOk;
}

std::string bound_sentence(const CoveringCertificate& c) {
    const Rational r = c.gap_lower_rational();
    std::ostringstream os;
    os << "G(e^(2·" << c.u << ")) ≥ J(" << c.u << ") ≥ (x−b)/q = (" << c.x << " − " << c.b << ")/" << c.q << " = "
       << r.to_string() << " ≈ " << fixed(r.to_double(), 3) << "; covered run [0, " << c.y << "] gives J(" << c.u
       << ") ≥ " << c.y + 2;
    return os.str();
}

int cmd_cover(Context& ctx, u64 x, u64 q, u64 b, const std::optional<std::string>& delta_text,
              const std::optional<std::string>& out_path, bool with_witness) {
    std::optional<Rational> delta_override;
    if (delta_text) delta_override = parse_rational(*delta_text);
    const CoveringCertificate cert = build_certificate(x, q, b, delta_override, ctx.config.sieve());
    std::optional<CrtWitness> witness;
    if (with_witness) witness = crt_witness(cert);
    const std::string doc = certificate_to_json(cert, witness);

    if (!matching_condition_holds(cert.survivors_after_greedy, cert.u)) {
        ctx.err << "warning: |N'| = " << cert.survivors_after_greedy << " exceeds u/(5 ln u) for u = " << cert.u
                << "; matching still succeeded with the primes in (u/2, u]\n";
    }
    if (out_path) {
        std::ofstream file(*out_path, std::ios::binary);
        if (!file || !(file << doc) || !file.flush()) {
            ctx.err << "error: cannot write " << *out_path << "\n";
            return kIoOrParse;
        }
    }
    if (ctx.json()) {
        if (out_path) {
            ctx.out << ordered_json{{"out", *out_path},
                                    {"u", cert.u},
                                    {"y", cert.y},
                                    {"jacobsthal_lower", cert.y + 2},
                                    {"gap_lower_rational", rational_json(cert.gap_lower_rational())}}
                           .dump()
                    << "\n";
        } else {
            ctx.out << doc;
        }
        return kOk;
    }
    if (ctx.csv()) {
        ctx.out << "x,q,b,delta_num,delta_den,u,y,classes,survivors_initial,survivors_after_greedy\n"
                << cert.x << "," << cert.q << "," << cert.b << "," << cert.delta.num() << "," << cert.delta.den() << ","
                << cert.u << "," << cert.y << "," << cert.classes.size() << "," << cert.survivors_initial << ","
                << cert.survivors_after_greedy << "\n";
        return kOk;
    }
    if (cert.delta.num() == 0) {
        ctx.out << "δ = 0: no prime ≡ " << b << " (mod " << q << ") up to " << x << ", so u = ⌈2√x⌉ path\n";
    }
    ctx.out << "π(x;q,b) ≤ δx/φ(q) with δ = " << cert.delta.to_string() << "; u = " << cert.u << ", y = " << cert.y
            << ", |N| = " << cert.survivors_initial << ", |N'| = " << cert.survivors_after_greedy << ", "
            << cert.classes.size() << " classes\n";
    ctx.out << bound_sentence(cert) << "\n";
    if (out_path) ctx.out << "certificate written to " << *out_path << "\n";
    return kOk;
}

int cmd_verify(Context& ctx, const std::string& path, bool strict, bool with_witness) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        ctx.err << "error: cannot read " << path << "\n";
        return kIoOrParse;
    }
    std::stringstream buffer;
    buffer << file.rdbuf();
    CertificateDocument doc;
    try {
        doc = certificate_from_json(buffer.str());
    } catch (const Error& e) {
        ctx.err << "error: " << e.what() << "\n";
        return kIoOrParse;
    }
    const CoveringCertificate& cert = doc.certificate;
    VerificationReport report = verify_certificate(cert, strict, ctx.config.sieve());

    const bool bound_ok = doc.bound_jacobsthal_u == cert.u && cert.q != 0 && cert.x >= cert.b &&
                          doc.bound_gap_lower == cert.gap_lower_rational();
    report.checks.push_back({"bound_annotation", bound_ok,
                             "declared J(" + str(doc.bound_jacobsthal_u) + ") ≥ " + doc.bound_gap_lower.to_string()});
    if (with_witness) {
        try {
            const CrtWitness w = crt_witness(cert);
            report.checks.push_back({"crt_witness", true,
                                     "gcd(T+n, P) > 1 for all n in [0, " + str(cert.y) + "], T has " +
                                         str(w.T.bit_length()) + " bits"});
            if (doc.witness) {
                const bool same = doc.witness->T == w.T && doc.witness->P == w.P;
                report.checks.push_back({"witness_matches", same, same ? "stored T and P match" : "stored T or P differs"});
            }
        } catch (const Error& e) {
            report.checks.push_back({"crt_witness", false, e.what()});
        }
    }

    if (ctx.json()) {
        ctx.out << report_to_json(report);
    } else if (ctx.csv()) {
        ctx.out << "check,pass,detail\n";
        for (const auto& c : report.checks) {
            std::string detail = c.detail;
            std::replace(detail.begin(), detail.end(), ',', ';');
            ctx.out << c.check << "," << (c.pass ? "true" : "false") << "," << detail << "\n";
        }
    } else {
        for (const auto& c : report.checks) {
            ctx.out << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(24) << c.check << c.detail << "\n";
        }
        ctx.out << (report.ok() ? "certificate verified: " + bound_sentence(cert) : "certificate REJECTED") << "\n";
    }
    return report.ok() ? kOk : kVerificationFailed;
}

struct ScanRow {
    u64 q;
    u64 b;
    u64 count;
    Rational delta;
};

int cmd_scan(Context& ctx, u64 x, u64 q_min, u64 q_max, u64 top) {
    std::vector<ScanRow> rows;
    const u64 q_hi = std::min(q_max, x == 0 ? 0 : x - 1);
    if (q_min <= q_hi) {
        const auto primes = primes_up_to(x, ctx.config.sieve());
        for (u64 q = std::max<u64>(q_min, 2); q <= q_hi; ++q) {
            std::vector<u64> counts(q, 0);
            for (u64 p : primes) ++counts[p % q];
            const u64 phi = totient(q);
            for (u64 b = 1; b < q; ++b) {
                if (gcd(b, q) != 1) continue;
                rows.push_back({q, b, counts[b], Rational::reduce(static_cast<u128>(counts[b]) * phi, x)});
            }
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const ScanRow& a, const ScanRow& b) { return a.delta < b.delta; });
    if (rows.size() > top) rows.resize(top);

    if (ctx.json()) {
        ordered_json arr = ordered_json::array();
        for (const auto& r : rows) {
            arr.push_back(ordered_json{{"q", r.q}, {"b", r.b}, {"count", r.count}, {"delta", rational_json(r.delta)}});
        }
        ctx.out << arr.dump() << "\n";
    } else if (ctx.csv()) {
        ctx.out << "q,b,count,delta_num,delta_den,delta\n";
        for (const auto& r : rows) {
            ctx.out << r.q << "," << r.b << "," << r.count << "," << r.delta.num() << "," << r.delta.den() << ","
                    << fixed(r.delta.to_double(), 9) << "\n";
        }
    } else {
        ctx.out << std::right << std::setw(8) << "q" << std::setw(8) << "b" << std::setw(10) << "π(x;q,b)" << "  "
                << std::setw(14) << "δ" << std::setw(12) << "≈" << "\n";
        for (const auto& r : rows) {
            ctx.out << std::setw(8) << r.q << std::setw(8) << r.b << std::setw(10) << r.count << "  " << std::setw(14)
                    << r.delta.to_string() << std::setw(12) << fixed(r.delta.to_double()) << "\n";
        }
    }
    return kOk;
}

int cmd_scenario(Context& ctx, double log_q, double delta, double B, std::optional<double> sweep_k,
                 const std::vector<double>& grid) {
    std::vector<ScenarioResult> results;
    if (sweep_k) {
        for (double lq : grid) results.push_back(scenario_bound(lq, std::pow(lq, -*sweep_k), B));
    } else {
        results.push_back(scenario_bound(log_q, delta, B));
    }
    if (ctx.json()) {
        ordered_json arr = ordered_json::array();
        for (const auto& r : results) {
            arr.push_back(ordered_json{{"log_q", r.log_q}, {"delta", r.delta}, {"B", r.B}, {"log_x", r.log_x},
                                       {"log_u", r.log_u}, {"log_gap_bound", r.log_gap_bound},
                                       {"excess", r.log_gap_bound - std::log(r.log_x)}});
        }
        ctx.out << (sweep_k ? arr : arr.front()).dump() << "\n";
    } else if (ctx.csv() || sweep_k) {
        ctx.out << "log_q,delta,B,log_x,log_u,log_gap_bound,log_gap_bound_minus_log_log_x\n";
        for (const auto& r : results) {
            ctx.out << fixed(r.log_q) << "," << std::setprecision(9) << r.delta << "," << fixed(r.B) << ","
                    << fixed(r.log_x) << "," << fixed(r.log_u) << "," << fixed(r.log_gap_bound) << ","
                    << fixed(r.log_gap_bound - std::log(r.log_x)) << "\n";
        }
    } else {
        const auto& r = results.front();
        ctx.out << "log q = " << fixed(r.log_q) << ", δ = " << r.delta << ", B = " << fixed(r.B) << "\n"
                << "log x = B log q = " << fixed(r.log_x) << "\n"
                << "log u = log(δ x log x / q) = " << fixed(r.log_u) << "\n"
                << "log G(e^(2u)) ≳ log(u / (δ log u)) = " << fixed(r.log_gap_bound) << "\n";
    }
    return kOk;
}

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::ResourceLimit: return kResourceLimit;
        case Errc::PeriodTooLarge: return kPeriodTooLarge;
        case Errc::InsufficientPrimes: return kInsufficientPrimes;
        case Errc::InvalidCertificate: return kVerificationFailed;
        default: return kInvalidInput;
    }
}

void apply_env(Config& config, const EnvLookup& env) {
    if (auto v = env("GAPFORGE_MEMORY_BUDGET")) config.memory_budget = parse_u64(*v, "GAPFORGE_MEMORY_BUDGET");
    if (auto v = env("GAPFORGE_SEGMENT_SIZE")) config.segment_size = parse_u64(*v, "GAPFORGE_SEGMENT_SIZE");
    if (auto v = env("GAPFORGE_PERIOD_CAP")) config.period_cap = parse_u64(*v, "GAPFORGE_PERIOD_CAP");
}

void validate(const Config& config) {
    if (config.segment_size < (u64{1} << 16)) {
        throw CLI::ValidationError("segment size", "must be at least 65536, got " + str(config.segment_size));
    }
    if (static_cast<u128>(config.period_cap) > static_cast<u128>(config.memory_budget) * 8) {
        throw CLI::ValidationError("period cap", "must not exceed 8 * memory budget");
    }
    if (config.threads == 0) throw CLI::ValidationError("threads", "must be at least 1");
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
}

Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const u64 den = parse_u64(text.substr(slash + 1), "delta");
        if (den == 0) throw CLI::ValidationError("delta", "zero denominator");
        return Rational(parse_u64(text.substr(0, slash), "delta"), den);
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(parse_u64(text, "delta"), 1);
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 18) throw CLI::ValidationError("delta", "unsupported decimal '" + text + "'");
    u64 den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const u64 w = whole.empty() ? 0 : parse_u64(whole, "delta");
    const u64 f = parse_u64(frac, "delta");
    return Rational::reduce(static_cast<u128>(w) * den + f, den);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
    CLI::App app{"gapforge: prime gaps, Jacobsthal's function and covering certificates from sparse progressions"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string format = "table";
    std::optional<u64> memory_budget, segment_size, period_cap;
    unsigned threads = 1;
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "json", "csv"}));
    app.add_option("--memory-budget", memory_budget, "Bytes any single operation may allocate");
    app.add_option("--segment-size", segment_size, "Odd numbers per sieve segment (>= 65536)");
    app.add_option("--period-cap", period_cap, "Largest primorial the Jacobsthal scan accepts");
    app.add_option("--threads", threads, "Worker threads for range scans");

    u64 limit = 0, u = 0, x = 0, q = 0, b = 0, q_min = 0, q_max = 0, top = 10;
    std::optional<std::string> delta_text, out_path;
    std::string cert_path;
    bool strict = false, with_witness = false;
    double log_q = 0, delta = 0, B = 0;
    std::optional<double> sweep_k;
    std::vector<double> grid{10, 20, 40};

    auto* gaps = app.add_subcommand("gaps", "Maximal gap between consecutive primes up to a limit");
    gaps->add_option("--limit", limit, "Upper limit x (>= 5)")->required();

    auto* jac = app.add_subcommand("jacobsthal", "Exact Jacobsthal function J(u) by full-period scan");
    jac->add_option("--u", u, "u >= 2")->required();

    auto* pi_ap = app.add_subcommand("pi-ap", "Count primes p <= x with p = b (mod q)");
    pi_ap->add_option("--x", x)->required();
    pi_ap->add_option("--q", q)->required();
    pi_ap->add_option("--b", b)->required();

    auto* least = app.add_subcommand("least-prime", "Least prime p = b (mod q) up to a limit");
    least->add_option("--q", q)->required();
    least->add_option("--b", b)->required();
    least->add_option("--limit", limit)->required();

    auto* cover = app.add_subcommand("cover", "Build a covering certificate from the progression b mod q up to x");
    cover->add_option("--x", x)->required();
    cover->add_option("--q", q)->required();
    cover->add_option("--b", b)->required();
    cover->add_option("--delta", delta_text, "Override delta (n, n/d or decimal); measured when omitted");
    cover->add_option("--out", out_path, "Write the certificate JSON here");
    cover->add_flag("--witness", with_witness, "Include the CRT witness in the certificate");

    auto* verify = app.add_subcommand("verify", "Check a certificate file");
    verify->add_option("--cert,cert", cert_path, "Certificate JSON")->required();
    verify->add_flag("--strict", strict, "Re-derive classes, delta and u");
    verify->add_flag("--witness", with_witness, "Also build and validate the CRT witness");

    auto* scan = app.add_subcommand("scan", "Rank progressions b mod q by exact delta");
    scan->add_option("--x", x)->required();
    scan->add_option("--qmin", q_min)->required();
    scan->add_option("--qmax", q_max)->required();
    scan->add_option("--top", top, "Rows to print");

    auto* scenario = app.add_subcommand("scenario", "Log-space gap bound for a hypothetical exceptional zero");
    scenario->add_option("--log-q", log_q);
    scenario->add_option("--delta", delta);
    scenario->add_option("--B", B, "Exponent with x = q^B")->required();
    scenario->add_option("--sweep-k", sweep_k, "Sweep the grid with delta = (log q)^-k");
    scenario->add_option("--grid", grid, "log q values for --sweep-k")->delimiter(',');

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("gapforge");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    Config config;
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        apply_env(config, env);
        if (memory_budget) config.memory_budget = *memory_budget;
        if (segment_size) config.segment_size = *segment_size;
        if (period_cap) config.period_cap = *period_cap;
        config.threads = threads;
        config.output_format = format == "json" ? OutputFormat::Json : format == "csv" ? OutputFormat::Csv : OutputFormat::Table;
        validate(config);
        if (*scenario && !sweep_k && (scenario->count("--log-q") == 0 || scenario->count("--delta") == 0)) {
            throw CLI::ValidationError("scenario", "--log-q and --delta are required unless --sweep-k is given");
        }
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::Error& e) {
        app.exit(e, out, err);
        return kIoOrParse;
    }

    Context ctx{config, out, err};
    try {
        if (*gaps) return cmd_gaps(ctx, limit);
        if (*jac) return cmd_jacobsthal(ctx, u);
        if (*pi_ap) return cmd_pi_ap(ctx, x, q, b);
        if (*least) return cmd_least_prime(ctx, q, b, limit);
        if (*cover) return cmd_cover(ctx, x, q, b, delta_text, out_path, with_witness);
        if (*verify) return cmd_verify(ctx, cert_path, strict, with_witness);
        if (*scan) return cmd_scan(ctx, x, q_min, q_max, top);
        if (*scenario) return cmd_scenario(ctx, log_q, delta, B, sweep_k, grid);
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n";
        return kIoOrParse;
    }
    return kInvalidInput;
}

}  // namespace gapforge::cli
