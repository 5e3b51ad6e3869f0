#include "sip/cli.hpp"

#include "sip/acf.hpp"
#include "sip/errors.hpp"
#include "sip/format.hpp"
#include "sip/io.hpp"
#include "sip/portmanteau.hpp"
#include "sip/simulate.hpp"

#include <fstream>
#include <map>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

namespace sip::cli {

namespace {

struct Failure {
    int code;
    std::string kind;
    std::string message;
};

void report_failure(const Failure& f, bool json, const std::vector<std::string>& args, std::ostream& out,
                    std::ostream& err) {
    if (json) {
        nlohmann::json j{{"schema", kResultSchema},
                         {"command", args},
                         {"timestamp", utc_timestamp()},
                         {"error", {{"code", f.code}, {"kind", f.kind}, {"message", f.message}}}};
        out << j.dump(2) << '\n';
    } else {
        err << "error (" << f.kind << "): " << f.message << '\n';
    }
}

struct TestOptions {
    std::string file;
    std::string column;
    std::size_t lag = kDefaultLagOrder;
    std::string method = "sip2";
    bool conservative = false;
    std::string format = "text";
};

struct AcfOptions {
    std::string file;
    std::string column;
    std::size_t max_lag = 20;
    std::string kind = "both";
    std::string out = "csv";
    std::string prefix;
    std::string order = "lag_matched";
};

struct SimulateOptions {
    std::string config;
    int threads = 0;
    std::string out;
    std::size_t reps = 0;
};

TimeSeries load_series(const std::string& file, const std::string& column) {
    return read_series_file(file, column.empty() ? SeriesFormat::plain : SeriesFormat::csv, column);
}

void print_row(std::ostream& out, std::string_view key, const std::string& value) {
    fmt::print(out, "{:<12}{}\n", key, value);
}

int cmd_test(const TestOptions& o, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const bool json = o.format == "json";
    try {
        if (o.lag < 1) throw Failure{kUsage, "usage", "--lag must be >= 1"};
        TimeSeries x = [&] {
            try {
                return load_series(o.file, o.column);
            } catch (const ParseError& e) {
                throw Failure{kUsage, "parse_error", e.what()};
            } catch (const std::invalid_argument& e) {
                throw Failure{kUsage, "parse_error", e.what()};
            }
        }();

        std::vector<std::string> warnings;
        nlohmann::json payload;
        if (o.method == "box") {
            if (o.lag >= x.size())
                throw Failure{kInfeasibleLag, "infeasible_lag",
                              fmt::format("lag {} needs at least {} observations, got {}", o.lag, o.lag + 1, x.size())};
            const auto res = box_pierce(x, o.lag, true);
            payload = res;
            if (!json) {
                print_row(out, "method", "box");
                print_row(out, "m", std::to_string(res.m));
                print_row(out, "n", std::to_string(x.size()));
                print_row(out, "statistic", format_double(res.statistic));
                print_row(out, "df", std::to_string(res.m));
                print_row(out, "p_value", format_double(res.p_value));
            }
        } else {
            const auto variant = o.method == "sip1" ? SipVariant::sip1 : SipVariant::sip2;
            if (2 * (o.lag + 2) >= x.size())
                throw Failure{kInfeasibleLag, "infeasible_lag",
                              fmt::format("lag order {} requires m+2 < n/2, but n = {}", o.lag, x.size())};
            const auto res = sip_test(x, o.lag, variant, o.conservative);
            if (res.w_raw < 0.0)
                warnings.push_back(fmt::format("w_hat = {} is negative; clamped to 0", format_double(res.w_raw)));
            payload = res;
            if (!json) {
                print_row(out, "method", std::string(to_string(res.variant)) + (res.conservative ? " (conservative)" : ""));
                print_row(out, "m", std::to_string(res.m));
                print_row(out, "n", std::to_string(res.n));
                print_row(out, "statistic", format_double(res.statistic));
                print_row(out, "df", std::to_string(res.df));
                print_row(out, "p_value", format_double(res.p_value));
                print_row(out, "gamma0_hat", format_double(res.gamma0_used));
                print_row(out, "w_raw", format_double(res.w_raw));
                print_row(out, "w_used", format_double(res.w_used));
                for (const auto& w : warnings) print_row(out, "warning", w);
            }
        }
        if (json) out << make_envelope(args, payload, warnings).dump(2) << '\n';
        return kOk;
    } catch (const Failure& f) {
        report_failure(f, json, args, out, err);
        return f.code;
    } catch (const DegenerateVariance& e) {
        report_failure({kDegenerate, "degenerate_variance", e.what()}, json, args, out, err);
        return kDegenerate;
    }
}

int cmd_acf(const AcfOptions& o, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const bool json_errors = o.out == "json";
    try {
        if (o.max_lag < 1) throw Failure{kUsage, "usage", "--max-lag must be >= 1"};
        const auto format = o.out == "csv" ? AcfFormat::csv : o.out == "json" ? AcfFormat::json : AcfFormat::svg;
        const bool want_sip = o.kind != "classical";
        const bool want_classical = o.kind != "sip";
        if (want_sip && want_classical && o.prefix.empty() && format != AcfFormat::json)
            throw Failure{kUsage, "usage", "--kind both with csv/svg output needs --prefix"};

        TimeSeries x = [&] {
            try {
                return load_series(o.file, o.column);
            } catch (const std::exception& e) {
                throw Failure{kUsage, "parse_error", e.what()};
            }
        }();

        const auto order = o.order == "h_plus_2" ? AcfOrder::order_h_plus_2 : AcfOrder::lag_matched;
        const std::size_t extra = order == AcfOrder::lag_matched ? 0 : 2;
        std::vector<AcfData> artifacts;
        if (want_sip) {
            if (2 * (o.max_lag + extra + 2) >= x.size())
                throw Failure{kInfeasibleLag, "infeasible_lag",
                              fmt::format("max lag {} requires s+2 < n/2, but n = {}", o.max_lag, x.size())};
            artifacts.push_back(shift_immune_acf(x, o.max_lag, order));
        }
        if (want_classical) {
            if (o.max_lag >= x.size())
                throw Failure{kInfeasibleLag, "infeasible_lag", fmt::format("max lag {} must be < n = {}", o.max_lag, x.size())};
            artifacts.push_back(classical_acf(x, o.max_lag));
        }

        if (!o.prefix.empty()) {
            for (const auto& a : artifacts) {
                const std::string path = fmt::format("{}_{}.{}", o.prefix, a.kind == AcfKind::shift_immune ? "sip" : "classical", o.out);
                std::ofstream f(path);
                if (!f) throw Failure{kUsage, "io_error", "cannot write '" + path + "'"};
                emit_acf(a, format, f);
                out << path << '\n';
            }
        } else if (artifacts.size() == 2) {
            out << nlohmann::json(artifacts).dump(2) << '\n';
        } else {
            emit_acf(artifacts.front(), format, out);
        }
        return kOk;
    } catch (const Failure& f) {
        report_failure(f, json_errors, args, out, err);
        return f.code;
    } catch (const DegenerateVariance& e) {
        report_failure({kDegenerate, "degenerate_variance", e.what()}, json_errors, args, out, err);
        return kDegenerate;
    }
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
    SimConfig config;
    try {
        config = load_sim_config(o.config);
        if (o.reps > 0) config.reps = o.reps;
    } catch (const ParseError& e) {
        err << "error (config): " << e.what() << '\n';
        return kUsage;
    }
    SimReport report;
    try {
        report = run_rejection_study(config, o.threads);
    } catch (const InfeasibleDesign& e) {
        err << "error (infeasible_design): " << e.what() << '\n';
        return kInfeasibleDesign;
    }

    const std::string prefix = o.out.empty() ? config.name : o.out;
    std::ofstream csv(prefix + ".csv");
    std::ofstream json(prefix + ".json");
    if (!csv || !json) {
        err << "error (io): cannot write report files with prefix '" << prefix << "'\n";
        return kUsage;
    }
    write_sim_report_csv(report, csv);
    json << nlohmann::json(report).dump(2) << '\n';

    fmt::print(out, "study {}: n={} J={} L={} reps={} true_w={:.4f}\n", config.name, config.n, report.profile_jumps,
               report.profile_min_segment, config.reps, report.true_w);
    for (const auto& c : report.cells)
        fmt::print(out, "  {:<9} m={:<3} rate={:.3f}  se={:.4f}  degenerate={}\n", to_string(c.method), c.m,
                   c.rejection_rate, c.mc_standard_error, c.degenerate);
    fmt::print(out, "wrote {}.csv and {}.json in {:.2f}s\n", prefix, prefix, report.wall_time_seconds);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Shift-immune portmanteau tests for series with frequent mean shifts", "sip"};
    app.require_subcommand(1);

    TestOptions test_opts;
    auto* test = app.add_subcommand("test", "Test a series for serial correlation");
    test->add_option("file", test_opts.file, "Input series (one value per line, or csv with --column)")->required();
    test->add_option("--column", test_opts.column, "Read this named column of a csv file");
    test->add_option("--lag,-m", test_opts.lag, "Number of autocorrelations tested")->capture_default_str();
    test->add_option("--method", test_opts.method, "Test to run")
        ->check(CLI::IsMember({"sip1", "sip2", "box"}))
        ->capture_default_str();
    test->add_flag("--conservative", test_opts.conservative, "Use 2*w_hat in the covariance");
    test->add_option("--format", test_opts.format, "Output format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();

    AcfOptions acf_opts;
    auto* acf = app.add_subcommand("acf", "Shift-immune and classical ACF values with 95% bands");
    acf->add_option("file", acf_opts.file, "Input series")->required();
    acf->add_option("--column", acf_opts.column, "Read this named column of a csv file");
    acf->add_option("--max-lag,-s", acf_opts.max_lag, "Largest lag shown")->capture_default_str();
    acf->add_option("--kind", acf_opts.kind, "Which ACF")
        ->check(CLI::IsMember({"sip", "classical", "both"}))
        ->capture_default_str();
    acf->add_option("--out", acf_opts.out, "Artifact format")
        ->check(CLI::IsMember({"csv", "json", "svg"}))
        ->capture_default_str();
    acf->add_option("--prefix", acf_opts.prefix, "Write <prefix>_sip.<ext> / <prefix>_classical.<ext>");
    acf->add_option("--order", acf_opts.order, "Per-lag estimator order")
        ->check(CLI::IsMember({"lag_matched", "h_plus_2"}))
        ->capture_default_str();

    SimulateOptions sim_opts;
    auto* simulate = app.add_subcommand("simulate", "Run a rejection-rate study from a config file");
    simulate->add_option("config", sim_opts.config, "Study configuration (key = value lines)")->required();
    simulate->add_option("--threads", sim_opts.threads, "Worker threads (0 = OpenMP default)")->capture_default_str();
    simulate->add_option("--out", sim_opts.out, "Report prefix; writes <out>.csv and <out>.json");
    simulate->add_option("--reps", sim_opts.reps, "Override the configured replicate count");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error (usage): " << e.what() << '\n';
        return kUsage;
    }

    if (*test) return cmd_test(test_opts, args, out, err);
    if (*acf) return cmd_acf(acf_opts, args, out, err);
    return cmd_simulate(sim_opts, out, err);
}

}  // namespace sip::cli
