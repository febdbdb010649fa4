// twosel: command-line front end.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or input error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "report.hpp"
#include "twosel/verify.hpp"

using namespace twosel;
using report::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

unsigned thread_count() {
    const char* env = std::getenv("TWOSEL_THREADS");
    if (!env || !*env) return std::max(1u, std::thread::hardware_concurrency());
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) throw UsageError("TWOSEL_THREADS must be an integer in 1..1024");
    return static_cast<unsigned>(v);
}

// "-" means standard output
class Output {
public:
    explicit Output(const std::string& path) {
        if (path != "-") {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw UsageError("cannot open " + path + " for writing");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void write_json(const std::string& path, const json& doc) {
    Output out(path);
    out.stream() << doc.dump(2) << '\n';
}

CurveModel parse_curve(i64 a, i64 b) {
    return CurveModel::make(a, b);  // throws std::domain_error when singular
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    i64 a = 0, b = 0;
    bool as_json = false;
    std::string out = "-";
};

int cmd_analyze(const AnalyzeArgs& args) {
    CurveModel e = parse_curve(args.a, args.b);
    Output out(args.out);
    if (args.as_json) {
        json doc;
        doc["header"] = report::header("analyze", json{{"A", args.a}, {"B", args.b}}, 0);
        doc["analysis"] = report::analyze_json(e);
        out.stream() << doc.dump(2) << '\n';
    } else {
        report::analyze_pretty(out.stream(), e);
    }
    return kExitOk;
}

struct SweepArgs {
    i64 a = 0, b = 0;
    u64 xmax = 0;
    bool signed_twists = false;
    i64 descent = 0;
    double audit = 0.0;
    u64 seed = 1;
    std::vector<int> r{1, 2, 3};
    std::string csv = "-";
    std::string json_path;
    u64 model_trials = 1000000;
};

int cmd_sweep(const SweepArgs& args, unsigned threads) {
    CurveModel e = parse_curve(args.a, args.b);
    if (args.xmax < 1) throw UsageError("--xmax must be >= 1");
    if (args.audit < 0.0 || args.audit > 1.0) throw UsageError("--audit must lie in [0, 1]");
    TwistFamily fam(e);
    SquarefreeTable table(std::max<u64>(args.xmax, 2));

    SweepOptions opts;
    opts.xmax = args.xmax;
    opts.signed_twists = args.signed_twists;
    opts.audit_fraction = args.audit;
    opts.seed = args.seed;
    opts.threads = threads;
    opts.descent_bound = args.descent;

    json config{{"A", args.a},          {"B", args.b},        {"xmax", args.xmax},
                {"signed", args.signed_twists}, {"descent", args.descent}, {"audit", args.audit},
                {"r", args.r},          {"model_trials", args.model_trials}};
    json hdr = report::header("sweep", config, args.seed);

    Output csv(args.csv);
    report::write_csv_header(csv.stream(), hdr);
    csv.stream() << report::kRecordColumns << '\n';
    report::SweepCollector col;
    SweepSummary summary = sweep(fam, table, opts, [&](std::span<const TwistRecord> rs) {
        for (const TwistRecord& r : rs) {
            report::write_record_csv_row(csv.stream(), r);
            col.add(r);
        }
    });
    csv.stream().flush();

    bool ok = summary.audit_mismatches == 0 && col.cassels_mismatches == 0;
    if (!args.json_path.empty()) {
        report::SweepStatsInput in;
        in.family = &fam;
        in.table = &table;
        in.X = args.xmax;
        in.r_thresholds = args.r;
        in.model_trials = args.model_trials;
        in.seed = args.seed;
        in.threads = threads;
        json doc;
        doc["header"] = hdr;
        doc["stats"] = report::sweep_stats_json(in, col, summary, args.signed_twists);
        write_json(args.json_path, doc);
    }
    if (!ok)
        std::cerr << "sweep: " << summary.audit_mismatches << " audit mismatches, " << col.cassels_mismatches
                  << " descent mismatches\n";
    return ok ? kExitOk : kExitFail;
}

struct VerifyArgs {
    u64 xmax = 0;
    bool quick = false;
    bool inject_fault = false;
    u64 seed = 1;
    std::string json_path;
};

int cmd_verify(const VerifyArgs& args, unsigned threads) {
    VerifyConfig cfg = args.quick ? quick_verify_config() : VerifyConfig{};
    if (args.xmax) {
        if (args.xmax < 10000) throw UsageError("verify --xmax must be >= 10000");
        cfg.stats_xmax = args.xmax;
    }
    cfg.seed = args.seed;
    cfg.threads = threads;
    if (args.inject_fault) cfg.fault = CacheFault{};
    VerifyReport rep = run_verify(cfg);
    report::verify_pretty(std::cout, rep);
    if (!args.json_path.empty()) {
        json config{{"quick", args.quick}, {"stats_xmax", cfg.stats_xmax}, {"analytic_xmax", cfg.analytic_xmax},
                    {"path_bound", cfg.path_bound}, {"cassels_bound", cfg.cassels_bound},
                    {"inject_fault", args.inject_fault}};
        json doc;
        doc["header"] = report::header("verify", config, args.seed);
        doc["report"] = report::verify_json(rep);
        write_json(args.json_path, doc);
    }
    return rep.all_pass() ? kExitOk : kExitFail;
}

struct EkArgs {
    std::vector<std::string> spec;
    u64 xmax = 0;
    u64 trials = 1000000;
    u64 seed = 1;
    std::string json_path = "-";
    std::string cdf_path;
};

AdditiveFnSpec parse_spec(const std::vector<std::string>& s, json& echo) {
    auto to_i64 = [](const std::string& t) {
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(t, &pos);
        } catch (const std::exception&) {
            throw UsageError("expected an integer, got '" + t + "'");
        }
        if (pos != t.size()) throw UsageError("expected an integer, got '" + t + "'");
        return static_cast<i64>(v);
    };
    if (s.empty()) throw UsageError("--spec needs a kind: curve A B | omega | zero | table FILE");
    if (s[0] == "curve" && s.size() == 3) {
        i64 a = to_i64(s[1]), b = to_i64(s[2]);
        echo = json{{"kind", "curve"}, {"A", a}, {"B", b}};
        return AdditiveFnSpec::curve(parse_curve(a, b));
    }
    if (s[0] == "omega" && s.size() == 1) {
        echo = json{{"kind", "omega"}};
        return AdditiveFnSpec::omega();
    }
    if (s[0] == "zero" && s.size() == 1) {
        echo = json{{"kind", "zero"}};
        return AdditiveFnSpec::zero();
    }
    if (s[0] == "table" && s.size() == 2) {
        std::ifstream in(s[1]);
        if (!in) throw UsageError("cannot read " + s[1]);
        std::stringstream buf;
        buf << in.rdbuf();
        echo = json{{"kind", "table"}, {"file", s[1]}};
        return AdditiveFnSpec::parse_table(buf.str());
    }
    throw UsageError("--spec must be 'curve A B', 'omega', 'zero' or 'table FILE'");
}

int cmd_ek(const EkArgs& args, unsigned threads) {
    if (args.xmax < 2) throw UsageError("--xmax must be >= 2");
    if (args.trials < 1) throw UsageError("--trials must be >= 1");
    json spec_echo;
    AdditiveFnSpec spec = parse_spec(args.spec, spec_echo);
    SquarefreeTable table(args.xmax);
    PrimeValues g(spec, table);
    std::vector<std::pair<double, u64>> hist;
    json stats = report::ek_json(g, args.xmax, args.trials, args.seed, threads, &hist);
    json config{{"spec", spec_echo}, {"xmax", args.xmax}, {"trials", args.trials}};
    json hdr = report::header("ek", config, args.seed);
    json doc;
    doc["header"] = hdr;
    doc["stats"] = stats;
    write_json(args.json_path, doc);
    if (!args.cdf_path.empty()) {
        Output out(args.cdf_path);
        report::write_csv_header(out.stream(), hdr);
        out.stream() << "value,count\n";
        for (auto [v, c] : hist) out.stream() << v << ',' << c << '\n';
    }
    return kExitOk;
}

struct SieveArgs {
    u64 xmax = 0;
    u64 dmax = 100;
    std::string json_path = "-";
};

int cmd_sievestats(const SieveArgs& args) {
    if (args.xmax < 1) throw UsageError("--xmax must be >= 1");
    if (args.dmax < 1 || args.dmax > args.xmax) throw UsageError("--dmax must lie in 1..xmax");
    SquarefreeTable table(args.xmax);
    json doc;
    doc["header"] = report::header("sievestats", json{{"xmax", args.xmax}, {"dmax", args.dmax}}, 0);
    doc["stats"] = report::sievestats_json(table, args.xmax, args.dmax);
    write_json(args.json_path, doc);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2-isogeny Selmer and Tamagawa-ratio statistics for quadratic twists"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(report::kVersion));

    AnalyzeArgs an;
    auto* c_an = app.add_subcommand("analyze", "hypotheses, discriminant classes and local images of E: y^2 = x^3 + Ax^2 + Bx");
    c_an->add_option("A", an.a)->required();
    c_an->add_option("B", an.b)->required();
    c_an->add_flag("--json", an.as_json, "print JSON instead of text");
    c_an->add_option("-o,--out", an.out, "output file ('-' for stdout)");

    SweepArgs sw;
    auto* c_sw = app.add_subcommand("sweep", "ord2 of the Tamagawa ratio over squarefree twists d <= xmax");
    c_sw->add_option("A", sw.a)->required();
    c_sw->add_option("B", sw.b)->required();
    c_sw->add_option("--xmax", sw.xmax, "largest |d|")->required();
    c_sw->add_flag("--signed", sw.signed_twists, "also sweep negative d");
    c_sw->add_option("--descent", sw.descent, "fill Selmer dimensions for |d| <= BOUND");
    c_sw->add_option("--audit", sw.audit, "fraction of d re-checked through the direct product");
    c_sw->add_option("--seed", sw.seed, "seed for the audit sample and the Monte-Carlo model");
    c_sw->add_option("--r", sw.r, "thresholds for the proportion tables")->delimiter(',');
    c_sw->add_option("--csv", sw.csv, "record CSV ('-' for stdout)");
    c_sw->add_option("--json", sw.json_path, "statistics JSON");
    c_sw->add_option("--model-trials", sw.model_trials, "independence-model trials");

    VerifyArgs vf;
    auto* c_vf = app.add_subcommand("verify", "run every cross-check suite");
    c_vf->add_option("--xmax", vf.xmax, "largest X for the moment and sieve envelopes");
    c_vf->add_flag("--quick", vf.quick, "smaller bounds");
    c_vf->add_flag("--inject-fault", vf.inject_fault, "corrupt one local table entry (negative test)");
    c_vf->add_option("--seed", vf.seed, "seed for the sampled duality pairs");
    c_vf->add_option("--json", vf.json_path, "report JSON");

    EkArgs ek;
    auto* c_ek = app.add_subcommand("ek", "Erdos-Kac statistics for an additive function on squarefree n <= xmax");
    c_ek->add_option("--spec", ek.spec, "curve A B | omega | zero | table FILE")->required()->expected(1, 3)
        ->allow_extra_args();
    c_ek->add_option("--xmax", ek.xmax)->required();
    c_ek->add_option("--trials", ek.trials, "independence-model trials");
    c_ek->add_option("--seed", ek.seed);
    c_ek->add_option("--json", ek.json_path, "statistics JSON ('-' for stdout)");
    c_ek->add_option("--cdf", ek.cdf_path, "histogram CSV value,count");

    SieveArgs sv;
    auto* c_sv = app.add_subcommand("sievestats", "sieve errors r_d for squarefree d <= dmax");
    c_sv->add_option("--xmax", sv.xmax)->required();
    c_sv->add_option("--dmax", sv.dmax);
    c_sv->add_option("--json", sv.json_path, "output JSON ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*c_an) return cmd_analyze(an);
        unsigned threads = thread_count();
        if (*c_sw) return cmd_sweep(sw, threads);
        if (*c_vf) return cmd_verify(vf, threads);
        if (*c_ek) return cmd_ek(ek, threads);
        if (*c_sv) return cmd_sievestats(sv);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
