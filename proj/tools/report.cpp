#include "report.hpp"

#include <cmath>
#include <iomanip>

#include "twosel/descent.hpp"
#include "twosel/local.hpp"

namespace twosel::report {

namespace {

json curve_json(const CurveModel& e) {
    return json{{"A", e.a}, {"B", e.b}};
}

// y^2 = x^3 + A x^2 + B x with signs folded in
std::string equation(const CurveModel& e) {
    std::ostringstream os;
    os << "y^2 = x^3";
    auto term = [&](i64 c, const char* mono) {
        if (c == 0) return;
        os << (c < 0 ? " - " : " + ");
        i64 m = c < 0 ? -c : c;
        if (m != 1) os << m;
        os << mono;
    };
    term(e.a, "x^2");
    term(e.b, "x");
    return os.str();
}

json number_or_null(double x) {
    return std::isfinite(x) ? json(x) : json(nullptr);
}

json histogram_json(const EmpiricalDistribution& d) {
    json h = json::object();
    const double n = static_cast<double>(d.count());
    for (auto [v, c] : d.histogram()) {
        std::ostringstream key;
        key << v;
        h[key.str()] = json{{"count", c}, {"fraction", static_cast<double>(c) / n}};
    }
    return h;
}

}  // namespace

json header(const std::string& command, const json& config, u64 seed) {
    return json{{"tool", kTool}, {"version", kVersion}, {"command", command}, {"config", config}, {"seed", seed}};
}

void write_csv_header(std::ostream& os, const json& hdr) {
    os << "# tool: " << hdr.at("tool").get<std::string>() << ' ' << hdr.at("version").get<std::string>() << '\n';
    os << "# command: " << hdr.at("command").get<std::string>() << '\n';
    os << "# config: " << hdr.at("config").dump() << '\n';
    os << "# seed: " << hdr.at("seed").get<u64>() << '\n';
}

// ---------------------------------------------------------------------------
// analyze

json analyze_json(const CurveModel& e) {
    HypothesisReport h = check_hypotheses(e);
    json out;
    out["curve"] = curve_json(e);
    out["dual"] = curve_json(dual_curve(e));
    out["quad_disc"] = e.quad_disc();
    out["delta_class"] = delta_class(e);
    out["delta_prime_class"] = delta_prime_class(e);
    out["hypotheses"] = json{{"partial_two_torsion", h.partial_two_torsion},
                             {"dual_partial_two_torsion", h.dual_partial_two_torsion},
                             {"disjoint_two_division_fields", h.disjoint_two_division_fields},
                             {"eligible", h.eligible}};
    json places = json::array();
    for (const Place& v : selmer_support(e)) {
        LocalImage phi = phi_image(e, v), phihat = phihat_image(e, v);
        places.push_back(json{{"place", v.name()},
                              {"phi_dim", phi.dim},
                              {"phi_hat_dim", phihat.dim},
                              {"two_torsion_dim", local_two_torsion_dim(e, v)},
                              {"phi_image", phi.classes},
                              {"phi_hat_image", phihat.classes}});
    }
    out["bad_places"] = places;
    SelmerBasis sp = phi_selmer(e), sh = phihat_selmer(e);
    out["selmer"] = json{{"phi_dim", sp.dimension},
                         {"phi_generators", sp.generators},
                         {"phi_hat_dim", sh.dimension},
                         {"phi_hat_generators", sh.generators},
                         {"ord2_T", ord2_T_product(e, 1)}};
    return out;
}

void analyze_pretty(std::ostream& os, const CurveModel& e) {
    json j = analyze_json(e);
    const auto& h = j["hypotheses"];
    os << "curve        " << equation(e) << '\n';
    os << "dual         " << to_string(dual_curve(e)) << '\n';
    os << "A^2 - 4B     " << e.quad_disc() << '\n';
    os << "Delta class  " << delta_class(e) << "    Delta' class  " << delta_prime_class(e) << '\n';
    os << "hypotheses   partial 2-torsion: " << h["partial_two_torsion"] << ", dual partial 2-torsion: "
       << h["dual_partial_two_torsion"] << ", disjoint 2-division fields: " << h["disjoint_two_division_fields"]
       << '\n';
    os << "eligible     " << (h["eligible"].get<bool>() ? "yes" : "no") << '\n';
    os << "bad places   place  dim phi  dim phi-hat  dim E[2]\n";
    for (const auto& p : j["bad_places"])
        os << "             " << std::left << std::setw(6) << p["place"].get<std::string>() << std::right
           << std::setw(8) << p["phi_dim"].get<int>() << std::setw(13) << p["phi_hat_dim"].get<int>()
           << std::setw(10) << p["two_torsion_dim"].get<int>() << '\n';
    const auto& s = j["selmer"];
    os << "Selmer       dim Sel_phi = " << s["phi_dim"] << ", dim Sel_phi-hat = " << s["phi_hat_dim"]
       << ", ord2 T = " << s["ord2_T"] << '\n';
}

// ---------------------------------------------------------------------------
// sweep

void SweepCollector::add(const TwistRecord& r) {
    ord2T_signed.push_back(r.ord2_T);
    if (r.sel_phi) {
        ++descent_rows;
        if (*r.sel_phi - *r.sel_phihat != r.ord2_T) ++cassels_mismatches;
    }
    if (r.d < 0) return;
    g.push_back(r.g);
    ord2T.push_back(r.ord2_T);
    if (!r.bad_support) ord2T_coprime.push_back(r.ord2_T);
}

json sieve_stats_json(const SieveStats& st) {
    json m = json::object();
    json normalized = json::object();
    for (auto [k, v] : st.moment_sums) {
        m[std::to_string(k)] = v;
        if (k >= 1 && st.sigma_X > 0 && st.N > 0)
            normalized[std::to_string(k)] =
                json{{"value", v / (static_cast<double>(st.N) * std::pow(st.sigma_X, k))},
                     {"gaussian", gaussian_moment(k)}};
    }
    return json{{"X", st.X},         {"N", st.N},         {"A_x", st.A_x},     {"B_x", st.B_x},
                {"Y_X", st.Y_X},     {"mu_X", st.mu_X},   {"sigma_X", st.sigma_X}, {"moments", m},
                {"normalized_moments", normalized}};
}

namespace {

json fraction_table(const EmpiricalDistribution& d, const std::vector<int>& rs, bool at_most) {
    json t = json::object();
    for (int r : rs) t[std::to_string(r)] = d.count() ? (at_most ? d.cdf(r) : d.tail(r)) : 0.0;
    return t;
}

double curve_mertens_deviation(const TwistFamily& fam, const SquarefreeTable& table, u64 X) {
    i64 c = squarefree_kernel(fam.delta() * fam.delta_prime());
    if (c == 1 || X < 3) return std::nan("");
    return mertens_check(c, table, X);
}

}  // namespace

json sweep_stats_json(const SweepStatsInput& in, const SweepCollector& col, const SweepSummary& summary,
                      bool signed_twists) {
    const TwistFamily& fam = *in.family;
    PrimeValues g(AdditiveFnSpec::curve(fam.curve()), *in.table);
    json out;
    if (in.X >= 2) {
        SieveStats st = sieve_stats(g, in.X, 6);
        out = sieve_stats_json(st);
        EmpiricalDistribution eg(col.g);
        out["ks_gaussian"] = st.B_x > 0 ? json(ks_distance(eg.standardized(st.A_x, st.B_x), gaussian_cdf)) : json();
        out["wasserstein_gaussian"] = st.B_x > 0 ? json(wasserstein1_gaussian(eg.standardized(st.A_x, st.B_x))) : json();
        IndependenceModelOptions mo;
        mo.trials = in.model_trials;
        mo.seed = in.seed;
        mo.threads = in.threads;
        EmpiricalDistribution model = independence_model(g, in.X, mo);
        out["ks_independence_model"] = ks_distance(eg, model);
        out["wasserstein_independence_model"] = wasserstein1(eg, model);
        out["g"] = json{{"mean", eg.mean()}, {"variance", eg.variance()}, {"histogram", histogram_json(eg)}};

        EmpiricalDistribution t(col.ord2T), tc(col.ord2T_coprime);
        EmpiricalDistribution tm = ord2T_independence_model(fam, *in.table, in.X, mo, false);
        EmpiricalDistribution tmc = ord2T_independence_model(fam, *in.table, in.X, mo, true);
        out["proportions"] = fraction_table(t, in.r_thresholds, true);
        out["proportions_at_least"] = fraction_table(t, in.r_thresholds, false);
        out["model_proportions_at_least"] = fraction_table(tm, in.r_thresholds, false);
        out["proportions_coprime"] = fraction_table(tc, in.r_thresholds, true);
        out["proportions_at_least_coprime"] = fraction_table(tc, in.r_thresholds, false);
        out["model_proportions_at_least_coprime"] = fraction_table(tmc, in.r_thresholds, false);
        out["ord2_T_histogram"] = histogram_json(t);
        out["mertens_deviation"] = number_or_null(curve_mertens_deviation(fam, *in.table, in.X));
        auto rep = sieve_error_report(*in.table, std::min<u64>(100, in.X), in.X);
        out["r_d_envelope"] = sieve_error_envelope(rep, in.X);
    } else {
        out["X"] = in.X;
        out["N"] = col.g.size();
    }
    if (signed_twists) {
        EmpiricalDistribution s(col.ord2T_signed);
        out["proportions_signed"] = fraction_table(s, in.r_thresholds, true);
    }
    out["records"] = summary.records;
    out["audit"] = json{{"audited", summary.audited}, {"mismatches", summary.audit_mismatches},
                        {"mismatched_d", summary.mismatched}};
    out["descent"] = json{{"rows", col.descent_rows}, {"cassels_mismatches", col.cassels_mismatches}};
    return out;
}

void write_record_csv_row(std::ostream& os, const TwistRecord& r) {
    os << r.d << ',' << r.g << ',' << r.bad_offset << ',' << r.ord2_T << ',' << r.d2_lower_bound << ','
       << (r.bad_support ? 1 : 0) << ',';
    if (r.sel_phi) os << *r.sel_phi;
    os << ',';
    if (r.sel_phihat) os << *r.sel_phihat;
    os << '\n';
}

// ---------------------------------------------------------------------------
// ek

json ek_json(const PrimeValues& g, u64 X, u64 trials, u64 seed, unsigned threads,
             std::vector<std::pair<double, u64>>* histogram_out) {
    SieveStats st = sieve_stats(g, X, 6);
    json out = sieve_stats_json(st);
    std::vector<double> samples;
    samples.reserve(st.N);
    for (u64 n = 1; n <= X; ++n)
        if (g.table().is_squarefree(n)) samples.push_back(g.g(n));
    EmpiricalDistribution eg(std::move(samples));
    out["g"] = json{{"mean", eg.mean()}, {"variance", eg.variance()}};
    if (st.B_x > 0) {
        EmpiricalDistribution z = eg.standardized(st.A_x, st.B_x);
        out["ks_gaussian"] = ks_distance(z, gaussian_cdf);
        out["wasserstein_gaussian"] = wasserstein1_gaussian(z);
    } else {
        out["ks_gaussian"] = nullptr;
        out["wasserstein_gaussian"] = nullptr;
    }
    IndependenceModelOptions mo;
    mo.trials = trials;
    mo.seed = seed;
    mo.threads = threads;
    EmpiricalDistribution model = independence_model(g, X, mo);
    out["ks_independence_model"] = ks_distance(eg, model);
    out["wasserstein_independence_model"] = wasserstein1(eg, model);
    out["model"] = json{{"trials", trials}, {"mean", model.mean()}, {"variance", model.variance()}};
    double mertens = 0.0;
    for (std::uint32_t p : g.table().primes()) {
        if (p > X) break;
        mertens += 1.0 / p;
    }
    out["mertens_deviation"] = X >= 3 ? json(mertens - std::log(std::log(static_cast<double>(X)))) : json();
    auto rep = sieve_error_report(g.table(), std::min<u64>(100, X), X);
    out["r_d_envelope"] = sieve_error_envelope(rep, X);
    if (histogram_out) *histogram_out = eg.histogram();
    return out;
}

// ---------------------------------------------------------------------------
// verify

json verify_json(const VerifyReport& rep) {
    json suites = json::array();
    for (const SuiteResult& s : rep.suites)
        suites.push_back(json{{"name", s.name},
                              {"pass", s.pass},
                              {"checked", s.checked},
                              {"failures", s.failures},
                              {"detail", s.detail}});
    return json{{"all_pass", rep.all_pass()}, {"suites", suites}};
}

void verify_pretty(std::ostream& os, const VerifyReport& rep) {
    for (const SuiteResult& s : rep.suites)
        os << (s.pass ? "PASS " : "FAIL ") << std::left << std::setw(16) << s.name << std::right
           << " checked=" << s.checked << " failures=" << s.failures << "  " << s.detail << '\n';
    os << (rep.all_pass() ? "all suites passed" : "verification FAILED") << '\n';
}

// ---------------------------------------------------------------------------
// sievestats

json sievestats_json(const SquarefreeTable& table, u64 X, u64 dmax) {
    auto rep = sieve_error_report(table, dmax, X);
    json rows = json::array();
    for (const SieveError& e : rep)
        rows.push_back(json{{"d", e.d},
                            {"count", e.count},
                            {"sigma", e.sigma},
                            {"r_d_numerator", e.numerator()},
                            {"r_d_denominator", e.sigma},
                            {"r_d", e.value()}});
    const u64 N = rep.empty() ? 0 : rep.front().N;
    const double density = 6.0 / (M_PI * M_PI);
    return json{{"X", X},
                {"N", N},
                {"N_minus_6X_over_pi2", static_cast<double>(N) - density * static_cast<double>(X)},
                {"r_d_envelope", sieve_error_envelope(rep, X)},
                {"r_d", rows}};
}

}  // namespace twosel::report
