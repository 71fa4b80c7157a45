// SPDX-License-Identifier: Apache-2.0
//
// epkit command line: error-probability curves, fading averages, ROI
// bounds, verification sweeps, adaptive-modulation metrics, and the Monte
// Carlo oracle, emitted as CSV/JSON with a reproducible run manifest.
//
// Exit codes: 0 ok, 1 verification violations, 2 usage, 3 numerical
// failure, 4 model-applicability failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "epkit/epkit.hpp"

namespace {

using nlohmann::json;

// model-applicability failures (exit 4), distinct from numerical ones
struct ApplicabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Manifest {
    std::string command;
    std::map<std::string, std::string> params;  // sorted, reproducible

    void print_csv_header(std::ostream& os) const {
        os << "# command: " << command << "\n# parameters:";
        for (const auto& [k, v] : params) os << ' ' << k << '=' << v;
        os << "\n# tool_version: " << epkit::kVersion << "\n";
        os << "# timestamp: " << iso_timestamp() << "\n";
    }
    json to_json() const {
        json p = json::object();
        for (const auto& [k, v] : params) p[k] = v;
        return {{"command", command},
                {"parameters", p},
                {"tool_version", epkit::kVersion},
                {"timestamp", iso_timestamp()}};
    }
};

// --- modulation specification ------------------------------------------

struct ModSpec {
    enum class Kind { grid, qam, psk, parity3 } kind;
    int n = 2, d = 1, M = 4;
    double a = 2.0;
    std::string text;
};

ModSpec parse_mod(const std::string& s) {
    ModSpec mod;
    mod.text = s;
    auto fields = [](std::string body) {
        std::map<std::string, double> kv;
        std::stringstream ss(std::move(body));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("bad modulation field '" + item + "'");
            kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        }
        return kv;
    };
    if (s == "parity3") {
        mod.kind = ModSpec::Kind::parity3;
        return mod;
    }
    if (s.rfind("grid:", 0) == 0) {
        mod.kind = ModSpec::Kind::grid;
        auto kv = fields(s.substr(5));
        if (!kv.count("n") || !kv.count("d") || !kv.count("a"))
            throw std::invalid_argument("grid spec needs n=,d=,a=");
        mod.n = static_cast<int>(kv["n"]);
        mod.d = static_cast<int>(kv["d"]);
        mod.a = kv["a"];
        epkit::GridConstellation::uniform(mod.n, mod.d, mod.a);  // validate
        return mod;
    }
    if (s.rfind("qam:", 0) == 0) {
        mod.kind = ModSpec::Kind::qam;
        auto kv = fields(s.substr(4));
        if (!kv.count("M")) throw std::invalid_argument("qam spec needs M=");
        mod.M = static_cast<int>(kv["M"]);
        epkit::QamSpec check(mod.M);
        return mod;
    }
    if (s.rfind("psk:", 0) == 0) {
        mod.kind = ModSpec::Kind::psk;
        auto kv = fields(s.substr(4));
        if (!kv.count("M")) throw std::invalid_argument("psk spec needs M=");
        mod.M = static_cast<int>(kv["M"]);
        epkit::PskSpec check(mod.M);
        return mod;
    }
    throw std::invalid_argument("unknown modulation spec '" + s + "'");
}

// instantaneous EP as a function of t = log(1/sigma); gamma_db maps to t
// per modulation family (grid uses its spacing offset, the others e^{2t})
struct Curves {
    std::function<double(double)> inst_t;           // t -> EP
    std::function<double(double)> t_from_gamma_db;  // dB -> t
};

Curves make_curves(const ModSpec& mod) {
    switch (mod.kind) {
        case ModSpec::Kind::grid: {
            const auto w = classify_region_types(
                epkit::GridConstellation::uniform(mod.n, mod.d, mod.a));
            const double a = mod.a;
            return {[w, a](double t) { return epkit::ep_grid(w, a, t); },
                    [a](double db) { return epkit::SnrPoint::from_gamma_db(db, a).t; }};
        }
        case ModSpec::Kind::qam: {
            epkit::QamSpec spec(mod.M);
            return {[spec](double t) { return qam_bep_exact(spec, std::exp(2.0 * t)); },
                    [](double db) { return db * std::log(10.0) / 20.0; }};
        }
        case ModSpec::Kind::psk: {
            epkit::PskSpec spec(mod.M);
            return {[spec](double t) { return psk_sep(spec, std::exp(2.0 * t)); },
                    [](double db) { return db * std::log(10.0) / 20.0; }};
        }
        case ModSpec::Kind::parity3:
            return {[](double t) { return epkit::parity_bpsk_ep(t); },
                    [](double db) { return db * std::log(10.0) / 20.0; }};
    }
    throw std::invalid_argument("bad modulation kind");
}

std::vector<double> parse_db_range(const std::string& s) {
    double start, stop, step;
    char c1, c2;
    std::istringstream ss(s);
    if (!(ss >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':')
        throw std::invalid_argument("bad SNR range '" + s + "', want start:stop:step");
    std::vector<double> out;
    if (start == stop || step == 0.0) {
        out.push_back(start);
        return out;
    }
    if ((stop - start) * step <= 0.0)
        throw std::invalid_argument("SNR range step has the wrong sign");
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) out.push_back(start + i * step);
    return out;
}

epkit::QuadratureSpec quad_defaults() {
    epkit::QuadratureSpec q;
    if (const char* env = std::getenv("EPKIT_QUAD_TOL")) {
        const double tol = std::strtod(env, nullptr);
        if (tol > 0.0 && tol < 1.0) q.rel_tol = tol;
    }
    return q;
}

// averaged curve over gamma_bar (linear), per modulation and model
std::function<double(double)> averaged_curve(const Curves& curves,
                                             const epkit::FadingModel& model,
                                             const epkit::QuadratureSpec& q) {
    return [curves, model, q](double gbar) {
        const double db = 10.0 * std::log10(gbar);
        return epkit::average_ep(curves.inst_t, model, curves.t_from_gamma_db(db), q);
    };
}

json violation_to_json(const epkit::ViolationReport& v) {
    json j = {{"check", v.check}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"slack", v.slack}};
    if (v.d >= 0) j["d"] = v.d;
    if (v.k >= 0) j["k"] = v.k;
    if (v.m >= 0) j["m"] = v.m;
    j["x"] = v.x;
    return j;
}

// --- subcommand bodies ----------------------------------------------------

int cmd_ep(const std::string& mod_s, const std::string& range_s) {
    const auto mod = parse_mod(mod_s);
    const auto curves = make_curves(mod);
    const auto dbs = parse_db_range(range_s);
    Manifest man{"ep", {{"mod", mod_s}, {"snr-db", range_s}}};
    man.print_csv_header(std::cout);
    std::cout << "gamma_db,ep\n";
    for (double db : dbs)
        std::cout << fmt17(db) << ',' << fmt17(curves.inst_t(curves.t_from_gamma_db(db)))
                  << '\n';
    return 0;
}

int cmd_avg_ep(const std::string& mod_s, const std::string& fading_s,
               const std::string& range_s) {
    const auto mod = parse_mod(mod_s);
    const auto model = epkit::FadingModel::parse(fading_s);
    const auto curves = make_curves(mod);
    const auto dbs = parse_db_range(range_s);
    const auto q = quad_defaults();
    Manifest man{"avg-ep", {{"mod", mod_s}, {"fading", fading_s}, {"snr-db", range_s}}};
    man.print_csv_header(std::cout);
    std::cout << "gamma_bar_db,ep_avg\n";
    for (double db : dbs) {
        double v;
        try {
            v = epkit::average_ep(curves.inst_t, model, curves.t_from_gamma_db(db), q);
        } catch (const epkit::QuadratureError& e) {
            throw epkit::QuadratureError(
                "avg-ep failed at gamma_bar_db = " + fmt17(db) + ": " + e.what(),
                e.achieved());
        }
        std::cout << fmt17(db) << ',' << fmt17(v) << '\n';
    }
    return 0;
}

std::pair<double, double> parse_roi(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("bad ROI '" + s + "', want pe_min:pe_max");
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
}

json local_bounds_json(const epkit::LocalBoundSet& lb) {
    return {{"pe_min", lb.roi.pe_min},       {"pe_max", lb.roi.pe_max},
            {"K", lb.asym.K},                {"D", lb.asym.D},
            {"gamma_m", lb.gamma_m},         {"gamma_M", lb.gamma_M},
            {"delta_m_db", lb.delta_m_db()}, {"delta_M_db", lb.delta_M_db()}};
}

int cmd_bounds(const std::string& mod_s, const std::string& fading_s,
               const std::string& roi_s, std::optional<double> k_user,
               std::optional<double> d_user, const std::string& range_s,
               const std::string& json_path) {
    const auto mod = parse_mod(mod_s);
    const auto model = epkit::FadingModel::parse(fading_s);
    const auto [pe_lo, pe_hi] = parse_roi(roi_s);
    const epkit::RoiSpec roi(pe_lo, pe_hi);
    const auto q = quad_defaults();
    const auto curves = make_curves(mod);
    const auto curve = averaged_curve(curves, model, q);

    double d_order;
    if (d_user) {
        d_order = *d_user;
    } else {
        try {
            d_order = model.diversity_order();
        } catch (const std::domain_error& e) {
            throw ApplicabilityError(std::string("bounds: ") + e.what() +
                                     " (no log-linear asymptote)");
        }
    }
    epkit::AsymptoteSpec asym(1.0, 1.0);
    if (k_user) {
        asym = epkit::AsymptoteSpec(*k_user, d_order);
    } else {
        try {
            asym = epkit::estimate_asymptote(curve, d_order);
        } catch (const epkit::NonConvergenceError& e) {
            throw ApplicabilityError(std::string("bounds: ") + e.what());
        }
    }
    epkit::LocalBoundSet lb = [&] {
        try {
            return build_local_bounds(curve, asym, roi);
        } catch (const epkit::BracketError& e) {
            throw ApplicabilityError(std::string("bounds: ") + e.what());
        }
    }();

    const json jlb = local_bounds_json(lb);
    if (!json_path.empty()) {
        std::ofstream jf(json_path);
        json doc = {{"manifest",
                     Manifest{"bounds",
                              {{"mod", mod_s}, {"fading", fading_s}, {"roi", roi_s}}}
                         .to_json()},
                    {"local_bound_set", jlb}};
        jf << doc.dump(2) << '\n';
    }

    Manifest man{"bounds",
                 {{"mod", mod_s},
                  {"fading", fading_s},
                  {"roi", roi_s},
                  {"K", k_user ? fmt17(*k_user) : std::string("auto")},
                  {"D", d_user ? fmt17(*d_user) : std::string("auto")}}};
    man.print_csv_header(std::cout);
    std::cout << "# local_bound_set: " << jlb.dump() << '\n';
    std::cout << "gamma_bar_db,exact,ub,lub,llb\n";
    std::vector<double> dbs;
    if (!range_s.empty()) {
        dbs = parse_db_range(range_s);
    } else {
        const double lo = 10.0 * std::log10(lb.gamma_M) - 2.0;
        const double hi = 10.0 * std::log10(lb.gamma_m) + 2.0;
        for (int i = 0; i <= 40; ++i) dbs.push_back(lo + (hi - lo) * i / 40.0);
    }
    for (double db : dbs) {
        const double g = std::pow(10.0, db / 10.0);
        std::cout << fmt17(db) << ',' << fmt17(curve(g)) << ',' << fmt17(ub_ep(asym, g))
                  << ',' << fmt17(lub_ep(lb, g)) << ',' << fmt17(llb_ep(lb, g)) << '\n';
    }
    return 0;
}

int cmd_verify(int d_max, int h_steps, int exact_d_max, bool negative_control) {
    if (d_max < 2)
        throw std::invalid_argument("verify: --d-max must be > 1 (the pairwise "
                                    "inequality needs d > 1)");
    if (h_steps < 10) throw std::invalid_argument("verify: --h-steps too small");
    if (exact_d_max < 2 || exact_d_max > 40)
        throw std::invalid_argument("verify: --exact-d-max must be in [2, 40]");

    std::vector<epkit::ViolationReport> all;
    json checks = json::array();
    auto record = [&](const std::string& name, std::vector<epkit::ViolationReport> v) {
        json entry = {{"name", name}, {"violations", json::array()}, {"count", v.size()}};
        for (const auto& r : v) entry["violations"].push_back(violation_to_json(r));
        checks.push_back(entry);
        for (auto& r : v) all.push_back(std::move(r));
    };

    const auto grid = epkit::SweepGrid::uniform(h_steps);

    // H(h) inequality on uniform grid weights and a fixed set of random priors
    for (int n : {2, 3, 4}) {
        for (int d = 1; d <= d_max; ++d) {
            const auto w =
                classify_region_types(epkit::GridConstellation::uniform(n, d, 2.0));
            record("lemma1 n=" + std::to_string(n) + " d=" + std::to_string(d),
                   check_lemma1(w, grid));
        }
    }
    auto rng = epkit::detail::SplitMix64::substream(7777, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + static_cast<int>(rng.next_u64() % (d_max - 1));
        std::vector<double> p(static_cast<std::size_t>(d) + 1);
        double sum = 0.0;
        for (auto& v : p) sum += (v = rng.next_unit());
        for (auto& v : p) v /= sum;
        record("lemma1 random priors d=" + std::to_string(d),
               check_lemma1(epkit::RegionTypeWeights(d, p), grid));
    }

    for (int d = 2; d <= d_max; ++d)
        record("lemma2 d=" + std::to_string(d), check_lemma2(d, grid));

    std::vector<double> hk;
    for (int i = 0; i < h_steps; ++i) hk.push_back(double(i) / h_steps);
    for (int d = 2; d <= std::min(d_max, 8); ++d)
        for (int k = 0; k <= d; ++k)
            for (int m = 0; m <= d; ++m)
                record("keystone d=" + std::to_string(d) + " k=" + std::to_string(k) +
                           " m=" + std::to_string(m),
                       epkit::check_keystone_inequality(d, k, m, hk));

    const bool binom_ok = epkit::check_binomial_identities(exact_d_max);
    checks.push_back({{"name", "binomial identities"}, {"count", binom_ok ? 0 : 1}});
    if (!binom_ok)
        all.push_back({"binomial", exact_d_max, -1, -1, 0.0, 0.0, 0.0, -1.0});

    json r1_notes = json::array();
    for (int d = 2; d <= exact_d_max; ++d) {
        std::vector<epkit::R1Report> reports;
        record("r-positivity d=" + std::to_string(d),
               epkit::check_r_positivity(d, hk, 1e-12, &reports));
        for (const auto& r : reports) {
            if (!r.printed_forms_match)
                r1_notes.push_back(
                    {{"d", r.d},
                     {"m", r.m},
                     {"r1_exact", r.r1},
                     {"printed_bracket_x4", r.printed_bracket_x4},
                     {"printed_quadratic", r.printed_quadratic},
                     {"note", "published r(1) forms differ from the exact coefficient "
                              "sum; the exact sum is what positivity is checked on"}});
        }
    }

    // log-concavity sweep of the grid EP family
    for (int n : {2, 4, 8, 16}) {
        for (int d = 1; d <= 4; ++d) {
            const auto w =
                classify_region_types(epkit::GridConstellation::uniform(n, d, 2.0));
            auto curve = [&](double t) { return epkit::ep_grid(w, 2.0, t); };
            record("log-concavity grid n=" + std::to_string(n) + " d=" + std::to_string(d),
                   epkit::check_log_concavity_numeric(curve, -3.0, 3.0, 601));
        }
    }

    for (const char* ms : {"nakagami:m=0.5", "nakagami:m=2", "lognormal:sdb=8", "mrc:n=4"})
        record(std::string("density log-concavity ") + ms,
               check_density_logconcave(epkit::FadingModel::parse(ms), {-30.0, 10.0}));

    if (negative_control) {
        auto convex = [](double t) { return std::max(1e-4, 0.25 * std::exp(-2.0 * t)); };
        record("negative control (floor-clipped exponential)",
               epkit::check_log_concavity_numeric(convex, 0.0, 8.0, 401));
    }

    json doc = {{"manifest",
                 Manifest{"verify",
                          {{"d-max", std::to_string(d_max)},
                           {"h-steps", std::to_string(h_steps)},
                           {"exact-d-max", std::to_string(exact_d_max)},
                           {"negative-control", negative_control ? "true" : "false"}}}
                     .to_json()},
                {"checks", checks},
                {"r1_printed_form_notes", r1_notes},
                {"total_violations", all.size()}};
    std::cout << doc.dump(2) << '\n';
    return all.empty() ? 0 : 1;
}

int cmd_se(const std::string& scenario_path) {
    std::ifstream in(scenario_path);
    if (!in)
        throw std::invalid_argument("se: cannot open scenario '" + scenario_path + "'");
    json sc = json::parse(in);
    std::vector<int> sizes = sc.at("sizes").get<std::vector<int>>();
    const double target = sc.at("target_bep").get<double>();
    const std::string mode_s = sc.value("mode", "exact");
    epkit::ThresholdMode mode;
    if (mode_s == "exact") mode = epkit::ThresholdMode::exact;
    else if (mode_s == "lub") mode = epkit::ThresholdMode::lub;
    else if (mode_s == "llb") mode = epkit::ThresholdMode::llb;
    else throw std::invalid_argument("se: mode must be exact|lub|llb");
    const auto fading = epkit::FadingModel::parse(sc.at("fading").get<std::string>());
    const int diversity = sc.value("diversity", 1);
    const auto sh = sc.at("shadowing");
    const epkit::ShadowingSpec shadow(sh.at("median_db").get<double>(),
                                      sh.at("sigma_db").get<double>());

    epkit::AdaptiveScheme scheme(sizes, target, mode, fading, diversity);
    std::vector<double> th;
    try {
        th = thresholds(scheme, nullptr, quad_defaults());
    } catch (const epkit::NonConvergenceError& e) {
        throw ApplicabilityError(std::string("se: ") + e.what());
    }
    const double eta = mean_spectral_efficiency(sizes, th, shadow);
    json eo = json::array();
    for (double t : th) eo.push_back(error_outage(t, shadow));
    json thj = json::array();
    for (double t : th) thj.push_back(t);

    json doc = {{"manifest", Manifest{"se", {{"scenario", scenario_path}}}.to_json()},
                {"thresholds_db", thj},
                {"eta", eta},
                {"eo", eo}};
    std::cout << doc.dump(2) << '\n';
    return 0;
}

int cmd_outage(double required_db, double median_db, double sigma_db) {
    const epkit::ShadowingSpec shadow(median_db, sigma_db);
    Manifest man{"outage",
                 {{"median-db", fmt17(median_db)},
                  {"required-db", fmt17(required_db)},
                  {"sigma-db", fmt17(sigma_db)}}};
    man.print_csv_header(std::cout);
    std::cout << "required_db,eo\n";
    std::cout << fmt17(required_db) << ',' << fmt17(error_outage(required_db, shadow))
              << '\n';
    return 0;
}

int cmd_mc(const std::string& mod_s, const std::string& range_s, long long samples,
           std::uint64_t seed, const std::string& metric, bool dump_gray) {
    const auto mod = parse_mod(mod_s);
    const auto dbs = parse_db_range(range_s);
    epkit::McConfig cfg;
    cfg.samples = samples;
    cfg.seed = seed;
    if (metric != "sep" && metric != "bep")
        throw std::invalid_argument("mc: --metric must be sep or bep");
    if (metric == "bep" && mod.kind != ModSpec::Kind::qam)
        throw std::invalid_argument("mc: --metric bep needs a qam modulation");

    Manifest man{"mc",
                 {{"metric", metric},
                  {"mod", mod_s},
                  {"samples", std::to_string(samples)},
                  {"seed", std::to_string(seed)},
                  {"snr-db", range_s}}};
    man.print_csv_header(std::cout);
    if (dump_gray && mod.kind == ModSpec::Kind::qam) {
        const auto labels = epkit::gray_axis_labels(epkit::QamSpec(mod.M).sqrt_m());
        std::cout << "# gray_axis_labels:";
        for (unsigned g : labels) std::cout << ' ' << g;
        std::cout << '\n';
    }
    std::cout << "gamma_db,p_hat,std_err,samples,seed\n";

    for (double db : dbs) {
        epkit::McEstimate est{};
        const double gamma = std::pow(10.0, db / 10.0);
        switch (mod.kind) {
            case ModSpec::Kind::qam: {
                if (metric == "bep") {
                    est = mc_bep_gray_qam(epkit::QamSpec(mod.M), gamma, cfg);
                    break;
                }
                const int sm = epkit::QamSpec(mod.M).sqrt_m();
                const double dlev = std::sqrt(3.0 * gamma / (mod.M - 1));
                std::vector<std::vector<double>> pts;
                for (int i = 0; i < sm; ++i)
                    for (int j = 0; j < sm; ++j)
                        pts.push_back({(2.0 * i + 1.0 - sm) * dlev,
                                       (2.0 * j + 1.0 - sm) * dlev});
                est = mc_ep(pts, std::vector<double>(pts.size(), 1.0 / pts.size()), 0.0,
                            cfg);
                break;
            }
            case ModSpec::Kind::psk: {
                std::vector<std::vector<double>> pts;
                for (int k = 0; k < mod.M; ++k)
                    pts.push_back({std::cos(2.0 * epkit::kPi * k / mod.M),
                                   std::sin(2.0 * epkit::kPi * k / mod.M)});
                const double t = 0.5 * std::log(2.0 * gamma);
                est = mc_ep(pts, std::vector<double>(pts.size(), 1.0 / pts.size()), t, cfg);
                break;
            }
            case ModSpec::Kind::grid: {
                std::vector<std::vector<double>> pts;
                std::vector<int> idx(mod.d, 0);
                const auto c = epkit::GridConstellation::uniform(mod.n, mod.d, mod.a);
                for (std::uint64_t i = 0; i < c.size(); ++i) {
                    std::vector<double> p(mod.d);
                    for (int ax = 0; ax < mod.d; ++ax) p[ax] = (idx[ax] + 1) * mod.a;
                    pts.push_back(std::move(p));
                    for (int ax = 0; ax < mod.d; ++ax) {
                        if (++idx[ax] < mod.n) break;
                        idx[ax] = 0;
                    }
                }
                est = mc_ep(pts, c.priors, epkit::SnrPoint::from_gamma_db(db, mod.a).t,
                            cfg);
                break;
            }
            case ModSpec::Kind::parity3: {
                const std::vector<std::vector<double>> pts = {
                    {1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
                est = mc_ep(pts, std::vector<double>(4, 0.25),
                            db * std::log(10.0) / 20.0, cfg);
                break;
            }
        }
        std::cout << fmt17(db) << ',' << fmt17(est.p_hat) << ',' << fmt17(est.std_err)
                  << ',' << est.samples << ',' << est.seed << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"error-probability curves, bounds, and verification sweeps"};
    app.require_subcommand(1);

    std::string mod_s, fading_s = "none", range_s, roi_s = "1e-3:1e-1";
    std::string scenario_path, json_path, metric = "sep";
    std::optional<double> k_user, d_user;
    int d_max = 10, h_steps = 200, exact_d_max = 40;
    bool negative_control = false, dump_gray = false;
    long long samples = 1000000;
    std::uint64_t seed = 1;
    double required_db = 0.0, median_db = 0.0, sigma_db = 8.0;

    auto* ep = app.add_subcommand("ep", "exact EP curve as CSV");
    ep->add_option("--mod", mod_s, "grid:n=,d=,a= | qam:M= | psk:M= | parity3")
        ->required();
    ep->add_option("--snr-db", range_s, "start:stop:step in dB")->required();

    auto* avg = app.add_subcommand("avg-ep", "fading-averaged EP curve as CSV");
    avg->add_option("--mod", mod_s)->required();
    avg->add_option("--fading", fading_s, "nakagami:m= | lognormal:sdb= | mrc:n= | none")
        ->required();
    avg->add_option("--snr-db", range_s)->required();

    auto* bounds = app.add_subcommand("bounds", "ROI bounds: JSON set + CSV sweep");
    bounds->add_option("--mod", mod_s)->required();
    bounds->add_option("--fading", fading_s)->required();
    bounds->add_option("--roi", roi_s, "pe_min:pe_max");
    bounds->add_option("--K", k_user, "override asymptote constant");
    bounds->add_option("--D", d_user, "override diversity order");
    bounds->add_option("--snr-db", range_s, "CSV sweep range (default: around the ROI)");
    bounds->add_option("--json", json_path, "write the LocalBoundSet JSON to this file");

    auto* verify = app.add_subcommand("verify", "run the verification sweeps");
    verify->add_option("--d-max", d_max, "largest dimension for the floating sweeps");
    verify->add_option("--h-steps", h_steps, "points on the h grid");
    verify->add_option("--exact-d-max", exact_d_max, "largest d for exact-integer checks");
    verify->add_flag("--negative-control", negative_control,
                     "inject a log-convex curve; must report violations");

    auto* se = app.add_subcommand("se", "mean spectral efficiency from a scenario file");
    se->add_option("--scenario", scenario_path, "scenario JSON")->required();

    auto* outage = app.add_subcommand("outage", "EP-based outage under shadowing");
    outage->add_option("--required-db", required_db)->required();
    outage->add_option("--median-db", median_db)->required();
    outage->add_option("--sigma-db", sigma_db)->required();

    auto* mc = app.add_subcommand("mc", "Monte Carlo EP estimates as CSV");
    mc->add_option("--mod", mod_s)->required();
    mc->add_option("--snr-db", range_s)->required();
    mc->add_option("--samples", samples);
    mc->add_option("--seed", seed);
    mc->add_option("--metric", metric, "sep | bep (bep: Gray-mapped QAM)");
    mc->add_flag("--dump-gray", dump_gray, "emit the Gray bit-to-symbol table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints help or the parse message
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(ep)) return cmd_ep(mod_s, range_s);
        if (app.got_subcommand(avg)) return cmd_avg_ep(mod_s, fading_s, range_s);
        if (app.got_subcommand(bounds))
            return cmd_bounds(mod_s, fading_s, roi_s, k_user, d_user, range_s, json_path);
        if (app.got_subcommand(verify))
            return cmd_verify(d_max, h_steps, exact_d_max, negative_control);
        if (app.got_subcommand(se)) return cmd_se(scenario_path);
        if (app.got_subcommand(outage))
            return cmd_outage(required_db, median_db, sigma_db);
        if (app.got_subcommand(mc))
            return cmd_mc(mod_s, range_s, samples, seed, metric, dump_gray);
    } catch (const ApplicabilityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const epkit::QuadratureError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const epkit::NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
