#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "entdyn/error.hpp"
#include "entdyn/models.hpp"
#include "entdyn/parallel.hpp"
#include "entdyn/spectral.hpp"
#include "entdyn/symgroup.hpp"
#include "output.hpp"

namespace entdyn::cli {

namespace {

using json = nlohmann::ordered_json;

const std::set<std::string> kCommands{"analytic", "montecarlo", "gaps", "distance", "selfcheck"};
const std::vector<std::string> kAnalyticKinds{"chi",    "xi",          "rho",           "purity",
                                              "chi-poisson", "xi-poisson", "purity-poisson", "bessel"};

struct GridArgs {
    double t_max = 6.0;
    double dt = 0.01;
};

struct OutputArgs {
    std::string out;
    std::string format = "csv";
};

struct ModelArgs {
    std::string model = "GUE";
    int sA = 0;  // 0: not given
    int sB = -1;
    double J = 1.0, B = 1.0, J1 = 1.0, J2 = 1.0, J3 = 1.0;
    double lambda = 1.0;
    bool scramble = false;
};

struct RunArgs {
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    int threads = 0;  // 0: hardware concurrency
};

void add_grid(CLI::App* app, GridArgs& g) {
    app->add_option("--t-max", g.t_max, "Last time point")->capture_default_str();
    app->add_option("--dt", g.dt, "Time step")->capture_default_str();
}

void add_output(CLI::App* app, OutputArgs& o) {
    app->add_option("--out", o.out, "Output file; a sibling <out>.manifest.json is written too");
    app->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

void add_model(CLI::App* app, ModelArgs& m) {
    app->add_option("--model", m.model, "TFIM, DTFIM, XXZ, DXXZ, SYK, SG, CS, GUE or POISSON")->capture_default_str();
    app->add_option("--sA", m.sA, "Spins in subsystem A (central spins for CS)");
    app->add_option("--sB", m.sB, "Spins in subsystem B");
    app->add_option("--J", m.J)->capture_default_str();
    app->add_option("--B", m.B)->capture_default_str();
    app->add_option("--J1", m.J1)->capture_default_str();
    app->add_option("--J2", m.J2)->capture_default_str();
    app->add_option("--J3", m.J3)->capture_default_str();
    app->add_option("--lambda", m.lambda, "GUE weight")->capture_default_str();
    app->add_flag("--scramble", m.scramble, "Rotate every eigenbasis by a Haar unitary");
}

void add_run(CLI::App* app, RunArgs& r) {
    app->add_option("--samples", r.samples, "Ensemble size")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--seed", r.seed, "Master seed")->capture_default_str();
    app->add_option("--threads", r.threads, "Worker cap; output does not depend on it")->capture_default_str();
}

json grid_json(const GridArgs& g) { return {{"t-max", g.t_max}, {"dt", g.dt}}; }

json model_json(const ModelArgs& m) {
    json j{{"model", m.model}};
    if (m.sA > 0) j["sA"] = m.sA;
    if (m.sB >= 0) j["sB"] = m.sB;
    j["J"] = m.J;
    j["B"] = m.B;
    j["J1"] = m.J1;
    j["J2"] = m.J2;
    j["J3"] = m.J3;
    j["lambda"] = m.lambda;
    if (m.scramble) j["scramble"] = true;
    return j;
}

json run_json(const RunArgs& r) { return {{"samples", r.samples}, {"seed", r.seed}, {"threads", r.threads}}; }

void merge(json& into, const json& from) {
    for (auto it = from.begin(); it != from.end(); ++it) into[it.key()] = it.value();
}

int thread_count(const RunArgs& r) {
    if (r.threads > 0) return r.threads;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

ModelSpec model_spec(const ModelArgs& m, int default_sA, int default_sB) {
    ModelSpec spec;
    spec.family = parse_family(m.model);
    spec.s_A = m.sA > 0 ? m.sA : default_sA;
    spec.s_B = m.sB >= 0 ? m.sB : default_sB;
    spec.J = m.J;
    spec.B = m.B;
    spec.J1 = m.J1;
    spec.J2 = m.J2;
    spec.J3 = m.J3;
    spec.lambda = m.lambda;
    spec.scramble = m.scramble;
    spec.validate();
    return spec;
}

// ---- config files -------------------------------------------------------

std::string json_scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return args;

    std::ifstream f(path);
    if (!f) throw ArgumentError("cannot read config file '" + path + "'");
    json cfg;
    try {
        cfg = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ArgumentError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    // A manifest carries the run configuration under "config".
    if (cfg.contains("config") && cfg["config"].is_object()) cfg = cfg["config"];
    if (!cfg.is_object()) throw ArgumentError("config file must hold a JSON object");

    std::set<std::string> given;
    for (const auto& a : args)
        if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));

    const bool has_command = !args.empty() && kCommands.count(args.front());
    if (!has_command) {
        if (!cfg.contains("command")) throw ArgumentError("no subcommand given and config has no \"command\"");
        std::vector<std::string> head{cfg["command"].get<std::string>()};
        if (cfg.contains("kind")) head.push_back(cfg["kind"].get<std::string>());
        args.insert(args.begin(), head.begin(), head.end());
    }

    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        const std::string& key = it.key();
        if (key == "command" || key == "kind" || key == "config" || given.count(key)) continue;
        const json& v = it.value();
        if (v.is_boolean()) {
            if (v.get<bool>()) args.push_back("--" + key);
        } else if (v.is_array()) {
            for (const auto& e : v) {
                args.push_back("--" + key);
                args.push_back(json_scalar_text(e));
            }
        } else if (!v.is_null()) {
            args.push_back("--" + key);
            args.push_back(json_scalar_text(v));
        }
    }
    return args;
}

// ---- analytic -------------------------------------------------------------

struct AnalyticArgs {
    std::string kind;
    std::vector<int> d;
    std::vector<int> dA;
    std::vector<int> dB;
    int power = 2;
    GridArgs grid;
    OutputArgs output;
};

std::vector<std::pair<int, int>> bipartitions(const AnalyticArgs& a) {
    std::vector<int> dA = a.dA.empty() ? std::vector<int>{2} : a.dA;
    std::vector<int> dB = a.dB.empty() ? std::vector<int>{2} : a.dB;
    if (dA.size() == 1 && dB.size() > 1) dA.assign(dB.size(), dA.front());
    if (dB.size() == 1 && dA.size() > 1) dB.assign(dA.size(), dB.front());
    if (dA.size() != dB.size()) throw ArgumentError("--dA and --dB need the same number of values");
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < dA.size(); ++i) {
        if (dA[i] < 1 || dB[i] < 1) throw ArgumentError("--dA and --dB must be >= 1");
        out.emplace_back(dA[i], dB[i]);
    }
    return out;
}

Table analytic_table(const AnalyticArgs& a) {
    const auto times = time_grid(a.grid.t_max, a.grid.dt);
    Table table;
    std::vector<std::function<double(double)>> series;
    const bool bessel = a.kind == "bessel";
    table.add_column(bessel ? "tau" : "t", "natural units", "grid");

    if (a.kind == "chi" || a.kind == "xi" || a.kind == "chi-poisson" || a.kind == "xi-poisson") {
        const std::vector<int> ds = a.d.empty() ? std::vector<int>{4} : a.d;
        for (int d : ds) {
            const int min_d = (a.kind == "xi" || a.kind == "xi-poisson") ? 4 : 2;
            if (d < min_d) throw ArgumentError(a.kind + " requires --d >= " + std::to_string(min_d));
            std::string prefix = a.kind;
            std::replace(prefix.begin(), prefix.end(), '-', '_');
            table.add_column(prefix + "_d" + std::to_string(d), "dimensionless", "analytic");
            if (a.kind == "chi") series.push_back([d](double t) { return chi_mean(d, t); });
            if (a.kind == "xi") series.push_back([d](double t) { return xi_mean(d, t); });
            if (a.kind == "chi-poisson") series.push_back([d](double t) { return chi_poisson(d, t); });
            if (a.kind == "xi-poisson") series.push_back([d](double t) { return xi_poisson(d, t); });
        }
    } else if (a.kind == "rho" || a.kind == "purity" || a.kind == "purity-poisson") {
        for (auto [dA, dB] : bipartitions(a)) {
            const std::string tag = "_dA" + std::to_string(dA) + "_dB" + std::to_string(dB);
            const long d = static_cast<long>(dA) * dB;
            if (a.kind == "rho") {
                if (d < 2) throw ArgumentError("rho requires d_A d_B >= 2");
                table.add_column("p1" + tag, "dimensionless", "analytic");
                table.add_column("pmix" + tag, "dimensionless", "analytic");
                series.push_back([dA, dB](double t) { return rho_mean_coeffs(dA, dB, t).p1; });
                series.push_back([dA, dB](double t) { return rho_mean_coeffs(dA, dB, t).pmix; });
            } else {
                if (dA > 1 && dB > 1 && d < 4) throw ArgumentError(a.kind + " requires d_A d_B >= 4");
                const bool poisson = a.kind == "purity-poisson";
                table.add_column((poisson ? "purity_poisson" : "purity") + tag, "dimensionless", "analytic");
                if (poisson)
                    series.push_back([dA, dB](double t) { return purity_poisson(dA, dB, t); });
                else
                    series.push_back([dA, dB](double t) { return purity_mean(dA, dB, t); });
            }
        }
    } else if (bessel) {
        if (a.power != 2 && a.power != 4) throw ArgumentError("--power must be 2 or 4");
        table.add_column("bessel_p" + std::to_string(a.power), "dimensionless", "analytic");
        const int p = a.power;
        series.push_back([p](double tau) { return bessel_limit(tau, p); });
    } else {
        throw ArgumentError("unknown analytic kind '" + a.kind + "'");
    }

    for (double t : times) {
        std::vector<Cell> row{t};
        for (const auto& f : series) row.emplace_back(f(t));
        table.rows.push_back(std::move(row));
    }
    return table;
}

// ---- montecarlo -----------------------------------------------------------

struct McArgs {
    ModelArgs model;
    int dA = 0, dB = 0;  // GUE / POISSON only; 0: not given
    bool full = false;
    RunArgs run;
    GridArgs grid;
    OutputArgs output;
};

Table montecarlo_table(const McArgs& a) {
    const auto times = time_grid(a.grid.t_max, a.grid.dt);
    const ModelFamily family = parse_family(a.model.model);
    McOptions opts;
    opts.seed = a.run.seed;
    opts.threads = thread_count(a.run);

    McResult r;
    int dA = 0;
    std::string label;
    if (!is_physical(family) && (a.dA > 0 || a.dB > 0 || a.model.sA <= 0)) {
        dA = a.dA > 0 ? a.dA : 2;
        const int dB = a.dB > 0 ? a.dB : 2;
        const int d = dA * dB;
        EigensystemGenerator gen =
            family == ModelFamily::GUE ? gue_generator(d, a.model.lambda) : poisson_generator(d);
        if (a.model.scramble) {
            gen = [gen, d](RngStream& rng) {
                Eigensystem es = gen(rng);
                es.vectors = sample_haar_unitary(d, rng) * es.vectors;
                return es;
            };
        }
        r = mc_average(gen, dA, dB, times, a.run.samples, opts);
        label = std::string(family_name(family)) + " d_A=" + std::to_string(dA) + " d_B=" + std::to_string(dB);
    } else {
        const ModelSpec spec = model_spec(a.model, 1, 1);
        dA = spec.d_A();
        r = ensemble_dynamics(spec, times, a.run.samples, opts);
        label = std::string(family_name(family)) + " s_A=" + std::to_string(spec.s_A) + " s_B=" + std::to_string(spec.s_B);
    }

    Table table;
    table.add_column("t", "natural units", "grid");
    struct Entry {
        int i, j;
        bool imag;
    };
    std::vector<Entry> entries;
    for (int i = 0; i < dA; ++i)
        for (int j = 0; j < dA; ++j) {
            if (i == j) {
                entries.push_back({i, j, false});
            } else if (a.full || (i == 0 && j == 1)) {
                entries.push_back({i, j, false});
                entries.push_back({i, j, true});
            }
        }
    for (const auto& e : entries) {
        std::string name = "rho_" + std::to_string(e.i + 1) + "_" + std::to_string(e.j + 1);
        if (e.i != e.j) name += e.imag ? "_im" : "_re";
        table.add_column(name, "dimensionless", "monte-carlo");
        table.add_column(name + "_stderr", "dimensionless", "monte-carlo");
    }
    table.add_column("purity", "dimensionless", "monte-carlo");
    table.add_column("purity_stderr", "dimensionless", "monte-carlo");

    for (std::size_t k = 0; k < times.size(); ++k) {
        std::vector<Cell> row{times[k]};
        for (const auto& e : entries) {
            const auto v = r.rho_mean[k](e.i, e.j);
            row.emplace_back(e.imag ? v.imag() : v.real());
            row.emplace_back(e.imag ? r.rho_stderr_im[k](e.i, e.j) : r.rho_stderr_re[k](e.i, e.j));
        }
        row.emplace_back(r.purity_mean[k]);
        row.emplace_back(r.purity_stderr[k]);
        table.rows.push_back(std::move(row));
    }
    table.summary["ensemble"] = label;
    table.summary["samples"] = r.n_samples;
    return table;
}

// ---- gaps -------------------------------------------------------------------

struct GapsArgs {
    ModelArgs model;
    int d = 0;
    int bins = 50;
    double max_gap = 4.0;
    RunArgs run;
    OutputArgs output;
};

Table gaps_table(const GapsArgs& a, std::ostream& err) {
    if (a.bins < 1) throw ArgumentError("--bins must be >= 1");
    if (!(a.max_gap > 0)) throw ArgumentError("--max-gap must be positive");
    ModelSpec spec;
    const ModelFamily family = parse_family(a.model.model);
    std::vector<std::vector<double>> spectra;
    if (!is_physical(family) && a.model.sA <= 0) {
        const int d = a.d > 0 ? a.d : 64;
        if (d < 3) throw ArgumentError("gap statistics need --d >= 3");
        spectra.resize(a.run.samples);
        const double lambda = a.model.lambda;
        parallel_for(a.run.samples, thread_count(a.run), [&](std::size_t i) {
            RngStream rng = sample_stream(a.run.seed, i, kHamiltonianStream);
            std::vector<double> e;
            if (family == ModelFamily::GUE) {
                const auto ev = eigenvalues(sample_gue(d, lambda, rng));
                e.assign(ev.data(), ev.data() + ev.size());
            } else {
                const double rate = 1.0 / std::sqrt(d + 1.0);
                for (int j = 0; j < d; ++j) e.push_back(rng.exponential(rate));
                std::sort(e.begin(), e.end());
            }
            spectra[i] = std::move(e);
        });
    } else {
        spec = model_spec(a.model, 1, 1);
        spectra = ensemble_spectra(spec, a.run.samples, a.run.seed, thread_count(a.run));
    }
    const GapStats stats = gap_statistics(spectra);

    std::vector<double> gap_hist(static_cast<std::size_t>(a.bins), 0.0), ratio_hist(static_cast<std::size_t>(a.bins), 0.0);
    for (double g : stats.gaps) {
        auto b = static_cast<std::size_t>(std::floor(g / a.max_gap * a.bins));
        gap_hist[std::min(b, gap_hist.size() - 1)] += 1.0;
    }
    for (double r : stats.ratios) {
        auto b = static_cast<std::size_t>(std::floor(r * a.bins));
        ratio_hist[std::min(b, ratio_hist.size() - 1)] += 1.0;
    }
    const double ng = std::max<std::size_t>(1, stats.gaps.size());
    const double nr = std::max<std::size_t>(1, stats.ratios.size());

    Table table;
    table.add_column("bin", "index", "grid");
    table.add_column("gap_lo", "mean spacing", "grid");
    table.add_column("gap_hi", "mean spacing", "grid");
    table.add_column("gap_weight", "probability", "monte-carlo");
    table.add_column("ratio_lo", "dimensionless", "grid");
    table.add_column("ratio_hi", "dimensionless", "grid");
    table.add_column("ratio_weight", "probability", "monte-carlo");
    for (int b = 0; b < a.bins; ++b) {
        const double w = a.max_gap / a.bins;
        table.rows.push_back({static_cast<long long>(b), b * w, (b + 1) * w, gap_hist[static_cast<std::size_t>(b)] / ng,
                              static_cast<double>(b) / a.bins, static_cast<double>(b + 1) / a.bins,
                              ratio_hist[static_cast<std::size_t>(b)] / nr});
    }
    table.summary["mean_ratio"] = stats.mean_ratio();
    table.summary["mean_ratio_stderr"] = stats.mean_ratio_stderr();
    table.summary["ratios"] = stats.ratios.size();
    table.summary["skipped_ratios"] = stats.skipped_ratios;
    table.summary["skipped_spectra"] = stats.skipped_spectra;
    if (stats.skipped_spectra > 0) err << "warning: skipped " << stats.skipped_spectra << " degenerate spectra\n";
    err << "mean ratio " << format_double(stats.mean_ratio()) << " +- " << format_double(stats.mean_ratio_stderr())
        << "\n";
    return table;
}

// ---- distance -------------------------------------------------------------

struct DistanceArgs {
    std::vector<std::string> models;
    ModelArgs model;
    RunArgs run;
    GridArgs grid;
    OutputArgs output;
};

Table distance_table(const DistanceArgs& a, std::ostream& err) {
    if (a.grid.t_max < 6.0 - 1e-9) throw ArgumentError("distance needs --t-max >= 6");
    const auto times = time_grid(a.grid.t_max, a.grid.dt);
    const int sA = a.model.sA > 0 ? a.model.sA : 1;
    const int sB = a.model.sB >= 0 ? a.model.sB : 2;
    const int dA = 1 << sA, dB = 1 << sB;
    McOptions opts;
    opts.seed = a.run.seed;
    opts.threads = thread_count(a.run);

    const DynamicsTrace gue_exact = analytic_gue_trace(dA, dB, times);
    const DynamicsTrace poisson_exact = analytic_poisson_trace(dA, dB, times);

    std::vector<std::string> names = a.models.empty()
                                         ? std::vector<std::string>{"TFIM", "DTFIM", "XXZ", "DXXZ", "SYK", "SG", "CS"}
                                         : a.models;
    std::vector<std::string> all{"GUE", "POISSON"};
    for (const auto& n : names) {
        const std::string canon(family_name(parse_family(n)));
        if (std::find(all.begin(), all.end(), canon) == all.end()) all.push_back(canon);
    }

    std::vector<std::pair<double, double>> raw;
    for (const auto& name : all) {
        ModelArgs m = a.model;
        m.model = name;
        m.sA = sA;
        m.sB = sB;
        const ModelSpec spec = model_spec(m, sA, sB);
        const McResult r = ensemble_dynamics(spec, times, a.run.samples, opts);
        const DynamicsTrace tr = trace_from(r);
        raw.emplace_back(distance_d6(tr, gue_exact), distance_d6(tr, poisson_exact));
        err << name << " done\n";
    }
    const double norm_gue = raw[0].first;
    const double norm_poisson = raw[1].second;
    if (!(norm_gue > 0) || !(norm_poisson > 0))
        throw NumericalError("baseline distance is zero; the ratios are undefined");

    Table table;
    table.add_column("model", "name", "label");
    table.add_column("d6_gue", "time", "monte-carlo");
    table.add_column("d6_poisson", "time", "monte-carlo");
    table.add_column("ratio_to_GUE", "dimensionless", "monte-carlo");
    table.add_column("ratio_to_Poisson", "dimensionless", "monte-carlo");
    for (std::size_t i = 0; i < all.size(); ++i)
        table.rows.push_back({all[i], raw[i].first, raw[i].second, raw[i].first / norm_gue, raw[i].second / norm_poisson});
    table.summary["sA"] = sA;
    table.summary["sB"] = sB;
    return table;
}

int report_error(std::ostream& err, const char* kind, const std::exception& e, int code) {
    err << "entdyn: " << kind << ": " << e.what() << "\n";
    return code;
}

}  // namespace

std::vector<double> time_grid(double t_max, double dt) {
    if (!(dt > 0)) throw ArgumentError("--dt must be positive");
    if (!(t_max >= dt)) throw ArgumentError("--t-max must be >= --dt");
    const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
    std::vector<double> out(n + 1);
    for (std::size_t k = 0; k <= n; ++k) out[k] = static_cast<double>(k) * dt;
    return out;
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

    CLI::App app{"Ensemble-averaged entanglement dynamics under random Hamiltonians"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ENTDYN_VERSION);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file of long-flag values (or a run manifest); flags override it");

    AnalyticArgs an;
    auto* analytic = app.add_subcommand("analytic", "Closed-form averaged curves");
    analytic->add_option("kind", an.kind, "Curve")->required()->check(CLI::IsMember(kAnalyticKinds));
    analytic->add_option("--d", an.d, "Hilbert space dimension(s)");
    analytic->add_option("--dA", an.dA, "Subsystem A dimension(s)");
    analytic->add_option("--dB", an.dB, "Subsystem B dimension(s)");
    analytic->add_option("--power", an.power, "Bessel power, 2 or 4")->capture_default_str();
    add_grid(analytic, an.grid);
    add_output(analytic, an.output);

    McArgs mc;
    auto* montecarlo = app.add_subcommand("montecarlo", "Sampled ensemble averages of rho_A(t) and purity");
    add_model(montecarlo, mc.model);
    montecarlo->add_option("--dA", mc.dA, "Subsystem A dimension (GUE, POISSON)");
    montecarlo->add_option("--dB", mc.dB, "Subsystem B dimension (GUE, POISSON)");
    montecarlo->add_flag("--full", mc.full, "Emit every rho_A entry, not just the diagonal and (1,2)");
    add_run(montecarlo, mc.run);
    add_grid(montecarlo, mc.grid);
    add_output(montecarlo, mc.output);

    GapsArgs gp;
    auto* gaps = app.add_subcommand("gaps", "Level spacing histogram and gap ratio");
    add_model(gaps, gp.model);
    gaps->add_option("--d", gp.d, "Dimension (GUE, POISSON)");
    gaps->add_option("--bins", gp.bins, "Histogram bins")->capture_default_str();
    gaps->add_option("--max-gap", gp.max_gap, "Upper edge of the spacing histogram")->capture_default_str();
    add_run(gaps, gp.run);
    add_output(gaps, gp.output);

    DistanceArgs ds;
    auto* distance = app.add_subcommand("distance", "Time-integrated distance of model dynamics to GUE and Poisson");
    distance->add_option("--models", ds.models, "Families to compare (GUE and POISSON are always included)");
    add_model(distance, ds.model);
    add_run(distance, ds.run);
    add_grid(distance, ds.grid);
    add_output(distance, ds.output);

    auto* selfcheck = app.add_subcommand("selfcheck", "Exact identity suite");

    try {
        args = expand_config(std::move(args));
    } catch (const ArgumentError& e) {
        return report_error(err, "argument error", e, kArgumentError);
    }

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << ENTDYN_VERSION << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        std::ostringstream sink;
        const int code = app.exit(e, sink, err);
        return code == 0 ? kOk : kArgumentError;
    }

    try {
        if (analytic->parsed()) {
            json cfg{{"command", "analytic"}, {"kind", an.kind}};
            if (!an.d.empty()) cfg["d"] = an.d;
            if (!an.dA.empty()) cfg["dA"] = an.dA;
            if (!an.dB.empty()) cfg["dB"] = an.dB;
            if (an.kind == "bessel") cfg["power"] = an.power;
            merge(cfg, grid_json(an.grid));
            cfg["format"] = an.output.format;
            const Table t = analytic_table(an);
            emit(t, an.output.format, an.output.out, cfg, elapsed(), out);
        } else if (montecarlo->parsed()) {
            json cfg{{"command", "montecarlo"}};
            merge(cfg, model_json(mc.model));
            if (mc.dA > 0) cfg["dA"] = mc.dA;
            if (mc.dB > 0) cfg["dB"] = mc.dB;
            if (mc.full) cfg["full"] = true;
            merge(cfg, run_json(mc.run));
            merge(cfg, grid_json(mc.grid));
            cfg["format"] = mc.output.format;
            const Table t = montecarlo_table(mc);
            emit(t, mc.output.format, mc.output.out, cfg, elapsed(), out);
        } else if (gaps->parsed()) {
            json cfg{{"command", "gaps"}};
            merge(cfg, model_json(gp.model));
            if (gp.d > 0) cfg["d"] = gp.d;
            cfg["bins"] = gp.bins;
            cfg["max-gap"] = gp.max_gap;
            merge(cfg, run_json(gp.run));
            cfg["format"] = gp.output.format;
            const Table t = gaps_table(gp, err);
            emit(t, gp.output.format, gp.output.out, cfg, elapsed(), out);
        } else if (distance->parsed()) {
            json cfg{{"command", "distance"}};
            if (!ds.models.empty()) cfg["models"] = ds.models;
            json m = model_json(ds.model);
            m.erase("model");
            merge(cfg, m);
            merge(cfg, run_json(ds.run));
            merge(cfg, grid_json(ds.grid));
            cfg["format"] = ds.output.format;
            const Table t = distance_table(ds, err);
            emit(t, ds.output.format, ds.output.out, cfg, elapsed(), out);
        } else if (selfcheck->parsed()) {
            bool ok = true;
            for (const auto& line : run_selfcheck()) {
                out << line.name << ": " << (line.passed ? "" : "FAIL ") << line.detail << "\n";
                ok = ok && line.passed;
            }
            out << (ok ? "selfcheck passed" : "selfcheck FAILED") << "\n";
            return ok ? kOk : kSelfcheckFailed;
        }
    } catch (const ArgumentError& e) {
        return report_error(err, "argument error", e, kArgumentError);
    } catch (const SingularDimensionError& e) {
        return report_error(err, "numerical error", e, kNumericalError);
    } catch (const NumericalError& e) {
        return report_error(err, "numerical error", e, kNumericalError);
    } catch (const std::exception& e) {
        return report_error(err, "error", e, kNumericalError);
    }
    return kOk;
}

}  // namespace entdyn::cli
