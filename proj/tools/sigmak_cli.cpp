// sigmak: classify, integrate, portrait, verify and sweep radial solutions of
// the sigma_k equation. Exit codes: 0 success, 2 inadmissible or singular
// input, 1 internal failure or failed verification.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sigmak/classifier.hpp"
#include "sigmak/errors.hpp"
#include "sigmak/first_integral.hpp"
#include "sigmak/ode.hpp"
#include "sigmak/report.hpp"
#include "sigmak/sweep.hpp"
#include "sigmak/verify.hpp"

namespace fs = std::filesystem;
using namespace sigmak;
using nlohmann::json;

namespace {

struct Common {
    int n = 5;
    int k = 2;
    std::string sign = "+";
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("-n", c.n, "dimension (n >= 3)")->required();
    app->add_option("-k", c.k, "order of the symmetric function")->required();
    app->add_option("--sign", c.sign, "sign of the normalized constant: +, - or 0")->required();
}

MetricParams params_of(const Common& c) { return MetricParams::make(c.n, c.k, parse_sign(c.sign)); }

std::vector<double> parse_reals(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item == "h*" || item == "hstar") {
            out.push_back(std::nan("")); // resolved by the caller
            continue;
        }
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ContractError("not a number: '" + item + "'");
        }
    }
    return out;
}

template <class T, class F>
std::vector<T> parse_list(const std::string& list, F f) {
    std::vector<T> out;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(f(item));
    return out;
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << body;
}

// ---- classify --------------------------------------------------------------

struct ClassifyArgs {
    Common c;
    std::optional<double> h, xi, xit;
    std::string branch, xi_tt_sign, family, format = "json";
};

int run_classify(const ClassifyArgs& a) {
    const MetricParams p = params_of(a.c);
    ClassificationReport r;
    if (p.s == Sign::Zero) {
        if (a.family.empty()) throw ContractError("--sign 0 requires --family linear|sinh|cosh");
        r = make_flat_report(p, parse_family(a.family));
    } else if (a.xi && a.xit) {
        LogState st;
        st.xi = *a.xi;
        st.xi_t = *a.xit;
        r = make_state_report(p, st);
    } else if (a.h) {
        if (a.branch.empty()) throw ContractError("--h requires --branch + or -");
        std::optional<Sign> xtt;
        if (!a.xi_tt_sign.empty()) xtt = parse_sign(a.xi_tt_sign);
        r = make_report(p, *a.h, parse_branch(a.branch), xtt);
    } else {
        throw ContractError("give --h with --branch, or --xi with --xit");
    }
    if (a.format == "text") std::cout << to_text(r);
    else std::cout << to_json(r).dump(2) << "\n";
    return 0;
}

// ---- integrate -------------------------------------------------------------

struct IntegrateArgs {
    Common c;
    double xi0 = 0.0, xit0 = 0.0, span = 10.0;
    std::optional<double> tol;
    std::string out;
};

int run_integrate(const IntegrateArgs& a) {
    const MetricParams p = params_of(a.c);
    LogState st;
    st.xi = a.xi0;
    st.xi_t = a.xit0;
    IntegrationConfig cfg;
    cfg.max_span = a.span;
    if (a.tol) {
        cfg.rel_tol = *a.tol;
        cfg.abs_tol = *a.tol * 1e-2;
    }
    const Trajectory tr = integrate(st, p, cfg);
    if (!a.out.empty()) {
        std::ostringstream os;
        write_csv(os, make_table(tr));
        write_file(a.out, os.str());
    }
    std::cout << "h0 = " << format_real(tr.h0.h) << ", branch " << (tr.h0.branch == Branch::Positive ? "+" : "-")
              << "\n";
    std::cout << "samples: " << tr.samples.size() << "\n";
    for (const auto& e : tr.events) {
        std::cout << "event " << to_string(e.kind) << " t=" << format_real(e.t) << " xi=" << format_real(e.xi)
                  << " xi_t=" << format_real(e.xi_t);
        if (e.kind == EventKind::NullPoint) std::cout << (e.side < 0 ? " (v_r -> 0)" : " (r v_r / v -> 2)");
        else if (e.side != 0) std::cout << " side=" << e.side;
        std::cout << "\n";
    }
    std::cout << "drift = " << format_real(tr.drift) << "\n";
    std::cout << "scaled drift = " << format_real(tr.scaled_drift) << "\n";
    return 0;
}

// ---- portrait --------------------------------------------------------------

struct PortraitArgs {
    Common c;
    std::string h_list = "0", xi_range = "-2,3", out = "portrait";
    int samples = 200;
    bool svg = false;
};

int run_portrait(const PortraitArgs& a) {
    const MetricParams p = params_of(a.c);
    std::vector<double> hs = parse_reals(a.h_list);
    for (double& h : hs)
        if (std::isnan(h)) h = critical_h(p);
    const auto range = parse_reals(a.xi_range);
    if (range.size() != 2) throw ContractError("--xi-range takes lo,hi");
    const auto curves = portrait(p, hs, range[0], range[1], a.samples);
    const fs::path prefix(a.out);
    if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
    for (const auto& c : curves) {
        std::ostringstream os;
        write_curve_csv(os, c);
        const fs::path file = prefix.string() + "_" + curve_file_stem(c) + ".csv";
        write_file(file, os.str());
        if (c.empty()) std::cerr << "warning: empty admissible set for " << curve_file_stem(c) << "\n";
        else std::cout << file.string() << "\n";
    }
    if (a.svg) {
        std::ostringstream os;
        write_svg(os, curves, range[0], range[1]);
        const fs::path file = prefix.string() + ".svg";
        write_file(file, os.str());
        std::cout << file.string() << "\n";
    }
    return 0;
}

// ---- verify ----------------------------------------------------------------

std::string short_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

struct VerifyArgs {
    std::string suite = "all";
    unsigned long long seed = 42;
    bool json_out = false;
    double corrupt = 1.0;
};

int run_verify(const VerifyArgs& a) {
    verify::Options o;
    o.seed = a.seed;
    o.tolerance_scale = a.corrupt;
    const auto results = verify::run_suite(a.suite, o);
    bool ok = true;
    std::string first_fail;
    json summary = json::array();
    for (const auto& r : results) {
        if (!r.passed && first_fail.empty()) first_fail = r.name;
        ok = ok && r.passed;
        summary.push_back({{"name", r.name},
                           {"passed", r.passed},
                           {"metric", std::isfinite(r.metric) ? json(r.metric) : json(nullptr)},
                           {"tolerance", r.tolerance},
                           {"detail", r.detail}});
    }
    if (a.json_out) {
        std::cout << json{{"suite", a.suite}, {"seed", a.seed}, {"passed", ok}, {"checks", summary}}.dump(2) << "\n";
    } else {
        for (const auto& r : results)
            std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  metric=" << short_real(r.metric)
                      << " tol=" << short_real(r.tolerance) << "  " << r.detail << "\n";
    }
    if (!ok) {
        std::cerr << "verification failed: " << first_fail << "\n";
        return 1;
    }
    return 0;
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
    std::string n, k, sign, h, branch, out = "sweep_out";
    unsigned threads = 0;
    bool no_integrate = false;
};

int run_sweep_cmd(const SweepArgs& a) {
    GridSpec spec;
    auto ints = [](const std::string& s) { return std::stoi(s); };
    if (!a.n.empty()) spec.n = parse_list<int>(a.n, ints);
    if (!a.k.empty()) spec.k = parse_list<int>(a.k, ints);
    if (!a.sign.empty()) spec.s = parse_list<Sign>(a.sign, parse_sign);
    if (!a.branch.empty()) spec.branch = parse_list<Branch>(a.branch, parse_branch);
    if (!a.h.empty()) spec.h = parse_reals(a.h);
    for (Sign s : spec.s)
        if (s == Sign::Zero) throw ContractError("sweep covers s = + and s = - only");
    const auto cells = make_grid(spec);
    const unsigned threads = a.threads ? a.threads : default_threads();
    const auto results = run_sweep(cells, threads, !a.no_integrate);

    // single collector: every file is written here, in cell order
    const fs::path dir(a.out);
    fs::create_directories(dir);
    std::ostringstream summary;
    summary << "cell,n,k,s,branch,h_label,h,xi_tt_sign,admissible,case_path,integrated,inner_end,outer_end,"
               "scaled_drift,agrees,note\n";
    std::map<std::string, int> counts;
    int inadmissible = 0, disagreements = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        const auto& c = r.cell;
        json cell{{"n", c.params.n},
                  {"k", c.params.k},
                  {"s", to_string(c.params.s)},
                  {"branch", c.branch == Branch::Positive ? "+" : "-"},
                  {"h", c.h},
                  {"h_label", c.h_label},
                  {"xi_tt_sign", c.xi_tt_sign ? json(to_string(*c.xi_tt_sign)) : json(nullptr)}};
        json doc{{"cell", cell}, {"admissible", r.admissible}};
        std::string note = r.error;
        if (r.admissible) {
            doc["report"] = to_json(make_report(c.params, c.h, c.branch, c.xi_tt_sign));
            ++counts[r.cls->case_path];
            if (r.integrated || !r.agreement.ok) {
                doc["integration"] = {{"integrated", r.integrated},
                                      {"inner_end", to_string(r.inner_end.kind)},
                                      {"outer_end", to_string(r.outer_end.kind)},
                                      {"scaled_drift", r.drift},
                                      {"agrees", r.agreement.ok},
                                      {"mismatch", r.agreement.why}};
                if (!r.agreement.ok) {
                    ++disagreements;
                    note = r.agreement.why;
                }
            }
        } else {
            doc["error"] = r.error;
            ++inadmissible;
        }
        char name[32];
        std::snprintf(name, sizeof name, "cell_%05zu.json", i);
        write_file(dir / name, doc.dump(2) + "\n");
        for (char& ch : note)
            if (ch == ',' || ch == '\n') ch = ';';
        summary << i << "," << c.params.n << "," << c.params.k << "," << to_string(c.params.s) << ","
                << (c.branch == Branch::Positive ? "+" : "-") << "," << c.h_label << "," << format_real(c.h) << ","
                << (c.xi_tt_sign ? to_string(*c.xi_tt_sign) : "") << "," << (r.admissible ? 1 : 0) << ","
                << (r.cls ? r.cls->case_path : "") << "," << (r.integrated ? 1 : 0) << ","
                << (r.integrated ? to_string(r.inner_end.kind) : "") << ","
                << (r.integrated ? to_string(r.outer_end.kind) : "") << ","
                << (r.integrated ? format_real(r.drift) : "") << "," << (r.integrated ? (r.agreement.ok ? 1 : 0) : 0)
                << "," << note << "\n";
    }
    write_file(dir / "summary.csv", summary.str());

    std::cout << "cells: " << results.size() << ", inadmissible: " << inadmissible << "\n";
    for (const auto& [leaf, n] : counts) std::cout << "  " << leaf << ": " << n << "\n";
    int missing = 0;
    for (const auto& leaf : all_leaves())
        if (!counts.count(leaf)) ++missing;
    std::cout << "leaves covered: " << all_leaves().size() - missing << "/" << all_leaves().size() << "\n";
    if (!a.no_integrate) std::cout << "endpoint disagreements: " << disagreements << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial solutions of the sigma_k equation: classification, integration and checks"};
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);

    ClassifyArgs ca;
    auto* classify = app.add_subcommand("classify", "classify (n, k, s, h, branch) or a state");
    add_common(classify, ca.c);
    classify->add_option("--h", ca.h, "value of the first integral");
    classify->add_option("--xi", ca.xi, "xi of a state (with --xit)");
    classify->add_option("--xit", ca.xit, "xi_t of a state (with --xi)");
    classify->add_option("--branch", ca.branch, "sign of 1 - xi_t^2: + or -");
    classify->add_option("--xi-tt-sign", ca.xi_tt_sign, "sign of xi_tt where the tree needs it");
    classify->add_option("--family", ca.family, "sigma_k = 0 family: linear, sinh, cosh");
    classify->add_option("--format", ca.format, "json or text")->check(CLI::IsMember({"json", "text"}));

    IntegrateArgs ia;
    auto* integ = app.add_subcommand("integrate", "integrate from (xi0, xit0) in both directions");
    add_common(integ, ia.c);
    integ->add_option("--xi0", ia.xi0, "initial xi");
    integ->add_option("--xit0", ia.xit0, "initial xi_t");
    integ->add_option("--span", ia.span, "maximal |t - t0| in each direction");
    integ->add_option("--tol", ia.tol, "relative tolerance (absolute is 1e-2 of it)");
    integ->add_option("--out", ia.out, "trajectory CSV file");

    PortraitArgs pa;
    auto* portr = app.add_subcommand("portrait", "level curves of the first integral in the (xi, xi_t) plane");
    add_common(portr, pa.c);
    portr->add_option("--h-list", pa.h_list, "comma-separated h values; h* is accepted");
    portr->add_option("--xi-range", pa.xi_range, "lo,hi");
    portr->add_option("--samples", pa.samples, "points per segment");
    portr->add_option("--out", pa.out, "output prefix");
    portr->add_flag("--svg", pa.svg, "also write prefix.svg");

    VerifyArgs va;
    auto* ver = app.add_subcommand("verify", "run the numerical acceptance checks");
    ver->add_option("--suite", va.suite, "all, conservation, closed-forms, exponents, classification")
        ->check(CLI::IsMember(verify::suite_names()));
    ver->add_option("--seed", va.seed, "seed for randomized checks");
    ver->add_flag("--json", va.json_out, "machine-readable summary");
    // negative control: scales every tolerance
    ver->add_option("--corrupt-tolerance", va.corrupt)->group("");

    SweepArgs sa;
    auto* sweep = app.add_subcommand("sweep", "classify and spot-integrate a parameter grid");
    sweep->add_option("--n", sa.n, "comma-separated n values");
    sweep->add_option("--k", sa.k, "comma-separated k values");
    sweep->add_option("--sign", sa.sign, "comma-separated signs (+,-)");
    sweep->add_option("--h", sa.h, "comma-separated h values");
    sweep->add_option("--branch", sa.branch, "comma-separated branches (+,-)");
    sweep->add_option("--out", sa.out, "output directory");
    sweep->add_option("--threads", sa.threads, "worker threads (default: SIGMAK_THREADS or all cores)");
    sweep->add_flag("--no-integrate", sa.no_integrate, "classification only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*classify) return run_classify(ca);
        if (*integ) return run_integrate(ia);
        if (*portr) return run_portrait(pa);
        if (*ver) return run_verify(va);
        if (*sweep) return run_sweep_cmd(sa);
    } catch (const InadmissibleError& e) {
        std::cerr << "inadmissible: " << e.what() << "\n";
        return 2;
    } catch (const ContractError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const NoThresholdError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal failure: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
