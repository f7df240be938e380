#pragma once

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "behavior.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "models/models.hpp"
#include "protocols.hpp"
#include "quantumref.hpp"
#include "scenario.hpp"
#include "theorem.hpp"

namespace orthobox::cli {

enum class Format { text, csv };

/// Settings shared by every subcommand.
struct Options {
    Format format = Format::text;
    std::string output;
    std::uint64_t seed = 0;
    bool fractions = false;
    bool color = false;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_input_error = 2;

namespace detail {

inline std::string paint(const Options& o, const std::string& word, bool good) {
    if (!o.color) return word;
    return (good ? "\x1b[32m" : "\x1b[31m") + word + "\x1b[0m";
}

inline std::string yes_no(const Options& o, bool v, bool good_when = true) {
    return paint(o, v ? "yes" : "no", v == good_when);
}

inline std::string number(const Options& o, const Rational& r) {
    return o.fractions ? to_fraction(r) : to_decimal(r);
}

inline std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

// ---------------------------------------------------------------------------

inline int run_check(const Options& o, const std::string& file, std::ostream& out) {
    const ScenarioFile f = load_scenario(file);
    const OrthoScenario& s = f.scenario;
    const OrthoGraph g = orthogonality_graph(s);
    const bool specker = is_specker(s);
    const auto minimal = find_minimal_non_specker(s);

    std::optional<ExclusivityCheck> excl;
    std::optional<FeasibilityCertificate> feas;
    if (f.marginals) {
        excl = check_exclusivity(*f.marginals, g);
        feas = joint_feasibility(g, *f.marginals);
    }
    const bool ok = specker && (!feas || feas->feasible);

    if (o.format == Format::csv) {
        out << "check,result\n";
        out << "propositions," << s.size() << '\n';
        out << "specker," << (specker ? "true" : "false") << '\n';
        out << "minimal_non_specker," << csv_field(minimal ? s.describe(*minimal) : "") << '\n';
        if (excl) {
            out << "exclusivity," << (excl->holds ? "true" : "false") << '\n';
            out << "max_clique_sum," << number(o, excl->clique_sum) << '\n';
        }
        if (feas) out << "feasible," << (feas->feasible ? "true" : "false") << '\n';
        return ok ? exit_ok : exit_check_failed;
    }

    out << "scenario: " << (f.name.empty() ? file : f.name) << " (" << s.size() << " propositions)\n";
    out << "maximal joint sets:";
    for (PropSet m : s.maximal_sets()) out << ' ' << s.describe(m);
    out << "\northogonality graph edges:";
    for (auto [i, j] : g.edges()) out << " {" << s.label(i) << ',' << s.label(j) << '}';
    out << "\nSpecker's principle holds: " << yes_no(o, specker) << '\n';
    if (minimal) out << "minimal non-Specker set: " << s.describe(*minimal) << '\n';
    if (f.marginals) {
        out << "marginals:";
        for (std::size_t i = 0; i < s.size(); ++i) out << ' ' << s.label(i) << '=' << number(o, (*f.marginals)[i]);
        out << '\n';
        if (excl->holds) {
            out << "exclusivity: holds (largest clique sum " << number(o, excl->clique_sum) << ")\n";
        } else {
            out << "exclusivity: " << paint(o, "violated", false) << " on " << s.describe(*excl->violating_clique)
                << ", sum " << number(o, excl->clique_sum) << '\n';
        }
        if (feas->feasible) {
            out << "joint distribution: feasible;";
            for (const auto& [assignment, mass] : feas->distribution) {
                out << ' ' << s.describe(assignment) << ':' << number(o, mass);
            }
            out << '\n';
        } else {
            out << "joint distribution: " << paint(o, "infeasible", false) << "; certificate";
            for (std::size_t i = 0; i < feas->weights.size(); ++i) {
                out << ' ' << number(o, feas->weights[i]) << '*' << s.label(i);
            }
            out << " <= " << number(o, feas->bound) << " on every admissible assignment\n";
        }
    }
    if (!specker && feas && !feas->feasible) {
        out << "verdict: non-Specker: infeasible joint distribution\n";
    } else if (!specker) {
        out << "verdict: non-Specker\n";
    } else if (feas && !feas->feasible) {
        out << "verdict: infeasible joint distribution\n";
    } else {
        out << "verdict: ok\n";
    }
    return ok ? exit_ok : exit_check_failed;
}

inline int run_verify_theorem(const Options& o, int grid, bool uniform, std::ostream& out) {
    const GridSpec spec = uniform ? GridSpec::uniform(grid) : GridSpec::farey(grid);
    const auto rows = sweep_gap(spec);
    std::size_t bad_gap = 0, bad_params = 0;
    const GapRow* min_row = nullptr;
    for (const auto& r : rows) {
        if (r.gap <= 0) ++bad_gap;
        // Residual of p3 alpha + (1 - p3) beta = p1 / (1 - p2).
        const Rational residual = r.p3 * r.alpha_worst + (1 - r.p3) * r.beta_worst - r.p1 / (1 - r.p2);
        if (residual != 0 || r.alpha_worst < 0 || r.alpha_worst > 1 || r.beta_worst < 0 ||
            r.beta_worst > 1) {
            ++bad_params;
        }
        if (min_row == nullptr || r.gap < min_row->gap) min_row = &r;
    }
    const bool ok = !rows.empty() && bad_gap == 0 && bad_params == 0;
    if (o.format == Format::csv) {
        write_sweep_csv(out, rows, o.fractions);
        return ok ? exit_ok : exit_check_failed;
    }
    out << "grid: " << (uniform ? "k/" + std::to_string(grid) : "denominators <= " + std::to_string(grid)) << ", "
        << spec.values.size() << " values per coordinate\n";
    out << "valid triples: " << rows.size() << '\n';
    out << "non-positive gaps: " << bad_gap << '\n';
    out << "points with nonzero residual or alpha/beta outside [0,1]: " << bad_params << '\n';
    if (min_row != nullptr) {
        out << "min gap: " << number(o, min_row->gap) << " at p = (" << number(o, min_row->p1) << ", "
            << number(o, min_row->p2) << ", " << number(o, min_row->p3) << ")\n";
    }
    out << "verdict: " << paint(o, ok ? "gap positive everywhere" : "FAILED", ok) << '\n';
    return ok ? exit_ok : exit_check_failed;
}

inline int run_simulate(const Options& o, const std::string& model_name_arg, const std::string& plan_file,
                        std::uint64_t trials, std::ostream& out) {
    if (trials < 1) throw PreconditionError("--trials must be at least 1");
    const AnyModel model = make_model(model_name_arg);
    const Plan plan = parse_plan(read_file(resolve_input(plan_file, "plans", ".plan")));
    const auto exact = outcome_distribution(enumerate_histories(model, plan));
    const auto counts = sample_counts(model, plan, trials, o.seed);

    std::map<std::string, std::pair<Rational, std::uint64_t>> merged;
    for (const auto& [k, p] : exact) merged[k].first = p;
    for (const auto& [k, c] : counts) merged[k].second = c;

    double max_z = 0;
    const double n = static_cast<double>(trials);
    for (const auto& [k, v] : merged) {
        const double p = to_double(v.first);
        const double sd = std::sqrt(n * p * (1 - p));
        const double diff = std::abs(static_cast<double>(v.second) - n * p);
        if (sd > 0) {
            max_z = std::max(max_z, diff / sd);
        } else if (diff > 0) {
            max_z = INFINITY;
        }
    }

    if (o.format == Format::csv) {
        out << "history,exact,count,frequency\n";
        for (const auto& [k, v] : merged) {
            out << csv_field(k) << ',' << number(o, v.first) << ',' << v.second << ','
                << to_decimal(Rational(v.second) / Rational(trials)) << '\n';
        }
        return exit_ok;
    }
    out << "model: " << model_name(model) << '\n';
    out << "plan: " << describe_plan(plan) << '\n';
    out << "trials: " << trials << ", seed: " << o.seed << '\n';
    std::size_t width = 8;
    for (const auto& [k, v] : merged) width = std::max(width, k.size() + 2);
    out << pad("history", width) << pad("exact", 16) << pad("count", 10) << "frequency\n";
    for (const auto& [k, v] : merged) {
        out << pad(k, width) << pad(number(o, v.first), 16) << pad(std::to_string(v.second), 10)
            << to_decimal(Rational(v.second) / Rational(trials)) << '\n';
    }
    std::ostringstream z;
    z << std::setprecision(3) << max_z;
    out << "largest deviation: " << z.str() << " binomial standard deviations\n";
    return exit_ok;
}

inline int run_fable(const Options& o, std::uint64_t trials, bool per_trial, std::ostream& out) {
    const FableStats stats = simulate_fable(trials, o.seed, per_trial);
    const bool ok = stats.daniel_successes == stats.trials && stats.sandu_second_successes == stats.trials;
    if (o.format == Format::csv) {
        if (per_trial) {
            write_fable_csv(out, stats);
        } else {
            out << "trials,daniel_success_rate,sandu_first_rate,sandu_second_rate\n";
            out << stats.trials << ',' << to_decimal(Rational(stats.daniel_successes) / Rational(trials)) << ','
                << to_decimal(Rational(stats.sandu_first_successes) / Rational(trials)) << ','
                << to_decimal(Rational(stats.sandu_second_successes) / Rational(trials)) << '\n';
        }
        return ok ? exit_ok : exit_check_failed;
    }
    out << "trials: " << stats.trials << ", seed: " << o.seed << '\n';
    out << "Daniel success rate: " << to_decimal(Rational(stats.daniel_successes) / Rational(trials)) << '\n';
    out << "Sandu first-prophecy rate: " << to_decimal(Rational(stats.sandu_first_successes) / Rational(trials)) << '\n';
    out << "Sandu second-prophecy rate: " << to_decimal(Rational(stats.sandu_second_successes) / Rational(trials))
        << '\n';
    if (per_trial) {
        out << "trial daniel sandu_first sandu_second\n";
        for (std::size_t i = 0; i < stats.per_trial.size(); ++i) {
            const auto& t = stats.per_trial[i];
            out << i + 1 << ' ' << t.daniel_success << ' ' << t.sandu_first << ' ' << t.sandu_second << '\n';
        }
    }
    out << "verdict: " << paint(o, ok ? "Daniel always succeeds" : "FAILED", ok) << '\n';
    return ok ? exit_ok : exit_check_failed;
}

inline CorrelationSchedule parse_schedule(const std::string& s) {
    if (s == "alice_first") return CorrelationSchedule::alice_first;
    if (s == "fable_shape") return CorrelationSchedule::fable_shape;
    if (s == "any_interleaving") return CorrelationSchedule::any_interleaving;
    throw PreconditionError("unknown schedule '" + s + "'");
}

inline int run_assumptions(const Options& o, const std::vector<std::string>& names, const std::string& schedule,
                           std::ostream& out) {
    std::vector<AssumptionReport> reports;
    const CorrelationSchedule sch = parse_schedule(schedule);
    for (const auto& name : names) {
        const AnyModel m = make_model(name);
        reports.push_back({model_name(m), test_assumption_a(m, sch), test_assumption_b(m), test_assumption_c(m)});
    }
    if (o.format == Format::csv) {
        write_assumptions_csv(out, reports);
        return exit_ok;
    }
    std::size_t width = 7;
    for (const auto& r : reports) width = std::max(width, r.model.size() + 2);
    out << pad("model", width) << pad("(a)", 10) << pad("(b)", 10) << "(c)\n";
    for (const auto& r : reports) {
        out << pad(r.model, width);
        for (const auto* v : {&r.a, &r.b, &r.c}) {
            const std::string word = v->holds ? "holds" : "violated";
            out << paint(o, word, v->holds) << std::string(10 - word.size(), ' ');
        }
        out << '\n';
    }
    for (const auto& r : reports) {
        for (const auto& [label, v] : {std::pair{"a", &r.a}, std::pair{"b", &r.b}, std::pair{"c", &r.c}}) {
            if (v->holds) continue;
            out << '\n' << r.model << " (" << label << "): " << v->detail << "\n  witness: " << v->witness_plan << '\n';
        }
    }
    return exit_ok;
}

inline void describe_table(const Options& o, std::ostream& out, const BehaviorTable& t) {
    for (std::size_t x = 0; x < 2; ++x) {
        for (std::size_t y = 0; y < 2; ++y) {
            out << "  " << t.settings(0)[x] << ' ' << t.settings(1)[y] << ':';
            for (std::size_t a = 0; a < 2; ++a) {
                for (std::size_t b = 0; b < 2; ++b) {
                    out << " p(" << (t.outcomes(0)[a] > 0 ? '+' : '-') << (t.outcomes(1)[b] > 0 ? '+' : '-')
                        << ")=" << number(o, t.p(x, y, a, b));
                }
            }
            out << "  E=" << number(o, correlator(t, x, y)) << '\n';
        }
    }
}

inline int run_pr_boxes(const Options& o, const std::string& model_arg, std::ostream& out) {
    const AnyModel m = make_model(model_arg);
    const BoxInterpretation interp = standard_interpretation();
    const BehaviorTable box = realize_pr_box(m, interp);
    const ChshValue s = chsh(box);
    const NoSignallingCheck ns = no_signalling_check(box);
    const PrSweep sweep = sweep_pr_interpretations(m);
    bool each_twice = true;
    for (auto k : sweep.multiplicity) each_twice = each_twice && k == 2;
    const bool ok = s.s == 4 && ns.holds && is_pr_box(box) && each_twice;

    if (o.format == Format::csv) {
        write_correlator_csv(out, box, o.fractions);
        return ok ? exit_ok : exit_check_failed;
    }
    out << "model: " << model_name(m) << '\n';
    out << "interpretation: a = " << interp.alice[0].describe() << ", a' = " << interp.alice[1].describe()
        << " (Alice); b = " << interp.bob[0].describe() << ", b' = " << interp.bob[1].describe() << " (Bob)\n";
    describe_table(o, out, box);
    out << "CHSH S = " << number(o, s.s) << " with signs (ab, ab', a'b, a'b') = (" << s.signs[0] << ", " << s.signs[1]
        << ", " << s.signs[2] << ", " << s.signs[3] << ")\n";
    out << "no-signalling: " << yes_no(o, ns.holds) << ", PR box: " << yes_no(o, is_pr_box(box)) << '\n';
    out << "reading each setting as the first or second box of its pair (16 interpretations):\n";
    const auto all = all_pair_interpretations();
    for (std::size_t i = 0; i < all.size(); ++i) {
        out << "  a=" << all[i].alice[0].describe() << ", a'=" << all[i].alice[1].describe()
            << ", b=" << all[i].bob[0].describe() << ", b'=" << all[i].bob[1].describe() << " -> ";
        if (sweep.pr_index[i] == static_cast<std::size_t>(-1)) {
            out << "not a PR box\n";
        } else {
            out << "PR box #" << sweep.pr_index[i] + 1 << '\n';
        }
    }
    out << "multiplicities:";
    for (auto k : sweep.multiplicity) out << ' ' << k;
    out << '\n';
    if (admits(m, Query::single(Side::alice, Box::A))) {
        const BehaviorTable single = realize_pr_box(m, single_query_interpretation());
        out << "one box per side (a = A, a' = B; b = A, b' = C): PR box: " << yes_no(o, is_pr_box(single)) << '\n';
    }
    out << "verdict: " << paint(o, ok ? "all eight PR boxes, each twice" : "FAILED", ok) << '\n';
    return ok ? exit_ok : exit_check_failed;
}

inline std::vector<QuantumCheckRow> quantum_checks(std::uint64_t seed) {
    using namespace orthobox::quantum;
    RandomMatrices rng(seed);
    std::vector<QuantumCheckRow> rows;
    for (int i = 0; i < 100; ++i) {
        const Eigen::Index n = 2 + i % 5;
        const auto a = rng.projector_pair(n), b = rng.projector_pair(n), c = rng.projector_pair(n);
        const PovmCheck r = povm_identity_check(a, b, c);
        rows.push_back({"povm_identity", static_cast<long>(n), std::max(r.deviation, r.input_defect)});
    }
    const SpinOneFrame frame = SpinOneFrame::standard();
    rows.push_back({"spin1_frame", 3, frame.defect()});
    for (int i = 0; i < 50; ++i) {
        const Matrix rho = rng.density_matrix(3);
        const double spread = luders_order_spread(frame, rho);
        const double multiple = luders_sequence(frame, all_orders()[0], rho).multiple;
        rows.push_back({"luders_order", 3, std::max(spread, multiple)});
    }
    rows.push_back({"entangled_spin1", 9, entangled_spin1_correlations(frame).max_defect});
    for (int i = 0; i < 10; ++i) {
        rows.push_back({"entangled_spin1_rotated", 9,
                        entangled_spin1_correlations(SpinOneFrame::standard(rng.unitary(3))).max_defect});
    }
    return rows;
}

inline int run_quantum_ref(const Options& o, std::ostream& out) {
    const auto rows = quantum_checks(o.seed);
    double worst = 0;
    for (const auto& r : rows) worst = std::max(worst, r.deviation);
    const bool ok = worst <= quantum::tolerance;
    if (o.format == Format::csv) {
        write_quantum_csv(out, rows);
        return ok ? exit_ok : exit_check_failed;
    }
    std::map<std::string, std::pair<std::size_t, double>> summary;
    for (const auto& r : rows) {
        auto& s = summary[r.check];
        ++s.first;
        s.second = std::max(s.second, r.deviation);
    }
    out << pad("check", 26) << pad("samples", 9) << "max deviation\n";
    for (const auto& [name, s] : summary) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", s.second);
        out << pad(name, 26) << pad(std::to_string(s.first), 9) << buf << '\n';
    }
    const auto e = quantum::entangled_spin1_correlations(quantum::SpinOneFrame::standard());
    char line[512];
    for (std::size_t d = 0; d < 3; ++d) {
        const auto& c = e.directions[d];
        std::snprintf(line, sizeof line,
                      "direction %c: marginals %.12g / %.12g, projections agree %.12g (correlation %.12g), "
                      "spin values opposite %.12g\n",
                      "xyz"[d], c.alice_marginal, c.bob_marginal, c.agreement, c.correlation, c.spin_anticorrelation);
        out << line;
    }
    out << "verdict: " << paint(o, ok ? "all within 1e-12" : "FAILED", ok) << '\n';
    return ok ? exit_ok : exit_check_failed;
}

}  // namespace detail

/// Runs one command line (without the program name). Exit codes: 0 success,
/// 1 a check or assertion failed, 2 bad input.
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"orthobox: Specker's principle checks, toy-model simulation and PR-box reports", "orthobox"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    std::string format = "text";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv"}));
    app.add_option("--output,-o", opt.output, "Write the report to this file instead of stdout");
    app.add_option("--seed", opt.seed, "Seed for all randomness (default 0)");
    app.add_flag("--fractions", opt.fractions, "Render rationals as num/den instead of decimals");

    std::string scenario;
    auto* check = app.add_subcommand("check", "Structural Specker check, exclusivity and joint feasibility of a scenario");
    check->add_option("scenario", scenario, "Scenario file or bundled name (specker_triple, firefly, lsw)")->required();

    int grid = 24;
    bool uniform = false;
    auto* verify = app.add_subcommand("verify-theorem", "Sweep the signalling gap over a rational grid of marginals");
    verify->add_option("--grid", grid, "Largest denominator (default 24)")->check(CLI::Range(2, 200));
    verify->add_flag("--uniform", uniform, "Use only k/N instead of every fraction with denominator <= N");

    std::string model = "seer";
    std::string plan;
    std::uint64_t trials = 100000;
    auto* simulate = app.add_subcommand("simulate", "Sample a query plan on a model and compare with exact enumeration");
    simulate->add_option("model", model, "seer, lsw, firefly or firefly:<flavor>")->required();
    simulate->add_option("--plan", plan, "Plan file or bundled name (fable, lsw_collapse, firefly_ca_bc)")->required();
    simulate->add_option("--trials", trials, "Number of sampled runs (default 100000)");

    bool per_trial = false;
    auto* fable = app.add_subcommand("fable", "Play the seer's fable: Daniel's prophecies against Sandu's strategy");
    fable->add_option("--trials", trials, "Number of trials (default 100000)");
    fable->add_flag("--per-trial", per_trial, "Report every trial");

    std::vector<std::string> models;
    std::string schedule = "alice_first";
    auto* assumptions = app.add_subcommand("assumptions", "Test assumptions (a), (b), (c) on models");
    assumptions->add_option("models", models, "Models to test (default: seer firefly lsw)");
    assumptions->add_option("--schedule", schedule, "Cross-side schedule for (a)")
        ->check(CLI::IsMember({"alice_first", "fable_shape", "any_interleaving"}));

    std::string pr_model = "seer";
    auto* pr = app.add_subcommand("pr-boxes", "Realize PR boxes from paired box openings");
    pr->add_option("--model", pr_model, "Model to realize the boxes with (default seer)");

    auto* quantum_ref = app.add_subcommand("quantum-ref", "Quantum reference checks with random matrices");

    for (auto* sub : {check, verify, simulate, fable, assumptions, pr, quantum_ref}) sub->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_input_error;
    }
    opt.format = format == "csv" ? Format::csv : Format::text;
    if (const char* c = std::getenv("ORTHOBOX_COLOR"); c != nullptr) opt.color = std::string(c) == "1";

    std::ofstream file;
    std::ostream* sink = &out;
    if (!opt.output.empty()) {
        file.open(opt.output);
        if (!file) {
            err << "error: cannot write '" << opt.output << "'\n";
            return exit_input_error;
        }
        sink = &file;
        opt.color = false;
    }

    try {
        int code = exit_ok;
        if (*check) {
            code = detail::run_check(opt, scenario, *sink);
        } else if (*verify) {
            code = detail::run_verify_theorem(opt, grid, uniform, *sink);
        } else if (*simulate) {
            code = detail::run_simulate(opt, model, plan, trials, *sink);
        } else if (*fable) {
            code = detail::run_fable(opt, trials, per_trial, *sink);
        } else if (*assumptions) {
            if (models.empty()) models = {"seer", "firefly", "lsw"};
            code = detail::run_assumptions(opt, models, schedule, *sink);
        } else if (*pr) {
            code = detail::run_pr_boxes(opt, pr_model, *sink);
        } else if (*quantum_ref) {
            code = detail::run_quantum_ref(opt, *sink);
        }
        sink->flush();
        if (!*sink) {
            err << "error: failed writing the report\n";
            return exit_input_error;
        }
        return code;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    } catch (const InadmissibleQuery& e) {
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    } catch (const InconsistentHistory& e) {
        err << "error: " << e.what() << '\n';
        return exit_check_failed;
    }
}

}  // namespace orthobox::cli
