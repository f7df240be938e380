#pragma once

#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "behavior.hpp"
#include "errors.hpp"
#include "protocols.hpp"
#include "quantumref.hpp"
#include "rational.hpp"
#include "scenario.hpp"
#include "theorem.hpp"

#ifndef ORTHOBOX_DATA_DIR
#define ORTHOBOX_DATA_DIR "data"
#endif

namespace orthobox {

/// Directory holding the bundled scenarios/ and plans/. The environment
/// variable ORTHOBOX_DATA_DIR overrides the build-time location.
inline std::filesystem::path data_dir() {
    if (const char* env = std::getenv("ORTHOBOX_DATA_DIR"); env != nullptr && *env != '\0') return env;
    return ORTHOBOX_DATA_DIR;
}

/// An existing path is used as is; otherwise `name` is looked up as
/// <data_dir>/<subdir>/<name><extension>.
inline std::filesystem::path resolve_input(const std::string& name, const std::string& subdir,
                                           const std::string& extension) {
    const std::filesystem::path direct(name);
    if (std::filesystem::is_regular_file(direct)) return direct;
    const auto bundled = data_dir() / subdir / (name + extension);
    if (std::filesystem::is_regular_file(bundled)) return bundled;
    throw ParseError("no file '" + name + "' and no bundled " + subdir + " entry of that name", 0);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace io_detail {

inline int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

inline YAML::Node parse_yaml(const std::string& text) {
    try {
        return YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ParseError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1);
    }
}

inline YAML::Node require(const YAML::Node& parent, const char* key, YAML::NodeType::value type) {
    const YAML::Node n = parent[key];
    if (!n) throw ParseError(std::string("missing '") + key + "'", line_of(parent));
    if (n.Type() != type) {
        const char* what = type == YAML::NodeType::Sequence ? "a list" : type == YAML::NodeType::Map ? "a mapping" : "a value";
        throw ParseError(std::string("'") + key + "' must be " + what, line_of(n));
    }
    return n;
}

inline std::string scalar(const YAML::Node& n, const char* what) {
    if (!n.IsScalar()) throw ParseError(std::string(what) + " must be a plain value", line_of(n));
    return n.Scalar();
}

inline std::vector<std::string> string_list(const YAML::Node& n, const char* what) {
    if (!n.IsSequence()) throw ParseError(std::string(what) + " must be a list", line_of(n));
    std::vector<std::string> out;
    for (const auto& item : n) out.push_back(scalar(item, what));
    return out;
}

inline Rational rational(const YAML::Node& n) {
    try {
        return parse_rational(scalar(n, "a probability"));
    } catch (const ParseError& e) {
        throw ParseError(e.what(), line_of(n));
    }
}

inline void reject_unknown_keys(const YAML::Node& map, const std::set<std::string>& known) {
    for (const auto& kv : map) {
        const std::string key = kv.first.as<std::string>();
        if (!known.contains(key)) throw ParseError("unknown key '" + key + "'", line_of(kv.first));
    }
}

/// Re-raises a validation failure with the line of the offending node.
template <class F>
auto at_line(const YAML::Node& n, F&& f) {
    try {
        return f();
    } catch (const PreconditionError& e) {
        throw ParseError(e.what(), line_of(n));
    }
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// Scenario files
//
//     name: specker_triple
//     propositions: [A, B, C]
//     joint_sets:          # jointly orthogonal sets; their subsets are implied
//       - [A, B]
//       - [B, C]
//       - [C, A]
//     marginals: {A: 1/2, B: 1/2, C: 1/2}   # optional

struct ScenarioFile {
    std::string name;
    OrthoScenario scenario;
    std::optional<MarginalVector> marginals;
};

inline ScenarioFile parse_scenario(const std::string& text) {
    using io_detail::line_of;
    const YAML::Node root = io_detail::parse_yaml(text);
    if (!root.IsMap()) throw ParseError("a scenario file must be a mapping", line_of(root));
    io_detail::reject_unknown_keys(root, {"name", "propositions", "joint_sets", "marginals"});

    const YAML::Node props = io_detail::require(root, "propositions", YAML::NodeType::Sequence);
    auto labels = io_detail::string_list(props, "a proposition");
    if (labels.empty()) throw ParseError("propositions must not be empty", line_of(props));

    const YAML::Node joint = io_detail::require(root, "joint_sets", YAML::NodeType::Sequence);
    std::vector<std::vector<std::string>> sets;
    for (const auto& s : joint) sets.push_back(io_detail::string_list(s, "a joint set"));

    ScenarioFile out{root["name"] ? io_detail::scalar(root["name"], "name") : std::string(),
                     io_detail::at_line(props, [&] { return OrthoScenario(labels, {}); }), std::nullopt};
    for (std::size_t k = 0; k < sets.size(); ++k) {
        io_detail::at_line(joint[k], [&] { return out.scenario.mask_of(sets[k]); });
    }
    out.scenario = OrthoScenario(labels, sets);

    if (const YAML::Node m = root["marginals"]) {
        if (!m.IsMap()) throw ParseError("marginals must map each proposition to a probability", line_of(m));
        std::vector<std::optional<Rational>> values(labels.size());
        for (const auto& kv : m) {
            const std::string label = io_detail::scalar(kv.first, "a proposition");
            const auto i = out.scenario.index_of(label);
            if (!i) throw ParseError("marginal for unknown proposition '" + label + "'", line_of(kv.first));
            if (values[*i]) throw ParseError("marginal for '" + label + "' given twice", line_of(kv.first));
            values[*i] = io_detail::rational(kv.second);
        }
        std::vector<Rational> flat;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (!values[i]) throw ParseError("no marginal for '" + labels[i] + "'", line_of(m));
            flat.push_back(*values[i]);
        }
        out.marginals = io_detail::at_line(m, [&] {
            MarginalVector mv(std::move(flat));
            mv.validate(out.scenario);
            return mv;
        });
    }
    return out;
}

/// Reads a scenario from a path or a bundled name (specker_triple, firefly, lsw).
inline ScenarioFile load_scenario(const std::string& path_or_name) {
    return parse_scenario(read_file(resolve_input(path_or_name, "scenarios", ".yaml")));
}

/// Writes the maximal joint sets only; reloading gives an equal scenario.
inline std::string write_scenario(const ScenarioFile& f) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    if (!f.name.empty()) out << YAML::Key << "name" << YAML::Value << f.name;
    out << YAML::Key << "propositions" << YAML::Value << YAML::Flow << f.scenario.labels();
    out << YAML::Key << "joint_sets" << YAML::Value << YAML::BeginSeq;
    for (PropSet m : f.scenario.maximal_sets()) out << YAML::Flow << f.scenario.labels_of(m);
    out << YAML::EndSeq;
    if (f.marginals) {
        out << YAML::Key << "marginals" << YAML::Value << YAML::Flow << YAML::BeginMap;
        for (std::size_t i = 0; i < f.scenario.size(); ++i) {
            out << YAML::Key << f.scenario.label(i) << YAML::Value << to_fraction((*f.marginals)[i]);
        }
        out << YAML::EndMap;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// Behavior tables
//
//     parties:
//       - {settings: [a, a'], outcomes: [1, -1]}
//       - {settings: [b, b'], outcomes: [1, -1]}
//     rows:                # one per setting combination, any order
//       - {settings: [a, b], p: [1/2, 0/1, 0/1, 1/2]}
//
// Each row lists p over outcome combinations with the last party varying fastest.

inline BehaviorTable parse_behavior(const std::string& text) {
    using io_detail::line_of;
    const YAML::Node root = io_detail::parse_yaml(text);
    if (!root.IsMap()) throw ParseError("a behavior file must be a mapping", line_of(root));
    io_detail::reject_unknown_keys(root, {"parties", "rows"});
    const YAML::Node parties = io_detail::require(root, "parties", YAML::NodeType::Sequence);
    if (parties.size() < 1 || parties.size() > 2) throw ParseError("a behavior table has 1 or 2 parties", line_of(parties));

    std::vector<std::vector<std::string>> settings;
    std::vector<std::vector<int>> outcomes;
    for (const auto& p : parties) {
        if (!p.IsMap()) throw ParseError("each party must be a mapping", line_of(p));
        io_detail::reject_unknown_keys(p, {"settings", "outcomes"});
        settings.push_back(io_detail::string_list(io_detail::require(p, "settings", YAML::NodeType::Sequence), "a setting"));
        std::vector<int> outs;
        for (const auto& o : io_detail::require(p, "outcomes", YAML::NodeType::Sequence)) {
            try {
                outs.push_back(o.as<int>());
            } catch (const YAML::Exception&) {
                throw ParseError("outcomes must be integers", line_of(o));
            }
        }
        outcomes.push_back(std::move(outs));
    }

    std::size_t combos = 1, per = 1;
    for (std::size_t k = 0; k < settings.size(); ++k) {
        if (settings[k].empty() || outcomes[k].empty()) {
            throw ParseError("every party needs at least one setting and one outcome", line_of(parties[k]));
        }
        combos *= settings[k].size();
        per *= outcomes[k].size();
    }
    std::vector<std::optional<std::vector<Rational>>> table(combos);
    const YAML::Node rows = io_detail::require(root, "rows", YAML::NodeType::Sequence);
    for (const auto& row : rows) {
        if (!row.IsMap()) throw ParseError("each row must be a mapping", line_of(row));
        io_detail::reject_unknown_keys(row, {"settings", "p"});
        const auto labels = io_detail::string_list(io_detail::require(row, "settings", YAML::NodeType::Sequence), "a setting");
        if (labels.size() != settings.size()) throw ParseError("row names one setting per party", line_of(row));
        std::size_t s = 0;
        for (std::size_t k = 0; k < labels.size(); ++k) {
            const auto it = std::find(settings[k].begin(), settings[k].end(), labels[k]);
            if (it == settings[k].end()) throw ParseError("unknown setting '" + labels[k] + "'", line_of(row));
            s = s * settings[k].size() + static_cast<std::size_t>(it - settings[k].begin());
        }
        if (table[s]) throw ParseError("setting combination listed twice", line_of(row));
        const YAML::Node p = io_detail::require(row, "p", YAML::NodeType::Sequence);
        if (p.size() != per) throw ParseError("expected " + std::to_string(per) + " probabilities", line_of(p));
        std::vector<Rational> values;
        for (const auto& v : p) values.push_back(io_detail::rational(v));
        table[s] = std::move(values);
    }
    std::vector<Rational> flat;
    for (const auto& r : table) {
        if (!r) throw ParseError("rows do not cover every setting combination", line_of(rows));
        flat.insert(flat.end(), r->begin(), r->end());
    }
    return io_detail::at_line(rows, [&] { return BehaviorTable(settings, outcomes, std::move(flat)); });
}

inline BehaviorTable load_behavior(const std::string& path) { return parse_behavior(read_file(path)); }

inline std::string write_behavior(const BehaviorTable& t) {
    YAML::Emitter out;
    out << YAML::BeginMap << YAML::Key << "parties" << YAML::Value << YAML::BeginSeq;
    for (std::size_t k = 0; k < t.parties(); ++k) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "settings" << YAML::Value << YAML::Flow << t.settings(k)
            << YAML::Key << "outcomes" << YAML::Value << YAML::Flow << t.outcomes(k) << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::Key << "rows" << YAML::Value << YAML::BeginSeq;
    const std::size_t per = t.outcome_combinations();
    for (std::size_t s = 0; s < t.setting_combinations(); ++s) {
        std::vector<std::string> labels(t.parties());
        std::size_t rest = s;
        for (std::size_t k = t.parties(); k-- > 0;) {
            labels[k] = t.settings(k)[rest % t.settings(k).size()];
            rest /= t.settings(k).size();
        }
        std::vector<std::string> p;
        for (std::size_t o = 0; o < per; ++o) p.push_back(to_fraction(t.probabilities()[s * per + o]));
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "settings" << YAML::Value << YAML::Flow << labels
            << YAML::Key << "p" << YAML::Value << YAML::Flow << p << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// CSV

/// Rationals as 12-digit decimals, or exactly as num/den.
inline std::string csv_number(const Rational& r, bool fractions) { return fractions ? to_fraction(r) : to_decimal(r); }

inline void write_correlator_csv(std::ostream& out, const BehaviorTable& t, bool fractions = false) {
    if (t.parties() != 2) throw PreconditionError("correlators need a two-party table");
    detail::require_chsh_shape(t);
    out << "setting_a,setting_b,E\n";
    for (std::size_t x = 0; x < t.settings(0).size(); ++x) {
        for (std::size_t y = 0; y < t.settings(1).size(); ++y) {
            out << t.settings(0)[x] << ',' << t.settings(1)[y] << ',' << csv_number(correlator(t, x, y), fractions) << '\n';
        }
    }
}

inline void write_sweep_csv(std::ostream& out, const std::vector<GapRow>& rows, bool fractions = false) {
    out << "p1,p2,p3,beta_worst,alpha_worst,bob_p1,gap\n";
    for (const auto& r : rows) {
        out << csv_number(r.p1, fractions) << ',' << csv_number(r.p2, fractions) << ',' << csv_number(r.p3, fractions)
            << ',' << csv_number(r.beta_worst, fractions) << ',' << csv_number(r.alpha_worst, fractions) << ','
            << csv_number(r.bob_p1, fractions) << ',' << csv_number(r.gap, fractions) << '\n';
    }
}

/// Quotes a field when it contains a comma, quote or newline.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

inline void write_assumptions_csv(std::ostream& out, const std::vector<AssumptionReport>& reports) {
    out << "model,assumption,verdict,witness_plan\n";
    for (const auto& r : reports) {
        for (const auto& [label, v] : {std::pair{"a", &r.a}, std::pair{"b", &r.b}, std::pair{"c", &r.c}}) {
            out << csv_field(r.model) << ',' << label << ',' << (v->holds ? "holds" : "violated") << ','
                << csv_field(v->witness_plan) << '\n';
        }
    }
}

inline void write_fable_csv(std::ostream& out, const FableStats& stats) {
    out << "trial,daniel_success,sandu_first,sandu_second\n";
    for (std::size_t i = 0; i < stats.per_trial.size(); ++i) {
        const auto& t = stats.per_trial[i];
        out << i + 1 << ',' << int(t.daniel_success) << ',' << int(t.sandu_first) << ',' << int(t.sandu_second) << '\n';
    }
}

struct QuantumCheckRow {
    std::string check;
    long dimension = 0;
    double deviation = 0;
};

inline void write_quantum_csv(std::ostream& out, const std::vector<QuantumCheckRow>& rows) {
    out << "check,dimension,deviation\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.12g", r.deviation);
        out << csv_field(r.check) << ',' << r.dimension << ',' << buf << '\n';
    }
}

}  // namespace orthobox
