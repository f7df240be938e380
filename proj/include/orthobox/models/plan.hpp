#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "../errors.hpp"
#include "enumerate.hpp"
#include "query.hpp"

namespace orthobox {

/// Plan files are indentation-structured:
///
///     # comment
///     alice C
///       on +:
///         alice B
///       on -:
///         alice A
///     bob AB
///
/// A step is `<side> <target>`. Lines `on <outcome>:` indented under a step
/// open a branch whose sub-steps are indented further. Outcomes are written
/// with + and - per box (full/empty/glow/dark are accepted for single boxes).
namespace plan_detail {

struct Line {
    int number;
    std::size_t indent;
    std::string text;
};

inline std::vector<Line> split_lines(std::string_view source) {
    std::vector<Line> lines;
    int number = 0;
    std::size_t pos = 0;
    while (pos <= source.size()) {
        const auto end = source.find('\n', pos);
        std::string_view raw = source.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        ++number;
        pos = end == std::string_view::npos ? source.size() + 1 : end + 1;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        while (!raw.empty() && (raw.back() == ' ' || raw.back() == '\r')) raw.remove_suffix(1);
        if (raw.empty()) continue;
        std::size_t indent = 0;
        while (indent < raw.size() && raw[indent] == ' ') ++indent;
        if (indent < raw.size() && raw[indent] == '\t') throw ParseError("tabs are not allowed for indentation", number);
        if (indent == raw.size()) continue;
        lines.push_back({number, indent, std::string(raw.substr(indent))});
    }
    return lines;
}

inline PlanStep parse_step(const Line& line) {
    std::istringstream in(line.text);
    std::string side, target, extra;
    in >> side >> target;
    if (target.empty() || (in >> extra)) {
        throw ParseError("expected '<side> <target>', got '" + line.text + "'", line.number);
    }
    try {
        return PlanStep{parse_query(parse_side(side), target), {}};
    } catch (const ParseError& e) {
        throw ParseError(e.what(), line.number);
    }
}

inline Outcome parse_branch_head(const Line& line) {
    const std::string& t = line.text;
    if (t.rfind("on ", 0) != 0 || t.back() != ':') {
        throw ParseError("expected 'on <outcome>:', got '" + t + "'", line.number);
    }
    std::string_view word = std::string_view(t).substr(3, t.size() - 4);
    while (!word.empty() && word.front() == ' ') word.remove_prefix(1);
    while (!word.empty() && word.back() == ' ') word.remove_suffix(1);
    try {
        return parse_outcome(word);
    } catch (const ParseError& e) {
        throw ParseError(e.what(), line.number);
    }
}

inline Plan parse_block(const std::vector<Line>& lines, std::size_t& i, std::size_t indent) {
    Plan plan;
    while (i < lines.size() && lines[i].indent >= indent) {
        const Line& line = lines[i];
        if (line.indent != indent) throw ParseError("unexpected indentation", line.number);
        PlanStep step = parse_step(line);
        ++i;
        if (i < lines.size() && lines[i].indent > indent) {
            const std::size_t branch_indent = lines[i].indent;
            while (i < lines.size() && lines[i].indent == branch_indent) {
                const Line& head = lines[i];
                Outcome on = parse_branch_head(head);
                if (on.size() != step.query.size()) {
                    throw ParseError("outcome '" + on.to_string() + "' does not fit query '" + step.query.to_string() + "'",
                                     head.number);
                }
                for (const auto& br : step.branches) {
                    if (br.on == on) throw ParseError("duplicate branch 'on " + on.to_string() + "'", head.number);
                }
                ++i;
                Plan sub;
                if (i < lines.size() && lines[i].indent > branch_indent) sub = parse_block(lines, i, lines[i].indent);
                step.branches.push_back({on, std::move(sub)});
            }
            if (i < lines.size() && lines[i].indent > indent) {
                throw ParseError("unexpected indentation", lines[i].number);
            }
        }
        plan.push_back(std::move(step));
    }
    return plan;
}

inline void write_block(std::ostream& out, const Plan& plan, std::size_t indent) {
    const std::string pad(indent, ' ');
    for (const auto& step : plan) {
        out << pad << step.query.to_string() << '\n';
        for (const auto& br : step.branches) {
            out << pad << "  on " << br.on.to_string() << ":\n";
            write_block(out, br.steps, indent + 4);
        }
    }
}

}  // namespace plan_detail

inline Plan parse_plan(std::string_view source) {
    const auto lines = plan_detail::split_lines(source);
    if (lines.empty()) throw ParseError("plan has no steps", 0);
    if (lines.front().indent != 0) throw ParseError("top-level steps must not be indented", lines.front().number);
    std::size_t i = 0;
    Plan plan = plan_detail::parse_block(lines, i, 0);
    if (i != lines.size()) throw ParseError("unexpected indentation", lines[i].number);
    return plan;
}

inline Plan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open plan file '" + path + "'", 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_plan(buf.str());
}

inline std::string write_plan(const Plan& plan) {
    std::ostringstream out;
    plan_detail::write_block(out, plan, 0);
    return out.str();
}

/// Single-line rendering for reports: "alice C {+: alice B | -: alice A}; bob AB".
inline std::string describe_plan(const Plan& plan) {
    std::string s;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        if (i) s += "; ";
        s += plan[i].query.to_string();
        if (!plan[i].branches.empty()) {
            s += " {";
            for (std::size_t b = 0; b < plan[i].branches.size(); ++b) {
                if (b) s += " | ";
                s += plan[i].branches[b].on.to_string() + ": " + describe_plan(plan[i].branches[b].steps);
            }
            s += "}";
        }
    }
    return s;
}

}  // namespace orthobox
