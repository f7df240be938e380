#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "../errors.hpp"
#include "enumerate.hpp"
#include "firefly.hpp"
#include "lsw.hpp"
#include "plan.hpp"
#include "query.hpp"
#include "seer.hpp"

namespace orthobox {

using AnyModel = std::variant<SeerModel, FireflyModel, LswModel>;

/// Accepted names: seer, lsw, firefly (the mirror flavor), and
/// firefly:<flavor> for any flavor name.
inline AnyModel make_model(std::string_view name) {
    if (name == "seer") return SeerModel{};
    if (name == "lsw") return LswModel{};
    if (name == "firefly") return FireflyModel{FireflyFlavor::mirror};
    if (name.rfind("firefly:", 0) == 0) return FireflyModel{parse_flavor(name.substr(8))};
    throw PreconditionError("unknown model '" + std::string(name) +
                            "' (expected seer, firefly, firefly:<flavor> or lsw)");
}

inline std::string model_name(const AnyModel& m) {
    return std::visit([](const auto& x) { return x.name(); }, m);
}

inline bool admits(const AnyModel& m, const Query& q) {
    return std::visit([&](const auto& x) { return x.admits(q); }, m);
}

/// Whether query `q` counts as a measurement of box `x`. Models may narrow
/// this with a `measures` member; otherwise any query containing x does.
inline bool measures(const AnyModel& m, const Query& q, Box x) {
    return std::visit(
        [&](const auto& model) {
            if constexpr (requires { model.measures(q, x); }) {
                return model.measures(q, x);
            } else {
                return q.contains(x);
            }
        },
        m);
}

inline std::vector<History> enumerate_histories(const AnyModel& m, const Plan& plan) {
    return std::visit([&](const auto& x) { return enumerate_histories(x, plan); }, m);
}

inline History sample_history(const AnyModel& m, const Plan& plan, Generator& gen) {
    return std::visit([&](const auto& x) { return sample_history(x, plan, gen); }, m);
}

inline std::map<std::string, std::uint64_t> sample_counts(const AnyModel& m, const Plan& plan, std::uint64_t trials,
                                                          std::uint64_t seed = Generator::default_seed) {
    return std::visit([&](const auto& x) { return sample_counts(x, plan, trials, seed); }, m);
}

/// Every query the model admits on one side: singles first, then pairs.
inline std::vector<Query> admissible_queries(const AnyModel& m, Side side) {
    std::vector<Query> out;
    for (Box b : all_boxes) {
        const Query q = Query::single(side, b);
        if (admits(m, q)) out.push_back(q);
    }
    for (const Query q : {Query::pair(side, Box::A, Box::B), Query::pair(side, Box::B, Box::C),
                          Query::pair(side, Box::C, Box::A)}) {
        if (admits(m, q)) out.push_back(q);
    }
    return out;
}

}  // namespace orthobox
