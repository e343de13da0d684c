#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fairmat/domain.hpp"

namespace fairmat::io {

using json = nlohmann::json;

inline json rational_json(const Rational& r) { return to_string(r); }

inline Rational rational_from(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    throw ParseError("expected a rational string or integer, got " + j.dump());
}

inline json labels_json(const Instance& inst, ItemSet s) {
    json out = json::array();
    for (std::size_t e : s.items()) out.push_back(inst.items[e].label);
    return out;
}

inline ItemSet set_from(const Instance& inst, const json& j) {
    ItemSet s;
    for (const auto& l : j) {
        const auto idx = inst.item_index(l.get<std::string>());
        if (!idx) throw ParseError("unknown item '" + l.get<std::string>() + "'");
        s = s.with(*idx);
    }
    return s;
}

inline json family_json(const Instance& inst, const ConstraintFamily& f) {
    json out;
    out["kind"] = f.kind_name();
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, UniformKind>) {
                out["capacity"] = k.capacity;
            } else if constexpr (std::is_same_v<K, PartitionKind>) {
                out["blocks"] = json::array();
                for (const auto& b : k.blocks) out["blocks"].push_back({{"items", labels_json(inst, b.items)}, {"cap", b.cap}});
            } else if constexpr (std::is_same_v<K, BudgetKind>) {
                json w = json::object();
                for (std::size_t e = 0; e < k.weights.size() && e < inst.m(); ++e) w[inst.items[e].label] = k.weights[e];
                out["weights"] = w;
                if (is_integral(k.budget)) out["budget"] = k.budget.template convert_to<long long>();
                else out["budget"] = to_string(k.budget);
            } else if constexpr (std::is_same_v<K, ExplicitKind>) {
                out["maximal"] = json::array();
                for (ItemSet s : k.maximal_sets) out["maximal"].push_back(labels_json(inst, s));
            }
        },
        f.kind());
    return out;
}

inline json instance_json(const Instance& inst) {
    json out;
    out["agents"] = inst.n;
    out["items"] = json::array();
    for (const auto& it : inst.items) out["items"].push_back(it.label);
    out["prefs"] = json::array();
    for (const auto& p : inst.prefs) {
        json order = json::array();
        for (std::size_t e : p.order()) order.push_back(inst.items[e].label);
        out["prefs"].push_back(order);
    }
    out["constraints"] = json::array();
    for (const auto& f : inst.constraints) out["constraints"].push_back(family_json(inst, f));
    return out;
}

inline ConstraintFamily family_from(const Instance& inst, const json& j) {
    const std::size_t m = inst.m();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "free") return ConstraintFamily::free(m);
    if (kind == "uniform") return ConstraintFamily::uniform(m, j.at("capacity").get<std::size_t>());
    if (kind == "partition") {
        std::vector<Block> blocks;
        for (const auto& b : j.at("blocks")) blocks.push_back({set_from(inst, b.at("items")), b.at("cap").get<std::size_t>()});
        return ConstraintFamily::partition(m, std::move(blocks));
    }
    if (kind == "budget") {
        std::vector<std::int64_t> weights(m, 0);
        for (const auto& [label, w] : j.at("weights").items()) {
            const auto idx = inst.item_index(label);
            if (!idx) throw ParseError("unknown item '" + label + "' in budget weights");
            weights[*idx] = w.get<std::int64_t>();
        }
        return ConstraintFamily::budget(m, std::move(weights), rational_from(j.at("budget")));
    }
    if (kind == "explicit") {
        std::vector<ItemSet> sets;
        for (const auto& s : j.at("maximal")) sets.push_back(set_from(inst, s));
        return ConstraintFamily::explicit_maximal(m, std::move(sets));
    }
    throw ParseError("unknown constraint kind '" + kind + "'");
}

/// Parses the instance format. Structural problems that still produce a
/// well-typed instance are left to validate_instance.
inline Instance instance_from(const json& j) {
    try {
        Instance inst;
        inst.n = j.at("agents").get<std::size_t>();
        std::vector<std::string> labels;
        for (const auto& l : j.at("items")) labels.push_back(l.get<std::string>());
        if (labels.size() > ItemSet::max_items) throw ParseError("more than 64 items");
        inst.items = make_items(labels);
        for (const auto& p : j.at("prefs")) {
            std::vector<std::size_t> order;
            for (const auto& l : p) {
                const auto idx = inst.item_index(l.get<std::string>());
                if (!idx) throw ParseError("unknown item '" + l.get<std::string>() + "' in preference");
                order.push_back(*idx);
            }
            inst.prefs.emplace_back(std::move(order));
        }
        for (const auto& c : j.at("constraints")) inst.constraints.push_back(family_from(inst, c));
        return inst;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed instance: ") + e.what());
    }
}

inline json pi_json(const FractionalAssignment& pi) {
    json rows = json::array();
    for (std::size_t i = 0; i < pi.agents(); ++i) {
        json row = json::array();
        for (const auto& v : pi.row(i)) row.push_back(to_string(v));
        rows.push_back(row);
    }
    return {{"pi", rows}};
}

inline FractionalAssignment pi_from(const json& j) {
    try {
        const json& rows = j.contains("pi") ? j.at("pi") : j;
        std::vector<Vector> out;
        for (const auto& r : rows) {
            Vector row;
            for (const auto& v : r) row.push_back(rational_from(v));
            out.push_back(std::move(row));
        }
        return FractionalAssignment::from_rows(out);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed assignment: ") + e.what());
    }
}

inline json assignment_json(const Instance& inst, const DeterministicAssignment& x) {
    json b = json::array();
    for (ItemSet s : x.bundles) b.push_back(labels_json(inst, s));
    return b;
}

inline DeterministicAssignment assignment_from(const Instance& inst, const json& j) {
    DeterministicAssignment x;
    for (const auto& b : j) x.bundles.push_back(set_from(inst, b));
    return x;
}

inline json lottery_json(const Instance& inst, const Lottery& lottery) {
    json support = json::array();
    for (const auto& entry : lottery.support)
        support.push_back({{"p", to_string(entry.probability)}, {"bundles", assignment_json(inst, entry.assignment)}});
    return {{"support", support}};
}

inline Lottery lottery_from(const Instance& inst, const json& j) {
    try {
        Lottery lottery;
        for (const auto& entry : j.at("support"))
            lottery.support.push_back({rational_from(entry.at("p")), assignment_from(inst, entry.at("bundles"))});
        return lottery;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed lottery: ") + e.what());
    }
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

}  // namespace fairmat::io
