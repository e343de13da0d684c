#pragma once

#include <cstddef>
#include <cstdlib>
#include <sstream>
#include <string>

#include "fairmat/errors.hpp"

namespace fairmat {

/// Enumeration limits. Exceeding one is a hard error, never a silent
/// approximation.
struct Guards {
    std::size_t subset_items = 20;       // 2^m subset sweeps (reduced rank, eat capacity)
    std::size_t family_items = 12;       // full enumeration of a feasible family
    std::size_t assignments = 200000;    // |deterministic assignments| for VRep
    std::size_t partitions = 10000000;   // partitionability search nodes
};

namespace detail {

/// Parses FAIRMAT_GUARD, e.g. "subset=22,family=14,assignments=500000".
inline Guards guards_from_env() {
    Guards g;
    const char* env = std::getenv("FAIRMAT_GUARD");
    if (env == nullptr) return g;
    std::stringstream ss(env);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = item.substr(0, eq);
        const std::size_t value = std::stoul(item.substr(eq + 1));
        if (key == "subset") g.subset_items = value;
        else if (key == "family") g.family_items = value;
        else if (key == "assignments") g.assignments = value;
        else if (key == "partitions") g.partitions = value;
    }
    return g;
}

inline Guards& guards_storage() {
    static Guards g = guards_from_env();
    return g;
}

}  // namespace detail

inline const Guards& guards() { return detail::guards_storage(); }

/// Overrides the process-wide guards (tests and the CLI use this).
inline void set_guards(const Guards& g) { detail::guards_storage() = g; }

inline void require_subset_guard(std::size_t m, const char* what) {
    if (m > guards().subset_items)
        throw GroundSetTooLarge(std::string(what) + ": " + std::to_string(m) + " items exceeds subset guard " +
                                std::to_string(guards().subset_items));
}

inline void require_family_guard(std::size_t m, const char* what) {
    if (m > guards().family_items)
        throw GroundSetTooLarge(std::string(what) + ": " + std::to_string(m) + " items exceeds family guard " +
                                std::to_string(guards().family_items));
}

}  // namespace fairmat
