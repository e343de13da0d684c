#pragma once

#include <bit>
#include <cassert>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace fairmat {

/// Set of item indices as a 64-bit mask. Instances are limited to 64 items.
class ItemSet {
public:
    using Mask = std::uint64_t;
    static constexpr std::size_t max_items = 64;

    constexpr ItemSet() = default;
    constexpr explicit ItemSet(Mask bits) : bits_(bits) {}

    static constexpr ItemSet singleton(std::size_t e) {
        assert(e < max_items);
        return ItemSet(Mask{1} << e);
    }
    static constexpr ItemSet full(std::size_t m) {
        return m >= max_items ? ItemSet(~Mask{0}) : ItemSet((Mask{1} << m) - 1);
    }
    template <typename Range>
    static ItemSet of(const Range& items) {
        ItemSet s;
        for (auto e : items) s = s.with(static_cast<std::size_t>(e));
        return s;
    }

    constexpr Mask bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
    constexpr bool contains(std::size_t e) const { return e < max_items && ((bits_ >> e) & 1U) != 0; }
    constexpr bool subset_of(ItemSet other) const { return (bits_ & ~other.bits_) == 0; }
    constexpr ItemSet with(std::size_t e) const { return ItemSet(bits_ | (Mask{1} << e)); }
    constexpr ItemSet without(std::size_t e) const { return ItemSet(bits_ & ~(Mask{1} << e)); }
    /// Lowest index in the set; undefined on the empty set.
    constexpr std::size_t first() const { return static_cast<std::size_t>(std::countr_zero(bits_)); }

    std::vector<std::size_t> items() const {
        std::vector<std::size_t> out;
        out.reserve(size());
        for (Mask b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
        return out;
    }

    friend constexpr ItemSet operator|(ItemSet a, ItemSet b) { return ItemSet(a.bits_ | b.bits_); }
    friend constexpr ItemSet operator&(ItemSet a, ItemSet b) { return ItemSet(a.bits_ & b.bits_); }
    friend constexpr ItemSet operator-(ItemSet a, ItemSet b) { return ItemSet(a.bits_ & ~b.bits_); }
    friend constexpr bool operator==(ItemSet a, ItemSet b) = default;
    friend constexpr auto operator<=>(ItemSet a, ItemSet b) = default;

private:
    Mask bits_ = 0;
};

/// Calls f(sub) for every subset of `set`, including the empty set and `set`.
template <typename F>
void for_each_subset(ItemSet set, F&& f) {
    const auto mask = set.bits();
    auto sub = mask;
    while (true) {
        f(ItemSet(sub));
        if (sub == 0) break;
        sub = (sub - 1) & mask;
    }
}

}  // namespace fairmat
