#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace lentag {

/// The closed set of coarse word-types. Declaration order is significant:
/// it is the last-resort tie-break when selecting a tag.
enum class CoarseTag : std::uint8_t {
    N,
    V,
    Adj,
    Adv,
    Det,
    Pron,
    Prep,
    Conj,
    Num,
    Aux,
    Interj,
    Part,
    Punct,
    Formula,
    Other,
};

inline constexpr std::size_t kTagCount = 15;

inline constexpr std::array<CoarseTag, kTagCount> kAllTags = {
    CoarseTag::N,    CoarseTag::V,    CoarseTag::Adj,    CoarseTag::Adv,   CoarseTag::Det,
    CoarseTag::Pron, CoarseTag::Prep, CoarseTag::Conj,   CoarseTag::Num,   CoarseTag::Aux,
    CoarseTag::Interj, CoarseTag::Part, CoarseTag::Punct, CoarseTag::Formula, CoarseTag::Other,
};

constexpr std::size_t tag_index(CoarseTag t) noexcept { return static_cast<std::size_t>(t); }

std::string_view tag_name(CoarseTag t) noexcept;

/// Exact, case-sensitive lookup by name.
std::optional<CoarseTag> parse_tag(std::string_view name) noexcept;

/// All tag names joined with ',' in declaration order.
std::string_view tagset_signature() noexcept;

} // namespace lentag
