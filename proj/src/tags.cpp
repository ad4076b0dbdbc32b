#include "lentag/tags.hpp"

namespace lentag {

namespace {

constexpr std::array<std::string_view, kTagCount> kNames = {
    "N", "V", "Adj", "Adv", "Det", "Pron", "Prep", "Conj",
    "Num", "Aux", "Interj", "Part", "Punct", "Formula", "Other",
};

} // namespace

std::string_view tag_name(CoarseTag t) noexcept { return kNames[tag_index(t)]; }

std::optional<CoarseTag> parse_tag(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kTagCount; ++i)
        if (kNames[i] == name) return kAllTags[i];
    return std::nullopt;
}

std::string_view tagset_signature() noexcept {
    return "N,V,Adj,Adv,Det,Pron,Prep,Conj,Num,Aux,Interj,Part,Punct,Formula,Other";
}

} // namespace lentag
