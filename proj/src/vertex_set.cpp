#include "finepot/space.hpp"

#include <algorithm>

#include "finepot/error.hpp"

namespace finepot {

VertexSet VertexSet::from_indices(std::size_t universe, std::span<const std::size_t> indices) {
    VertexSet s(universe);
    for (auto v : indices) {
        require(v < universe, "vertex index out of range");
        s.bits_[v] = 1;
    }
    return s;
}

std::size_t VertexSet::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> VertexSet::indices() const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < bits_.size(); ++v)
        if (bits_[v]) out.push_back(v);
    return out;
}

VertexSet VertexSet::complement() const {
    VertexSet s(bits_.size());
    for (std::size_t v = 0; v < bits_.size(); ++v) s.bits_[v] = bits_[v] ? 0 : 1;
    return s;
}

bool VertexSet::subset_of(const VertexSet& other) const {
    require(other.universe() == universe(), "vertex sets over different spaces");
    for (std::size_t v = 0; v < bits_.size(); ++v)
        if (bits_[v] && !other.bits_[v]) return false;
    return true;
}

bool VertexSet::disjoint_from(const VertexSet& other) const {
    require(other.universe() == universe(), "vertex sets over different spaces");
    for (std::size_t v = 0; v < bits_.size(); ++v)
        if (bits_[v] && other.bits_[v]) return false;
    return true;
}

VertexSet VertexSet::operator|(const VertexSet& o) const {
    require(o.universe() == universe(), "vertex sets over different spaces");
    VertexSet s(bits_.size());
    for (std::size_t v = 0; v < bits_.size(); ++v) s.bits_[v] = (bits_[v] | o.bits_[v]);
    return s;
}

VertexSet VertexSet::operator&(const VertexSet& o) const {
    require(o.universe() == universe(), "vertex sets over different spaces");
    VertexSet s(bits_.size());
    for (std::size_t v = 0; v < bits_.size(); ++v) s.bits_[v] = (bits_[v] & o.bits_[v]);
    return s;
}

VertexSet VertexSet::operator-(const VertexSet& o) const {
    require(o.universe() == universe(), "vertex sets over different spaces");
    VertexSet s(bits_.size());
    for (std::size_t v = 0; v < bits_.size(); ++v) s.bits_[v] = (bits_[v] && !o.bits_[v]) ? 1 : 0;
    return s;
}

} // namespace finepot
