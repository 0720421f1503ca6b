// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <set>
#include <stdexcept>
#include <vector>

#include "apc/flowgraph.hpp"

namespace apc {

/// A sequence of nodes connected by edges. A backbone is a path from start to
/// target without repeated nodes.
using Path = std::vector<NodeId>;

/// A loop entered at `entry`, the node at index `position` of some backbone.
struct LoopInfo {
    NodeId entry;
    std::set<NodeId> body;
    std::size_t position = 0;

    friend bool operator==(const LoopInfo&, const LoopInfo&) = default;
};

/// Raised when an analysis budget (backbone count, nesting depth) runs out.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t default_backbone_cap = 10'000;

/// True when consecutive nodes of `p` are joined by edges of `fg`.
bool is_path(const Flowgraph& fg, const Path& p);

/// Removes cycles by repeatedly cutting, at the leftmost node that occurs
/// more than once, everything after its first occurrence up to and including
/// its last occurrence.
Path backbone_of(const Path& p);

/// All acyclic start-to-target paths, in lexicographic order of node ids.
std::vector<Path> enumerate_backbones(const Flowgraph& fg, std::size_t cap = default_backbone_cap);

/// Loop entries along `backbone` in order of position. A node v at position j
/// is an entry when a cycle through v exists among the nodes not in
/// backbone[0..j); the body is every node on such a cycle.
std::vector<LoopInfo> loops_along(const Flowgraph& fg, const Path& backbone);

/// The loop body as a flowgraph of its own: start at the entry, edges back
/// into the entry redirected to a fresh target copy of it, edges leaving the
/// body dropped.
Flowgraph induced_flowgraph(const Flowgraph& fg, const LoopInfo& loop);

}  // namespace apc
