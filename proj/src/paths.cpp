// SPDX-License-Identifier: Apache-2.0
#include "apc/paths.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace apc {

bool is_path(const Flowgraph& fg, const Path& p) {
    if (p.empty()) {
        return false;
    }
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        if (fg.find_edge(p[i], p[i + 1]) == nullptr) {
            return false;
        }
    }
    return fg.has_node(p.front());
}

Path backbone_of(const Path& p) {
    Path cur = p;
    for (;;) {
        std::map<NodeId, std::size_t> last;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            last[cur[i]] = i;
        }
        bool cut = false;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            const std::size_t j = last[cur[i]];
            if (j != i) {
                cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                          cur.begin() + static_cast<std::ptrdiff_t>(j) + 1);
                cut = true;
                break;
            }
        }
        if (!cut) {
            return cur;
        }
    }
}

std::vector<Path> enumerate_backbones(const Flowgraph& fg, std::size_t cap) {
    std::vector<Path> out;
    Path path{fg.start()};
    std::set<NodeId> on_path{fg.start()};
    // explicit stack of (node, index of next out-edge to try)
    std::vector<std::pair<NodeId, std::size_t>> stack{{fg.start(), 0}};
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (node == fg.target()) {
            if (out.size() >= cap) {
                throw CapExceeded("more than " + std::to_string(cap) + " backbones");
            }
            out.push_back(path);
            on_path.erase(node);
            path.pop_back();
            stack.pop_back();
            continue;
        }
        const auto& outs = fg.out_edges(node);
        if (next == outs.size()) {
            on_path.erase(node);
            path.pop_back();
            stack.pop_back();
            continue;
        }
        const NodeId succ = fg.edges()[outs[next++]].to;
        if (on_path.contains(succ)) {
            continue;
        }
        on_path.insert(succ);
        path.push_back(succ);
        stack.emplace_back(succ, 0);
    }
    return out;
}

namespace {

std::map<NodeId, std::vector<NodeId>> predecessors(const Flowgraph& fg) {
    std::map<NodeId, std::vector<NodeId>> pred;
    for (const auto& e : fg.edges()) {
        pred[e.to].push_back(e.from);
    }
    return pred;
}

// Nodes reachable from `from` in one or more steps without entering `blocked`.
template <typename Next>
std::set<NodeId> reach(const NodeId& from, const std::set<NodeId>& blocked, Next next) {
    std::set<NodeId> seen;
    std::deque<NodeId> work{from};
    while (!work.empty()) {
        NodeId n = work.front();
        work.pop_front();
        for (const auto& m : next(n)) {
            if (!blocked.contains(m) && seen.insert(m).second) {
                work.push_back(m);
            }
        }
    }
    return seen;
}

}  // namespace

std::vector<LoopInfo> loops_along(const Flowgraph& fg, const Path& backbone) {
    const auto pred = predecessors(fg);
    auto forward = [&](const NodeId& n) { return fg.successors(n); };
    auto backward = [&](const NodeId& n) {
        auto it = pred.find(n);
        return it == pred.end() ? std::vector<NodeId>{} : it->second;
    };
    std::vector<LoopInfo> out;
    std::set<NodeId> prefix;
    for (std::size_t j = 0; j + 1 < backbone.size(); ++j) {
        const NodeId& v = backbone[j];
        const auto fwd = reach(v, prefix, forward);
        if (fwd.contains(v)) {
            const auto bwd = reach(v, prefix, backward);
            LoopInfo loop{v, {}, j};
            std::set_intersection(fwd.begin(), fwd.end(), bwd.begin(), bwd.end(),
                                  std::inserter(loop.body, loop.body.end()));
            out.push_back(std::move(loop));
        }
        prefix.insert(v);
    }
    return out;
}

Flowgraph induced_flowgraph(const Flowgraph& fg, const LoopInfo& loop) {
    NodeId exit = loop.entry + "'";
    while (fg.has_node(exit)) {
        exit += "'";
    }
    std::vector<Edge> edges;
    for (const auto& e : fg.edges()) {
        if (loop.body.contains(e.from) && loop.body.contains(e.to)) {
            edges.push_back({e.from, e.to == loop.entry ? exit : e.to, e.instr});
        }
    }
    std::vector<NodeId> nodes(loop.body.begin(), loop.body.end());
    return Flowgraph(fg.scalars(), fg.arrays(), std::move(edges), loop.entry, exit, std::move(nodes));
}

}  // namespace apc
