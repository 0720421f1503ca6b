// SPDX-License-Identifier: Apache-2.0
#include "apc/flowgraph.hpp"

#include <algorithm>
#include <set>

namespace apc {

std::string to_string(const Instruction& instr) {
    if (const auto* a = std::get_if<Assign>(&instr)) {
        return a->var + " := " + a->rhs.to_string();
    }
    return "assume " + std::get<Assume>(instr).cond.to_string();
}

Flowgraph::Flowgraph(std::vector<std::string> scalars, std::map<std::string, std::size_t> arrays,
                     std::vector<Edge> edges, NodeId start, NodeId target, std::vector<NodeId> extra_nodes)
    : scalars_(std::move(scalars)),
      arrays_(std::move(arrays)),
      edges_(std::move(edges)),
      start_(std::move(start)),
      target_(std::move(target)) {
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
    std::set<NodeId> nodes(extra_nodes.begin(), extra_nodes.end());
    nodes.insert(start_);
    nodes.insert(target_);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        nodes.insert(edges_[i].from);
        nodes.insert(edges_[i].to);
        out_[edges_[i].from].push_back(i);
    }
    nodes_.assign(nodes.begin(), nodes.end());
    validate();
}

namespace {

void check_expr(const Expr& e, const std::set<std::string>& scalars, const std::map<std::string, std::size_t>& arrays) {
    switch (e.kind()) {
    case ExprKind::Var:
        if (!scalars.contains(e.name())) {
            throw InvalidFlowgraph("undeclared scalar variable '" + e.name() + "'");
        }
        return;
    case ExprKind::ArrayRead: {
        auto it = arrays.find(e.name());
        if (it == arrays.end()) {
            throw InvalidFlowgraph("undeclared array '" + e.name() + "'");
        }
        if (it->second != e.args().size()) {
            throw InvalidFlowgraph("array '" + e.name() + "' has dimension " + std::to_string(it->second) +
                                   " but is indexed with " + std::to_string(e.args().size()) + " subscripts");
        }
        break;
    }
    case ExprKind::Symbol:
    case ExprKind::Apply:
    case ExprKind::Counter:
    case ExprKind::Star: throw InvalidFlowgraph("instruction contains a symbolic term: " + e.to_string());
    default: break;
    }
    for (const auto& a : e.args()) {
        check_expr(a, scalars, arrays);
    }
}

void check_formula(const Formula& f, const std::set<std::string>& scalars,
                   const std::map<std::string, std::size_t>& arrays) {
    if (f.is_quantifier()) {
        throw InvalidFlowgraph("assumption contains a quantifier");
    }
    if (f.kind() == FormulaKind::Cmp) {
        check_expr(f.lhs(), scalars, arrays);
        check_expr(f.rhs(), scalars, arrays);
    }
    for (const auto& c : f.children()) {
        check_formula(c, scalars, arrays);
    }
}

}  // namespace

void Flowgraph::validate() const {
    if (start_ == target_) {
        throw InvalidFlowgraph("start and target must be different nodes");
    }
    std::set<std::string> scalars;
    for (const auto& s : scalars_) {
        if (!scalars.insert(s).second) {
            throw InvalidFlowgraph("scalar '" + s + "' declared twice");
        }
        if (arrays_.contains(s)) {
            throw InvalidFlowgraph("'" + s + "' declared both as scalar and array");
        }
    }
    for (std::size_t i = 1; i < edges_.size(); ++i) {
        if (edges_[i - 1].from == edges_[i].from && edges_[i - 1].to == edges_[i].to) {
            throw InvalidFlowgraph("duplicate edge " + edges_[i].from + " -> " + edges_[i].to);
        }
    }
    for (const auto& e : edges_) {
        if (const auto* a = std::get_if<Assign>(&e.instr)) {
            if (arrays_.contains(a->var)) {
                throw InvalidFlowgraph("edge " + e.from + " -> " + e.to + " assigns to read-only array '" + a->var +
                                       "'");
            }
            if (!scalars.contains(a->var)) {
                throw InvalidFlowgraph("edge " + e.from + " -> " + e.to + " assigns undeclared variable '" + a->var +
                                       "'");
            }
            check_expr(a->rhs, scalars, arrays_);
        } else {
            check_formula(std::get<Assume>(e.instr).cond, scalars, arrays_);
        }
    }
    for (const auto& [node, outs] : out_) {
        if (outs.size() > 2) {
            throw InvalidFlowgraph("node " + node + " has more than two out-edges");
        }
        if (outs.size() == 2) {
            const auto* a = std::get_if<Assume>(&edges_[outs[0]].instr);
            const auto* b = std::get_if<Assume>(&edges_[outs[1]].instr);
            if (a == nullptr || b == nullptr || !(Formula::negation(a->cond) == b->cond)) {
                throw InvalidFlowgraph("branching node " + node +
                                       " must have out-edges labelled assume(g) and assume(!g)");
            }
        }
    }
}

bool Flowgraph::has_node(const NodeId& n) const { return std::binary_search(nodes_.begin(), nodes_.end(), n); }

const std::vector<std::size_t>& Flowgraph::out_edges(const NodeId& n) const {
    static const std::vector<std::size_t> none;
    auto it = out_.find(n);
    return it == out_.end() ? none : it->second;
}

std::vector<NodeId> Flowgraph::successors(const NodeId& n) const {
    std::vector<NodeId> out;
    for (auto i : out_edges(n)) {
        out.push_back(edges_[i].to);
    }
    return out;
}

const Edge* Flowgraph::find_edge(const NodeId& from, const NodeId& to) const {
    for (auto i : out_edges(from)) {
        if (edges_[i].to == to) {
            return &edges_[i];
        }
    }
    return nullptr;
}

const Edge& Flowgraph::edge(const NodeId& from, const NodeId& to) const {
    const Edge* e = find_edge(from, to);
    if (e == nullptr) {
        throw std::out_of_range("no edge " + from + " -> " + to);
    }
    return *e;
}

Flowgraph Flowgraph::with_target(const NodeId& target) const {
    if (!has_node(target)) {
        throw InvalidFlowgraph("unknown target node '" + target + "'");
    }
    return Flowgraph(scalars_, arrays_, edges_, start_, target, nodes_);
}

}  // namespace apc
