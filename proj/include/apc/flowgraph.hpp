// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "apc/formula.hpp"

namespace apc {

using NodeId = std::string;

struct Assign {
    std::string var;
    Expr rhs;
};

struct Assume {
    Formula cond;
};

/// Edge label: `a := e` or `assume(γ)`.
using Instruction = std::variant<Assign, Assume>;

std::string to_string(const Instruction& instr);

struct Edge {
    NodeId from;
    NodeId to;
    Instruction instr;
};

/// Raised for flowgraphs that break a structural invariant.
class InvalidFlowgraph : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Program graph with distinguished start and target nodes. Nodes and edges
/// are kept in lexicographic order so every traversal is deterministic.
class Flowgraph {
public:
    Flowgraph(std::vector<std::string> scalars, std::map<std::string, std::size_t> arrays, std::vector<Edge> edges,
              NodeId start, NodeId target, std::vector<NodeId> extra_nodes = {});

    [[nodiscard]] const std::vector<NodeId>& nodes() const { return nodes_; }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] const NodeId& start() const { return start_; }
    [[nodiscard]] const NodeId& target() const { return target_; }
    /// Scalar variables in declaration order.
    [[nodiscard]] const std::vector<std::string>& scalars() const { return scalars_; }
    [[nodiscard]] const std::map<std::string, std::size_t>& arrays() const { return arrays_; }

    [[nodiscard]] bool has_node(const NodeId& n) const;
    /// Indices into edges(), ordered by target node.
    [[nodiscard]] const std::vector<std::size_t>& out_edges(const NodeId& n) const;
    [[nodiscard]] std::vector<NodeId> successors(const NodeId& n) const;
    [[nodiscard]] const Edge& edge(const NodeId& from, const NodeId& to) const;
    [[nodiscard]] const Edge* find_edge(const NodeId& from, const NodeId& to) const;

    /// Same program with a different target node.
    [[nodiscard]] Flowgraph with_target(const NodeId& target) const;

private:
    void validate() const;

    std::vector<std::string> scalars_;
    std::map<std::string, std::size_t> arrays_;
    std::vector<Edge> edges_;
    NodeId start_;
    NodeId target_;
    std::vector<NodeId> nodes_;
    std::map<NodeId, std::vector<std::size_t>> out_;
};

}  // namespace apc
