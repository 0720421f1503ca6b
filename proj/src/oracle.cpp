// SPDX-License-Identifier: Apache-2.0
#include "apc/oracle.hpp"

#include <charconv>
#include <sstream>

#include "apc/dsl.hpp"

namespace apc {

namespace {

Valuation initial_valuation(const Flowgraph& fg, const ConcreteInput& input) {
    Valuation val;
    for (const auto& s : fg.scalars()) {
        auto it = input.scalars.find(s);
        val.symbols[s] = it == input.scalars.end() ? 0 : it->second;
    }
    for (const auto& [a, _] : fg.arrays()) {
        auto it = input.arrays.find(a);
        val.arrays[a] = it == input.arrays.end() ? ArrayValue{} : it->second;
    }
    return val;
}

}  // namespace

std::map<NodeId, std::map<Path, Int>> iteration_counts(const Flowgraph& fg, const Path& visited) {
    std::map<NodeId, std::map<Path, Int>> out;
    if (visited.empty()) {
        return out;
    }
    const Path bb = backbone_of(visited);
    std::map<NodeId, std::size_t> first;
    std::map<NodeId, std::size_t> last;
    for (std::size_t i = 0; i < visited.size(); ++i) {
        first.try_emplace(visited[i], i);
        last[visited[i]] = i;
    }
    for (const auto& loop : loops_along(fg, bb)) {
        const std::size_t lo = first.at(loop.entry);
        const std::size_t hi = last.at(loop.entry);
        if (lo == hi) {
            continue;
        }
        const NodeId exit = induced_flowgraph(fg, loop).target();
        auto& counts = out[loop.entry];
        Path iteration{loop.entry};
        for (std::size_t i = lo + 1; i <= hi; ++i) {
            if (visited[i] == loop.entry) {
                iteration.push_back(exit);
                ++counts[backbone_of(iteration)];
                iteration = {loop.entry};
            } else {
                iteration.push_back(visited[i]);
            }
        }
    }
    return out;
}

Trace concrete_run(const Flowgraph& fg, const ConcreteInput& input, std::size_t step_bound) {
    Valuation val = initial_valuation(fg, input);
    Trace t;
    NodeId at = fg.start();
    t.visited.push_back(at);
    for (std::size_t step = 0; step < step_bound && at != fg.target(); ++step) {
        try {
            const Edge* taken = nullptr;
            for (auto i : fg.out_edges(at)) {
                const Edge& e = fg.edges()[i];
                bool enabled = true;
                if (const auto* a = std::get_if<Assume>(&e.instr)) {
                    auto v = eval_concrete(a->cond, val);
                    if (!v) {
                        t.stuck = true;
                        t.stuck_reason = "undefined arithmetic in assume on " + e.from + " -> " + e.to;
                        break;
                    }
                    enabled = *v;
                }
                if (enabled) {
                    if (taken != nullptr) {
                        throw std::logic_error("two enabled edges leave node " + at);
                    }
                    taken = &e;
                }
            }
            if (t.stuck || taken == nullptr) {
                break;
            }
            if (const auto* a = std::get_if<Assign>(&taken->instr)) {
                auto v = eval_concrete(a->rhs, val);
                if (!v) {
                    t.stuck = true;
                    t.stuck_reason = "undefined arithmetic in assignment on " + taken->from + " -> " + taken->to;
                    break;
                }
                val.symbols[a->var] = *v;
            }
            at = taken->to;
            t.visited.push_back(at);
        } catch (const ArithmeticOverflow& e) {
            t.stuck = true;
            t.stuck_reason = std::string(e.what()) + " at node " + at;
            break;
        }
    }
    t.reached_target = at == fg.target();
    for (const auto& s : fg.scalars()) {
        t.final_store[s] = val.symbols.at(s);
    }
    t.iteration_counts = iteration_counts(fg, t.visited);
    return t;
}

std::vector<ConcreteInput> bounded_reachability(const Flowgraph& fg, const InputDomain& domain,
                                                std::size_t step_bound, std::size_t cap) {
    // one "digit" per scalar and per array cell
    struct Slot {
        std::string name;
        std::vector<Int> index;  // empty for scalars
        Int lo;
        Int hi;
    };
    std::vector<Slot> slots;
    for (const auto& s : fg.scalars()) {
        auto it = domain.scalar_ranges.find(s);
        const auto [lo, hi] = it == domain.scalar_ranges.end() ? std::pair{domain.scalar_lo, domain.scalar_hi}
                                                               : it->second;
        slots.push_back({s, {}, lo, hi});
    }
    for (const auto& [a, dims] : fg.arrays()) {
        if (domain.index_hi < domain.index_lo) {
            break;
        }
        std::vector<Int> idx(dims, domain.index_lo);
        for (;;) {
            slots.push_back({a, idx, domain.value_lo, domain.value_hi});
            std::size_t d = 0;
            while (d < dims && idx[d] == domain.index_hi) {
                idx[d++] = domain.index_lo;
            }
            if (d == dims) {
                break;
            }
            ++idx[d];
        }
    }
    double total = 1;
    for (const auto& s : slots) {
        if (s.hi < s.lo) {
            return {};
        }
        total *= static_cast<double>(s.hi - s.lo + 1);
    }
    if (total > static_cast<double>(cap)) {
        throw CapExceeded("input domain has " + std::to_string(static_cast<long double>(total)) +
                          " points, more than the cap of " + std::to_string(cap));
    }
    std::vector<ConcreteInput> out;
    std::vector<Int> digit;
    for (const auto& s : slots) {
        digit.push_back(s.lo);
    }
    for (;;) {
        ConcreteInput in;
        for (const auto& [a, _] : fg.arrays()) {
            in.arrays[a].default_value = domain.array_default;
        }
        for (std::size_t i = 0; i < slots.size(); ++i) {
            if (slots[i].index.empty()) {
                in.scalars[slots[i].name] = digit[i];
            } else if (digit[i] != domain.array_default) {
                in.arrays[slots[i].name].cells[slots[i].index] = digit[i];
            }
        }
        if (concrete_run(fg, in, step_bound).reached_target) {
            out.push_back(std::move(in));
        }
        std::size_t i = 0;
        while (i < slots.size() && digit[i] == slots[i].hi) {
            digit[i] = slots[i].lo;
            ++i;
        }
        if (i == slots.size()) {
            break;
        }
        ++digit[i];
    }
    return out;
}

namespace {

Int parse_int_text(std::string_view s, int line) {
    Int v = 0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) {
        throw ParseError("expected an integer, found '" + std::string(s) + "'", line, 1);
    }
    return v;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

ConcreteInput parse_input(std::string_view text) {
    ConcreteInput in;
    std::istringstream is{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string_view l = raw;
        if (auto h = l.find('#'); h != std::string_view::npos) {
            l = l.substr(0, h);
        }
        l = trim(l);
        if (l.empty()) {
            continue;
        }
        if (auto d = l.find(" default "); d != std::string_view::npos) {
            const std::string name(trim(l.substr(0, d)));
            if (!is_valid_identifier(name)) {
                throw ParseError("invalid array name '" + name + "'", line, 1);
            }
            in.arrays[name].default_value = parse_int_text(trim(l.substr(d + 9)), line);
            continue;
        }
        const auto eq = l.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected `name = value` or `A default value`", line, 1);
        }
        std::string_view lhs = trim(l.substr(0, eq));
        const Int value = parse_int_text(trim(l.substr(eq + 1)), line);
        const auto br = lhs.find('[');
        const std::string name(trim(lhs.substr(0, br)));
        if (!is_valid_identifier(name)) {
            throw ParseError("invalid name '" + name + "'", line, 1);
        }
        if (br == std::string_view::npos) {
            in.scalars[name] = value;
            continue;
        }
        std::vector<Int> idx;
        std::string_view rest = lhs.substr(br);
        while (!rest.empty()) {
            if (rest.front() != '[') {
                throw ParseError("malformed subscript in '" + std::string(lhs) + "'", line, 1);
            }
            const auto close = rest.find(']');
            if (close == std::string_view::npos) {
                throw ParseError("missing ']' in '" + std::string(lhs) + "'", line, 1);
            }
            idx.push_back(parse_int_text(trim(rest.substr(1, close - 1)), line));
            rest = trim(rest.substr(close + 1));
        }
        in.arrays[name].cells[idx] = value;
    }
    return in;
}

std::string format_input(const ConcreteInput& input) {
    std::ostringstream os;
    for (const auto& [n, v] : input.scalars) {
        os << n << " = " << v << '\n';
    }
    for (const auto& [n, a] : input.arrays) {
        os << n << " default " << a.default_value << '\n';
        for (const auto& [idx, v] : a.cells) {
            os << n;
            for (Int i : idx) {
                os << '[' << i << ']';
            }
            os << " = " << v << '\n';
        }
    }
    return os.str();
}

}  // namespace apc
