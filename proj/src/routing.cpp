#include "dlab/routing.hpp"

#include "dlab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

namespace dlab {

namespace {

// Forward |0> dataflow. A flag is set only while the qubit provably factors
// out as |0>.
struct ZeroTracker {
    std::vector<bool> zero;

    void apply(const Gate& g) {
        const auto a = static_cast<std::size_t>(g.qubits[0]);
        const auto b = static_cast<std::size_t>(g.qubits[1]);
        switch (g.kind) {
            case GateKind::X:
            case GateKind::H: zero[a] = false; break;
            case GateKind::Ry:
                if (std::sin(g.angle / 2.0) != 0.0) zero[a] = false;
                break;
            case GateKind::CNOT:
                if (!zero[a]) zero[b] = false;
                break;
            case GateKind::CZ: break;  // identity whenever either operand is |0>
            case GateKind::SWAP: {
                const bool t = zero[a];
                zero[a] = zero[b];
                zero[b] = t;
                break;
            }
        }
    }
};

int swap_cost(bool a_zero, bool b_zero) { return a_zero || b_zero ? 2 : 3; }

std::vector<int> full_layout(std::span<const int> layout, int num_physical) {
    std::vector<int> full(layout.begin(), layout.end());
    std::vector<bool> used(static_cast<std::size_t>(num_physical), false);
    for (int p : full) {
        if (p < 0 || p >= num_physical || used[static_cast<std::size_t>(p)])
            throw CircuitError("layout must be an injective map into the device");
        used[static_cast<std::size_t>(p)] = true;
    }
    for (int p = 0; p < num_physical; ++p)
        if (!used[static_cast<std::size_t>(p)]) full.push_back(p);
    return full;
}

class Router {
public:
    Router(const Circuit& c, const CouplingMap& map, std::span<const int> layout, const RouteOptions& opts)
        : c_(c), map_(map), opts_(opts), num_physical_(map.num_physical()) {
        pos_ = full_layout(layout, num_physical_);
        inv_.assign(pos_.size(), -1);
        for (std::size_t l = 0; l < pos_.size(); ++l) inv_[static_cast<std::size_t>(pos_[l])] = static_cast<int>(l);
        logical_zero_.zero.assign(pos_.size(), true);
        pending_.assign(pos_.size(), {});
        out_ = Circuit(num_physical_);
    }

    RoutedCircuit run() {
        const std::vector<int> initial = pos_;
        const auto& gates = c_.gates();
        for (std::size_t i = 0; i < gates.size(); ++i) {
            const Gate& g = gates[i];
            if (g.arity() == 1) {
                if (opts_.defer_single_qubit) pending_[static_cast<std::size_t>(g.qubits[0])].push_back(g);
                else emit_logical(g);
                continue;
            }
            const int a = g.qubits[0];
            const int b = g.qubits[1];
            if (!map_.adjacent(at(a), at(b))) bring_together(a, b, i + 1);
            flush(a);
            flush(b);
            emit_logical(g);
        }
        for (std::size_t l = 0; l < pending_.size(); ++l) flush(static_cast<int>(l));

        RoutedCircuit rc{Circuit(num_physical_, physical_roles()), c_.num_qubits(), initial, pos_, swaps_, 0};
        for (const Gate& g : out_.gates()) rc.circuit.add(g);
        rc.cnot_count = cnot_cost(rc.circuit);
        return rc;
    }

private:
    int at(int logical) const { return pos_[static_cast<std::size_t>(logical)]; }

    void emit_logical(const Gate& g) {
        Gate p = g;
        for (int k = 0; k < g.arity(); ++k) p.qubits[static_cast<std::size_t>(k)] = at(g.qubits[static_cast<std::size_t>(k)]);
        out_.add(p);
        logical_zero_.apply(g);
    }

    void flush(int logical) {
        auto& q = pending_[static_cast<std::size_t>(logical)];
        for (const Gate& g : q) emit_logical(g);
        q.clear();
    }

    void swap_physical(int u, int v) {
        const int lu = inv_[static_cast<std::size_t>(u)];
        const int lv = inv_[static_cast<std::size_t>(v)];
        out_.add(Gate::swap(u, v));
        ++swaps_;
        std::swap(inv_[static_cast<std::size_t>(u)], inv_[static_cast<std::size_t>(v)]);
        pos_[static_cast<std::size_t>(lu)] = v;
        pos_[static_cast<std::size_t>(lv)] = u;
    }

    // (SWAP cost of walking the path's first qubit next to its last, summed
    // distance of every later two-qubit gate afterwards)
    std::pair<int, int> evaluate(const std::vector<int>& path, std::size_t next_gate) const {
        std::vector<int> pos = pos_;
        std::vector<int> inv = inv_;
        int cost = 0;
        for (std::size_t s = 0; s + 2 < path.size(); ++s) {
            const int u = path[s];
            const int v = path[s + 1];
            const int lu = inv[static_cast<std::size_t>(u)];
            const int lv = inv[static_cast<std::size_t>(v)];
            cost += swap_cost(logical_zero_.zero[static_cast<std::size_t>(lu)],
                              logical_zero_.zero[static_cast<std::size_t>(lv)]);
            std::swap(inv[static_cast<std::size_t>(u)], inv[static_cast<std::size_t>(v)]);
            pos[static_cast<std::size_t>(lu)] = v;
            pos[static_cast<std::size_t>(lv)] = u;
        }
        int lookahead = 0;
        const auto& gates = c_.gates();
        for (std::size_t j = next_gate; j < gates.size(); ++j)
            if (gates[j].arity() == 2)
                lookahead += map_.distance(pos[static_cast<std::size_t>(gates[j].qubits[0])],
                                           pos[static_cast<std::size_t>(gates[j].qubits[1])]);
        return {cost, lookahead};
    }

    void bring_together(int a, int b, std::size_t next_gate) {
        const std::vector<int> move_a = map_.shortest_path(at(a), at(b));
        const std::vector<int> move_b = map_.shortest_path(at(b), at(a));
        // ties keep the first operand in place
        const std::vector<int>& path = evaluate(move_a, next_gate) < evaluate(move_b, next_gate) ? move_a : move_b;
        for (std::size_t s = 0; s + 2 < path.size(); ++s) swap_physical(path[s], path[s + 1]);
    }

    std::vector<QubitRole> physical_roles() const {
        if (c_.roles().empty()) return {};
        std::vector<QubitRole> roles(static_cast<std::size_t>(num_physical_));
        for (int l = 0; l < c_.num_qubits(); ++l) roles[static_cast<std::size_t>(at(l))] = c_.roles()[static_cast<std::size_t>(l)];
        return roles;
    }

    const Circuit& c_;
    const CouplingMap& map_;
    RouteOptions opts_;
    int num_physical_;
    std::vector<int> pos_;
    std::vector<int> inv_;
    ZeroTracker logical_zero_;
    std::vector<std::vector<Gate>> pending_;
    Circuit out_{1};
    int swaps_ = 0;
};

using Objective = std::tuple<int, int, std::vector<int>>;

}  // namespace

int cnot_cost(const Circuit& c) {
    int n = 0;
    for (const Gate& g : c.gates()) {
        if (g.kind == GateKind::SWAP) n += 3;
        else if (g.arity() == 2) n += 1;
    }
    return n;
}

RoutedCircuit route_with_layout(const Circuit& c, const CouplingMap& map, std::span<const int> layout,
                                const RouteOptions& opts) {
    if (c.num_qubits() > map.num_physical()) throw CircuitError("circuit has more qubits than the device");
    if (static_cast<int>(layout.size()) != c.num_qubits()) throw CircuitError("layout needs one entry per logical qubit");
    return Router(c, map, layout, opts).run();
}

RouteSearch route_search(const Circuit& c, const CouplingMap& map, const RouteOptions& opts) {
    const int logical = c.num_qubits();
    const int physical = map.num_physical();
    if (logical > physical) throw CircuitError("circuit has more qubits than the device");
    const int system = c.roles().empty() ? 0 : c.system_qubit();

    std::optional<Objective> best_key;
    std::optional<RoutedCircuit> best;
    std::vector<std::optional<PlacementScore>> per(static_cast<std::size_t>(physical));

    auto consider = [&](const std::vector<int>& layout) {
        RoutedCircuit rc = route_with_layout(c, map, layout, opts);
        const int optimized = peephole_zero_swap(rc).cnot_count;
        Objective key{optimized, rc.cnot_count, layout};
        auto& slot = per[static_cast<std::size_t>(layout[static_cast<std::size_t>(system)])];
        if (!slot || std::tie(optimized, rc.cnot_count) < std::tie(slot->optimized_cnot_count, slot->cnot_count))
            slot = PlacementScore{layout[static_cast<std::size_t>(system)], rc.cnot_count, optimized, layout};
        if (!best_key || key < *best_key) {
            best_key = std::move(key);
            best = std::move(rc);
        }
    };

    if (physical <= kExhaustivePlacementLimit) {
        std::vector<int> layout(static_cast<std::size_t>(logical), -1);
        std::vector<bool> used(static_cast<std::size_t>(physical), false);
        auto recurse = [&](auto&& self, int l) -> void {
            if (l == logical) {
                consider(layout);
                return;
            }
            for (int p = 0; p < physical; ++p) {
                if (used[static_cast<std::size_t>(p)]) continue;
                if (l == system && opts.system_at && *opts.system_at != p) continue;
                used[static_cast<std::size_t>(p)] = true;
                layout[static_cast<std::size_t>(l)] = p;
                self(self, l + 1);
                used[static_cast<std::size_t>(p)] = false;
            }
        };
        recurse(recurse, 0);
    } else {
        for (int s = 0; s < physical; ++s) {
            if (opts.system_at && *opts.system_at != s) continue;
            std::vector<int> order(static_cast<std::size_t>(physical));
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](int x, int y) { return map.distance(s, x) < map.distance(s, y); });
            std::vector<int> layout(static_cast<std::size_t>(logical));
            layout[static_cast<std::size_t>(system)] = s;
            std::size_t next = 1;  // order[0] == s
            for (int l = 0; l < logical; ++l)
                if (l != system) layout[static_cast<std::size_t>(l)] = order[next++];
            consider(layout);
        }
    }
    if (!best_key) throw CircuitError("no admissible placement");

    RouteSearch out{std::move(*best), {}};
    for (auto& s : per)
        if (s) out.per_system.push_back(std::move(*s));
    return out;
}

RoutedCircuit route(const Circuit& c, const CouplingMap& map, const RouteOptions& opts) {
    return route_search(c, map, opts).best;
}

RoutedCircuit peephole_zero_swap(const RoutedCircuit& rc, std::vector<bool> known_zero) {
    const int n = rc.circuit.num_qubits();
    if (known_zero.empty()) known_zero.assign(static_cast<std::size_t>(n), true);
    if (static_cast<int>(known_zero.size()) != n) throw CircuitError("known_zero needs one flag per physical qubit");
    ZeroTracker tracker{std::move(known_zero)};

    RoutedCircuit out = rc;
    out.circuit = Circuit(n, rc.circuit.roles());
    out.swap_count = 0;
    for (const Gate& g : rc.circuit.gates()) {
        if (g.kind == GateKind::SWAP) {
            const int a = g.qubits[0];
            const int b = g.qubits[1];
            const bool za = tracker.zero[static_cast<std::size_t>(a)];
            const bool zb = tracker.zero[static_cast<std::size_t>(b)];
            if (za || zb) {
                // with b = |0>: CNOT(a->b) copies, CNOT(b->a) clears a
                const int zero_q = zb ? b : a;
                const int other = zb ? a : b;
                out.circuit.add(Gate::cnot(other, zero_q));
                out.circuit.add(Gate::cnot(zero_q, other));
                tracker.apply(g);
                continue;
            }
            ++out.swap_count;
        }
        out.circuit.add(g);
        tracker.apply(g);
    }
    out.cnot_count = cnot_cost(out.circuit);
    return out;
}

bool conforms(const Circuit& c, const CouplingMap& map) {
    if (c.num_qubits() > map.num_physical()) return false;
    return std::all_of(c.gates().begin(), c.gates().end(), [&](const Gate& g) {
        return g.arity() == 1 || map.adjacent(g.qubits[0], g.qubits[1]);
    });
}

std::size_t permute_index(std::size_t logical_index, std::span<const int> layout, int num_qubits) {
    std::size_t out = 0;
    for (int l = 0; l < num_qubits; ++l)
        if ((logical_index >> bit_of(l, num_qubits)) & 1U)
            out |= std::size_t{1} << bit_of(layout[static_cast<std::size_t>(l)], num_qubits);
    return out;
}

namespace {

Circuit padded(const Circuit& original, int num_qubits) {
    Circuit c(num_qubits);
    for (const Gate& g : original.gates()) c.add(g);
    return c;
}

}  // namespace

double routing_unitary_deviation(const Circuit& original, const RoutedCircuit& rc) {
    const int n = rc.circuit.num_qubits();
    const Mat u_orig = unitary_of(padded(original, n));
    const Mat u_routed = unitary_of(rc.circuit);
    const Eigen::Index d = u_orig.rows();
    double worst = 0.0;
    for (Eigen::Index col = 0; col < d; ++col) {
        const auto in_phys = static_cast<Eigen::Index>(permute_index(static_cast<std::size_t>(col), rc.initial_layout, n));
        for (Eigen::Index row = 0; row < d; ++row) {
            const auto out_phys =
                static_cast<Eigen::Index>(permute_index(static_cast<std::size_t>(row), rc.final_layout, n));
            worst = std::max(worst, std::abs(u_routed(out_phys, in_phys) - u_orig(row, col)));
        }
    }
    return worst;
}

double routing_state_deviation(const Circuit& original, const RoutedCircuit& rc) {
    const int n = rc.circuit.num_qubits();
    const PureState psi = run_statevector(padded(original, n));
    const PureState routed = run_statevector(rc.circuit);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < psi.dim(); ++i) {
        const auto j = static_cast<Eigen::Index>(permute_index(static_cast<std::size_t>(i), rc.final_layout, n));
        worst = std::max(worst, std::abs(routed[j] - psi[i]));
    }
    return worst;
}

}  // namespace dlab
