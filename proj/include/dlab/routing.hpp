// routing.hpp: placement search, SWAP insertion and the |0>-aware SWAP peephole.

#pragma once

#include "dlab/circuit.hpp"

#include <optional>
#include <vector>

namespace dlab {

/// A circuit rewritten onto physical qubits.
///
/// Layout vectors have one entry per physical qubit: entry l is the physical
/// position of logical qubit l. Logical ids >= num_logical are idle
/// placeholders for physical qubits the original circuit does not use.
struct RoutedCircuit {
    Circuit circuit;
    int num_logical = 0;
    std::vector<int> initial_layout;
    std::vector<int> final_layout;
    int swap_count = 0;
    int cnot_count = 0;  // CNOT and CZ count 1, SWAP counts 3
};

struct RouteOptions {
    // Defer single-qubit gates until the qubit's next two-qubit gate, so
    // qubits that still hold |0> can be moved with cheaper SWAPs.
    bool defer_single_qubit = true;
    // Restrict the search to layouts that put the system qubit here.
    std::optional<int> system_at;
};

struct PlacementScore {
    int system_physical = -1;
    int cnot_count = 0;            // with 3-CNOT SWAPs
    int optimized_cnot_count = 0;  // after peephole_zero_swap
    std::vector<int> layout;       // logical -> physical
};

struct RouteSearch {
    RoutedCircuit best;
    // Best score for each physical position of the system qubit (or logical 0
    // for unlabelled circuits), in ascending physical order.
    std::vector<PlacementScore> per_system;
};

inline constexpr int kExhaustivePlacementLimit = 8;

// Two-qubit gates count one CNOT each; SWAP counts three.
int cnot_cost(const Circuit& c);

// Greedy shortest-path SWAP insertion from a fixed initial layout.
RoutedCircuit route_with_layout(const Circuit& c, const CouplingMap& map, std::span<const int> layout,
                                const RouteOptions& opts = {});

/// Exhaustive placement search (all injective layouts when the device has at
/// most kExhaustivePlacementLimit qubits, system position only otherwise).
/// Objective: CNOT count after the |0> peephole, then raw CNOT count, then
/// the lexicographically smallest layout.
RouteSearch route_search(const Circuit& c, const CouplingMap& map, const RouteOptions& opts = {});
RoutedCircuit route(const Circuit& c, const CouplingMap& map, const RouteOptions& opts = {});

// Replaces every SWAP with a provably-|0> operand by two CNOTs. known_zero
// holds one flag per physical qubit at circuit start (empty = all |0>).
RoutedCircuit peephole_zero_swap(const RoutedCircuit& rc, std::vector<bool> known_zero = {});

// Every two-qubit gate lies on a coupling-map edge.
bool conforms(const Circuit& c, const CouplingMap& map);

// Maps logical register index to physical register index under a layout.
std::size_t permute_index(std::size_t logical_index, std::span<const int> layout, int num_qubits);

// max |U_routed P_init - P_final U_original| over all entries.
double routing_unitary_deviation(const Circuit& original, const RoutedCircuit& rc);
// max |psi_routed - P_final psi_original| for the all-|0> input.
double routing_state_deviation(const Circuit& original, const RoutedCircuit& rc);

}  // namespace dlab
