// circuit.hpp: gate-level IR, coupling maps and the collision-model circuit builders.

#pragma once

#include "dlab/qstate.hpp"
#include "dlab/scm_model.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dlab {

class CircuitError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class GateKind { X, H, Ry, CNOT, CZ, SWAP };

std::string_view to_string(GateKind kind);
int arity(GateKind kind);

/// One gate. For CNOT, qubits[0] is the control.
struct Gate {
    GateKind kind = GateKind::X;
    std::array<int, 2> qubits{-1, -1};
    double angle = 0.0;  // Ry only

    int arity() const { return dlab::arity(kind); }
    std::span<const int> operands() const { return {qubits.data(), static_cast<std::size_t>(arity())}; }
    bool operator==(const Gate&) const = default;

    static Gate x(int q) { return {GateKind::X, {q, -1}, 0.0}; }
    static Gate h(int q) { return {GateKind::H, {q, -1}, 0.0}; }
    static Gate ry(int q, double angle) { return {GateKind::Ry, {q, -1}, angle}; }
    static Gate cnot(int control, int target) { return {GateKind::CNOT, {control, target}, 0.0}; }
    static Gate cz(int a, int b) { return {GateKind::CZ, {a, b}, 0.0}; }
    static Gate swap(int a, int b) { return {GateKind::SWAP, {a, b}, 0.0}; }
};

// Unitary of a gate on its own operands (first operand most significant).
Mat gate_matrix(const Gate& g);

struct QubitRole {
    enum class Kind { System, Ancilla, Emitter, Pair, Unused };
    Kind kind = Kind::Unused;
    int index = -1;  // pair number for Ancilla/Emitter/Pair
    bool operator==(const QubitRole&) const = default;
};

std::string to_string(const QubitRole& role);

class Circuit {
public:
    explicit Circuit(int num_qubits, std::vector<QubitRole> roles = {});

    // Throws CircuitError on out-of-range or repeated operands.
    void add(const Gate& g);

    int num_qubits() const noexcept { return num_qubits_; }
    const std::vector<Gate>& gates() const noexcept { return gates_; }
    // Empty for unlabelled scratch circuits, otherwise one role per qubit with
    // exactly one System.
    const std::vector<QubitRole>& roles() const noexcept { return roles_; }
    int system_qubit() const;

    bool operator==(const Circuit&) const = default;

private:
    int num_qubits_;
    std::vector<Gate> gates_;
    std::vector<QubitRole> roles_;
};

// Line format: "KIND q0 [q1] [angle]" with a leading "# qubits N" header and
// optional "# role q NAME" lines. Angles use round-trip precision.
std::string to_text(const Circuit& c);
Circuit circuit_from_text(std::string_view text);

/// Undirected hardware connectivity graph.
class CouplingMap {
public:
    // Throws CircuitError on self-loops, out-of-range endpoints or a
    // disconnected graph.
    CouplingMap(int num_physical, std::vector<std::pair<int, int>> edges);

    // "N" on the first line, then one "u v" edge per line; '#' starts a comment.
    static CouplingMap from_text(std::string_view text);
    static CouplingMap load(const std::string& path);
    // Known names: "casablanca" (7-qubit H-shaped Falcon layout), "line<N>".
    static CouplingMap builtin(std::string_view name);

    int num_physical() const noexcept { return num_physical_; }
    const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }
    bool adjacent(int a, int b) const;
    int distance(int a, int b) const;
    // Shortest path a -> b inclusive; ties resolved toward lower-numbered nodes.
    std::vector<int> shortest_path(int a, int b) const;
    int degree(int q) const;

private:
    int num_physical_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> neighbors_;
    std::vector<std::vector<int>> dist_;
};

// Pair preparation Ry(2 alpha) -> CNOT(E, A) -> X(E) for every pair, then
// H on the system and CZ(system, A_i). Requires a Full, non-entangling model.
Circuit build_full_circuit(double t, const ScmParams& p);
// Ry(2 alpha) on every condensed pair qubit, H on the system, CZ(system, C_i).
Circuit build_condensed_circuit(double t, const ScmParams& p);
Circuit build_circuit(double t, const ScmParams& p);

inline constexpr int kUnitaryQubitLimit = 10;
Mat unitary_of(const Circuit& c);

}  // namespace dlab
