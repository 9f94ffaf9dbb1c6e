#include "dlab/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>

namespace dlab {

namespace {

std::vector<std::string> split_words(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

int parse_int(const std::string& s, int line_no) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw CircuitError("line " + std::to_string(line_no) + ": expected an integer, got '" + s + "'");
    return v;
}

double parse_double(const std::string& s, int line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw CircuitError("line " + std::to_string(line_no) + ": expected a number, got '" + s + "'");
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

QubitRole role_from_string(const std::string& s, int line_no) {
    if (s == "system") return {QubitRole::Kind::System, -1};
    if (s == "unused") return {QubitRole::Kind::Unused, -1};
    const auto colon = s.find(':');
    if (colon != std::string::npos) {
        const std::string head = s.substr(0, colon);
        const int idx = parse_int(s.substr(colon + 1), line_no);
        if (head == "ancilla") return {QubitRole::Kind::Ancilla, idx};
        if (head == "emitter") return {QubitRole::Kind::Emitter, idx};
        if (head == "pair") return {QubitRole::Kind::Pair, idx};
    }
    throw CircuitError("line " + std::to_string(line_no) + ": unknown role '" + s + "'");
}

void require_non_entangling(const ScmParams& p, Scenario expected) {
    p.validate();
    if (p.scenario != expected) throw CircuitError("builder called with the wrong scenario");
    if (!p.non_entangling())
        throw CircuitError("only non-entangling collisions (theta = pi) have a two-qubit-gate circuit");
}

}  // namespace

std::string_view to_string(GateKind kind) {
    switch (kind) {
        case GateKind::X: return "X";
        case GateKind::H: return "H";
        case GateKind::Ry: return "RY";
        case GateKind::CNOT: return "CNOT";
        case GateKind::CZ: return "CZ";
        case GateKind::SWAP: return "SWAP";
    }
    return "?";
}

int arity(GateKind kind) {
    switch (kind) {
        case GateKind::X:
        case GateKind::H:
        case GateKind::Ry: return 1;
        default: return 2;
    }
}

Mat gate_matrix(const Gate& g) {
    Mat m;
    switch (g.kind) {
        case GateKind::X: return gates::pauli_x();
        case GateKind::H: return gates::hadamard();
        case GateKind::Ry: return gates::ry(g.angle);
        case GateKind::CNOT:
            m = Mat::Zero(4, 4);
            m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
            return m;
        case GateKind::CZ:
            m = Mat::Identity(4, 4);
            m(3, 3) = -1.0;
            return m;
        case GateKind::SWAP:
            m = Mat::Zero(4, 4);
            m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
            return m;
    }
    throw CircuitError("unknown gate kind");
}

std::string to_string(const QubitRole& role) {
    switch (role.kind) {
        case QubitRole::Kind::System: return "system";
        case QubitRole::Kind::Ancilla: return "ancilla:" + std::to_string(role.index);
        case QubitRole::Kind::Emitter: return "emitter:" + std::to_string(role.index);
        case QubitRole::Kind::Pair: return "pair:" + std::to_string(role.index);
        case QubitRole::Kind::Unused: return "unused";
    }
    return "?";
}

// ------------------------------------------------------------------ Circuit

Circuit::Circuit(int num_qubits, std::vector<QubitRole> roles) : num_qubits_(num_qubits), roles_(std::move(roles)) {
    if (num_qubits < 1) throw CircuitError("circuit needs at least one qubit");
    if (!roles_.empty()) {
        if (static_cast<int>(roles_.size()) != num_qubits) throw CircuitError("one role per qubit is required");
        const auto systems = std::count_if(roles_.begin(), roles_.end(),
                                           [](const QubitRole& r) { return r.kind == QubitRole::Kind::System; });
        if (systems != 1) throw CircuitError("a labelled circuit needs exactly one system qubit");
    }
}

void Circuit::add(const Gate& g) {
    const auto ops = g.operands();
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (ops[i] < 0 || ops[i] >= num_qubits_)
            throw CircuitError("gate operand " + std::to_string(ops[i]) + " out of range");
        if (i > 0 && ops[i] == ops[0]) throw CircuitError("two-qubit gate operands must differ");
    }
    gates_.push_back(g);
}

int Circuit::system_qubit() const {
    for (std::size_t q = 0; q < roles_.size(); ++q)
        if (roles_[q].kind == QubitRole::Kind::System) return static_cast<int>(q);
    throw CircuitError("circuit has no system label");
}

std::string to_text(const Circuit& c) {
    std::string out = "# qubits " + std::to_string(c.num_qubits()) + "\n";
    for (std::size_t q = 0; q < c.roles().size(); ++q)
        out += "# role " + std::to_string(q) + " " + to_string(c.roles()[q]) + "\n";
    for (const Gate& g : c.gates()) {
        out += to_string(g.kind);
        for (int q : g.operands()) out += " " + std::to_string(q);
        if (g.kind == GateKind::Ry) out += " " + format_double(g.angle);
        out += "\n";
    }
    return out;
}

Circuit circuit_from_text(std::string_view text) {
    int num_qubits = -1;
    std::vector<QubitRole> roles;
    std::vector<Gate> gates;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto w = split_words(line);
        if (w.empty()) continue;
        if (w[0] == "#") {
            if (w.size() == 3 && w[1] == "qubits") {
                num_qubits = parse_int(w[2], line_no);
                roles.clear();
            } else if (w.size() == 4 && w[1] == "role") {
                const int q = parse_int(w[2], line_no);
                if (num_qubits < 0 || q < 0 || q >= num_qubits)
                    throw CircuitError("line " + std::to_string(line_no) + ": role for unknown qubit");
                roles.resize(static_cast<std::size_t>(num_qubits));
                roles[static_cast<std::size_t>(q)] = role_from_string(w[3], line_no);
            }
            continue;
        }
        if (w[0].front() == '#') continue;
        Gate g;
        const std::string& k = w[0];
        if (k == "X") g.kind = GateKind::X;
        else if (k == "H") g.kind = GateKind::H;
        else if (k == "RY") g.kind = GateKind::Ry;
        else if (k == "CNOT") g.kind = GateKind::CNOT;
        else if (k == "CZ") g.kind = GateKind::CZ;
        else if (k == "SWAP") g.kind = GateKind::SWAP;
        else throw CircuitError("line " + std::to_string(line_no) + ": unknown gate '" + k + "'");
        const std::size_t want = static_cast<std::size_t>(g.arity()) + (g.kind == GateKind::Ry ? 1 : 0) + 1;
        if (w.size() != want) throw CircuitError("line " + std::to_string(line_no) + ": wrong number of fields");
        for (int i = 0; i < g.arity(); ++i)
            g.qubits[static_cast<std::size_t>(i)] = parse_int(w[static_cast<std::size_t>(i) + 1], line_no);
        if (g.kind == GateKind::Ry) g.angle = parse_double(w.back(), line_no);
        gates.push_back(g);
    }
    if (num_qubits < 0) {
        num_qubits = 1;
        for (const Gate& g : gates)
            for (int q : g.operands()) num_qubits = std::max(num_qubits, q + 1);
    }
    Circuit c(num_qubits, std::move(roles));
    for (const Gate& g : gates) c.add(g);
    return c;
}

// -------------------------------------------------------------- CouplingMap

CouplingMap::CouplingMap(int num_physical, std::vector<std::pair<int, int>> edges) : num_physical_(num_physical) {
    if (num_physical < 1) throw CircuitError("coupling map needs at least one node");
    for (auto& [u, v] : edges) {
        if (u == v) throw CircuitError("coupling map contains a self-loop on " + std::to_string(u));
        if (u < 0 || v < 0 || u >= num_physical || v >= num_physical)
            throw CircuitError("coupling map edge endpoint out of range");
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    neighbors_.assign(static_cast<std::size_t>(num_physical), {});
    for (const auto& [u, v] : edges_) {
        neighbors_[static_cast<std::size_t>(u)].push_back(v);
        neighbors_[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());

    dist_.assign(static_cast<std::size_t>(num_physical), std::vector<int>(static_cast<std::size_t>(num_physical), -1));
    for (int s = 0; s < num_physical; ++s) {
        auto& d = dist_[static_cast<std::size_t>(s)];
        std::queue<int> q;
        d[static_cast<std::size_t>(s)] = 0;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int v : neighbors_[static_cast<std::size_t>(u)])
                if (d[static_cast<std::size_t>(v)] < 0) {
                    d[static_cast<std::size_t>(v)] = d[static_cast<std::size_t>(u)] + 1;
                    q.push(v);
                }
        }
        if (std::find(d.begin(), d.end(), -1) != d.end()) throw CircuitError("coupling map is not connected");
    }
}

CouplingMap CouplingMap::from_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    int nodes = -1;
    std::vector<std::pair<int, int>> edges;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto w = split_words(line);
        if (w.empty()) continue;
        if (nodes < 0) {
            if (w.size() != 1) throw CircuitError("line " + std::to_string(line_no) + ": expected the node count");
            nodes = parse_int(w[0], line_no);
            continue;
        }
        if (w.size() != 2) throw CircuitError("line " + std::to_string(line_no) + ": expected 'u v'");
        edges.emplace_back(parse_int(w[0], line_no), parse_int(w[1], line_no));
    }
    if (nodes < 0) throw CircuitError("coupling map file is empty");
    return CouplingMap(nodes, std::move(edges));
}

CouplingMap CouplingMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CircuitError("cannot open coupling map file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

CouplingMap CouplingMap::builtin(std::string_view name) {
    if (name == "casablanca") return CouplingMap(7, {{0, 1}, {1, 2}, {1, 3}, {3, 5}, {4, 5}, {5, 6}});
    if (name.starts_with("line")) {
        int n = 0;
        const auto tail = name.substr(4);
        const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), n);
        if (ec == std::errc() && ptr == tail.data() + tail.size() && n >= 1) {
            std::vector<std::pair<int, int>> e;
            for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
            return CouplingMap(n, std::move(e));
        }
    }
    throw CircuitError("unknown built-in coupling map '" + std::string(name) + "'");
}

bool CouplingMap::adjacent(int a, int b) const { return distance(a, b) == 1; }

int CouplingMap::distance(int a, int b) const {
    if (a < 0 || b < 0 || a >= num_physical_ || b >= num_physical_) throw CircuitError("physical qubit out of range");
    return dist_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

std::vector<int> CouplingMap::shortest_path(int a, int b) const {
    std::vector<int> path{a};
    int cur = a;
    while (cur != b) {
        const int d = distance(cur, b);
        for (int v : neighbors_[static_cast<std::size_t>(cur)])
            if (distance(v, b) == d - 1) {
                cur = v;
                break;
            }
        path.push_back(cur);
    }
    return path;
}

int CouplingMap::degree(int q) const { return static_cast<int>(neighbors_.at(static_cast<std::size_t>(q)).size()); }

// ----------------------------------------------------------------- builders

Circuit build_full_circuit(double t, const ScmParams& p) {
    require_non_entangling(p, Scenario::Full);
    std::vector<QubitRole> roles(static_cast<std::size_t>(layout::num_qubits(p)));
    roles[layout::kSystem] = {QubitRole::Kind::System, -1};
    for (int i = 0; i < p.n; ++i) {
        roles[static_cast<std::size_t>(layout::emitter(i))] = {QubitRole::Kind::Emitter, i};
        roles[static_cast<std::size_t>(layout::ancilla(i))] = {QubitRole::Kind::Ancilla, i};
    }
    Circuit c(layout::num_qubits(p), std::move(roles));
    const double alpha = prep_angle(t, p);
    for (int i = 0; i < p.n; ++i) {
        c.add(Gate::ry(layout::emitter(i), 2.0 * alpha));
        c.add(Gate::cnot(layout::emitter(i), layout::ancilla(i)));
        c.add(Gate::x(layout::emitter(i)));
    }
    c.add(Gate::h(layout::kSystem));
    for (int i = 0; i < p.n; ++i) c.add(Gate::cz(layout::kSystem, layout::ancilla(i)));
    return c;
}

Circuit build_condensed_circuit(double t, const ScmParams& p) {
    require_non_entangling(p, Scenario::Condensed);
    std::vector<QubitRole> roles(static_cast<std::size_t>(layout::num_qubits(p)));
    roles[layout::kSystem] = {QubitRole::Kind::System, -1};
    for (int i = 0; i < p.n; ++i) roles[static_cast<std::size_t>(layout::condensed(i))] = {QubitRole::Kind::Pair, i};
    Circuit c(layout::num_qubits(p), std::move(roles));
    const double alpha = prep_angle(t, p);
    for (int i = 0; i < p.n; ++i) c.add(Gate::ry(layout::condensed(i), 2.0 * alpha));
    c.add(Gate::h(layout::kSystem));
    for (int i = 0; i < p.n; ++i) c.add(Gate::cz(layout::kSystem, layout::condensed(i)));
    return c;
}

Circuit build_circuit(double t, const ScmParams& p) {
    return p.scenario == Scenario::Full ? build_full_circuit(t, p) : build_condensed_circuit(t, p);
}

Mat unitary_of(const Circuit& c) {
    if (c.num_qubits() > kUnitaryQubitLimit)
        throw CircuitError("unitary_of is limited to " + std::to_string(kUnitaryQubitLimit) + " qubits");
    Mat u = gates::identity(c.num_qubits());
    for (const Gate& g : c.gates()) apply_left(u, gate_matrix(g), g.operands(), c.num_qubits());
    return u;
}

}  // namespace dlab
