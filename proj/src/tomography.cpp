#include "dlab/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace dlab {

namespace {

constexpr double kProbFloor = 1e-12;
constexpr double kRatioCap = 1e12;
constexpr int kMaxStepHalvings = 40;

std::size_t index_from_bits(const std::string& bits, int num_qubits) {
    if (static_cast<int>(bits.size()) != num_qubits) throw TomographyError("outcome '" + bits + "' has the wrong length");
    std::size_t idx = 0;
    for (int q = 0; q < num_qubits; ++q) {
        const char ch = bits[static_cast<std::size_t>(q)];
        if (ch != '0' && ch != '1') throw TomographyError("outcome '" + bits + "' is not a bitstring");
        if (ch == '1') idx |= std::size_t{1} << bit_of(q, num_qubits);
    }
    return idx;
}

bool is_pauli(const MeasSetting& s) {
    return std::all_of(s.begin(), s.end(), [](const Basis& b) { return b.kind != Basis::Kind::Angles; });
}

// m -> u m u^dagger on qubit q.
void conjugate_qubit(Mat& m, const Mat& u, int q, int n) {
    apply_left(m, u, std::span<const int>(&q, 1), n);
    const auto stride = Eigen::Index{1} << bit_of(q, n);
    const cplx a = std::conj(u(0, 0)), b = std::conj(u(0, 1)), c = std::conj(u(1, 0)), d = std::conj(u(1, 1));
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
        if (i & stride) continue;
        const Vec x = m.col(i);
        m.col(i) = a * x + b * m.col(i | stride);
        m.col(i | stride) = c * x + d * m.col(i | stride);
    }
}

// Settings sharing a prefix of bases share the rotations of that prefix, so
// the likelihood walk visits a trie of bases instead of every setting.
struct Trie {
    struct Node {
        Basis basis;
        Mat rot;
        Mat rot_adj;
        std::vector<int> children;
        int leaf = -1;
    };
    std::vector<Node> nodes;
    int num_qubits = 0;

    Trie(std::span<const SettingFrequencies> data, int n) : nodes(1), num_qubits(n) {
        for (std::size_t k = 0; k < data.size(); ++k) {
            int at = 0;
            for (const Basis& b : data[k].setting) {
                int next = -1;
                for (int c : nodes[static_cast<std::size_t>(at)].children)
                    if (nodes[static_cast<std::size_t>(c)].basis == b) next = c;
                if (next < 0) {
                    Node node{b, {}, {}, {}, -1};
                    if (b.kind != Basis::Kind::Z) {
                        node.rot = b.rotation();
                        node.rot_adj = node.rot.adjoint();
                    }
                    nodes.push_back(std::move(node));
                    next = static_cast<int>(nodes.size()) - 1;
                    nodes[static_cast<std::size_t>(at)].children.push_back(next);
                }
                at = next;
            }
            if (nodes[static_cast<std::size_t>(at)].leaf >= 0) throw TomographyError("duplicate measurement setting");
            nodes[static_cast<std::size_t>(at)].leaf = static_cast<int>(k);
        }
    }
};

struct Evaluation {
    double log_likelihood = 0.0;
    Mat r;
};

double leaf_weight(double f, double p, double& log_likelihood) {
    if (f <= 0.0) return 0.0;
    log_likelihood += f * std::log(std::max(p, kProbFloor));
    return p < kProbFloor ? kRatioCap * f : std::min(f / p, kRatioCap);
}

// Children of `node` are leaves measured on the last qubit. Only the diagonal
// of the rotated state is needed and each leaf's weight operator is diagonal,
// so both directions reduce to 2x2 blocks.
void visit_last(const Trie& trie, const Trie::Node& node, const Mat& m, std::span<const SettingFrequencies> data,
                double& log_likelihood, Mat& acc) {
    const Eigen::Index d = m.rows();
    const auto stride = Eigen::Index{1} << bit_of(trie.num_qubits - 1, trie.num_qubits);
    for (int c : node.children) {
        const Trie::Node& leaf = trie.nodes[static_cast<std::size_t>(c)];
        const SettingFrequencies& s = data[static_cast<std::size_t>(leaf.leaf)];
        const auto f = [&](Eigen::Index b) { return s.weight * s.probabilities[static_cast<std::size_t>(b)]; };
        if (leaf.rot.size() == 0) {
            for (Eigen::Index b = 0; b < d; ++b)
                acc(b, b) += leaf_weight(f(b), std::max(m(b, b).real(), 0.0), log_likelihood);
            continue;
        }
        const cplx u00 = leaf.rot(0, 0), u01 = leaf.rot(0, 1), u10 = leaf.rot(1, 0), u11 = leaf.rot(1, 1);
        for (Eigen::Index i = 0; i < d; ++i) {
            if (i & stride) continue;
            const Eigen::Index j = i | stride;
            const double mii = m(i, i).real();
            const double mjj = m(j, j).real();
            const cplx mij = m(i, j);
            const double pi = std::norm(u00) * mii + std::norm(u01) * mjj + 2.0 * (u00 * std::conj(u01) * mij).real();
            const double pj = std::norm(u10) * mii + std::norm(u11) * mjj + 2.0 * (u10 * std::conj(u11) * mij).real();
            const double wi = leaf_weight(f(i), std::max(pi, 0.0), log_likelihood);
            const double wj = leaf_weight(f(j), std::max(pj, 0.0), log_likelihood);
            acc(i, i) += std::norm(u00) * wi + std::norm(u10) * wj;
            acc(j, j) += std::norm(u01) * wi + std::norm(u11) * wj;
            const cplx off = std::conj(u00) * wi * u01 + std::conj(u10) * wj * u11;
            acc(i, j) += off;
            acc(j, i) += std::conj(off);
        }
    }
}

// Returns the R contribution of every leaf below `node`, in the frame of m
// (the state rotated by the bases on the path to node).
Mat visit(const Trie& trie, int node, int depth, const Mat& m, std::span<const SettingFrequencies> data,
          double& log_likelihood) {
    const Trie::Node& here = trie.nodes[static_cast<std::size_t>(node)];
    const Eigen::Index d = m.rows();
    Mat acc = Mat::Zero(d, d);
    if (depth == trie.num_qubits - 1) {
        visit_last(trie, here, m, data, log_likelihood, acc);
        return acc;
    }
    for (int c : here.children) {
        const Trie::Node& child = trie.nodes[static_cast<std::size_t>(c)];
        if (child.rot.size() == 0) {
            acc += visit(trie, c, depth + 1, m, data, log_likelihood);
            continue;
        }
        Mat rotated = m;
        conjugate_qubit(rotated, child.rot, depth, trie.num_qubits);
        Mat back = visit(trie, c, depth + 1, rotated, data, log_likelihood);
        conjugate_qubit(back, child.rot_adj, depth, trie.num_qubits);
        acc += back;
    }
    return acc;
}

Evaluation evaluate(const Mat& rho, std::span<const SettingFrequencies> data, const Trie& trie) {
    Evaluation ev;
    ev.r = visit(trie, 0, 0, rho, data, ev.log_likelihood);
    return ev;
}

Mat normalized_hermitian(const Mat& m) {
    Mat h = 0.5 * (m + m.adjoint());
    h /= h.trace().real();
    return h;
}

}  // namespace

void TomographyJob::validate() const {
    if (num_qubits < 1) throw TomographyError("tomography needs at least one qubit");
    if (!(options.dilution > 0.0 && options.dilution <= 1.0)) throw TomographyError("dilution must lie in (0, 1]");
    if (options.max_iters < 1) throw TomographyError("max_iters must be positive");
    std::set<std::string> seen;
    std::int64_t total = 0;
    for (const MeasRecord& r : records) {
        if (static_cast<int>(r.setting.size()) != num_qubits) throw TomographyError("record setting has the wrong arity");
        if (!is_pauli(r.setting)) throw TomographyError("tomography records must use Pauli settings");
        if (!seen.insert(setting_label(r.setting)).second)
            throw TomographyError("duplicate setting " + setting_label(r.setting));
        if (r.shots != records.front().shots) throw TomographyError("shots differ between settings");
        std::int64_t sum = 0;
        for (const auto& [bits, n] : r.counts) {
            index_from_bits(bits, num_qubits);
            if (n < 0) throw TomographyError("negative count");
            sum += n;
        }
        if (sum != r.shots) throw TomographyError("counts of " + setting_label(r.setting) + " do not sum to shots");
        total += sum;
    }
    for (const MeasSetting& s : pauli_settings(num_qubits))
        if (!seen.contains(setting_label(s))) throw TomographyError("missing setting " + setting_label(s));
    if (total == 0) throw TomographyError("all counts are zero");
}

std::vector<MeasSetting> pauli_settings(int num_qubits) {
    if (num_qubits < 1) throw TomographyError("pauli_settings needs at least one qubit");
    std::size_t count = 1;
    for (int i = 0; i < num_qubits; ++i) count *= 3;
    const Basis letters[3] = {Basis::x(), Basis::y(), Basis::z()};
    std::vector<MeasSetting> out;
    out.reserve(count);
    for (std::size_t idx = 0; idx < count; ++idx) {
        MeasSetting s(static_cast<std::size_t>(num_qubits));
        std::size_t rest = idx;
        for (int q = num_qubits - 1; q >= 0; --q) {
            s[static_cast<std::size_t>(q)] = letters[rest % 3];
            rest /= 3;
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<SettingFrequencies> frequencies_from_records(int num_qubits, std::span<const MeasRecord> records) {
    std::vector<SettingFrequencies> out;
    const std::size_t d = std::size_t{1} << num_qubits;
    for (const MeasRecord& r : records) {
        SettingFrequencies f{r.setting, std::vector<double>(d, 0.0), static_cast<double>(r.shots)};
        for (const auto& [bits, n] : r.counts)
            f.probabilities[index_from_bits(bits, num_qubits)] = static_cast<double>(n) / static_cast<double>(r.shots);
        out.push_back(std::move(f));
    }
    return out;
}

MleResult mle_reconstruct(const TomographyJob& job) {
    job.validate();
    const auto data = frequencies_from_records(job.num_qubits, job.records);
    return mle_reconstruct(job.num_qubits, data, job.options);
}

MleResult mle_reconstruct(int num_qubits, std::span<const SettingFrequencies> data, const MleOptions& opts) {
    if (data.empty()) throw TomographyError("no measurement data");
    const std::size_t d = std::size_t{1} << num_qubits;
    double total_weight = 0.0;
    for (const SettingFrequencies& s : data) {
        if (static_cast<int>(s.setting.size()) != num_qubits || s.probabilities.size() != d)
            throw TomographyError("frequency table does not match the register size");
        total_weight += s.weight;
    }
    if (!(total_weight > 0.0)) throw TomographyError("all counts are zero");
    std::vector<SettingFrequencies> normed(data.begin(), data.end());
    for (SettingFrequencies& s : normed) s.weight /= total_weight;
    const Trie trie(normed, num_qubits);

    const auto dim = static_cast<Eigen::Index>(d);
    const Mat identity = Mat::Identity(dim, dim);
    Mat rho = identity / static_cast<double>(d);
    Evaluation ev = evaluate(rho, normed, trie);
    MleResult result{DensityMatrix::maximally_mixed(num_qubits), {ev.log_likelihood}, 0, false};

    double eps = opts.dilution;
    for (int it = 0; it < opts.max_iters; ++it) {
        Mat next;
        Evaluation next_ev;
        bool accepted = false;
        // the diluted step ascends for small enough eps; shrink until it does
        for (int h = 0; h <= kMaxStepHalvings; ++h) {
            const Mat step = identity + eps * ev.r;
            next = normalized_hermitian(step * rho * step);
            next_ev = evaluate(next, normed, trie);
            if (next_ev.log_likelihood >= ev.log_likelihood) {
                accepted = true;
                break;
            }
            eps *= 0.5;
        }
        if (!accepted) break;
        const double moved = trace_distance(DensityMatrix::assume_valid(rho), DensityMatrix::assume_valid(next));
        rho = std::move(next);
        ev = std::move(next_ev);
        result.log_likelihood.push_back(ev.log_likelihood);
        result.iterations = it + 1;
        if (moved < opts.tol) {
            result.converged = true;
            break;
        }
    }
    result.state = DensityMatrix::project_physical(rho);
    return result;
}

DensityMatrix qubit_tomography(std::span<const MeasRecord> records) {
    double r[3] = {0.0, 0.0, 0.0};
    bool have[3] = {false, false, false};
    for (const MeasRecord& rec : records) {
        if (rec.setting.size() != 1) throw TomographyError("qubit tomography expects single-qubit records");
        const Basis::Kind k = rec.setting.front().kind;
        if (k == Basis::Kind::Angles) throw TomographyError("qubit tomography expects Pauli records");
        const auto axis = static_cast<std::size_t>(k);  // X, Y, Z -> 0, 1, 2
        if (rec.shots < 1) throw TomographyError("record without shots");
        const auto get = [&](const char* key) {
            const auto it = rec.counts.find(key);
            return it == rec.counts.end() ? 0.0 : static_cast<double>(it->second);
        };
        r[axis] = (get("0") - get("1")) / static_cast<double>(rec.shots);
        have[axis] = true;
    }
    for (int a = 0; a < 3; ++a)
        if (!have[a]) throw TomographyError(std::string("missing ") + "XYZ"[a] + " record");
    const Mat m = 0.5 * (gates::identity(1) + r[0] * gates::pauli_x() + r[1] * gates::pauli_y() + r[2] * gates::pauli_z());
    if (r[0] * r[0] + r[1] * r[1] + r[2] * r[2] <= 1.0) return DensityMatrix::assume_valid(m);
    return DensityMatrix::project_physical(m);
}

double coherence_from_tomo(const DensityMatrix& rho_s) {
    if (rho_s.num_qubits() != 1) throw TomographyError("coherence factor needs a single-qubit state");
    return 2.0 * rho_s(0, 1).real();
}

}  // namespace dlab
