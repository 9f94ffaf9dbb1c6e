#include "dlab/darwinism.hpp"

#include "dlab/parallel.hpp"
#include "dlab/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

namespace dlab {

namespace {

constexpr double kTieTolerance = 1e-12;

void check_sets(const QubitSet& sys, const QubitSet& frac, int n) {
    if (sys.empty() || frac.empty()) throw AnalysisError("system and fraction must be non-empty");
    std::set<int> seen;
    for (const QubitSet* s : {&sys, &frac})
        for (int q : *s) {
            if (q < 0 || q >= n) throw AnalysisError("qubit " + std::to_string(q) + " outside the register");
            if (!seen.insert(q).second) throw AnalysisError("system and fraction overlap at qubit " + std::to_string(q));
        }
}

QubitSet sorted_union(const QubitSet& a, const QubitSet& b) {
    QubitSet u(a);
    u.insert(u.end(), b.begin(), b.end());
    std::sort(u.begin(), u.end());
    return u;
}

// Positions of qs inside the ascending list `within`.
QubitSet localize(const QubitSet& qs, const QubitSet& within) {
    QubitSet out;
    for (int q : qs)
        out.push_back(static_cast<int>(std::lower_bound(within.begin(), within.end(), q) - within.begin()));
    return out;
}

std::size_t gather(std::size_t index, const QubitSet& qs, int n) {
    std::size_t v = 0;
    for (int q : qs) v = (v << 1) | ((index >> bit_of(q, n)) & 1U);
    return v;
}

double entropy_of(const Mat& m) { return von_neumann_entropy(DensityMatrix::assume_valid(m)); }

void check_basis(const MeasSetting& basis, const QubitSet& qs) {
    if (basis.size() != qs.size()) throw AnalysisError("basis arity does not match its qubit set");
}

Eigen::MatrixXd accumulate(std::span<const double> probs, const QubitSet& sys, const QubitSet& frac, int n) {
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(Eigen::Index{1} << sys.size(), Eigen::Index{1} << frac.size());
    for (std::size_t i = 0; i < probs.size(); ++i)
        joint(static_cast<Eigen::Index>(gather(i, sys, n)), static_cast<Eigen::Index>(gather(i, frac, n))) += probs[i];
    return joint;
}

MeasSetting widen(int n, const QubitSet& sys, const QubitSet& frac, const MeasSetting& sb, const MeasSetting& fb) {
    MeasSetting s(static_cast<std::size_t>(n), Basis::z());
    for (std::size_t k = 0; k < sys.size(); ++k) s[static_cast<std::size_t>(sys[k])] = sb[k];
    for (std::size_t k = 0; k < frac.size(); ++k) s[static_cast<std::size_t>(frac[k])] = fb[k];
    return s;
}

double holevo_local(const DensityMatrix& rho_sf, const QubitSet& sys, const QubitSet& frac) {
    const int n = rho_sf.num_qubits();
    const auto ds = Eigen::Index{1} << sys.size();
    const auto df = Eigen::Index{1} << frac.size();
    // local index of (system value a, fraction value b)
    std::vector<std::size_t> index(static_cast<std::size_t>(ds * df));
    for (std::size_t i = 0; i < index.size(); ++i)
        index[gather(i, sys, n) * static_cast<std::size_t>(df) + gather(i, frac, n)] = i;
    Mat average = Mat::Zero(df, df);
    double conditional = 0.0;
    for (Eigen::Index a = 0; a < ds; ++a) {
        Mat block(df, df);
        for (Eigen::Index b = 0; b < df; ++b)
            for (Eigen::Index c = 0; c < df; ++c)
                block(b, c) = rho_sf(static_cast<Eigen::Index>(index[static_cast<std::size_t>(a * df + b)]),
                                     static_cast<Eigen::Index>(index[static_cast<std::size_t>(a * df + c)]));
        average += block;
        const double p = block.trace().real();
        if (p <= 0.0) continue;
        conditional += p * entropy_of(block / p);
    }
    return entropy_of(average) - conditional;
}

template <class State>
double qmi_impl(const State& state, const QubitSet& sys, const QubitSet& frac) {
    check_sets(sys, frac, state.num_qubits());
    const QubitSet both = sorted_union(sys, frac);
    return von_neumann_entropy(partial_trace(state, sys)) + von_neumann_entropy(partial_trace(state, frac)) -
           von_neumann_entropy(partial_trace(state, both));
}

template <class State>
MiCurve averaged_impl(const State& state, const QubitSet& sys, const PartitionScheme& scheme, int jobs) {
    scheme.validate(state.num_qubits(), sys);
    const int units = static_cast<int>(scheme.num_units());
    MiCurve curve;
    for (int f = 1; f <= units; ++f) {
        const auto subsets = combinations(units, f);
        std::vector<double> values(subsets.size());
        parallel_for(subsets.size(), jobs, [&](std::size_t i) {
            QubitSet frac;
            for (int u : subsets[i]) {
                const QubitSet& unit = scheme.units[static_cast<std::size_t>(u)];
                frac.insert(frac.end(), unit.begin(), unit.end());
            }
            values[i] = qmi_impl(state, sys, frac);
        });
        const double count = static_cast<double>(values.size());
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
        double se = 0.0;
        if (values.size() > 1) {
            double ss = 0.0;
            for (double v : values) ss += (v - mean) * (v - mean);
            se = std::sqrt(ss / (count - 1.0) / count);
        }
        curve.points.push_back({f, mean, se});
    }
    return curve;
}

template <class State>
BasisGrid grid_impl(const State& state, const QubitSet& sys, const QubitSet& frac, int phi_steps, int xi_steps,
                    int jobs) {
    if (phi_steps < 2 || xi_steps < 2) throw AnalysisError("grid needs at least two steps per angle");
    check_sets(sys, frac, state.num_qubits());
    BasisGrid grid;
    grid.phi_steps = phi_steps;
    grid.xi_steps = xi_steps;
    grid.values = Eigen::MatrixXd::Zero(phi_steps, xi_steps);
    const MeasSetting sys_basis(sys.size(), Basis::z());
    const auto cells = static_cast<std::size_t>(phi_steps) * static_cast<std::size_t>(xi_steps);
    parallel_for(cells, jobs, [&](std::size_t k) {
        const int i = static_cast<int>(k / static_cast<std::size_t>(xi_steps));
        const int j = static_cast<int>(k % static_cast<std::size_t>(xi_steps));
        const MeasSetting fb(frac.size(), Basis::angles(grid.phi(i), grid.xi(j)));
        grid.values(i, j) = mutual_information(joint_distribution(state, sys, frac, sys_basis, fb));
    });
    return grid;
}

template <class State>
PauliCmiTable scan_impl(const State& state, const QubitSet& sys, int frac_size, const PartitionScheme& scheme,
                        int jobs) {
    scheme.validate(state.num_qubits(), sys);
    const int units = static_cast<int>(scheme.num_units());
    if (frac_size < 1 || frac_size > units) throw AnalysisError("fraction size outside 1.." + std::to_string(units));
    std::vector<QubitSet> fractions;
    for (const auto& combo : combinations(units, frac_size)) {
        QubitSet frac;
        for (int u : combo) {
            const QubitSet& unit = scheme.units[static_cast<std::size_t>(u)];
            frac.insert(frac.end(), unit.begin(), unit.end());
        }
        std::sort(frac.begin(), frac.end());
        fractions.push_back(std::move(frac));
    }
    const auto sys_settings = pauli_settings(static_cast<int>(sys.size()));
    const auto frac_settings = pauli_settings(static_cast<int>(fractions.front().size()));
    const std::size_t per_fraction = sys_settings.size() * frac_settings.size();

    PauliCmiTable table;
    table.frac_size = frac_size;
    table.per_fraction.resize(fractions.size() * per_fraction);
    parallel_for(table.per_fraction.size(), jobs, [&](std::size_t k) {
        const QubitSet& frac = fractions[k / per_fraction];
        const std::size_t r = k % per_fraction;
        const MeasSetting& sb = sys_settings[r / frac_settings.size()];
        const MeasSetting& fb = frac_settings[r % frac_settings.size()];
        if (fb.size() != frac.size()) throw AnalysisError("units of unequal size in the Pauli scan");
        table.per_fraction[k] = {setting_label(sb), setting_label(fb), frac,
                                 mutual_information(joint_distribution(state, sys, frac, sb, fb))};
    });
    for (std::size_t r = 0; r < per_fraction; ++r) {
        double sum = 0.0;
        for (std::size_t f = 0; f < fractions.size(); ++f) sum += table.per_fraction[f * per_fraction + r].cmi;
        const PauliCmiRow& first = table.per_fraction[r];
        table.averaged.push_back({first.sys_setting, first.frac_setting, {}, sum / static_cast<double>(fractions.size())});
    }
    return table;
}

}  // namespace

std::string to_string(PartitionMode m) {
    switch (m) {
        case PartitionMode::PerQubit: return "PerQubit";
        case PartitionMode::PerPair: return "PerPair";
        case PartitionMode::AncillaeOnly: return "AncillaeOnly";
    }
    return "?";
}

PartitionMode partition_mode_from_string(const std::string& s) {
    if (s == "PerQubit") return PartitionMode::PerQubit;
    if (s == "PerPair") return PartitionMode::PerPair;
    if (s == "AncillaeOnly") return PartitionMode::AncillaeOnly;
    throw AnalysisError("unknown partition '" + s + "' (expected PerQubit, PerPair or AncillaeOnly)");
}

PartitionScheme PartitionScheme::for_model(const ScmParams& p, PartitionMode mode) {
    p.validate();
    PartitionScheme s;
    s.mode = mode;
    if (p.scenario == Scenario::Condensed) {
        if (mode == PartitionMode::AncillaeOnly)
            throw AnalysisError("AncillaeOnly partition needs the full scenario");
        for (int i = 0; i < p.n; ++i) s.units.push_back({layout::condensed(i)});
        return s;
    }
    for (int i = 0; i < p.n; ++i) {
        switch (mode) {
            case PartitionMode::PerQubit:
                s.units.push_back({layout::emitter(i)});
                s.units.push_back({layout::ancilla(i)});
                break;
            case PartitionMode::PerPair: s.units.push_back({layout::emitter(i), layout::ancilla(i)}); break;
            case PartitionMode::AncillaeOnly:
                s.units.push_back({layout::ancilla(i)});
                s.traced.push_back(layout::emitter(i));
                break;
        }
    }
    return s;
}

void PartitionScheme::validate(int num_qubits, const QubitSet& sys) const {
    if (units.empty()) throw AnalysisError("partition scheme has no units");
    std::set<int> seen(sys.begin(), sys.end());
    if (seen.size() != sys.size()) throw AnalysisError("repeated system qubit");
    for (const QubitSet* group : {&sys, &traced})
        for (int q : *group)
            if (q < 0 || q >= num_qubits) throw AnalysisError("qubit " + std::to_string(q) + " outside the register");
    for (const QubitSet& u : units) {
        if (u.empty()) throw AnalysisError("empty partition unit");
        for (int q : u) {
            if (q < 0 || q >= num_qubits) throw AnalysisError("qubit " + std::to_string(q) + " outside the register");
            if (!seen.insert(q).second) throw AnalysisError("partition units overlap at qubit " + std::to_string(q));
        }
    }
    for (int q : traced)
        if (seen.contains(q)) throw AnalysisError("traced qubit " + std::to_string(q) + " is also analysed");
}

double BasisGrid::phi(int i) const { return std::numbers::pi * i / (phi_steps - 1); }
double BasisGrid::xi(int j) const { return 2.0 * std::numbers::pi * j / xi_steps; }

std::pair<int, int> BasisGrid::argmax() const {
    std::pair<int, int> best{0, 0};
    double top = values(0, 0);
    for (int i = 0; i < phi_steps; ++i)
        for (int j = 0; j < xi_steps; ++j)
            if (values(i, j) > top + kTieTolerance) {
                top = values(i, j);
                best = {i, j};
            }
    return best;
}

double BasisGrid::max() const { return values.maxCoeff(); }

double PauliCmiTable::max_per_fraction() const {
    double m = 0.0;
    for (const auto& r : per_fraction) m = std::max(m, r.cmi);
    return m;
}

double PauliCmiTable::max_averaged() const {
    double m = 0.0;
    for (const auto& r : averaged) m = std::max(m, r.cmi);
    return m;
}

double qmi(const DensityMatrix& rho, const QubitSet& sys, const QubitSet& frac) { return qmi_impl(rho, sys, frac); }
double qmi(const PureState& psi, const QubitSet& sys, const QubitSet& frac) { return qmi_impl(psi, sys, frac); }

MiCurve averaged_qmi(const DensityMatrix& rho, const QubitSet& sys, const PartitionScheme& scheme, int jobs) {
    return averaged_impl(rho, sys, scheme, jobs);
}
MiCurve averaged_qmi(const PureState& psi, const QubitSet& sys, const PartitionScheme& scheme, int jobs) {
    return averaged_impl(psi, sys, scheme, jobs);
}

Eigen::MatrixXd joint_distribution(const DensityMatrix& rho, const QubitSet& sys, const QubitSet& frac,
                                   const MeasSetting& sys_basis, const MeasSetting& frac_basis) {
    check_sets(sys, frac, rho.num_qubits());
    check_basis(sys_basis, sys);
    check_basis(frac_basis, frac);
    const QubitSet keep = sorted_union(sys, frac);
    const QubitSet ls = localize(sys, keep);
    const QubitSet lf = localize(frac, keep);
    const DensityMatrix reduced = partial_trace(rho, keep);
    const int n = reduced.num_qubits();
    const auto probs = outcome_probabilities(reduced, widen(n, ls, lf, sys_basis, frac_basis));
    return accumulate(probs, ls, lf, n);
}

Eigen::MatrixXd joint_distribution(const PureState& psi, const QubitSet& sys, const QubitSet& frac,
                                   const MeasSetting& sys_basis, const MeasSetting& frac_basis) {
    check_sets(sys, frac, psi.num_qubits());
    check_basis(sys_basis, sys);
    check_basis(frac_basis, frac);
    const int n = psi.num_qubits();
    // unmeasured qubits are read in Z and marginalised, which leaves the
    // distribution of the measured ones untouched
    const auto probs = outcome_probabilities(psi, widen(n, sys, frac, sys_basis, frac_basis));
    return accumulate(probs, sys, frac, n);
}

double mutual_information(const Eigen::MatrixXd& joint) {
    const Eigen::VectorXd pa = joint.rowwise().sum();
    const Eigen::VectorXd pb = joint.colwise().sum().transpose();
    double mi = 0.0;
    for (Eigen::Index a = 0; a < joint.rows(); ++a)
        for (Eigen::Index b = 0; b < joint.cols(); ++b) {
            const double p = joint(a, b);
            if (p <= 0.0) continue;
            mi += p * std::log2(p / (pa(a) * pb(b)));
        }
    return mi;
}

double cmi_joint(const DensityMatrix& rho, const QubitSet& sys, const QubitSet& frac, const MeasSetting& sys_basis,
                 const MeasSetting& frac_basis) {
    return mutual_information(joint_distribution(rho, sys, frac, sys_basis, frac_basis));
}

double cmi_joint(const PureState& psi, const QubitSet& sys, const QubitSet& frac, const MeasSetting& sys_basis,
                 const MeasSetting& frac_basis) {
    return mutual_information(joint_distribution(psi, sys, frac, sys_basis, frac_basis));
}

double cmi_sampled(const Eigen::MatrixXd& joint, std::int64_t shots, std::uint64_t seed) {
    if (shots < 1) throw AnalysisError("shots must be at least 1");
    std::vector<double> flat(static_cast<std::size_t>(joint.size()));
    for (Eigen::Index a = 0; a < joint.rows(); ++a)
        for (Eigen::Index b = 0; b < joint.cols(); ++b)
            flat[static_cast<std::size_t>(a * joint.cols() + b)] = std::max(joint(a, b), 0.0);
    std::discrete_distribution<std::size_t> dist(flat.begin(), flat.end());
    std::mt19937_64 gen(seed);
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(joint.rows(), joint.cols());
    for (std::int64_t s = 0; s < shots; ++s) {
        const std::size_t k = dist(gen);
        counts(static_cast<Eigen::Index>(k) / joint.cols(), static_cast<Eigen::Index>(k) % joint.cols()) += 1.0;
    }
    return mutual_information(counts / static_cast<double>(shots));
}

BasisGrid cmi_grid(const DensityMatrix& rho, const QubitSet& sys, const QubitSet& frac, int phi_steps, int xi_steps,
                   int jobs) {
    check_sets(sys, frac, rho.num_qubits());
    const QubitSet keep = sorted_union(sys, frac);
    return grid_impl(partial_trace(rho, keep), localize(sys, keep), localize(frac, keep), phi_steps, xi_steps, jobs);
}

BasisGrid cmi_grid(const PureState& psi, const QubitSet& sys, const QubitSet& frac, int phi_steps, int xi_steps,
                   int jobs) {
    return grid_impl(psi, sys, frac, phi_steps, xi_steps, jobs);
}

double holevo_bound(const DensityMatrix& rho, const QubitSet& sys, const QubitSet& frac) {
    check_sets(sys, frac, rho.num_qubits());
    const QubitSet keep = sorted_union(sys, frac);
    return holevo_local(partial_trace(rho, keep), localize(sys, keep), localize(frac, keep));
}

double holevo_bound(const PureState& psi, const QubitSet& sys, const QubitSet& frac) {
    check_sets(sys, frac, psi.num_qubits());
    const QubitSet keep = sorted_union(sys, frac);
    return holevo_local(partial_trace(psi, keep), localize(sys, keep), localize(frac, keep));
}

PauliCmiTable pauli_cmi_scan(const DensityMatrix& rho, const QubitSet& sys, int frac_size,
                             const PartitionScheme& scheme, int jobs) {
    return scan_impl(rho, sys, frac_size, scheme, jobs);
}

PauliCmiTable pauli_cmi_scan(const PureState& psi, const QubitSet& sys, int frac_size, const PartitionScheme& scheme,
                             int jobs) {
    return scan_impl(psi, sys, frac_size, scheme, jobs);
}

double blp_witness(std::span<const std::pair<double, double>> curve) {
    if (curve.size() < 2) throw AnalysisError("BLP witness needs at least two points");
    double w = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (!(curve[i].first > curve[i - 1].first)) throw AnalysisError("BLP witness needs ascending times");
        w += std::max(0.0, std::abs(curve[i].second) - std::abs(curve[i - 1].second));
    }
    return w;
}

std::vector<std::vector<int>> combinations(int n, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > n) return out;
    std::vector<int> c(static_cast<std::size_t>(k));
    std::iota(c.begin(), c.end(), 0);
    while (true) {
        out.push_back(c);
        int i = k - 1;
        while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++c[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

}  // namespace dlab
