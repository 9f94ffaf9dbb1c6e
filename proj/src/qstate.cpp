#include "dlab/qstate.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace dlab {

namespace {

int qubits_for_dim(Eigen::Index dim) {
    if (dim <= 0 || !std::has_single_bit(static_cast<std::size_t>(dim)))
        throw DimensionError("dimension " + std::to_string(dim) + " is not a power of two");
    return std::countr_zero(static_cast<std::size_t>(dim));
}

void check_targets(std::span<const int> targets, int num_qubits) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] < 0 || targets[i] >= num_qubits)
            throw DimensionError("qubit index " + std::to_string(targets[i]) + " out of range");
        for (std::size_t j = 0; j < i; ++j)
            if (targets[i] == targets[j])
                throw DimensionError("repeated qubit index " + std::to_string(targets[i]));
    }
}

// Offsets of every assignment of the listed qubits, first listed = most significant.
std::vector<std::size_t> subset_offsets(std::span<const int> qubits, int num_qubits) {
    const std::size_t k = qubits.size();
    std::vector<std::size_t> out(std::size_t{1} << k, 0);
    for (std::size_t a = 0; a < out.size(); ++a) {
        std::size_t off = 0;
        for (std::size_t j = 0; j < k; ++j)
            if ((a >> (k - 1 - j)) & 1U) off |= std::size_t{1} << bit_of(qubits[j], num_qubits);
        out[a] = off;
    }
    return out;
}

std::vector<int> complement(std::span<const int> keep, int num_qubits) {
    std::vector<int> rest;
    for (int q = 0; q < num_qubits; ++q)
        if (std::find(keep.begin(), keep.end(), q) == keep.end()) rest.push_back(q);
    return rest;
}

std::vector<int> sorted_keep(std::span<const int> keep, int num_qubits) {
    if (keep.empty()) throw DimensionError("partial_trace: keep list is empty");
    check_targets(keep, num_qubits);
    std::vector<int> k(keep.begin(), keep.end());
    std::sort(k.begin(), k.end());
    return k;
}

Eigen::VectorXd hermitian_eigenvalues(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

Mat psd_sqrt(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

double log_in(double x, LogBase base) { return base == LogBase::Two ? std::log2(x) : std::log(x); }

}  // namespace

// ---------------------------------------------------------------- PureState

PureState::PureState(Vec amplitudes) : amplitudes_(std::move(amplitudes)) {
    num_qubits_ = qubits_for_dim(amplitudes_.size());
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > kNormTol)
        throw StateError("state norm " + std::to_string(norm) + " differs from 1");
}

PureState PureState::basis(int num_qubits, std::size_t index) {
    Vec v = Vec::Zero(Eigen::Index{1} << num_qubits);
    if (index >= static_cast<std::size_t>(v.size())) throw DimensionError("basis index out of range");
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(std::move(v));
}

PureState PureState::normalized(Vec amplitudes) {
    const double norm = amplitudes.norm();
    if (norm == 0.0) throw StateError("cannot normalise the zero vector");
    amplitudes /= norm;
    return PureState(std::move(amplitudes));
}

// ------------------------------------------------------------ DensityMatrix

DensityMatrix::DensityMatrix(Mat matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols()) throw DimensionError("density matrix must be square");
    num_qubits_ = qubits_for_dim(matrix_.rows());
    const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTol) throw StateError("matrix is not Hermitian (deviation " + std::to_string(herm) + ")");
    const double tr = matrix_.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol) throw StateError("trace " + std::to_string(tr) + " differs from 1");
    const double lo = hermitian_eigenvalues(matrix_).minCoeff();
    if (lo < kPsdTol) throw StateError("matrix is not positive semidefinite (eigenvalue " + std::to_string(lo) + ")");
}

DensityMatrix::DensityMatrix(const PureState& psi)
    : num_qubits_(psi.num_qubits()), matrix_(psi.amplitudes() * psi.amplitudes().adjoint()) {}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
    const Eigen::Index d = Eigen::Index{1} << num_qubits;
    return assume_valid(Mat::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::project_physical(const Mat& matrix) {
    if (matrix.rows() != matrix.cols()) throw DimensionError("density matrix must be square");
    const Mat h = 0.5 * (matrix + matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    const double total = ev.sum();
    if (total <= 0.0) throw StateError("no positive spectrum left after projection");
    ev /= total;
    Mat out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(std::move(out));
}

DensityMatrix DensityMatrix::assume_valid(Mat matrix) {
    DensityMatrix rho;
    rho.num_qubits_ = qubits_for_dim(matrix.rows());
    rho.matrix_ = std::move(matrix);
    return rho;
}

Eigen::VectorXd DensityMatrix::eigenvalues() const { return hermitian_eigenvalues(matrix_); }

// ------------------------------------------------------------- KrausChannel

KrausChannel::KrausChannel(std::vector<Mat> operators, std::vector<double> weights)
    : operators_(std::move(operators)) {
    if (operators_.empty()) throw DimensionError("channel needs at least one Kraus operator");
    if (!weights.empty()) {
        if (weights.size() != operators_.size()) throw DimensionError("weights/operators length mismatch");
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] < 0.0) throw StateError("negative Kraus weight");
            operators_[i] *= std::sqrt(weights[i]);
        }
    }
    const Eigen::Index d = operators_.front().rows();
    for (const Mat& k : operators_)
        if (k.rows() != d || k.cols() != d) throw DimensionError("Kraus operators must share one square dimension");
    num_qubits_ = qubits_for_dim(d);
    if (completeness_error() > kHermitianTol) throw StateError("Kraus operators are not trace preserving");
}

double KrausChannel::completeness_error() const {
    const Eigen::Index d = operators_.front().rows();
    Mat sum = Mat::Zero(d, d);
    for (const Mat& k : operators_) sum += k.adjoint() * k;
    return (sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
}

// ------------------------------------------------------------------- gates

namespace gates {

Mat identity(int num_qubits) {
    const Eigen::Index d = Eigen::Index{1} << num_qubits;
    return Mat::Identity(d, d);
}

Mat pauli_x() {
    Mat m(2, 2);
    m << 0.0, 1.0,
         1.0, 0.0;
    return m;
}

Mat pauli_y() {
    Mat m(2, 2);
    m << 0.0, cplx(0.0, -1.0),
         cplx(0.0, 1.0), 0.0;
    return m;
}

Mat pauli_z() {
    Mat m(2, 2);
    m << 1.0, 0.0,
         0.0, -1.0;
    return m;
}

Mat hadamard() {
    Mat m(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    m << s, s,
         s, -s;
    return m;
}

Mat ry(double angle) {
    Mat m(2, 2);
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    m << c, -s,
         s, c;
    return m;
}

}  // namespace gates

KrausChannel collision_channel(double theta) {
    Mat k = Mat::Zero(2, 2);
    k(0, 0) = std::polar(1.0, -theta / 2.0);
    k(1, 1) = std::polar(1.0, theta / 2.0);
    return KrausChannel({k, k.adjoint()}, {0.5, 0.5});
}

KrausChannel depolarizing_channel(double p, int num_qubits) {
    if (p < 0.0 || p > 1.0) throw StateError("depolarizing probability outside [0, 1]");
    if (num_qubits < 1) throw DimensionError("depolarizing channel needs at least one qubit");
    const Mat paulis[4] = {gates::identity(1), gates::pauli_x(), gates::pauli_y(), gates::pauli_z()};
    const std::size_t count = std::size_t{1} << (2 * num_qubits);
    const double d2 = static_cast<double>(count);
    std::vector<Mat> ops;
    std::vector<double> weights;
    ops.reserve(count);
    for (std::size_t idx = 0; idx < count; ++idx) {
        Mat op = Mat::Identity(1, 1);
        for (int q = num_qubits - 1; q >= 0; --q) op = kron(op, paulis[(idx >> (2 * q)) & 3U]);
        ops.push_back(std::move(op));
        weights.push_back(idx == 0 ? 1.0 - p + p / d2 : p / d2);
    }
    return KrausChannel(std::move(ops), std::move(weights));
}

KrausChannel amplitude_damping_channel(double gamma) {
    if (gamma < 0.0 || gamma > 1.0) throw StateError("damping probability outside [0, 1]");
    Mat k0 = Mat::Zero(2, 2);
    Mat k1 = Mat::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - gamma);
    k1(0, 1) = std::sqrt(gamma);
    return KrausChannel({k0, k1});
}

// --------------------------------------------------------------- kernels

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Vec kron(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

void apply_left(Mat& m, const Mat& op, std::span<const int> targets, int num_qubits) {
    const std::size_t k = targets.size();
    if (op.rows() != (Eigen::Index{1} << k) || op.cols() != op.rows())
        throw DimensionError("operator dimension does not match the number of targets");
    if (m.rows() != (Eigen::Index{1} << num_qubits)) throw DimensionError("matrix rows do not match register size");
    check_targets(targets, num_qubits);

    if (k == 1) {
        const std::size_t stride = std::size_t{1} << bit_of(targets[0], num_qubits);
        const auto dim = static_cast<std::size_t>(m.rows());
        const cplx a = op(0, 0), b = op(0, 1), c = op(1, 0), d = op(1, 1);
        for (Eigen::Index col = 0; col < m.cols(); ++col) {
            cplx* p = m.col(col).data();
            for (std::size_t i = 0; i < dim; ++i) {
                if (i & stride) continue;
                const cplx x = p[i];
                const cplx y = p[i | stride];
                p[i] = a * x + b * y;
                p[i | stride] = c * x + d * y;
            }
        }
        return;
    }

    const std::vector<std::size_t> offsets = subset_offsets(targets, num_qubits);
    std::vector<int> target_bits;
    for (int t : targets) target_bits.push_back(bit_of(t, num_qubits));
    std::sort(target_bits.begin(), target_bits.end());

    const std::size_t outer = std::size_t{1} << (num_qubits - static_cast<int>(k));
    Mat gathered(static_cast<Eigen::Index>(offsets.size()), m.cols());
    for (std::size_t i = 0; i < outer; ++i) {
        // spread i over the non-target bits
        std::size_t base = i;
        for (int b : target_bits) {
            const std::size_t low = base & ((std::size_t{1} << b) - 1);
            base = ((base >> b) << (b + 1)) | low;
        }
        for (std::size_t j = 0; j < offsets.size(); ++j)
            gathered.row(static_cast<Eigen::Index>(j)) = m.row(static_cast<Eigen::Index>(base | offsets[j]));
        const Mat result = op * gathered;
        for (std::size_t j = 0; j < offsets.size(); ++j)
            m.row(static_cast<Eigen::Index>(base | offsets[j])) = result.row(static_cast<Eigen::Index>(j));
    }
}

void apply_to_vector(Vec& v, const Mat& op, std::span<const int> targets, int num_qubits) {
    Mat as_matrix = std::move(v);
    apply_left(as_matrix, op, targets, num_qubits);
    v = std::move(as_matrix);
}

Mat embed(const Mat& op, std::span<const int> targets, int num_qubits) {
    Mat out = gates::identity(num_qubits);
    apply_left(out, op, targets, num_qubits);
    return out;
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const Mat& u, std::span<const int> targets) {
    Mat m = rho.matrix();
    apply_left(m, u, targets, rho.num_qubits());
    m.adjointInPlace();
    apply_left(m, u, targets, rho.num_qubits());
    return DensityMatrix::assume_valid(std::move(m));
}

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch, std::span<const int> targets) {
    if (ch.num_qubits() != static_cast<int>(targets.size()))
        throw DimensionError("channel acts on " + std::to_string(ch.num_qubits()) + " qubits but " +
                             std::to_string(targets.size()) + " targets were given");
    Mat sum = Mat::Zero(rho.dim(), rho.dim());
    for (const Mat& k : ch.operators()) {
        Mat m = rho.matrix();
        apply_left(m, k, targets, rho.num_qubits());  // K rho
        m.adjointInPlace();                            // rho K^dagger
        apply_left(m, k, targets, rho.num_qubits());  // K rho K^dagger
        sum += m;
    }
    return DensityMatrix::assume_valid(std::move(sum));
}

DensityMatrix partial_trace(const PureState& psi, std::span<const int> keep) {
    const int n = psi.num_qubits();
    const std::vector<int> kept = sorted_keep(keep, n);
    const std::vector<int> rest = complement(kept, n);
    const auto ko = subset_offsets(kept, n);
    const auto ro = subset_offsets(rest, n);
    Mat m(static_cast<Eigen::Index>(ko.size()), static_cast<Eigen::Index>(ro.size()));
    for (std::size_t a = 0; a < ko.size(); ++a)
        for (std::size_t b = 0; b < ro.size(); ++b)
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                psi[static_cast<Eigen::Index>(ko[a] | ro[b])];
    return DensityMatrix::assume_valid(m * m.adjoint());
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
    const int n = rho.num_qubits();
    const std::vector<int> kept = sorted_keep(keep, n);
    const std::vector<int> rest = complement(kept, n);
    const auto ko = subset_offsets(kept, n);
    const auto ro = subset_offsets(rest, n);
    const auto dk = static_cast<Eigen::Index>(ko.size());
    Mat out = Mat::Zero(dk, dk);
    for (Eigen::Index a = 0; a < dk; ++a)
        for (Eigen::Index c = 0; c < dk; ++c) {
            cplx s = 0.0;
            for (std::size_t b : ro)
                s += rho(static_cast<Eigen::Index>(ko[static_cast<std::size_t>(a)] | b),
                         static_cast<Eigen::Index>(ko[static_cast<std::size_t>(c)] | b));
            out(a, c) = s;
        }
    return DensityMatrix::assume_valid(std::move(out));
}

// ------------------------------------------------------------ information

double von_neumann_entropy(const DensityMatrix& rho, LogBase base) {
    const Eigen::VectorXd ev = rho.eigenvalues();
    double h = 0.0;
    for (double l : ev)
        if (l > kEigenCutoff) h -= l * log_in(l, base);
    return h;
}

double shannon_entropy(std::span<const double> probabilities, LogBase base) {
    double h = 0.0;
    for (double p : probabilities)
        if (p > kEigenCutoff) h -= p * log_in(p, base);
    return h;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("trace_distance: dimension mismatch");
    return 0.5 * hermitian_eigenvalues(a.matrix() - b.matrix()).cwiseAbs().sum();
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("fidelity: dimension mismatch");
    const Mat sa = psd_sqrt(a.matrix());
    const Mat inner = sa * b.matrix() * sa;
    const double root = hermitian_eigenvalues(0.5 * (inner + inner.adjoint())).cwiseMax(0.0).cwiseSqrt().sum();
    return std::clamp(root * root, 0.0, 1.0);
}

double fidelity(const PureState& a, const PureState& b) {
    if (a.dim() != b.dim()) throw DimensionError("fidelity: dimension mismatch");
    return std::norm(a.amplitudes().dot(b.amplitudes()));
}

double concurrence(const DensityMatrix& rho2q) {
    if (rho2q.num_qubits() != 2) throw DimensionError("concurrence is defined for two-qubit states");
    const Mat yy = kron(gates::pauli_y(), gates::pauli_y());
    const Mat flipped = yy * rho2q.matrix().conjugate() * yy;
    const Mat sr = psd_sqrt(rho2q.matrix());
    const Mat r = sr * flipped * sr;
    Eigen::VectorXd l = hermitian_eigenvalues(0.5 * (r + r.adjoint())).cwiseMax(0.0).cwiseSqrt();
    std::sort(l.begin(), l.end(), std::greater<>());
    return std::max(0.0, l(0) - l(1) - l(2) - l(3));
}

}  // namespace dlab
