// qstate.hpp: dense states, Kraus channels, partial traces and entropic quantities.
//
// Register convention (used by every module in dlab): qubit 0 is the most
// significant bit of a basis index. For an n-qubit register, qubit q maps to
// bit (n - 1 - q) of the index, so |q0 q1 ... q_{n-1}> reads left to right.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace dlab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class StateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class LogBase { Two, E };

// Bit position of qubit q inside a basis index of an n-qubit register.
constexpr int bit_of(int q, int num_qubits) noexcept { return num_qubits - 1 - q; }

inline constexpr double kNormTol = 1e-12;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = -1e-9;
inline constexpr double kEigenCutoff = 1e-12;

class PureState {
public:
    // Throws DimensionError unless the length is a power of two, StateError
    // unless the norm is 1.
    explicit PureState(Vec amplitudes);
    static PureState basis(int num_qubits, std::size_t index);
    // Rescales to unit norm; throws if the vector vanishes.
    static PureState normalized(Vec amplitudes);

    int num_qubits() const noexcept { return num_qubits_; }
    Eigen::Index dim() const noexcept { return amplitudes_.size(); }
    const Vec& amplitudes() const noexcept { return amplitudes_; }
    cplx operator[](Eigen::Index i) const { return amplitudes_(i); }

private:
    int num_qubits_ = 0;
    Vec amplitudes_;
};

class DensityMatrix {
public:
    // Validates hermiticity, unit trace and PSD within the module tolerances.
    explicit DensityMatrix(Mat matrix);
    DensityMatrix(const PureState& psi);  // NOLINT: a pure state is a density matrix
    static DensityMatrix maximally_mixed(int num_qubits);
    // Hermitises, clips negative eigenvalues and renormalises before validating.
    static DensityMatrix project_physical(const Mat& matrix);
    // Skips validation. For kernels whose output is physical by construction
    // (unitary conjugation, CPTP maps, partial traces of valid inputs).
    static DensityMatrix assume_valid(Mat matrix);

    int num_qubits() const noexcept { return num_qubits_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }
    const Mat& matrix() const noexcept { return matrix_; }
    cplx operator()(Eigen::Index r, Eigen::Index c) const { return matrix_(r, c); }
    Eigen::VectorXd eigenvalues() const;

private:
    DensityMatrix() = default;

    int num_qubits_ = 0;
    Mat matrix_;
};

/// A completely positive trace-preserving map given by its Kraus operators.
///
/// Optional weights w_i are folded in as sqrt(w_i) K_i at construction, so the
/// stored operators always satisfy sum K_i^dagger K_i = I.
class KrausChannel {
public:
    explicit KrausChannel(std::vector<Mat> operators, std::vector<double> weights = {});

    const std::vector<Mat>& operators() const noexcept { return operators_; }
    int num_qubits() const noexcept { return num_qubits_; }
    // max |sum K^dagger K - I|
    double completeness_error() const;

private:
    std::vector<Mat> operators_;
    int num_qubits_ = 0;
};

namespace gates {
Mat identity(int num_qubits);
Mat pauli_x();
Mat pauli_y();
Mat pauli_z();
Mat hadamard();
Mat ry(double angle);
}  // namespace gates

// Single-collision dephasing map: rho -> (K rho K^dagger + K^dagger rho K) / 2
// with K = diag(e^{-i theta/2}, e^{i theta/2}).
KrausChannel collision_channel(double theta);
// rho -> (1 - p) rho + p I/2^k on k qubits, as a Pauli-twirl Kraus set.
KrausChannel depolarizing_channel(double p, int num_qubits);
KrausChannel amplitude_damping_channel(double gamma);

Mat kron(const Mat& a, const Mat& b);
Vec kron(const Vec& a, const Vec& b);

// Applies op (2^k x 2^k) to the rows of m as if each column were a state of
// an n-qubit register; targets lists the k qubits in op's own qubit order.
void apply_left(Mat& m, const Mat& op, std::span<const int> targets, int num_qubits);
void apply_to_vector(Vec& v, const Mat& op, std::span<const int> targets, int num_qubits);
// Full 2^n operator with op acting on targets and identity elsewhere.
Mat embed(const Mat& op, std::span<const int> targets, int num_qubits);

DensityMatrix apply_unitary(const DensityMatrix& rho, const Mat& u, std::span<const int> targets);
DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch,
                            std::span<const int> targets);

// Reduced state on keep; rows/cols follow ascending register order of keep.
DensityMatrix partial_trace(const PureState& psi, std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

double von_neumann_entropy(const DensityMatrix& rho, LogBase base = LogBase::Two);
double shannon_entropy(std::span<const double> probabilities, LogBase base = LogBase::Two);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double fidelity(const DensityMatrix& a, const DensityMatrix& b);
double fidelity(const PureState& a, const PureState& b);
double concurrence(const DensityMatrix& rho2q);

}  // namespace dlab
