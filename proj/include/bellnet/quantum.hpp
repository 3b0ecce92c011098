#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "bellnet/operators.hpp"

namespace bellnet {

using cd = std::complex<double>;

// Dense statevector cap in qubits; BELLNET_DENSE_CAP overrides the default
// of 12.
int dense_cap();

// Explicit statevector over a particle roster; site 0 is the most
// significant index bit.
struct DenseState {
  Roster roster;
  std::vector<cd> amp;

  static DenseState basis(Roster roster, uint64_t bits);
  // Projects a computational basis state onto the stabilizer subspace.
  static DenseState from_stabilizer(const StabilizerState& state);
};

// out[idx ^ X] += phase(idx) * in[idx]; in and out must be distinct.
void apply_pauli(const PauliString& p, const Roster& roster,
                 std::span<const cd> in, std::span<cd> out);

// omega_l(angles) * <stabilizer of B_l> on the stabilizer path. Equals
// omega_l when the state is the tailored one.
double quantum_value(const SegmentedBellOperator& op,
                     const StabilizerState& state,
                     std::span<const double> angles = {});

// Independent oracle: builds the measurement operators A_x = cos(theta) P0
// +/- sin(theta) P1 explicitly and evaluates <Phi|B_l|Phi> on the vector.
double dense_expectation(const SegmentedBellOperator& op,
                         const DenseState& state,
                         std::span<const double> angles = {});

// sum_l <B_l>^p on the tailored state, optionally with overridden angles
// (one per type-A observer in network order).
double quantum_sum(const OperatorFamily& family, double p,
                   std::span<const double> angles = {});
double quantum_sum(const NetworkSpec& spec, double p);

struct SweepResult {
  double max_value = 0.0;
  std::vector<double> angles;
  uint64_t grid_index = 0;
  int grid = 0;
};

// Grid search over (0, pi/2)^{M_A}, endpoints excluded; odd grid sizes put
// pi/4 exactly on the grid. Deterministic: ties resolve to the lowest flat
// grid index regardless of the worker count.
SweepResult sweep_angles(const NetworkSpec& spec, double p, int grid,
                         int jobs = 0);

struct SosWitness {
  std::vector<double> residuals;  // ||M_l |state>|| per l
  std::vector<double> weights;    // omega_l
  // gamma = sum_l omega_l^p M_l^dag M_l, checked by eigendecomposition on
  // small networks only.
  std::optional<double> gamma_min_eigenvalue;
  bool gamma_psd = true;
};

SosWitness sos_residuals(const OperatorFamily& family, const DenseState& state,
                         double p);
// Residuals on the network's own tailored state.
SosWitness sos_residuals(const NetworkSpec& spec, double p);

}  // namespace bellnet
