#pragma once

#include <cstdint>
#include <string>

#include "ballast/common.hpp"
#include "ballast/load_state.hpp"

/// Exponential potential functions over a load state.
///
/// All three families measure overshoot z_i = x_i - t/n of bin loads above the
/// average.  The layered families phi (coefficient alpha2) and psi
/// (coefficient alpha1) sum exp(alpha * (log n)^{j/k} * (z_i - offset_j)^+)
/// with a layer offset offset_j = (2 / alpha2) * j * (log n)^{1/k}; the offset
/// scale is fixed by alpha2 for both families.  The two-sided gamma family
/// sums exp(alpha z_i) + exp(-alpha z_i) with no positive-part truncation.
///
/// Evaluation is O(n) with compensated (Neumaier) summation and is meant for
/// checkpoints, not for every ball.
namespace ballast {

/// Coefficient of the psi family.
inline constexpr double kAlpha1 = 0.01;
/// Coefficient of the phi family; its reciprocal also sets the layer offsets.
inline constexpr double kAlpha2 = 0.0002;

enum class PotentialFamily { phi, psi, gamma };

struct PotentialSpec {
  PotentialFamily family = PotentialFamily::phi;
  std::uint32_t j = 0;  // layer, 0 <= j <= k-1 (ignored by gamma)
  std::uint32_t k = 1;  // number of layers in the ambient quantile grid
  double alpha = kAlpha2;
  LogBase base = LogBase::natural;
};

/// Layer-j phi potential.  Throws for k == 0 or j > k-1.
double phi(const LoadState& state, std::uint32_t j, std::uint32_t k, double alpha = kAlpha2,
           LogBase base = LogBase::natural);

/// Layer-j psi potential (same shape, steeper coefficient alpha1).
double psi(const LoadState& state, std::uint32_t j, std::uint32_t k, double alpha = kAlpha1,
           LogBase base = LogBase::natural);

/// Two-sided potential; requires alpha in (0, 1/72).
double gamma_potential(const LoadState& state, double alpha);

double evaluate(const PotentialSpec& spec, const LoadState& state);

/// Parse a checkpoint-observable label: "phi<j>", "psi<j>" or "gamma",
/// e.g. "phi0", "psi1".  Family defaults: phi/gamma use alpha2, psi alpha1.
PotentialSpec parse_potential(const std::string& label, std::uint32_t k,
                              LogBase base = LogBase::natural);

std::string label_of(const PotentialSpec& spec);

}  // namespace ballast
