#include "ballast/potentials.hpp"

#include <cmath>
#include <stdexcept>

namespace ballast {

namespace {

inline void neumaier_add(double& sum, double& compensation, double value) {
  const double t = sum + value;
  if (std::abs(sum) >= std::abs(value)) {
    compensation += (sum - t) + value;
  } else {
    compensation += (value - t) + sum;
  }
  sum = t;
}

double layered_sum(const LoadState& state, double coefficient, double offset) {
  const double avg = static_cast<double>(state.total()) / state.n();
  double sum = 0.0, comp = 0.0;
  for (std::uint32_t b = 0; b < state.n(); ++b) {
    const double z = static_cast<double>(state.load(b)) - avg - offset;
    neumaier_add(sum, comp, z > 0.0 ? std::exp(coefficient * z) : 1.0);
  }
  return sum + comp;
}

double layered(const LoadState& state, std::uint32_t j, std::uint32_t k, double alpha,
               LogBase base) {
  if (k == 0) throw std::invalid_argument("potential: k must be at least 1");
  if (j >= k) throw std::invalid_argument("potential: layer j must lie in [0, k-1]");
  if (!(alpha > 0.0)) throw std::invalid_argument("potential: alpha must be positive");
  const double log_n = static_cast<double>(log_of(state.n(), base));
  const double coefficient =
      alpha * std::pow(log_n, static_cast<double>(j) / static_cast<double>(k));
  const double offset = (2.0 / kAlpha2) * static_cast<double>(j) *
                        std::pow(log_n, 1.0 / static_cast<double>(k));
  return layered_sum(state, coefficient, offset);
}

}  // namespace

double phi(const LoadState& state, std::uint32_t j, std::uint32_t k, double alpha, LogBase base) {
  return layered(state, j, k, alpha, base);
}

double psi(const LoadState& state, std::uint32_t j, std::uint32_t k, double alpha, LogBase base) {
  return layered(state, j, k, alpha, base);
}

double gamma_potential(const LoadState& state, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0 / 72.0)) {
    throw std::invalid_argument("gamma potential: alpha must lie in (0, 1/72)");
  }
  const double avg = static_cast<double>(state.total()) / state.n();
  double sum = 0.0, comp = 0.0;
  for (std::uint32_t b = 0; b < state.n(); ++b) {
    const double z = static_cast<double>(state.load(b)) - avg;
    neumaier_add(sum, comp, std::exp(alpha * z));
    neumaier_add(sum, comp, std::exp(-alpha * z));
  }
  return sum + comp;
}

double evaluate(const PotentialSpec& spec, const LoadState& state) {
  switch (spec.family) {
    case PotentialFamily::phi:
    case PotentialFamily::psi:
      return layered(state, spec.j, spec.k, spec.alpha, spec.base);
    case PotentialFamily::gamma:
      return gamma_potential(state, spec.alpha);
  }
  throw std::invalid_argument("potential: bad family");
}

PotentialSpec parse_potential(const std::string& label, std::uint32_t k, LogBase base) {
  PotentialSpec spec;
  spec.k = k;
  spec.base = base;
  if (label == "gamma") {
    spec.family = PotentialFamily::gamma;
    spec.alpha = kAlpha2;
    return spec;
  }
  auto parse_layer = [&](const std::string& digits) {
    if (digits.empty()) throw std::invalid_argument("potential label: missing layer in '" + label + "'");
    std::size_t pos = 0;
    const unsigned long j = std::stoul(digits, &pos);
    if (pos != digits.size()) {
      throw std::invalid_argument("potential label: bad layer in '" + label + "'");
    }
    return static_cast<std::uint32_t>(j);
  };
  if (label.rfind("phi", 0) == 0) {
    spec.family = PotentialFamily::phi;
    spec.alpha = kAlpha2;
    spec.j = parse_layer(label.substr(3));
  } else if (label.rfind("psi", 0) == 0) {
    spec.family = PotentialFamily::psi;
    spec.alpha = kAlpha1;
    spec.j = parse_layer(label.substr(3));
  } else {
    throw std::invalid_argument("unknown potential label '" + label +
                                "' (expected phi<j>, psi<j> or gamma)");
  }
  if (spec.j >= k) {
    throw std::invalid_argument("potential label '" + label + "': layer exceeds k-1");
  }
  return spec;
}

std::string label_of(const PotentialSpec& spec) {
  switch (spec.family) {
    case PotentialFamily::phi: return "phi" + std::to_string(spec.j);
    case PotentialFamily::psi: return "psi" + std::to_string(spec.j);
    case PotentialFamily::gamma: return "gamma";
  }
  return "?";
}

}  // namespace ballast
