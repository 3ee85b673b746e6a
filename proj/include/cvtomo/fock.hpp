#pragma once

#include <map>
#include <string>
#include <vector>

#include "cvtomo/linalg.hpp"

namespace cvtomo {

/// Fock truncation shared by every mode: levels 0..cutoff_n are kept.
struct TruncationConfig {
  int cutoff_n = 10;
  int modes = 1;

  int dim() const { return cutoff_n + 1; }
  int total_dim() const;
  void validate() const;
  TruncationConfig single_mode() const { return {cutoff_n, 1}; }

  bool operator==(const TruncationConfig&) const = default;
};

// Flattened index of a multi-mode Fock label; mode 1 is the slowest index.
int flat_index(const TruncationConfig& trunc, const std::vector<int>& occupations);
std::vector<int> unflatten_index(const TruncationConfig& trunc, int flat);

struct PureState {
  TruncationConfig trunc;
  CVector amplitudes;

  // Normalizes amplitudes; throws DomainError for a zero vector.
  static PureState from_amplitudes(const TruncationConfig& trunc, CVector amplitudes);
};

/// Hermitian, unit-trace, positive semidefinite operator on the truncated space.
///
/// Construction validates all three properties; `discarded_weight` records how
/// much norm was lost by the Fock truncation when the state was built from an
/// untruncated description (0 for matrices supplied directly).
class DensityMatrix {
public:
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPsdTol = 1e-8;

  // Validates as-is. With `normalize` the trace is rescaled to 1 first.
  static DensityMatrix from_matrix(const TruncationConfig& trunc, const CMatrix& entries, bool normalize = false);
  static DensityMatrix from_pure(const PureState& psi);
  // Makes an arbitrary square matrix a valid state: Hermitize, clip negative
  // eigenvalues, rescale to unit trace.
  static DensityMatrix nearest_state(const TruncationConfig& trunc, const CMatrix& entries);

  const CMatrix& entries() const { return entries_; }
  const TruncationConfig& trunc() const { return trunc_; }
  int dim() const { return static_cast<int>(entries_.rows()); }
  double discarded_weight() const { return discarded_weight_; }
  DensityMatrix with_discarded_weight(double w) const;

  double min_eigenvalue() const;
  // Number of eigenvalues above `tol`.
  int rank(double tol = 1e-9) const;

private:
  DensityMatrix(TruncationConfig trunc, CMatrix entries) : trunc_(trunc), entries_(std::move(entries)) {}

  TruncationConfig trunc_;
  CMatrix entries_;
  double discarded_weight_ = 0.0;
};

enum class StateKind { noon, hermite_gauss, squeezed_vacuum, dephased_cat, fock, coherent };

std::string to_string(StateKind kind);
StateKind state_kind_from_string(const std::string& name);

/// Named target state plus its real parameters.
///
/// Parameters by kind (defaults in parentheses):
///   fock:            n (1)                 |n> on every mode
///   coherent:        z_re (1), z_im (0)    |z> on every mode
///   noon:            n (1)                 (|n,0> + |0,n>)/sqrt2, two modes
///   hermite_gauss:   n (1), sigma_plus (1), sigma_minus (0.5)
///   squeezed_vacuum: zeta (0.2)
///   dephased_cat:    alpha (1), p (0.5)
struct StateSpec {
  StateKind kind = StateKind::fock;
  std::map<std::string, double> params;

  double param(const std::string& key) const;
  // Fills defaults and checks ranges; throws ConfigError.
  StateSpec resolved() const;
  // Number of modes the kind requires (0 = any).
  int required_modes() const;
};

struct BuildOptions {
  // Largest tolerated norm loss of a state projected onto the truncated basis.
  double max_discarded_weight = 1e-3;
  int hermite_gauss_order = 80;
};

// psi_n(q) for the dimensionless oscillator; throws DomainError for n < 0 or n > 200.
double hermite_wavefunction(int n, double q);
// psi_0..psi_{count-1} at q in one recursion.
RVector hermite_wavefunctions(int count, double q);

// <n|z> = e^{-|z|^2/2} z^n / sqrt(n!)
cplx coherent_overlap(int n, cplx z);
// Truncated coherent amplitudes <0|z>..<d-1|z> (not renormalized).
CVector coherent_vector(int dim, cplx z);

// Single-mode lowering operator, a|n> = sqrt(n)|n-1>.
CMatrix annihilation_matrix(const TruncationConfig& trunc);
// e^{i phi n} on one mode.
CMatrix phase_rotation(int dim, double phi);

// Kronecker product with mode 1 as the slowest index.
CMatrix tensor_lift(const std::vector<CMatrix>& single_mode);

DensityMatrix build_state(const StateSpec& spec, const TruncationConfig& trunc, const BuildOptions& opts = {});

// Coefficient matrix c(m, n) of the Hermite-Gauss two-mode wavefunction in the
// product oscillator basis, plus the fraction of norm it captures.
struct HermiteGaussProjection {
  RMatrix coefficients;
  double captured_norm = 0.0;
};
HermiteGaussProjection project_hermite_gauss(int order_n, double sigma_plus, double sigma_minus, int dim,
                                             int quadrature_order = 80);

} // namespace cvtomo
