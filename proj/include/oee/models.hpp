#pragma once

#include "oee/types.hpp"

#include <utility>
#include <variant>

namespace oee {

/// Qi-Wu-Zhang normal state: (beta sin kx, beta sin ky, mu - t cos kx - t cos ky).
struct Qwz {
  double mu = 0.5;
  double t = 1.0;
  double beta = 1.0;
};

/// Sticlet normal state: (alpha cos kx, alpha cos ky, t cos(kx + ky)).
struct Sticlet {
  double alpha = 1.0;
  double t = 1.0;
};

/// Vector-valued Fourier series v(k) = sum_delta c_delta exp(i k.delta).
struct FourierVector {
  struct Term {
    int dx = 0;
    int dy = 0;
    Vec3c coeff = Vec3c::Zero();
  };
  std::vector<Term> terms;

  Vec3c evaluate(const Momentum& k) const;
  /// Largest violation of c_{-delta} = conj(c_delta); zero for a real-valued series.
  double reality_violation() const;
  int range() const;
};

using NormalState = std::variant<Qwz, Sticlet, FourierVector>;

enum class PairingKind { Zero, EqualToH, Custom };

struct PairingVector {
  PairingKind kind = PairingKind::Zero;
  FourierVector custom;  // used when kind == Custom; may be complex-valued
};

/// Full parameterization of a four-band generalized BdG model in the basis
/// (c_{k,+}, c_{k,-}, c^dag_{k,-}, c^dag_{k,+}).
struct ModelSpec {
  NormalState normal_state = Qwz{};
  double h0 = 0.0;  // constant scalar normal-state term
  double d0 = 0.0;  // constant scalar pairing term
  PairingVector d_vector;
  double delta0 = 0.0;
  bool hprime_enabled = false;  // adds delta0 * tau_x ⊗ I

  /// Throws InvalidModel on non-finite parameters or a complex normal-state table.
  void validate() const;
  /// True when the pairing vector is real for every momentum.
  bool real_pairing() const;
};

Vec3d h_qwz(const Momentum& k, double mu, double t, double beta);
Vec3d h_sticlet(const Momentum& k, double alpha, double t);

/// Normal-state vector h(k).
Vec3d normal_vector(const ModelSpec& spec, const Momentum& k);
/// Pairing vector d(k) before the delta0 prefactor.
Vec3c pairing_vector(const ModelSpec& spec, const Momentum& k);

/// [[H_N, Delta], [Delta^dag, -H_N^T]] with H_N = h0 + h.sigma and
/// Delta = i delta0 (d0 + d.sigma) sigma_y, plus delta0 tau_x ⊗ I when enabled.
Mat4c assemble_bdg(const ModelSpec& spec, const Momentum& k);

/// The two 2x2 blocks ((h + delta0 d).sigma, (h - delta0 d).sigma) of the
/// tau_y ⊗ sigma_y symmetric family. Requires real d, h0 = d0 = 0 and no H'.
std::pair<Mat2c, Mat2c> block_decompose(const ModelSpec& spec, const Momentum& k);

/// The pair of real vectors h ± delta0 d whose blocks appear in block_decompose.
std::pair<Vec3d, Vec3d> block_vectors(const ModelSpec& spec, const Momentum& k);

/// Largest lattice offset appearing in the Bloch Hamiltonian.
int model_range(const ModelSpec& spec);

/// Generalized charge conjugation C' = tau_y ⊗ I with C'^-1 H(k) C' = -H(k)^T.
Mat4c charge_conjugation();

}  // namespace oee
