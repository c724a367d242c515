#include "oee/models.hpp"

#include "oee/pauli.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

namespace oee {

Vec3c FourierVector::evaluate(const Momentum& k) const {
  Vec3c v = Vec3c::Zero();
  for (const auto& term : terms)
    v += term.coeff * std::exp(cplx(0, k.kx * term.dx + k.ky * term.dy));
  return v;
}

double FourierVector::reality_violation() const {
  std::map<std::pair<int, int>, Vec3c> table;
  for (const auto& term : terms) {
    auto [it, inserted] = table.try_emplace({term.dx, term.dy}, term.coeff);
    if (!inserted) it->second += term.coeff;
  }
  double worst = 0.0;
  for (const auto& [offset, c] : table) {
    const auto partner = table.find({-offset.first, -offset.second});
    const Vec3c mirror = partner == table.end() ? Vec3c::Zero() : partner->second;
    worst = std::max(worst, (c - mirror.conjugate()).cwiseAbs().maxCoeff());
  }
  return worst;
}

int FourierVector::range() const {
  int r = 0;
  for (const auto& term : terms) r = std::max({r, std::abs(term.dx), std::abs(term.dy)});
  return r;
}

namespace {

bool finite(double x) { return std::isfinite(x); }

bool finite(const FourierVector& f) {
  return std::all_of(f.terms.begin(), f.terms.end(),
                     [](const auto& t) { return t.coeff.allFinite(); });
}

constexpr double kRealTol = 1e-12;

}  // namespace

void ModelSpec::validate() const {
  const bool normal_ok = std::visit(
      [](const auto& ns) {
        using T = std::decay_t<decltype(ns)>;
        if constexpr (std::is_same_v<T, Qwz>) {
          return finite(ns.mu) && finite(ns.t) && finite(ns.beta);
        } else if constexpr (std::is_same_v<T, Sticlet>) {
          return finite(ns.alpha) && finite(ns.t);
        } else {
          return finite(ns);
        }
      },
      normal_state);
  if (!normal_ok || !finite(h0) || !finite(d0) || !finite(delta0))
    throw InvalidModel("model parameters must be finite");
  if (const auto* table = std::get_if<FourierVector>(&normal_state)) {
    if (table->reality_violation() > kRealTol)
      throw InvalidModel("normal-state Fourier table violates c(-delta) = conj(c(delta))");
  }
  if (d_vector.kind == PairingKind::Custom && !finite(d_vector.custom))
    throw InvalidModel("pairing Fourier table has non-finite coefficients");
}

bool ModelSpec::real_pairing() const {
  return d_vector.kind != PairingKind::Custom ||
         d_vector.custom.reality_violation() <= kRealTol;
}

Vec3d h_qwz(const Momentum& k, double mu, double t, double beta) {
  return {beta * std::sin(k.kx), beta * std::sin(k.ky),
          mu - t * std::cos(k.kx) - t * std::cos(k.ky)};
}

Vec3d h_sticlet(const Momentum& k, double alpha, double t) {
  return {alpha * std::cos(k.kx), alpha * std::cos(k.ky), t * std::cos(k.kx + k.ky)};
}

Vec3d normal_vector(const ModelSpec& spec, const Momentum& k) {
  return std::visit(
      [&](const auto& ns) -> Vec3d {
        using T = std::decay_t<decltype(ns)>;
        if constexpr (std::is_same_v<T, Qwz>) {
          return h_qwz(k, ns.mu, ns.t, ns.beta);
        } else if constexpr (std::is_same_v<T, Sticlet>) {
          return h_sticlet(k, ns.alpha, ns.t);
        } else {
          return ns.evaluate(k).real();
        }
      },
      spec.normal_state);
}

Vec3c pairing_vector(const ModelSpec& spec, const Momentum& k) {
  switch (spec.d_vector.kind) {
    case PairingKind::Zero: return Vec3c::Zero();
    case PairingKind::EqualToH: return normal_vector(spec, k).cast<cplx>();
    case PairingKind::Custom: return spec.d_vector.custom.evaluate(k);
  }
  return Vec3c::Zero();
}

Mat4c assemble_bdg(const ModelSpec& spec, const Momentum& k) {
  spec.validate();
  const Mat2c id = pauli(0);
  const Mat2c hn = spec.h0 * id + pauli_dot(normal_vector(spec, k));
  const Mat2c delta =
      cplx(0, spec.delta0) * (spec.d0 * id + pauli_dot(pairing_vector(spec, k))) * pauli(2);

  Mat4c h;
  h.topLeftCorner<2, 2>() = hn;
  h.topRightCorner<2, 2>() = delta;
  h.bottomLeftCorner<2, 2>() = delta.adjoint();
  h.bottomRightCorner<2, 2>() = -hn.transpose();
  if (spec.hprime_enabled) h += spec.delta0 * tau_sigma(1, 0);
  return h;
}

std::pair<Vec3d, Vec3d> block_vectors(const ModelSpec& spec, const Momentum& k) {
  if (spec.hprime_enabled)
    throw BlockDecompositionUnavailable("H' term breaks the tau_y ⊗ sigma_y symmetry");
  if (spec.h0 != 0.0 || spec.d0 != 0.0)
    throw BlockDecompositionUnavailable("scalar h0/d0 terms are not block diagonal");
  const Vec3c d = pairing_vector(spec, k);
  if (d.imag().cwiseAbs().maxCoeff() > kRealTol)
    throw BlockDecompositionUnavailable("complex pairing vector");
  const Vec3d h = normal_vector(spec, k);
  const Vec3d scaled = spec.delta0 * d.real();
  return {h + scaled, h - scaled};
}

std::pair<Mat2c, Mat2c> block_decompose(const ModelSpec& spec, const Momentum& k) {
  const auto [plus, minus] = block_vectors(spec, k);
  return {pauli_dot(plus), pauli_dot(minus)};
}

int model_range(const ModelSpec& spec) {
  const int normal = std::visit(
      [](const auto& ns) {
        if constexpr (std::is_same_v<std::decay_t<decltype(ns)>, FourierVector>) return ns.range();
        else return 1;
      },
      spec.normal_state);
  const int pairing = spec.d_vector.kind == PairingKind::Custom ? spec.d_vector.custom.range() : 0;
  return std::max(normal, pairing);
}

Mat4c charge_conjugation() { return tau_sigma(2, 0); }

}  // namespace oee
