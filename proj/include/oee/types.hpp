#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace oee {

using cplx = std::complex<double>;

template <typename Scalar> using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar> using Mat4 = Eigen::Matrix<Scalar, 4, 4>;
template <typename Scalar> using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

using Mat2c = Mat2<cplx>;
using Mat4c = Mat4<cplx>;
using Vec3d = Vec3<double>;
using Vec3c = Vec3<cplx>;
using MatXc = Eigen::MatrixXcd;
using VecXd = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;

/// Wraps an angle into [-pi, pi).
inline double wrap_momentum(double k) {
  double r = std::fmod(k + pi, 2.0 * pi);
  if (r < 0) r += 2.0 * pi;
  return r - pi;
}

struct Momentum {
  double kx = 0.0;
  double ky = 0.0;

  Momentum() = default;
  Momentum(double x, double y) : kx(wrap_momentum(x)), ky(wrap_momentum(y)) {}
};

// Error hierarchy. Numerical/physical failures derive from NumericalError so
// the CLI can map them onto a single exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class GapClosure : public NumericalError {
 public:
  GapClosure(const Momentum& k, double gap)
      : NumericalError("gap closure at k=(" + std::to_string(k.kx) + ", " +
                       std::to_string(k.ky) + "), gap=" + std::to_string(gap)),
        k_(k), gap_(gap) {}
  explicit GapClosure(const std::string& what) : NumericalError(what) {}

  const Momentum& momentum() const { return k_; }
  double gap() const { return gap_; }

 private:
  Momentum k_;
  double gap_ = 0.0;
};

class SingularSpin : public NumericalError {
 public:
  SingularSpin(const Momentum& k, double norm)
      : NumericalError("spin expectation vanishes at k=(" + std::to_string(k.kx) + ", " +
                       std::to_string(k.ky) + "), |S|=" + std::to_string(norm)),
        k_(k) {}
  const Momentum& momentum() const { return k_; }

 private:
  Momentum k_;
};

class SingularTriangle : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BlockDecompositionUnavailable : public Error {
 public:
  using Error::Error;
};

class RangeTooSmall : public Error {
 public:
  using Error::Error;
};

class TrackingAmbiguous : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A model specification that cannot produce a Hermitian Bloch Hamiltonian.
class InvalidModel : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Where an eigenvector of a cut subsystem lives.
enum class EdgeTag : int { None, Bulk, Real, Virtual };

inline const char* to_string(EdgeTag t) {
  switch (t) {
    case EdgeTag::Bulk: return "bulk";
    case EdgeTag::Real: return "real";
    case EdgeTag::Virtual: return "virtual";
    default: return "none";
  }
}

/// Layer weight of an eigenvector near the two ends of a cut subsystem.
struct EdgeWeights {
  double begin_quarter = 0.0;  // outer quarter of the layers at the low-index end
  double end_quarter = 0.0;
  double begin_depth = 0.0;    // first `edge_depth` layers
  double end_depth = 0.0;
};

/// One momentum sample of a spectrum computation.
struct SpectrumPoint {
  double k = 0.0;
  VecXd values;                    // ascending
  std::vector<int> degeneracy;     // optional, one per value
  std::vector<EdgeTag> edge_tag;   // optional, one per value
  std::vector<EdgeWeights> weights;  // optional, one per value
};

/// Ordered (momentum, sorted eigenvalues) pairs.
struct SpectrumSeries {
  std::vector<SpectrumPoint> points;

  std::size_t size() const { return points.size(); }
  bool tagged() const { return !points.empty() && !points.front().edge_tag.empty(); }
};

template <typename Derived>
double hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace oee
