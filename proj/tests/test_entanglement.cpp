#include "doctest.h"
#include "support.hpp"

#include "oee/entanglement.hpp"

#include <numeric>

using namespace oee;

namespace {

SpectrumSeries synthetic(int samples, const std::function<std::vector<double>(double)>& bands) {
  SpectrumSeries s;
  for (int i = 0; i < samples; ++i) {
    SpectrumPoint pt;
    pt.k = -pi + 2.0 * pi * i / samples;
    auto v = bands(pt.k);
    std::sort(v.begin(), v.end());
    pt.values = Eigen::Map<VecXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    pt.degeneracy.assign(v.size(), 1);
    s.points.push_back(pt);
  }
  return s;
}

// A ladder of levels 0.5 + (ky/2pi + n)/10 flowing upward by one spacing per period.
std::vector<double> ladder(double k, int direction) {
  std::vector<double> v;
  for (int n = -6; n <= 6; ++n) v.push_back(0.5 + direction * (k / (2.0 * pi) + n) / 10.0 + 1e-3);
  return v;
}

}  // namespace

TEST_CASE("chiral counting of synthetic spectral flow") {
  const auto up = synthetic(101, [](double k) { return ladder(k, 1); });
  const auto c = count_chiral_modes(up, ChiralCountOptions::plain());
  CHECK(c.net_crossings == 1);
  CHECK(c.total_crossings == 1);
  const auto down = synthetic(101, [](double k) { return ladder(k, -1); });
  CHECK(count_chiral_modes(down, ChiralCountOptions::plain()).net_crossings == -1);

  // A band that rises through the level and falls back has no net flow.
  const auto arc = synthetic(101, [](double k) { return std::vector<double>{0.5 + 0.3 * std::cos(k)}; });
  const auto a = count_chiral_modes(arc, ChiralCountOptions::plain());
  CHECK(a.net_crossings == 0);
  CHECK(a.total_crossings == 2);

  // Two counter-propagating modes.
  const auto pair = synthetic(101, [](double k) {
    auto v = ladder(k, 1);
    const auto w = ladder(k + 1.5, -1);
    v.insert(v.end(), w.begin(), w.end());
    return v;
  });
  const auto p = count_chiral_modes(pair, ChiralCountOptions::plain());
  CHECK(p.net_crossings == 0);
  CHECK(p.total_crossings == 2);
}

TEST_CASE("coarse sampling of a steep crossing is reported as ambiguous") {
  const auto steep = synthetic(9, [](double k) { return std::vector<double>{0.5 + 0.1 * std::tanh(20.0 * std::sin(k))}; });
  CHECK_THROWS_AS(count_chiral_modes(steep, ChiralCountOptions::plain()), TrackingAmbiguous);
  const auto refined = count_chiral_modes_refined(
      [](int n) { return synthetic(n, [](double k) { return std::vector<double>{0.5 + 0.1 * std::tanh(20.0 * std::sin(k))}; }); },
      9, ChiralCountOptions::plain(), 6);
  CHECK(refined.net_crossings == 0);
  CHECK(refined.total_crossings == 2);
}

TEST_CASE("cut specifications") {
  const auto cyl = CutSpec::standard(CutGeometry::Cylinder, 20);
  CHECK(cyl.begin == 0);
  CHECK(cyl.resolved_end(20) == 10);
  CHECK(cyl.begin_edge(20) == EdgeTag::Real);
  CHECK(cyl.end_edge(20) == EdgeTag::Virtual);
  const auto torus = CutSpec::standard(CutGeometry::Torus, 20);
  CHECK(torus.begin_edge(20) == EdgeTag::Virtual);
  CHECK(torus.end_edge(20) == EdgeTag::Virtual);
  CutSpec bad;
  bad.begin = 0;
  bad.end = 20;
  CHECK_THROWS_AS(bad.validate(20), ConfigError);
}

TEST_CASE("OEPT of a correlation matrix preserves its trace") {
  std::mt19937_64 rng(1);
  const auto rep = SpinRepresentation::standard();
  MatXc c = MatXc::Zero(12, 12);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c.block<4, 4>(4 * i, 4 * j) = test::random_hermitian(rng);
  c = 0.5 * (c + c.adjoint()).eval();
  const MatXc r = oept_blocks(c, rep.U, OeesDiagonal::Projector);
  CHECK(std::abs(r.trace() - c.trace()) < 1e-12);
  CHECK(hermiticity_error(r) < 1e-12);
  const MatXc u = oept_blocks(c, rep.U, OeesDiagonal::UnitSite);
  CHECK(std::abs(u.trace() - 3.0) < 1e-12);
  CHECK(oees_midpoint(OeesDiagonal::Projector) == 1.0);
  CHECK(oees_midpoint(OeesDiagonal::UnitSite) == 0.5);
}

TEST_CASE("entanglement spectra lie in their ranges and are complementary") {
  const auto spec = test::preset_model("fig3");
  const int nx = 24;
  EntanglementOptions opts;
  const auto a = entanglement_spectra(spec, nx, 9, CutSpec::standard(CutGeometry::Cylinder, nx), opts);
  CutSpec rest;
  rest.begin = nx / 2;
  rest.end = nx;
  const auto b = entanglement_spectra(spec, nx, 9, rest, opts);
  for (std::size_t i = 0; i < a.plain.size(); ++i) {
    const VecXd& xa = a.plain.points[i].values;
    const VecXd& xb = b.plain.points[i].values;
    CHECK(xa.minCoeff() > -1e-10);
    CHECK(xa.maxCoeff() < 1.0 + 1e-10);
    CHECK(a.enriched.points[i].values.minCoeff() > -1e-10);
    CHECK(a.enriched.points[i].values.maxCoeff() < 2.0 + 1e-10);
    // Pure ground state: the complement has the spectrum 1 - xi.
    CHECK((xb - (VecXd::Ones(xa.size()) - xa).reverse()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(a.plain.points[i].values.sum() - a.enriched.points[i].values.sum()) < 1e-9);
  }
}

TEST_CASE("small cylinders reproduce the entanglement mode counts") {
  EntanglementOptions opts;
  const int nx = 40;
  const auto cut = CutSpec::standard(CutGeometry::Cylinder, nx);
  const auto qwz = entanglement_spectra(test::preset_model("fig2_qwz"), nx, 81, cut, opts);
  CHECK(count_chiral_modes(qwz.plain, ChiralCountOptions::plain()).net_crossings == 2);
  CHECK(count_chiral_modes(qwz.enriched, ChiralCountOptions::enriched()).net_crossings == 1);

  const auto fig3 = entanglement_spectra(test::preset_model("fig3"), nx, 81, cut, opts);
  const auto enriched = ChiralCountOptions::enriched();
  CHECK(count_chiral_modes(fig3.plain, ChiralCountOptions::plain()).net_crossings == 0);
  const auto rep = real_edge_anomaly_detect(fig3.enriched, cut, nx, enriched);
  CHECK(rep.virtual_edge.flow.net_crossings == 1);
  CHECK(rep.real.flow.net_crossings == -1);
  CHECK(rep.real_edge_state_present);
}

TEST_CASE("torus suite on a small system") {
  const int nx = 40;
  const auto suite =
      torus_suite(test::preset_model("fig3"), nx, 61, CutSpec::standard(CutGeometry::Torus, nx), EntanglementOptions{});
  for (const auto& pt : suite.full.points)
    for (Eigen::Index i = 0; i < pt.values.size(); ++i)
      CHECK(std::min(std::abs(pt.values(i)), std::abs(pt.values(i) - 1.0)) < 1e-8);
  CHECK(count_chiral_modes_by_end(suite.cut, ChiralCountOptions::plain()).net() == 0);
  CHECK(count_chiral_modes(suite.enriched_full, ChiralCountOptions::enriched()).net_crossings == 0);
  const auto d = count_chiral_modes_by_end(suite.enriched_cut, ChiralCountOptions::enriched());
  CHECK(d.total() == 2);
  CHECK(d.net() == 0);
}
